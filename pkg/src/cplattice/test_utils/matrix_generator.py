from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


class MatrixCriteria(BaseModel):
    """Criteria for generating random matrices"""

    dimension: int
    seed: Optional[int] = None
    scale_range: tuple[float, float] = (0.5, 2.0)
    # Magnitude of the most negative eigenvalue of indefinite samples, relative to the spectral scale
    negativity_range: tuple[float, float] = (0.05, 1.0)

    model_config = ConfigDict(frozen=True)


class MatrixGenerator:
    """Generates randomized complex matrices for testing"""

    def __init__(self, criteria: MatrixCriteria):
        self.criteria = criteria
        self.rng = np.random.default_rng(criteria.seed)

    def gaussian(self, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
        rows = rows or self.criteria.dimension
        cols = cols or rows
        return (self.rng.standard_normal((rows, cols)) + 1j * self.rng.standard_normal((rows, cols))) / np.sqrt(2)

    def hermitian(self) -> np.ndarray:
        g = self.gaussian()
        return (g + g.conj().T) / 2

    def psd(self) -> np.ndarray:
        """Full-rank PSD matrix G·G*, rescaled to a random trace."""
        return self.low_rank_psd(self.criteria.dimension)

    def low_rank_psd(self, rank: int) -> np.ndarray:
        """PSD matrix G·G* with G of shape dimension×rank, rescaled to a random trace."""
        g = self.gaussian(self.criteria.dimension, rank)
        m = g @ g.conj().T
        low, high = self.criteria.scale_range
        m = m * (self.rng.uniform(low, high) * self.criteria.dimension / np.trace(m).real)
        return (m + m.conj().T) / 2

    def perturbed(self, rank: int, offset: float) -> np.ndarray:
        """
        Rank-deficient PSD matrix plus offset·max(1, λ_max)·v·v* for a unit v in its null space.

        A small positive offset sits just inside the PSD cone, a negative one just outside it.
        """
        n = self.criteria.dimension
        if not 1 <= rank < n:
            raise ValueError(f"rank must lie in [1, {n - 1}], got {rank}")
        g = self.gaussian(n, rank)
        q, _ = np.linalg.qr(np.hstack([g, self.gaussian(n, 1)]))
        v = q[:, rank]
        m = g @ g.conj().T
        scale = max(1.0, float(np.linalg.eigvalsh(m)[-1]))
        m = m + offset * scale * np.outer(v, v.conj())
        return (m + m.conj().T) / 2

    def indefinite(self) -> np.ndarray:
        """PSD matrix with one eigenvalue pushed to a clearly negative value."""
        m = self.psd()
        eigenvalues, vectors = np.linalg.eigh(m)
        low, high = self.criteria.negativity_range
        eigenvalues[0] = -self.rng.uniform(low, high) * max(1.0, eigenvalues[-1])
        m = (vectors * eigenvalues) @ vectors.conj().T
        return (m + m.conj().T) / 2

    def unitary(self) -> np.ndarray:
        q, r = np.linalg.qr(self.gaussian())
        d = np.diag(r)
        return q * (d / np.abs(d))

    def kraus_set(self, count: int, trace_preserving: bool = False) -> List[np.ndarray]:
        n = self.criteria.dimension
        operators = [self.gaussian(n, n) for _ in range(count)]
        if trace_preserving:
            # Σ A A* = I for the Heisenberg-picture form Φ(X) = Σ A* X A
            total = sum(a @ a.conj().T for a in operators)
            eigenvalues, vectors = np.linalg.eigh(total)
            inverse_root = (vectors / np.sqrt(eigenvalues)) @ vectors.conj().T
            operators = [inverse_root @ a for a in operators]
        return operators

    def density(self) -> np.ndarray:
        m = self.psd()
        return m / np.trace(m).real
