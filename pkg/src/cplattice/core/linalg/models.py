import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..shared.models import ComplexMatrix


class SpectralDecomposition(BaseModel):
    """Eigen-decomposition V·diag(λ)·V* of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues sorted in descending order
        eigenvectors: Matrix whose columns are the matching orthonormal eigenvectors
    """

    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def coerce_eigenvalues(cls, value) -> np.ndarray:
        eigenvalues = np.array(value, dtype=np.float64).reshape(-1)
        eigenvalues.setflags(write=False)
        return eigenvalues

    @model_validator(mode="after")
    def check_values(self) -> "SpectralDecomposition":
        if self.eigenvectors.shape != (self.eigenvalues.size, self.eigenvalues.size):
            raise ValueError("Eigenvector matrix must be square with one column per eigenvalue")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValueError("Eigenvalues must be sorted in descending order")
        return self

    @property
    def dimension(self) -> int:
        return int(self.eigenvalues.size)

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T

    def rank(self, cutoff: float) -> int:
        """Number of eigenvalues above cutoff·λ_max."""
        if self.dimension == 0 or self.eigenvalues[0] <= 0:
            return 0
        return int(np.count_nonzero(self.eigenvalues > cutoff * self.eigenvalues[0]))
