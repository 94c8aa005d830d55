"""Hermitian eigen-decomposition, PSD oracle and PSD pseudo-inverse built on cyclic complex Jacobi rotations."""

from typing import Tuple

import numpy as np

from .exceptions import NotHermitianException, NotSquareException, NegativeEigenvalueBeyondToleranceException
from .models import SpectralDecomposition
from ..shared.config import DEFAULT_PINV_CUTOFF, DEFAULT_TOLERANCE
from ..shared.models import as_complex_matrix, frobenius_norm, is_square, scaled_tolerance

HERMITIAN_TOLERANCE = 1e-12
JACOBI_TOLERANCE = 1e-14
JACOBI_MAX_SWEEPS = 100
EPSILON = float(np.finfo(np.float64).eps)
# beyond this t ≈ 1/(2θ) and θ² would overflow
LARGE_THETA = 1e150


def check_hermitian(matrix, tol: float = HERMITIAN_TOLERANCE) -> np.ndarray:
    """
    Validate that matrix is square and Hermitian within tol·‖M‖_F.

    Returns:
        np.ndarray: The matrix as a read-only complex array

    Raises:
        NotSquareException: If the matrix is not square
        NotHermitianException: If max |M - M*| exceeds the tolerance
    """
    m = as_complex_matrix(matrix)
    if not is_square(m):
        raise NotSquareException(m.shape)
    asymmetry = float(np.max(np.abs(m - m.conj().T)))
    if asymmetry > tol * frobenius_norm(m):
        raise NotHermitianException(asymmetry)
    return m


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int, floor: float) -> None:
    """Annihilate a[p, q] with a unitary plane rotation, updating a and v in place.

    Pivots at or below floor, or negligible against both diagonal entries, are set to zero without rotating.
    """
    apq = complex(a[p, q])
    magnitude = abs(apq)
    app = float(a[p, p].real)
    aqq = float(a[q, q].real)
    if magnitude <= floor or magnitude <= EPSILON * np.sqrt(abs(app * aqq)):
        a[p, q] = 0.0
        a[q, p] = 0.0
        return
    phase = apq / magnitude
    theta = (aqq - app) / (2.0 * magnitude)
    if abs(theta) > LARGE_THETA:
        t = 0.5 / theta
    else:
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    rotation = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=np.complex128)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ rotation
    a[idx, :] = rotation.conj().T @ a[idx, :]
    v[:, idx] = v[:, idx] @ rotation
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def jacobi_eigenpairs(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unsorted eigenvalues and eigenvectors of a matrix already known to be Hermitian.

    Sweeps over every (p, q) pair with p < q until the off-diagonal Frobenius norm falls below
    1e-14·‖M‖_F or 100 sweeps have run.
    """
    n = m.shape[0]
    a = np.array((m + m.conj().T) / 2.0, dtype=np.complex128)
    v = np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(a))
    threshold = JACOBI_TOLERANCE * norm
    floor = EPSILON * norm / max(n, 1)
    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_diagonal_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, floor)
    return np.real(np.diag(a)).copy(), v


def eig_hermitian(matrix) -> SpectralDecomposition:
    """
    Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Args:
        matrix: Square Hermitian matrix

    Returns:
        SpectralDecomposition: Eigenvalues in descending order with orthonormal eigenvectors

    Raises:
        NotSquareException: If the matrix is not square
        NotHermitianException: If the matrix is not Hermitian within 1e-12·‖M‖_F
    """
    m = check_hermitian(matrix)
    eigenvalues, vectors = jacobi_eigenpairs(m)
    order = np.argsort(-eigenvalues, kind="stable")
    return SpectralDecomposition(eigenvalues=eigenvalues[order], eigenvectors=vectors[:, order])


def min_eigenvalue(matrix) -> float:
    return float(np.min(jacobi_eigenpairs(check_hermitian(matrix))[0]))


def is_psd_oracle(matrix, tol: float = DEFAULT_TOLERANCE) -> bool:
    """
    Reference PSD decision: min eigenvalue ≥ -tol·max(1, ‖M‖_F).

    Raises:
        NotSquareException: If the matrix is not square
        NotHermitianException: If the matrix is not Hermitian
    """
    m = check_hermitian(matrix)
    return min_eigenvalue(m) >= -scaled_tolerance(tol, frobenius_norm(m))


def pinv_psd(matrix, cutoff: float = DEFAULT_PINV_CUTOFF, tol: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Moore-Penrose pseudo-inverse of a PSD matrix through its spectral decomposition.

    Eigenvalues at or below cutoff·λ_max count as zero.

    Raises:
        NotSquareException: If the matrix is not square
        NotHermitianException: If the matrix is not Hermitian
        NegativeEigenvalueBeyondToleranceException: If an eigenvalue is below -tol·max(1, ‖M‖_F)
    """
    return hermitian_pinv_psd(check_hermitian(matrix), cutoff=cutoff, tol=tol)


def hermitian_pinv_psd(
    m: np.ndarray, cutoff: float = DEFAULT_PINV_CUTOFF, tol: float = DEFAULT_TOLERANCE
) -> np.ndarray:
    """pinv_psd for a complex array the caller already holds exactly Hermitian; skips input validation."""
    n = m.shape[0]
    if n == 1:
        value = float(m[0, 0].real)
        if value < -scaled_tolerance(tol, abs(value)):
            raise NegativeEigenvalueBeyondToleranceException(value)
        return np.array([[1.0 / value if value > 0 else 0.0]], dtype=np.complex128)
    eigenvalues, vectors = jacobi_eigenpairs(m)
    largest = float(np.max(eigenvalues))
    smallest = float(np.min(eigenvalues))
    if smallest < -scaled_tolerance(tol, float(np.linalg.norm(m))):
        raise NegativeEigenvalueBeyondToleranceException(smallest)
    if largest <= 0:
        return np.zeros((n, n), dtype=np.complex128)
    keep = eigenvalues > cutoff * largest
    kept = vectors[:, keep]
    result = (kept / eigenvalues[keep]) @ kept.conj().T
    return (result + result.conj().T) / 2.0

