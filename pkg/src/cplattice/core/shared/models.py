from typing import Annotated, Any

import numpy as np
from pydantic import BeforeValidator

from .exceptions import MatrixShapeException, NonFiniteEntryException


def as_complex_matrix(value: Any) -> np.ndarray:
    """Coerce nested sequences or arrays into a read-only complex128 matrix.

    Every matrix in the package (Choi matrices, Kraus operators, density matrices) passes
    through this function at the API boundary, so downstream code can rely on a finite,
    non-empty, 2-D array that nobody mutates in place.

    Args:
        value: Nested sequence or numpy array

    Returns:
        np.ndarray: Read-only complex128 array

    Raises:
        MatrixShapeException: If the value is not a non-empty 2-D matrix
        NonFiniteEntryException: If any entry is NaN or Inf
    """
    try:
        matrix = np.array(value, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise MatrixShapeException(f"Could not interpret value as a complex matrix: {e}") from e
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise MatrixShapeException(f"Expected a non-empty 2-D matrix, got shape {matrix.shape}")
    finite = np.isfinite(matrix)
    if not finite.all():
        raise NonFiniteEntryException(int(matrix.size - finite.sum()))
    matrix.setflags(write=False)
    return matrix


ComplexMatrix = Annotated[np.ndarray, BeforeValidator(as_complex_matrix)]


def frobenius_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def is_square(matrix: np.ndarray) -> bool:
    return matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1]


def scaled_tolerance(tol: float, scale: float) -> float:
    """Absolute tolerance for raw-matrix comparisons: tol relative to max(1, scale)."""
    return tol * max(1.0, float(scale))
