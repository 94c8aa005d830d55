from typing import Tuple


class LinalgException(Exception):
    pass


class NotSquareException(LinalgException):
    shape: Tuple[int, ...]

    def __init__(self, shape: Tuple[int, ...]):
        self.shape = tuple(shape)

    def __str__(self):
        return f"Expected a square matrix, got shape {self.shape}"


class NotHermitianException(LinalgException):
    """
    This exception represents the case where a matrix differs from its conjugate transpose by more than the
    tolerance. Inputs are never symmetrized silently, so callers see the largest offending difference.
    """

    max_asymmetry: float

    def __init__(self, max_asymmetry: float):
        self.max_asymmetry = float(max_asymmetry)

    def __str__(self):
        return f"Matrix is not Hermitian: max |M - M*| = {self.max_asymmetry:.3e}"


class NegativeEigenvalueBeyondToleranceException(LinalgException):
    eigenvalue: float

    def __init__(self, eigenvalue: float):
        self.eigenvalue = float(eigenvalue)

    def __str__(self):
        return f"Matrix is not positive semi-definite: eigenvalue {self.eigenvalue:.3e} is below tolerance"
