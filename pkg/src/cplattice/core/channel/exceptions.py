from typing import Optional, Tuple


class ChannelException(Exception):
    pass


class DimensionMismatchException(ChannelException):
    expected: Tuple[int, ...]
    actual: Tuple[int, ...]

    def __init__(self, expected: Tuple[int, ...], actual: Tuple[int, ...], what: str = "matrix"):
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        self.what = what

    def __str__(self):
        return f"Expected {self.what} of shape {self.expected}, got {self.actual}"


class NotPSDException(ChannelException):
    """
    Raised when a Choi matrix is required to be positive semi-definite (Kraus extraction) and is not.
    min_eigenvalue is None when the matrix already failed the Hermiticity check.
    """

    min_eigenvalue: Optional[float]

    def __init__(self, min_eigenvalue: Optional[float] = None):
        self.min_eigenvalue = min_eigenvalue

    def __str__(self):
        if self.min_eigenvalue is None:
            return "Choi matrix is not Hermitian, so it has no Kraus representation"
        return f"Choi matrix is not positive semi-definite (min eigenvalue {self.min_eigenvalue:.3e})"


class NotUnitaryException(ChannelException):
    deviation: float

    def __init__(self, deviation: float, name: str = "U"):
        self.deviation = float(deviation)
        self.name = name

    def __str__(self):
        return f"{self.name} is not unitary: max |{self.name}*{self.name} - I| = {self.deviation:.3e}"


class InvalidMixtureWeightException(ChannelException):
    def __init__(self, alpha: float):
        self.alpha = alpha

    def __str__(self):
        return f"Mixture weight must lie in [0, 1], got {self.alpha}"
