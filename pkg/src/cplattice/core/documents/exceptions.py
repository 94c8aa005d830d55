from typing import Tuple


class DocumentException(Exception):
    pass


class PayloadShapeException(DocumentException):
    """
    This exception represents the case where a matrix in a document does not have the size its n implies.
    """

    def __init__(self, expected: Tuple[int, int], actual: Tuple[int, ...], what: str):
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        self.what = what

    def __str__(self):
        return f"{self.what} should be {self.expected[0]}x{self.expected[1]}, got {'x'.join(map(str, self.actual))}"


class DuplicateParameterException(DocumentException):
    def __init__(self, k: int, j: int):
        self.k = k
        self.j = j

    def __str__(self):
        return f"Parameter ({self.k}, {self.j}) appears more than once"


class MissingParamsException(DocumentException):
    pass
