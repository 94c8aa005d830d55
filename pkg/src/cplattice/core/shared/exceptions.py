class SharedModelException(Exception):
    pass


class MatrixShapeException(SharedModelException):
    """
    This exception represents the case where a value cannot be read as a non-empty 2-D matrix.
    """

    pass


class NonFiniteEntryException(SharedModelException):
    count: int

    def __init__(self, count: int):
        self.count = count

    def __str__(self):
        return f"Matrix contains {self.count} non-finite entries (NaN or Inf)"


class ConfigurationException(SharedModelException):
    pass
