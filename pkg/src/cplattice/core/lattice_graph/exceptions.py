class LatticeGraphException(Exception):
    pass


class InvalidLatticeSizeException(LatticeGraphException):
    def __init__(self, size: int):
        self.size = size

    def __str__(self):
        return f"A lattice needs at least 2 rows, got N = {self.size}"


class DimensionMismatchException(LatticeGraphException):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual

    def __str__(self):
        return f"Parameters are for N = {self.actual} but the lattice has N = {self.expected}"


class MalformedLatticeException(LatticeGraphException):
    pass
