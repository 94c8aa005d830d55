from typing import Optional, Tuple

from .violation import Violation, ViolationKind


class LatticeException(Exception):
    pass


class OutsideUnitDiskException(LatticeException):
    def __init__(self, value: complex):
        self.value = complex(value)

    def __str__(self):
        return f"|γ| = {abs(self.value):.6g} exceeds 1"


class IntermediateBlockNotPSDException(LatticeException):
    """A Schur complement over the intermediate block of (k, j) came out clearly negative."""

    def __init__(self, k: int, j: int, value: float):
        self.k = k
        self.j = j
        self.value = float(value)

    def __str__(self):
        return f"Schur complement {self.value:.3e} at ({self.k}, {self.j}) is negative"


class UndefinedParameterException(LatticeException):
    def __init__(self, k: int, j: int):
        self.k = k
        self.j = j

    def __str__(self):
        return f"Parameter Γ_{self.k},{self.j} is not defined"


class InvariantViolationException(LatticeException):
    pass


class CpViolationException(LatticeException):
    """
    Base class for the ways a matrix fails the lattice test. Each instance carries the Violation
    that cp_test reports.
    """

    kind: ViolationKind

    def __init__(self, location: Tuple[int, ...], magnitude: float, value: Optional[complex] = None):
        self.violation = Violation(kind=self.kind, location=tuple(location), magnitude=float(magnitude), value=value)

    def __str__(self):
        v = self.violation
        return f"{v.kind.value} at {list(v.location)} (magnitude {v.magnitude:.6g})"


class NegativeDiagonalException(CpViolationException):
    kind = ViolationKind.NEGATIVE_DIAGONAL


class NonzeroRowAtZeroDiagonalException(CpViolationException):
    kind = ViolationKind.NONZERO_ROW_AT_ZERO_DIAGONAL


class ParameterExceedsDiskException(CpViolationException):
    kind = ViolationKind.PARAMETER_EXCEEDS_DISK


class CompatibilityResidualException(CpViolationException):
    kind = ViolationKind.COMPATIBILITY_RESIDUAL


class NonHermitianInputException(CpViolationException):
    kind = ViolationKind.NOT_HERMITIAN
