from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict


class ViolationKind(str, Enum):
    NEGATIVE_DIAGONAL = "NegativeDiagonal"
    NONZERO_ROW_AT_ZERO_DIAGONAL = "NonzeroRowAtZeroDiagonal"
    PARAMETER_EXCEEDS_DISK = "ParameterExceedsDisk"
    COMPATIBILITY_RESIDUAL = "CompatibilityResidual"
    NOT_HERMITIAN = "NotHermitian"


class Violation(BaseModel):
    """First failure found by the lattice test.

    Attributes:
        kind: What failed
        location: 1-based row index (k,) or entry (k, j)
        magnitude: Size of the offending quantity (|Γ_kj|, |residual|, max asymmetry, ...)
        value: Offending complex parameter for ParameterExceedsDisk
    """

    kind: ViolationKind
    location: Tuple[int, ...]
    magnitude: float
    value: Optional[complex] = None

    model_config = ConfigDict(frozen=True)
