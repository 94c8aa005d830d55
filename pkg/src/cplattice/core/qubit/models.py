from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, FiniteFloat

from .exceptions import NonRealParameterException, ParameterCountException


class DegenerateCase(str, Enum):
    NONE = "None"
    ZERO_DIAGONAL = "ZeroDiagonal"
    GAMMA23_BOUNDARY = "Gamma23Boundary"
    GAMMA13_OR_GAMMA24_BOUNDARY = "Gamma13OrGamma24Boundary"


def _real_triple(name: str, value) -> Tuple[float, float, float]:
    values = list(value)
    if len(values) != 3:
        raise ParameterCountException(name, len(values))
    result = []
    for v in values:
        if isinstance(v, complex) or np.iscomplexobj(v):
            if np.imag(v) != 0:
                raise NonRealParameterException(name, v)
            v = np.real(v)
        if isinstance(v, bool) or not isinstance(v, (int, float, np.integer, np.floating)):
            raise NonRealParameterException(name, v)
        if not np.isfinite(v):
            raise NonRealParameterException(name, v)
        result.append(float(v))
    return (result[0], result[1], result[2])


class KingRuskaiForm(BaseModel):
    """Canonical qubit map Φ(I) = I + t·σ, Φ(σ_i) = λ_i σ_i (after unitary reduction).

    Attributes:
        t: Translation vector (t1, t2, t3), real
        lam: Diagonal contraction (λ1, λ2, λ3), real
    """

    t: Tuple[FiniteFloat, FiniteFloat, FiniteFloat]
    lam: Tuple[FiniteFloat, FiniteFloat, FiniteFloat] = Field(alias="lambda")

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("t", mode="before")
    @classmethod
    def check_t(cls, value):
        return _real_triple("t", value)

    @field_validator("lam", mode="before")
    @classmethod
    def check_lam(cls, value):
        return _real_triple("lambda", value)

    @classmethod
    def depolarizing(cls, lam: float) -> "KingRuskaiForm":
        return cls(t=(0.0, 0.0, 0.0), lam=(lam, lam, lam))


class QubitClosedFormParams(BaseModel):
    """Schur parameters of 2·S_Φ̂ computed by closed form.

    Off-diagonal values are None when the parameter is undefined on the degenerate branch
    (its disk has zero radius).
    """

    gamma_diag: Tuple[float, float, float, float]
    gamma_23: Optional[complex] = None
    gamma_13: Optional[complex] = None
    gamma_24: Optional[complex] = None
    gamma_14: Optional[complex] = None
    degenerate_case: DegenerateCase = DegenerateCase.NONE
    # first zero diagonal index (1-based) for the ZeroDiagonal case
    degenerate_index: Optional[int] = None

    model_config = ConfigDict(frozen=True)

    def off_diagonal(self) -> dict:
        return {
            (2, 3): self.gamma_23,
            (1, 3): self.gamma_13,
            (2, 4): self.gamma_24,
            (1, 4): self.gamma_14,
        }
