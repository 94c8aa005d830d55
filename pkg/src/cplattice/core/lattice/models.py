from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeFloat, PositiveInt, model_validator

from .exceptions import InvariantViolationException, UndefinedParameterException
from .violation import Violation

# Active off-diagonal parameters may exceed the unit circle by at most this much
PARAMETER_SLACK = 1e-12


def traversal_order(size: int) -> List[Tuple[int, int]]:
    """Off-diagonal index pairs by increasing gap j - k, then increasing k (1-based)."""
    return [(k, k + gap) for gap in range(1, size) for k in range(1, size - gap + 1)]


def traversal_position(size: int, k: int, j: int) -> int:
    gap = j - k
    return (gap - 1) * size - (gap - 1) * gap // 2 + (k - 1)


class OffEntry(BaseModel):
    k: PositiveInt
    j: PositiveInt
    value: complex = 0j
    active: bool = True

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "OffEntry":
        if self.k >= self.j:
            raise ValueError(f"Off-diagonal entry needs k < j, got ({self.k}, {self.j})")
        if not self.active and self.value != 0:
            raise ValueError(f"Inactive entry ({self.k}, {self.j}) must carry value 0")
        return self


class SchurParams(BaseModel):
    """Schur parameters Γ of an N×N positive semi-definite matrix.

    Attributes:
        N: Matrix size
        diag: Γ_kk = S_kk, non-negative
        off: One entry per 1 ≤ k < j ≤ N in traversal order (gap, then k)
    """

    N: PositiveInt
    diag: Tuple[float, ...]
    off: Tuple[OffEntry, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "SchurParams":
        if len(self.diag) != self.N:
            raise InvariantViolationException(f"Expected {self.N} diagonal entries, got {len(self.diag)}")
        for k, d in enumerate(self.diag, start=1):
            if not d >= 0.0:
                raise InvariantViolationException(f"Γ_{k},{k} = {d} is negative")
        order = traversal_order(self.N)
        if [(e.k, e.j) for e in self.off] != order:
            raise InvariantViolationException("Off-diagonal entries must cover every k < j in traversal order")
        for e in self.off:
            if e.active and abs(e.value) > 1.0 + PARAMETER_SLACK:
                raise InvariantViolationException(
                    f"|Γ_{e.k},{e.j}| = {abs(e.value):.6g} lies outside the closed unit disk"
                )
        return self

    @classmethod
    def from_entries(cls, diag, entries: Dict[Tuple[int, int], Tuple[complex, bool]]) -> "SchurParams":
        """Build from a {(k, j): (value, active)} mapping in any order."""
        size = len(diag)
        missing = [pair for pair in traversal_order(size) if pair not in entries]
        if missing or len(entries) != size * (size - 1) // 2:
            raise InvariantViolationException(f"Off-diagonal table is incomplete or oversized (missing {missing[:3]})")
        off = [
            OffEntry(k=k, j=j, value=entries[(k, j)][0], active=entries[(k, j)][1]) for k, j in traversal_order(size)
        ]
        return cls(N=size, diag=tuple(diag), off=tuple(off))

    def entry(self, k: int, j: int) -> OffEntry:
        if not 1 <= k < j <= self.N:
            raise UndefinedParameterException(k, j)
        return self.off[traversal_position(self.N, k, j)]

    def value(self, k: int, j: int) -> complex:
        return self.entry(k, j).value

    def active_entries(self) -> List[OffEntry]:
        return [e for e in self.off if e.active]

    def to_table(self) -> np.ndarray:
        """Dense upper-triangular table: Γ_kk on the diagonal, Γ_kj above it, NaN for inactive entries."""
        table = np.zeros((self.N, self.N), dtype=np.complex128)
        table[np.diag_indices(self.N)] = self.diag
        for e in self.off:
            table[e.k - 1, e.j - 1] = e.value if e.active else np.nan
        return table


class CpVerdict(BaseModel):
    is_cp: bool
    params: Optional[SchurParams] = None
    violation: Optional[Violation] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "CpVerdict":
        if self.is_cp and (self.params is None or self.violation is not None):
            raise ValueError("A CP verdict carries params and no violation")
        if not self.is_cp and (self.violation is None or self.params is not None):
            raise ValueError("A non-CP verdict carries a violation and no params")
        return self


class DiskGeometry(BaseModel):
    """Disk containing a normalized entry S̃_kj, given everything of smaller gap."""

    center: complex
    radius: NonNegativeFloat

    model_config = ConfigDict(frozen=True)
