from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, FiniteFloat, PositiveInt, model_validator

from .exceptions import PayloadShapeException, DuplicateParameterException
from ..channel.models import (
    ChoiChannelSpec,
    ChoiMatrix,
    KrausChannelSpec,
    KrausSet,
    PauliTransferChannelSpec,
)
from ..lattice.models import CpVerdict, SchurParams
from ..lattice.violation import Violation, ViolationKind
from ..qubit.models import DegenerateCase, KingRuskaiForm, QubitClosedFormParams


def _complex_pair(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value), 0.0)
    return value


# [re, im]; a bare real number is accepted on input, NaN and Inf are not
JsonComplex = Annotated[Tuple[FiniteFloat, FiniteFloat], BeforeValidator(_complex_pair)]
JsonMatrix = List[List[JsonComplex]]


def complex_to_json(value: complex) -> Tuple[float, float]:
    value = complex(value)
    return (float(value.real), float(value.imag))


def matrix_to_json(matrix: np.ndarray) -> List[List[Tuple[float, float]]]:
    return [[complex_to_json(x) for x in row] for row in np.asarray(matrix)]


def json_to_matrix(rows: JsonMatrix) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def _check_shape(rows: JsonMatrix, size: int, what: str) -> None:
    widths = {len(row) for row in rows}
    if len(rows) != size or widths != {size}:
        actual = (len(rows), max(widths) if widths else 0)
        raise PayloadShapeException((size, size), actual, what)


class KrausDocument(BaseModel):
    kind: Literal["kraus"] = "kraus"
    n: PositiveInt
    kraus: List[JsonMatrix] = Field(min_length=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_dimensions(self) -> "KrausDocument":
        for op in self.kraus:
            _check_shape(op, self.n, "Kraus operator")
        return self

    def to_spec(self) -> KrausChannelSpec:
        return KrausChannelSpec(kraus=KrausSet(n=self.n, ops=[json_to_matrix(op) for op in self.kraus]))


class ChoiDocument(BaseModel):
    kind: Literal["choi"] = "choi"
    n: PositiveInt
    choi: JsonMatrix

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_dimensions(self) -> "ChoiDocument":
        _check_shape(self.choi, self.n * self.n, "Choi matrix")
        return self

    @classmethod
    def from_choi(cls, choi: ChoiMatrix) -> "ChoiDocument":
        return cls(n=choi.n, choi=matrix_to_json(choi.matrix))

    def to_spec(self) -> ChoiChannelSpec:
        return ChoiChannelSpec(choi=ChoiMatrix(n=self.n, matrix=json_to_matrix(self.choi)))


class PauliTransferDocument(BaseModel):
    kind: Literal["pauli_transfer"] = "pauli_transfer"
    n: Literal[2] = 2
    t: Tuple[FiniteFloat, FiniteFloat, FiniteFloat]
    lam: Tuple[FiniteFloat, FiniteFloat, FiniteFloat] = Field(alias="lambda")

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    def to_form(self) -> KingRuskaiForm:
        return KingRuskaiForm(t=self.t, lam=self.lam)

    def to_spec(self) -> PauliTransferChannelSpec:
        return PauliTransferChannelSpec(form=self.to_form())


ChannelDocument = Annotated[
    Union[KrausDocument, ChoiDocument, PauliTransferDocument],
    Field(discriminator="kind"),
]


class OffEntryDocument(BaseModel):
    k: PositiveInt
    j: PositiveInt
    re: FiniteFloat
    im: FiniteFloat
    active: bool

    model_config = ConfigDict(frozen=True)


class ParamsDocument(BaseModel):
    """Schur parameters as JSON: Γ_kk in diag, one off entry per k < j (1-based)."""

    diag: List[FiniteFloat]
    off: List[OffEntryDocument]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "ParamsDocument":
        seen = set()
        for e in self.off:
            if (e.k, e.j) in seen:
                raise DuplicateParameterException(e.k, e.j)
            seen.add((e.k, e.j))
        return self

    @classmethod
    def from_schur_params(cls, params: SchurParams) -> "ParamsDocument":
        off = [
            OffEntryDocument(k=e.k, j=e.j, re=float(e.value.real), im=float(e.value.imag), active=e.active)
            for e in params.off
        ]
        return cls(diag=list(params.diag), off=off)

    def to_schur_params(self) -> SchurParams:
        """
        Raises:
            InvariantViolationException: If the table is incomplete or a parameter lies outside the unit disk
        """
        entries = {(e.k, e.j): (complex(e.re, e.im), e.active) for e in self.off}
        return SchurParams.from_entries(self.diag, entries)


class ViolationDocument(BaseModel):
    kind: ViolationKind
    location: List[PositiveInt]
    magnitude: float
    value: Optional[JsonComplex] = None

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_violation(cls, violation: Violation) -> "ViolationDocument":
        value = None if violation.value is None else complex_to_json(violation.value)
        return cls(
            kind=violation.kind,
            location=list(violation.location),
            magnitude=violation.magnitude,
            value=value,
        )


class MetadataDocument(BaseModel):
    tool_version: str
    tolerance: float
    input_digest: str

    model_config = ConfigDict(frozen=True)


class QubitDocument(BaseModel):
    """Closed-form Schur parameters of 2·S_Φ̂; undefined parameters are null."""

    mode: Literal["closed-form", "general", "both"]
    gamma_diag: List[float]
    gamma_23: Optional[JsonComplex] = None
    gamma_13: Optional[JsonComplex] = None
    gamma_24: Optional[JsonComplex] = None
    gamma_14: Optional[JsonComplex] = None
    degenerate_case: DegenerateCase
    degenerate_index: Optional[PositiveInt] = None

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_closed_form(
        cls, params: QubitClosedFormParams, mode: Literal["closed-form", "general", "both"]
    ) -> "QubitDocument":
        def pair(value: Optional[complex]):
            return None if value is None else complex_to_json(value)

        return cls(
            mode=mode,
            gamma_diag=list(params.gamma_diag),
            gamma_23=pair(params.gamma_23),
            gamma_13=pair(params.gamma_13),
            gamma_24=pair(params.gamma_24),
            gamma_14=pair(params.gamma_14),
            degenerate_case=params.degenerate_case,
            degenerate_index=params.degenerate_index,
        )


class ResultDocument(BaseModel):
    """
    Verdict of one complete-positivity test.

    A CP result carries no violation; a non-CP result carries a violation and no params.
    """

    cp: bool
    violation: Optional[ViolationDocument] = None
    params: Optional[ParamsDocument] = None
    metadata: MetadataDocument
    qubit: Optional[QubitDocument] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "ResultDocument":
        if self.cp and self.violation is not None:
            raise ValueError("A CP result cannot carry a violation")
        if not self.cp and (self.violation is None or self.params is not None):
            raise ValueError("A non-CP result carries a violation and no params")
        return self

    @classmethod
    def from_verdict(
        cls,
        verdict: CpVerdict,
        metadata: MetadataDocument,
        include_params: bool = True,
        qubit: Optional[QubitDocument] = None,
    ) -> "ResultDocument":
        violation = None if verdict.violation is None else ViolationDocument.from_violation(verdict.violation)
        params = None
        if include_params and verdict.params is not None:
            params = ParamsDocument.from_schur_params(verdict.params)
        return cls(cp=verdict.is_cp, violation=violation, params=params, metadata=metadata, qubit=qubit)


