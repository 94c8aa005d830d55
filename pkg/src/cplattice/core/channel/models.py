from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator

from .exceptions import DimensionMismatchException, ChannelException
from ..shared.models import ComplexMatrix
from ..qubit.models import KingRuskaiForm


class KrausSet(BaseModel):
    """Operators {A_j} of a map in Kraus form Φ(X) = Σ A_j* X A_j.

    Attributes:
        n: Dimension of the matrix algebra M_n
        ops: Non-empty list of n×n complex matrices
    """

    n: PositiveInt
    ops: List[ComplexMatrix]

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_operators(self) -> "KrausSet":
        if not self.ops:
            raise ChannelException("A Kraus set needs at least one operator")
        for op in self.ops:
            if op.shape != (self.n, self.n):
                raise DimensionMismatchException((self.n, self.n), op.shape, "Kraus operator")
        return self


class ChoiMatrix(BaseModel):
    """Choi matrix S = [Φ(E_kj)] of a linear map on M_n.

    Index convention: matrix[(k-1)·n + a, (j-1)·n + b] = Φ(E_kj)[a, b] with 1-based k, j, a, b.
    Hermiticity is not required here; deciding positivity is the job of the lattice test.
    """

    n: PositiveInt
    matrix: ComplexMatrix

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_shape(self) -> "ChoiMatrix":
        size = self.n * self.n
        if self.matrix.shape != (size, size):
            raise DimensionMismatchException((size, size), self.matrix.shape, "Choi matrix")
        return self

    @classmethod
    def from_matrix(cls, matrix) -> "ChoiMatrix":
        m = np.asarray(matrix)
        size = m.shape[0] if m.ndim == 2 else 0
        n = int(round(np.sqrt(size)))
        if n < 1 or n * n != size:
            raise DimensionMismatchException((n * n, n * n), m.shape, "Choi matrix")
        return cls(n=n, matrix=m)

    def blocks(self) -> np.ndarray:
        """View as a 4-index array indexed [k, a, j, b] (0-based)."""
        n = self.n
        return self.matrix.reshape(n, n, n, n)

    def block(self, k: int, j: int) -> np.ndarray:
        """Φ(E_kj) for 1-based k, j."""
        return self.blocks()[k - 1, :, j - 1, :]


class KrausChannelSpec(BaseModel):
    kind: Literal["kraus"] = "kraus"
    kraus: KrausSet

    model_config = ConfigDict(frozen=True)


class ChoiChannelSpec(BaseModel):
    kind: Literal["choi"] = "choi"
    choi: ChoiMatrix

    model_config = ConfigDict(frozen=True)


class PauliTransferChannelSpec(BaseModel):
    kind: Literal["pauli_transfer"] = "pauli_transfer"
    form: KingRuskaiForm

    model_config = ConfigDict(frozen=True)

    @property
    def n(self) -> int:
        return 2


ChannelSpec = Annotated[
    Union[KrausChannelSpec, ChoiChannelSpec, PauliTransferChannelSpec],
    Field(discriminator="kind"),
]
