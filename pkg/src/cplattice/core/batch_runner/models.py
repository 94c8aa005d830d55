from typing import List, Optional

from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from ..documents.models import ViolationDocument


class BatchItemResult(BaseModel):
    """Verdict for one input line of a batch, or the reason the line could not be read.

    Attributes:
        line: 1-based line number in the input
        cp: Verdict, None when the line was malformed
        violation: First violation for a non-CP verdict
        error: Diagnostic for a malformed line
    """

    line: PositiveInt
    cp: Optional[bool] = None
    violation: Optional[ViolationDocument] = None
    error: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "BatchItemResult":
        if (self.error is None) == (self.cp is None):
            raise ValueError("A batch item has either a verdict or an error")
        if self.cp is False and self.violation is None:
            raise ValueError("A non-CP batch item carries its violation")
        return self

    @property
    def is_malformed(self) -> bool:
        return self.error is not None


def batch_exit_code(results: List[BatchItemResult]) -> int:
    """2 if any line was malformed, else 1 if any map is not CP, else 0."""
    if any(r.is_malformed for r in results):
        return 2
    if any(r.cp is False for r in results):
        return 1
    return 0
