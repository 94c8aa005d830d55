import asyncio
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from opentelemetry import trace

from .exceptions import BatchConfigurationException
from .models import BatchItemResult, batch_exit_code
from ..channel.channel import choi_from_spec
from ..channel.exceptions import ChannelException
from ..documents.documents import parse_channel_document
from ..documents.exceptions import DocumentException
from ..documents.models import PauliTransferDocument, ViolationDocument
from ..lattice.exceptions import LatticeException
from ..lattice.lattice import cp_test
from ..lattice.models import CpVerdict
from ..linalg.exceptions import LinalgException
from ..qubit.exceptions import QubitException
from ..qubit.models import KingRuskaiForm
from ..qubit.qubit import eight_inequalities_batch, eight_inequalities_cp
from ..shared.config import DEFAULT_PINV_CUTOFF, DEFAULT_TOLERANCE
from ..shared.tracing import resolve_tracer, fail_span

T = TypeVar("T", bound="BatchRunner")

DEFAULT_CHUNK_SIZE = 4096

# pydantic's ValidationError and JSON decoding errors are ValueErrors
MALFORMED_INPUT_ERRORS = (
    ValueError,
    DocumentException,
    ChannelException,
    QubitException,
    LatticeException,
    LinalgException,
)


def _describe(e: Exception) -> str:
    return f"{type(e).__name__}: {' '.join(str(e).split())}"


def _item(line: int, verdict: CpVerdict) -> BatchItemResult:
    violation = None if verdict.violation is None else ViolationDocument.from_violation(verdict.violation)
    return BatchItemResult(line=line, cp=verdict.is_cp, violation=violation)


def evaluate_chunk(
    chunk: Sequence[Tuple[int, str]],
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
) -> List[BatchItemResult]:
    """
    Verdicts for numbered input lines, in input order.

    Qubit maps given by their Pauli transfer form go through the vectorized closed-form kernel; only those
    found not CP are re-run one by one to locate their violation. Everything else goes through cp_test.
    """
    results: Dict[int, BatchItemResult] = {}
    qubit: List[Tuple[int, int, KingRuskaiForm]] = []
    for position, (line, text) in enumerate(chunk):
        try:
            document = parse_channel_document(text)
            if isinstance(document, PauliTransferDocument):
                qubit.append((position, line, document.to_form()))
                continue
            verdict = cp_test(choi_from_spec(document.to_spec()), tol=tol, cutoff=cutoff)
            results[position] = _item(line, verdict)
        except MALFORMED_INPUT_ERRORS as e:
            results[position] = BatchItemResult(line=line, error=_describe(e))

    if qubit:
        t = np.array([form.t for _, _, form in qubit])
        lam = np.array([form.lam for _, _, form in qubit])
        verdicts = eight_inequalities_batch(t, lam, tol=tol, cutoff=cutoff)
        for (position, line, form), is_cp in zip(qubit, verdicts):
            if is_cp:
                results[position] = BatchItemResult(line=line, cp=True)
            else:
                results[position] = _item(line, eight_inequalities_cp(form, tol=tol, cutoff=cutoff))
    return [results[position] for position in range(len(chunk))]


class BatchRunner:
    """
    Evaluates a stream of channel documents, one JSON document per line.

    Lines are split into chunks; with more than one worker the chunks run in a process pool, otherwise inline.
    Results always come back in input order, so the output does not depend on the number of workers.
    Blank lines are skipped but still count for line numbers.

    Attributes:
        tolerance: Tolerance of the lattice test
        workers: Number of worker processes
        chunk_size: Number of lines per chunk
        cutoff: Pseudo-inverse cutoff
        _tracer: OpenTelemetry tracer for instrumentation
    """

    def __init__(
        self,
        tolerance: float,
        workers: int,
        chunk_size: int,
        cutoff: float,
        tracer: trace.Tracer,
        _from_create: bool = False,
    ):
        if not _from_create:
            raise TypeError("Use BatchRunner.create() instead to create a new batch runner")
        self.tolerance = tolerance
        self.workers = workers
        self.chunk_size = chunk_size
        self.cutoff = cutoff
        self._tracer = tracer

    @classmethod
    def create(
        cls: Type[T],
        tolerance: float = DEFAULT_TOLERANCE,
        workers: int = 1,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        cutoff: float = DEFAULT_PINV_CUTOFF,
        tracer: Optional[trace.Tracer] = None,
    ) -> T:
        """
        Raises:
            BatchConfigurationException: If workers or chunk_size is not positive, or the tolerance is negative
        """
        if workers < 1 or chunk_size < 1:
            raise BatchConfigurationException(f"workers and chunk_size must be positive, got {workers}, {chunk_size}")
        if not tolerance >= 0:
            raise BatchConfigurationException(f"tolerance must be non-negative, got {tolerance}")
        return cls(tolerance, workers, chunk_size, cutoff, resolve_tracer(tracer), _from_create=True)

    def _chunks(self, lines: Sequence[str]) -> List[List[Tuple[int, str]]]:
        numbered = [(line, text) for line, text in enumerate(lines, start=1) if text.strip()]
        return [numbered[i : i + self.chunk_size] for i in range(0, len(numbered), self.chunk_size)]

    async def run(self, lines: Sequence[str]) -> List[BatchItemResult]:
        with self._tracer.start_as_current_span("batch_runner.run") as span:
            chunks = self._chunks(lines)
            span.set_attribute("number_of_chunks", len(chunks))
            span.set_attribute("workers", self.workers)
            span.set_attribute("tolerance", self.tolerance)
            try:
                if self.workers == 1:
                    evaluated = [evaluate_chunk(chunk, self.tolerance, self.cutoff) for chunk in chunks]
                else:
                    loop = asyncio.get_running_loop()
                    with ProcessPoolExecutor(max_workers=self.workers) as pool:
                        evaluated = await asyncio.gather(
                            *(
                                loop.run_in_executor(pool, evaluate_chunk, chunk, self.tolerance, self.cutoff)
                                for chunk in chunks
                            )
                        )
            except Exception as e:
                fail_span(span, e)
                raise
            results = [item for chunk in evaluated for item in chunk]
            span.set_attribute("number_of_items", len(results))
            span.set_attribute("number_not_cp", sum(r.cp is False for r in results))
            span.set_attribute("number_malformed", sum(r.is_malformed for r in results))
            span.set_attribute("exit_code", batch_exit_code(results))
            span.set_status(trace.Status(trace.StatusCode.OK))
            return results
