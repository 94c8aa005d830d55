import asyncio
import json

import numpy as np
import pytest

from .batch_runner import BatchRunner, evaluate_chunk
from .exceptions import BatchConfigurationException
from .models import BatchItemResult, batch_exit_code
from ..documents.models import ChoiDocument
from ..lattice.lattice import random_cp
from ..qubit.models import KingRuskaiForm
from ..qubit.qubit import eight_inequalities_cp

IDENTITY_KRAUS_LINE = '{"kind": "kraus", "n": 2, "kraus": [[[1, 0], [0, 1]]]}'
NON_CP_QUBIT_LINE = '{"kind": "pauli_transfer", "t": [0, 0, 0], "lambda": [-0.5, -0.5, -0.5]}'
TRUNCATED_LINE = '{"kind": "choi", "n": 2, "choi": [[1'


def qubit_line(t, lam) -> str:
    return json.dumps({"kind": "pauli_transfer", "t": list(t), "lambda": list(lam)})


def test_direct_construction_is_forbidden():
    with pytest.raises(TypeError):
        BatchRunner(1e-10, 1, 10, 1e-12, None)


@pytest.mark.parametrize("workers, chunk_size", [(0, 10), (1, 0), (-2, 5)])
def test_invalid_configuration(workers, chunk_size):
    with pytest.raises(BatchConfigurationException):
        BatchRunner.create(workers=workers, chunk_size=chunk_size)


def test_mixed_batch_keeps_input_order():
    random_line = ChoiDocument.from_choi(random_cp(2, seed=11)).model_dump_json()
    lines = [IDENTITY_KRAUS_LINE, NON_CP_QUBIT_LINE, "", TRUNCATED_LINE, random_line]
    results = asyncio.run(BatchRunner.create().run(lines))

    assert [r.line for r in results] == [1, 2, 4, 5]
    assert results[0].cp is True
    assert results[1].cp is False
    assert results[1].violation.kind.value == "ParameterExceedsDisk"
    assert results[1].violation.location == [1, 4]
    assert results[2].is_malformed
    assert results[2].cp is None
    assert results[3].cp is True
    assert batch_exit_code(results) == 2


def test_qubit_batch_matches_scalar_verdicts():
    rng = np.random.default_rng(77)
    draws = rng.uniform(-1.5, 1.5, size=(300, 6))
    lines = [qubit_line(row[:3], row[3:]) for row in draws]
    results = evaluate_chunk(list(enumerate(lines, start=1)))
    for row, result in zip(draws, results):
        verdict = eight_inequalities_cp(KingRuskaiForm(t=tuple(row[:3]), lam=tuple(row[3:])))
        assert result.cp == verdict.is_cp
        if not verdict.is_cp:
            assert result.violation.kind == verdict.violation.kind
            assert tuple(result.violation.location) == verdict.violation.location


def test_results_do_not_depend_on_parallelism():
    rng = np.random.default_rng(78)
    lines = [qubit_line(row[:3], row[3:]) for row in rng.uniform(-1.2, 1.2, size=(200, 6))]
    lines += [ChoiDocument.from_choi(random_cp(2, seed=seed)).model_dump_json() for seed in range(20)]
    lines.append(TRUNCATED_LINE)

    inline = asyncio.run(BatchRunner.create(workers=1).run(lines))
    pooled = asyncio.run(BatchRunner.create(workers=2, chunk_size=37).run(lines))
    assert inline == pooled
    assert [r.line for r in pooled] == list(range(1, len(lines) + 1))


def test_empty_batch():
    results = asyncio.run(BatchRunner.create().run([]))
    assert results == []
    assert batch_exit_code(results) == 0


def test_exit_code_for_non_cp_batch():
    results = asyncio.run(BatchRunner.create().run([IDENTITY_KRAUS_LINE, NON_CP_QUBIT_LINE]))
    assert batch_exit_code(results) == 1


def test_item_needs_verdict_or_error():
    with pytest.raises(ValueError):
        BatchItemResult(line=1)
    with pytest.raises(ValueError):
        BatchItemResult(line=1, cp=True, error="both")
