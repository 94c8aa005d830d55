import argparse
import asyncio
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor
from pydantic_core import to_json

from .. import __version__
from .exceptions import CliException, ConsistencyException
from ..core.batch_runner.batch_runner import BatchRunner
from ..core.batch_runner.exceptions import BatchRunnerException
from ..core.batch_runner.models import BatchItemResult, batch_exit_code
from ..core.channel.channel import choi_from_spec
from ..core.channel.exceptions import ChannelException
from ..core.channel.models import ChoiMatrix
from ..core.documents.documents import (
    CHANNEL_DOCUMENT_ADAPTER,
    input_digest,
    parse_channel_document,
    parse_params_document,
)
from ..core.documents.exceptions import DocumentException
from ..core.documents.models import ChoiDocument, MetadataDocument, ParamsDocument, QubitDocument, ResultDocument
from ..core.lattice.exceptions import LatticeException
from ..core.lattice.lattice import cp_test, lattice_test, matrix_from_schur_params, random_cp
from ..core.lattice.models import CpVerdict
from ..core.lattice_graph.exceptions import LatticeGraphException
from ..core.lattice_graph.lattice_graph import build_lattice_graph, emit_dot
from ..core.linalg.exceptions import LinalgException
from ..core.qubit.exceptions import QubitException
from ..core.qubit.models import KingRuskaiForm
from ..core.qubit.qubit import analysis_matrix, closed_form_params, eight_inequalities_cp
from ..core.shared.config import LatticeSettings
from ..core.shared.exceptions import ConfigurationException
from ..core.shared.tracing import fail_span

PROGRAM = "cplattice"

EXIT_CP = 0
EXIT_NOT_CP = 1
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3

# pydantic's ValidationError and JSON decoding errors are ValueErrors. Documents reject NaN and Inf while parsing,
# so a SharedModelException is an internal failure
INVALID_INPUT_ERRORS = (
    ValueError,
    OSError,
    CliException,
    DocumentException,
    ChannelException,
    QubitException,
    LatticeException,
    LatticeGraphException,
    LinalgException,
    BatchRunnerException,
)

TRIPLE_OPTIONS = ("--t", "--lambda")


def _triple(text: str) -> Tuple[float, float, float]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return values


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite "--lambda -0.5,-0.5,-0.5" as "--lambda=-0.5,-0.5,-0.5" so argparse does not read it as a flag."""
    joined: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in TRIPLE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        joined.append(token)
        i += 1
    return joined


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROGRAM,
        description="Complete positivity of linear maps on matrix algebras via Schur parameters.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    test_cp = commands.add_parser("test-cp", help="Decide complete positivity of a channel document")
    test_cp.add_argument("input", nargs="?", default="-", help="Channel document (default: stdin)")
    test_cp.add_argument("--tol", type=float, default=None, help="Tolerance (default: CP_LATTICE_TOL or 1e-10)")
    test_cp.add_argument("--batch", type=Path, default=None, help="File with one channel document per line")
    test_cp.add_argument("--workers", type=int, default=None, help="Worker processes for --batch")

    params = commands.add_parser("params", help="Schur parameters of a CP channel document")
    params.add_argument("input", nargs="?", default="-", help="Channel document (default: stdin)")
    params.add_argument("--tol", type=float, default=None)

    reconstruct = commands.add_parser("reconstruct", help="Choi document from Schur parameters")
    reconstruct.add_argument("input", nargs="?", default="-", help="Params or result document (default: stdin)")
    reconstruct.add_argument("--tol", type=float, default=None)

    qubit = commands.add_parser("qubit", help="Complete positivity of a qubit map in King-Ruskai form")
    qubit.add_argument("--t", type=_triple, required=True, help="t1,t2,t3")
    qubit.add_argument("--lambda", dest="lam", type=_triple, required=True, help="l1,l2,l3")
    qubit.add_argument("--mode", choices=("closed-form", "general", "both"), default="closed-form")
    qubit.add_argument("--tol", type=float, default=None)

    lattice_dot = commands.add_parser("lattice-dot", help="DOT rendering of the N x N lattice")
    lattice_dot.add_argument("--n", type=int, required=True, help="Matrix size N")
    lattice_dot.add_argument("--params", default=None, help="Params or result document used to annotate rotations")

    random_choi = commands.add_parser("random", help="Deterministic random CP Choi document")
    random_choi.add_argument("--n", type=int, required=True, help="Dimension n of the matrix algebra")
    random_choi.add_argument("--seed", type=int, required=True)

    schema = commands.add_parser("schema", help="JSON Schema of a document type")
    schema.add_argument("name", choices=("channel", "result", "params", "batch"))
    return parser


def _tracer(settings: LatticeSettings) -> trace.Tracer:
    if settings.trace_exporter == "console":
        provider = TracerProvider()
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter(out=sys.stderr)))
        return provider.get_tracer(PROGRAM, __version__)
    return trace.NoOpTracer()


def _read_input(source: Optional[str]) -> bytes:
    if source is None or source == "-":
        return sys.stdin.buffer.read()
    return Path(source).read_bytes()


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    sys.stdout.flush()


def _metadata(settings: LatticeSettings, digest: str) -> MetadataDocument:
    return MetadataDocument(tool_version=__version__, tolerance=settings.tolerance, input_digest=digest)


def _verdict_exit_code(verdict: CpVerdict) -> int:
    return EXIT_CP if verdict.is_cp else EXIT_NOT_CP


def _channel_verdict(
    args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer
) -> Tuple[CpVerdict, str]:
    data = _read_input(args.input)
    document = parse_channel_document(data)
    choi = choi_from_spec(document.to_spec(), tracer=tracer)
    verdict = cp_test(choi, tol=settings.tolerance, cutoff=settings.pinv_cutoff, tracer=tracer)
    return verdict, input_digest(data)


def cmd_test_cp(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    if args.batch is not None:
        lines = args.batch.read_text().splitlines()
        runner = BatchRunner.create(
            tolerance=settings.tolerance, workers=settings.workers, cutoff=settings.pinv_cutoff, tracer=tracer
        )
        results: List[BatchItemResult] = asyncio.run(runner.run(lines))
        for result in results:
            _emit(result.model_dump_json())
        return batch_exit_code(results)

    verdict, digest = _channel_verdict(args, settings, tracer)
    result = ResultDocument.from_verdict(verdict, _metadata(settings, digest), include_params=False)
    _emit(result.model_dump_json(by_alias=True))
    return _verdict_exit_code(verdict)


def cmd_params(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    verdict, digest = _channel_verdict(args, settings, tracer)
    result = ResultDocument.from_verdict(verdict, _metadata(settings, digest))
    _emit(result.model_dump_json(by_alias=True))
    return _verdict_exit_code(verdict)


def cmd_reconstruct(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    params = parse_params_document(_read_input(args.input)).to_schur_params()
    matrix = matrix_from_schur_params(params, tol=settings.tolerance, cutoff=settings.pinv_cutoff, tracer=tracer)
    _emit(ChoiDocument.from_choi(ChoiMatrix.from_matrix(matrix)).model_dump_json())
    return EXIT_CP


def _same_verdict(first: CpVerdict, second: CpVerdict) -> bool:
    if first.is_cp != second.is_cp:
        return False
    if first.is_cp:
        return True
    return first.violation.kind == second.violation.kind and first.violation.location == second.violation.location


def cmd_qubit(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    form = KingRuskaiForm(t=args.t, lam=args.lam)
    tol, cutoff = settings.tolerance, settings.pinv_cutoff
    qubit = None
    if args.mode == "general":
        verdict = lattice_test(analysis_matrix(form), tol=tol, cutoff=cutoff, tracer=tracer)
    else:
        verdict = eight_inequalities_cp(form, tol=tol, cutoff=cutoff, tracer=tracer)
        qubit = QubitDocument.from_closed_form(closed_form_params(form, tol=tol, cutoff=cutoff), args.mode)
    if args.mode == "both":
        general = lattice_test(analysis_matrix(form), tol=tol, cutoff=cutoff, tracer=tracer)
        if not _same_verdict(verdict, general):
            raise ConsistencyException(
                f"closed form says cp={verdict.is_cp}, lattice test says cp={general.is_cp} "
                f"for t={list(form.t)}, lambda={list(form.lam)}"
            )
    digest = input_digest(form.model_dump_json(by_alias=True) + f" mode={args.mode}")
    result = ResultDocument.from_verdict(verdict, _metadata(settings, digest), qubit=qubit)
    _emit(result.model_dump_json(by_alias=True))
    return _verdict_exit_code(verdict)


def cmd_lattice_dot(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    params = None
    if args.params is not None:
        params = parse_params_document(_read_input(args.params)).to_schur_params()
    graph = build_lattice_graph(args.n, tracer=tracer)
    _emit(emit_dot(graph, params, tracer=tracer))
    return EXIT_CP


def cmd_random(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    choi = random_cp(args.n, args.seed, tracer=tracer)
    _emit(ChoiDocument.from_choi(choi).model_dump_json())
    return EXIT_CP


def json_schemas() -> Dict[str, dict]:
    return {
        "channel": CHANNEL_DOCUMENT_ADAPTER.json_schema(by_alias=True),
        "result": ResultDocument.model_json_schema(by_alias=True),
        "params": ParamsDocument.model_json_schema(),
        "batch": BatchItemResult.model_json_schema(),
    }


def cmd_schema(args: argparse.Namespace, settings: LatticeSettings, tracer: trace.Tracer) -> int:
    _emit(to_json(json_schemas()[args.name], indent=2).decode())
    return EXIT_CP


COMMANDS: Dict[str, Callable[[argparse.Namespace, LatticeSettings, trace.Tracer], int]] = {
    "test-cp": cmd_test_cp,
    "params": cmd_params,
    "reconstruct": cmd_reconstruct,
    "qubit": cmd_qubit,
    "lattice-dot": cmd_lattice_dot,
    "random": cmd_random,
    "schema": cmd_schema,
}


def _error(message: str) -> None:
    sys.stderr.write(f"{PROGRAM}: error: {' '.join(message.split())}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand and return its exit code.

    Exit codes: 0 CP or success, 1 not CP, 2 malformed input or invalid parameters, 3 internal-consistency
    failure or unexpected error. stdout carries exactly one JSON document, DOT text, or one JSON line per batch
    item; diagnostics and telemetry go to stderr.
    """
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID_INPUT

    try:
        settings = LatticeSettings.from_env().with_overrides(
            tolerance=getattr(args, "tol", None), workers=getattr(args, "workers", None)
        )
    except ConfigurationException as e:
        _error(str(e))
        return EXIT_INVALID_INPUT

    tracer = _tracer(settings)
    with tracer.start_as_current_span(f"cli.{args.command.replace('-', '_')}") as span:
        span.set_attribute("tolerance", settings.tolerance)
        try:
            code = COMMANDS[args.command](args, settings, tracer)
        except ConsistencyException as e:
            fail_span(span, e)
            _error(f"internal consistency failure: {e}")
            return EXIT_INTERNAL
        except INVALID_INPUT_ERRORS as e:
            fail_span(span, e)
            _error(f"{type(e).__name__}: {e}")
            return EXIT_INVALID_INPUT
        except Exception as e:
            fail_span(span, e)
            _error(f"internal: {type(e).__name__}: {e}")
            return EXIT_INTERNAL
        span.set_attribute("exit_code", code)
        span.set_status(trace.Status(trace.StatusCode.OK))
        return code
