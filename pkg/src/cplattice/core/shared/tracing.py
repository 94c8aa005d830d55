from typing import Optional

from opentelemetry import trace


def resolve_tracer(tracer: Optional[trace.Tracer]) -> trace.Tracer:
    return tracer if tracer is not None else trace.NoOpTracer()


def fail_span(span: trace.Span, e: BaseException) -> None:
    span.set_status(trace.Status(trace.StatusCode.ERROR))
    span.record_exception(e)
