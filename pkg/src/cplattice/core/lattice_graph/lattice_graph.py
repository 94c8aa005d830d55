from typing import List, Optional

from opentelemetry import trace

from .exceptions import InvalidLatticeSizeException, DimensionMismatchException
from .models import LatticeGraph, LatticeNode, LatticeEdge, NodeKind, Port
from ..lattice.models import SchurParams
from ..shared.tracing import resolve_tracer, fail_span

PORT_CONVENTION = (
    "Rotation ports: in-top from Rotation(k, j-1) or Scaler(k); in-bottom from Rotation(k+1, j) or Scaler(j); "
    "out-top to Rotation(k, j+1); out-bottom to Rotation(k-1, j). "
    "Top-in to top-out is taken as the transmitted path (convention)."
)


def scaler_id(k: int) -> str:
    return f"S{k}"


def rotation_id(k: int, j: int) -> str:
    return f"U{k}_{j}"


def _pair(k: int, j: int, size: int) -> str:
    return f"{k}{j}" if size < 10 else f"{k},{j}"


def build_lattice_graph(size: int, tracer: Optional[trace.Tracer] = None) -> LatticeGraph:
    """
    Cascade network of N scalers Γ_kk^{1/2} and N(N-1)/2 rotations U(Γ_kj).

    Rotation(k, j) receives on its top port from Rotation(k, j-1), or from Scaler(k) when j = k+1, and on its
    bottom port from Rotation(k+1, j), or from Scaler(j) when k+1 = j. Outputs of the last column and
    the first row stay open.

    Raises:
        InvalidLatticeSizeException: If N < 2
    """
    with resolve_tracer(tracer).start_as_current_span("lattice_graph.build_lattice_graph") as span:
        span.set_attribute("N", size)
        if size < 2:
            e = InvalidLatticeSizeException(size)
            fail_span(span, e)
            raise e
        nodes: List[LatticeNode] = []
        edges: List[LatticeEdge] = []
        for k in range(1, size + 1):
            nodes.append(
                LatticeNode(id=scaler_id(k), kind=NodeKind.SCALER, k=k, label=f"Γ_{_pair(k, k, size)}^{{1/2}}")
            )
            edges.append(LatticeEdge(target=scaler_id(k)))
        for gap in range(1, size):
            for k in range(1, size - gap + 1):
                j = k + gap
                node_id = rotation_id(k, j)
                nodes.append(
                    LatticeNode(id=node_id, kind=NodeKind.ROTATION, k=k, j=j, label=f"U(Γ_{_pair(k, j, size)})")
                )
                if gap == 1:
                    edges.append(LatticeEdge(source=scaler_id(k), target=node_id, target_port=Port.TOP))
                    edges.append(LatticeEdge(source=scaler_id(j), target=node_id, target_port=Port.BOTTOM))
                else:
                    edges.append(
                        LatticeEdge(
                            source=rotation_id(k, j - 1), target=node_id, source_port=Port.TOP, target_port=Port.TOP
                        )
                    )
                    edges.append(
                        LatticeEdge(
                            source=rotation_id(k + 1, j),
                            target=node_id,
                            source_port=Port.BOTTOM,
                            target_port=Port.BOTTOM,
                        )
                    )
                if j == size:
                    edges.append(LatticeEdge(source=node_id, source_port=Port.TOP))
                if k == 1:
                    edges.append(LatticeEdge(source=node_id, source_port=Port.BOTTOM))
        graph = LatticeGraph(N=size, nodes=tuple(nodes), edges=tuple(edges))
        try:
            graph.check_structure()
        except Exception as e:
            fail_span(span, e)
            raise
        span.set_attribute("number_of_nodes", len(nodes))
        span.set_attribute("number_of_edges", len(edges))
        span.set_status(trace.Status(trace.StatusCode.OK))
        return graph


def format_parameter(value: complex) -> str:
    """Six significant digits; the imaginary part is shown only when it is nonzero."""
    value = complex(value)
    if abs(value.imag) <= 1e-12:
        return f"{value.real:#.6g}"
    return f"{value.real:#.6g}{value.imag:+#.6g}i"


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def emit_dot(graph: LatticeGraph, params: Optional[SchurParams] = None, tracer: Optional[trace.Tracer] = None) -> str:
    """
    Render the lattice as a DOT digraph.

    Rotations are ranked by gap j - k. With params, each rotation label carries its Γ value and inactive
    rotations are drawn dashed.

    Raises:
        DimensionMismatchException: If params are for a different N
    """
    with resolve_tracer(tracer).start_as_current_span("lattice_graph.emit_dot") as span:
        span.set_attribute("N", graph.N)
        span.set_attribute("annotated", params is not None)
        if params is not None and params.N != graph.N:
            e = DimensionMismatchException(graph.N, params.N)
            fail_span(span, e)
            raise e

        lines = [
            "digraph lattice {",
            f"  // {PORT_CONVENTION}",
            "  rankdir=LR;",
            '  node [fontname="Helvetica"];',
        ]
        for node in graph.scalers():
            lines.append(f"  {node.id} [label={_quote(node.label)}, shape=circle];")
        for node in graph.rotations():
            attributes = [f"label={_quote(node.label)}", "shape=box"]
            if params is not None:
                entry = params.entry(node.k, node.j)
                if entry.active:
                    annotated = node.label + "\\n" + format_parameter(entry.value)
                    attributes[0] = f"label={_quote(annotated)}"
                else:
                    attributes.append("style=dashed")
            lines.append(f"  {node.id} [{', '.join(attributes)}];")
        for gap in range(1, graph.N):
            same_rank = " ".join(f"{rotation_id(k, k + gap)};" for k in range(1, graph.N - gap + 1))
            lines.append(f"  {{ rank=same; {same_rank} }}")

        terminals = []
        connections = []
        for edge in graph.edges:
            source = edge.source or f"in_{edge.target}"
            target = edge.target or f"out_{edge.source}_{edge.source_port.value}"
            if edge.source is None:
                terminals.append(source)
            if edge.target is None:
                terminals.append(target)
            attributes = []
            if edge.source_port is not None:
                attributes.append(f'taillabel="{edge.source_port.value}"')
            if edge.target_port is not None:
                attributes.append(f'headlabel="{edge.target_port.value}"')
            suffix = f" [{', '.join(attributes)}]" if attributes else ""
            connections.append(f"  {source} -> {target}{suffix};")
        lines.append("  subgraph terminals {")
        lines.append('    node [shape=point, label=""];')
        lines.extend(f"    {terminal};" for terminal in terminals)
        lines.append("  }")
        lines.extend(connections)
        lines.append("}")
        span.set_status(trace.Status(trace.StatusCode.OK))
        return "\n".join(lines) + "\n"
