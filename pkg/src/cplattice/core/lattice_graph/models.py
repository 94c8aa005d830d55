from enum import Enum
from typing import Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from .exceptions import MalformedLatticeException


class NodeKind(str, Enum):
    SCALER = "Scaler"
    ROTATION = "Rotation"


class Port(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"


class LatticeNode(BaseModel):
    """Scaler Γ_kk^{1/2} (j is None) or rotation U(Γ_kj)."""

    id: str
    kind: NodeKind
    k: PositiveInt
    j: Optional[PositiveInt] = None
    label: str

    model_config = ConfigDict(frozen=True)


class LatticeEdge(BaseModel):
    """Directed connection between node ports.

    A missing source is the external input of a scaler; a missing target is an open output of a rotation.
    Scalers have a single output, so their source_port is None.
    """

    source: Optional[str] = None
    target: Optional[str] = None
    source_port: Optional[Port] = None
    target_port: Optional[Port] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_values(self) -> "LatticeEdge":
        if self.source is None and self.target is None:
            raise ValueError("An edge needs at least one endpoint")
        return self


class LatticeGraph(BaseModel):
    N: PositiveInt
    nodes: Tuple[LatticeNode, ...]
    edges: Tuple[LatticeEdge, ...]

    model_config = ConfigDict(frozen=True)

    def scalers(self) -> Tuple[LatticeNode, ...]:
        return tuple(node for node in self.nodes if node.kind == NodeKind.SCALER)

    def rotations(self) -> Tuple[LatticeNode, ...]:
        return tuple(node for node in self.nodes if node.kind == NodeKind.ROTATION)

    def to_networkx(self) -> nx.DiGraph:
        """
        Directed graph of the lattice. Open inputs and outputs become nodes of kind "terminal" named
        after the port they attach to, so degrees include them.
        """
        graph = nx.DiGraph()
        for node in self.nodes:
            graph.add_node(node.id, kind=node.kind.value, k=node.k, j=node.j, label=node.label)
        for edge in self.edges:
            source = edge.source or f"in_{edge.target}"
            target = edge.target or f"out_{edge.source}_{edge.source_port.value}"
            for terminal in (source, target):
                if terminal not in graph:
                    graph.add_node(terminal, kind="terminal")
            graph.add_edge(
                source,
                target,
                source_port=edge.source_port.value if edge.source_port else None,
                target_port=edge.target_port.value if edge.target_port else None,
            )
        return graph

    def check_structure(self) -> None:
        """
        Raises:
            MalformedLatticeException: If the node set is wrong, a rotation is not 2-in/2-out, or there is a cycle
        """
        expected = self.N + self.N * (self.N - 1) // 2
        if len(self.scalers()) != self.N or len(self.nodes) != expected:
            raise MalformedLatticeException(f"Expected {self.N} scalers and {expected} nodes, got {len(self.nodes)}")
        graph = self.to_networkx()
        for node in self.rotations():
            if graph.in_degree(node.id) != 2 or graph.out_degree(node.id) != 2:
                raise MalformedLatticeException(f"Rotation {node.id} is not 2-in/2-out")
        if not nx.is_directed_acyclic_graph(graph):
            raise MalformedLatticeException("Lattice graph has a cycle")
