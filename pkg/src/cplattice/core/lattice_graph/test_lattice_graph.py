import networkx as nx
import numpy as np
import pydot
import pytest

from .lattice_graph import build_lattice_graph, emit_dot, format_parameter
from .models import NodeKind, Port
from .exceptions import InvalidLatticeSizeException, DimensionMismatchException
from ..lattice.lattice import elementary_rotation, random_schur_params, schur_params_from_matrix


def parse_dot(dot: str) -> nx.MultiDiGraph:
    graphs = pydot.graph_from_dot_data(dot)
    assert graphs is not None and len(graphs) == 1
    return nx.nx_pydot.from_pydot(graphs[0])


def unquoted(value: str) -> str:
    return value[1:-1] if value.startswith('"') else value


def test_two_by_two_lattice():
    graph = build_lattice_graph(2)
    assert len(graph.scalers()) == 2
    assert [node.label for node in graph.rotations()] == ["U(Γ_12)"]


def test_four_by_four_lattice_matches_figure():
    graph = build_lattice_graph(4)
    assert len(graph.nodes) == 10
    assert {node.label for node in graph.rotations()} == {
        "U(Γ_12)",
        "U(Γ_13)",
        "U(Γ_14)",
        "U(Γ_23)",
        "U(Γ_24)",
        "U(Γ_34)",
    }
    assert {node.label for node in graph.scalers()} == {f"Γ_{k}{k}^{{1/2}}" for k in range(1, 5)}


def test_rotation_wiring_follows_staircase():
    graph = build_lattice_graph(4).to_networkx()
    assert graph.edges["U1_3", "U1_4"]["target_port"] == Port.TOP.value
    assert graph.edges["U2_4", "U1_4"]["target_port"] == Port.BOTTOM.value
    assert graph.edges["S1", "U1_2"]["target_port"] == Port.TOP.value
    assert graph.edges["S2", "U1_2"]["target_port"] == Port.BOTTOM.value
    assert graph.has_edge("U1_4", "out_U1_4_top")
    assert graph.has_edge("U1_4", "out_U1_4_bottom")


@pytest.mark.parametrize("size", range(2, 17))
def test_structure_invariants(size):
    graph = build_lattice_graph(size)
    assert len(graph.scalers()) == size
    assert len(graph.rotations()) == size * (size - 1) // 2
    digraph = graph.to_networkx()
    assert nx.is_directed_acyclic_graph(digraph)
    for node in graph.rotations():
        assert digraph.in_degree(node.id) == 2
        assert digraph.out_degree(node.id) == 2
    for node in graph.scalers():
        assert digraph.in_degree(node.id) == 1


def test_nine_by_nine_lattice():
    graph = build_lattice_graph(9)
    assert len(graph.scalers()) == 9
    assert len(graph.rotations()) == 36


def test_large_lattice_labels_are_unambiguous():
    labels = [node.label for node in build_lattice_graph(12).rotations()]
    assert "U(Γ_1,12)" in labels
    assert len(set(labels)) == len(labels)


def test_lattice_needs_two_rows():
    with pytest.raises(InvalidLatticeSizeException):
        build_lattice_graph(1)


def test_dot_for_two_by_two_has_one_rotation():
    dot = emit_dot(build_lattice_graph(2))
    assert dot.count('label="U(Γ_12)"') == 1


@pytest.mark.parametrize("size", [2, 4, 7])
def test_dot_parses_back_to_the_lattice(size):
    graph = build_lattice_graph(size)
    dot = emit_dot(graph)
    parsed = parse_dot(dot)
    expected = graph.to_networkx()
    assert parsed.is_directed()
    assert set(parsed.nodes) == set(expected.nodes)
    assert parsed.number_of_edges() == len(graph.edges)
    assert set(parsed.edges()) == set(expected.edges())
    for node in graph.nodes:
        assert unquoted(parsed.nodes[node.id]["label"]) == node.label
    assert "convention" in dot.splitlines()[1]


def test_dot_rank_groups_follow_gap():
    dot = emit_dot(build_lattice_graph(4))
    assert "{ rank=same; U1_2; U2_3; U3_4; }" in dot
    assert "{ rank=same; U1_4; }" in dot


def test_dot_annotated_with_identity_channel_params(identity_analysis_matrix):
    params = schur_params_from_matrix(identity_analysis_matrix)
    parsed = parse_dot(emit_dot(build_lattice_graph(4), params))
    assert unquoted(parsed.nodes["U1_4"]["label"]) == "U(Γ_14)\\n1.00000"
    assert "style" not in parsed.nodes["U1_4"]
    for node_id in ("U1_2", "U1_3", "U2_3", "U2_4", "U3_4"):
        assert parsed.nodes[node_id]["style"] == "dashed"


def test_dot_rejects_params_of_other_size(identity_analysis_matrix):
    params = schur_params_from_matrix(identity_analysis_matrix)
    with pytest.raises(DimensionMismatchException):
        emit_dot(build_lattice_graph(3), params)


def test_parameter_formatting():
    assert format_parameter(1.0) == "1.00000"
    assert format_parameter(0.2553784 + 0j) == "0.255378"
    assert format_parameter(0.5 - 0.25j) == "0.500000-0.250000i"
    assert NodeKind.ROTATION.value == "Rotation"


def test_annotated_rotations_are_unitary():
    params = random_schur_params(5, np.random.default_rng(9))
    graph = build_lattice_graph(5)
    for node in graph.rotations():
        rotation = elementary_rotation(params.value(node.k, node.j))
        assert np.allclose(rotation @ rotation.conj().T, np.eye(2), atol=1e-12)
