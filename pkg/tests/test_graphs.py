from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normaltori.graphs import (
    Attachment,
    GraphError,
    HalfEdge,
    SphereGraph,
    build_standard,
    label_generators,
    random_cubic,
    validate_graph,
)


def test_standard_rank2_is_theta():
    g = build_standard(2)
    assert len(g.p_vertices) == 2
    assert len(g.sphere_edges) == 3
    assert len(g.sphere_edges) - len(g.p_vertices) + 1 == 2
    for s in g.sphere_edges:
        assert set(g.ends_of(s)) == {"p0", "p1"}
    assert validate_graph(g) == []


def test_standard_rank3_counts():
    g = build_standard(3)
    assert len(g.p_vertices) == 4
    assert len(g.sphere_edges) == 6
    assert validate_graph(g) == []


def test_standard_rank1_rejected():
    with pytest.raises(GraphError, match="rank below 2"):
        build_standard(1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_standard_euler_counts(n):
    g = build_standard(n)
    v, e = len(g.p_vertices), len(g.sphere_edges)
    assert 3 * v == 2 * e
    assert e - v + 1 == n
    assert validate_graph(g) == []


def test_validator_flags_missing_edge():
    g = build_standard(2)
    g.sphere_edges.remove("s2")
    del g.incidence[HalfEdge("s2", 0)]
    del g.incidence[HalfEdge("s2", 1)]
    problems = validate_graph(g)
    assert any("p0 has 2 half-edges" in p for p in problems)


def test_validator_flags_disconnected():
    # two disjoint theta blocks, betti bookkeeping forced to match
    g1 = build_standard(2)
    incidence = dict(g1.incidence)
    vertices = list(g1.p_vertices) + ["q0", "q1"]
    edges = list(g1.sphere_edges)
    for j in range(3):
        s = f"u{j}"
        edges.append(s)
        incidence[HalfEdge(s, 0)] = Attachment("q0", j)
        incidence[HalfEdge(s, 1)] = Attachment("q1", j)
    g = SphereGraph(3, vertices, edges, incidence)
    problems = validate_graph(g)
    assert "graph disconnected" in problems


@settings(max_examples=40, deadline=None)
@given(n=st.integers(min_value=2, max_value=5), seed=st.integers(min_value=0, max_value=10_000))
def test_random_cubic_is_valid_and_deterministic(n, seed):
    g1 = random_cubic(n, seed)
    g2 = random_cubic(n, seed)
    assert g1 == g2
    assert validate_graph(g1) == []


def test_random_cubic_rank2_shape():
    g = random_cubic(2, 0)
    assert len(g.p_vertices) == 2
    assert len(g.sphere_edges) == 3


def test_label_generators_theta():
    g = build_standard(2)
    lab = label_generators(g)
    assert lab.spanning_tree == {"s0"}
    assert set(lab.labels) == {"s1", "s2"}
    assert lab.labels["s1"][0] == 1
    assert lab.labels["s2"][0] == 2


def test_label_generators_dumbbell():
    incidence = {
        HalfEdge("l0", 0): Attachment("p0", 0),
        HalfEdge("l0", 1): Attachment("p0", 1),
        HalfEdge("l1", 0): Attachment("p1", 0),
        HalfEdge("l1", 1): Attachment("p1", 1),
        HalfEdge("b", 0): Attachment("p0", 2),
        HalfEdge("b", 1): Attachment("p1", 2),
    }
    g = SphereGraph(2, ["p0", "p1"], ["b", "l0", "l1"], incidence)
    assert validate_graph(g) == []
    lab = label_generators(g)
    assert lab.spanning_tree == {"b"}
    assert lab.labels["l0"][0] == 1
    assert lab.labels["l1"][0] == 2


def test_label_count_matches_rank():
    g = random_cubic(3, 1)
    lab = label_generators(g)
    assert len(lab.labels) == 3
    assert len(lab.spanning_tree) == len(g.p_vertices) - 1


def test_word_letter_orientation():
    g = build_standard(2)
    lab = label_generators(g)
    idx, sign = lab.word_letter("s1", lab.labels["s1"][1])
    assert (idx, sign) == (1, 1)
    idx, sign = lab.word_letter("s1", 1 - lab.labels["s1"][1])
    assert (idx, sign) == (1, -1)
    assert lab.word_letter("s0", 0) is None


def test_random_cubic_rank4_seed7_valid():
    assert validate_graph(random_cubic(4, 7)) == []
