from __future__ import annotations

import json

import pytest

from normaltori.fixtures import make_t0, make_t1, make_t2
from normaltori.graphs import build_standard, random_cubic
from normaltori.normal_graph import canonicalize, decorate, to_normal_torus
from normaltori.oracle import random_normal_torus
from normaltori.position import validate_position
from normaltori import serialize
from normaltori.serialize import (
    SchemaError,
    decorated_from_json,
    decorated_to_json,
    dumps,
    graph_from_json,
    graph_to_json,
    load_any,
    normal_torus_from_json,
    normal_torus_to_json,
    position_from_json,
    position_to_json,
)


def test_graph_round_trip():
    for g in (build_standard(2), build_standard(4), random_cubic(3, 5)):
        assert graph_from_json(graph_to_json(g)) == g


def test_graph_schema_shape():
    obj = graph_to_json(build_standard(2))
    assert obj["format"] == 1
    assert obj["rank"] == 2
    assert {e["id"] for e in obj["edges"]} == {"s0", "s1", "s2"}
    for e in obj["edges"]:
        for end in e["ends"]:
            assert set(end) == {"p", "slot"}
            assert end["slot"] in (0, 1, 2)


def test_position_round_trip():
    for maker in (make_t0, make_t1, make_t2):
        t = maker()
        back = position_from_json(position_to_json(t))
        assert validate_position(back) == []
        assert position_to_json(back) == position_to_json(t)


def test_position_round_trip_random():
    g = random_cubic(3, 2)
    t = random_normal_torus(g, 5, 5)
    assert position_to_json(position_from_json(position_to_json(t))) == position_to_json(t)


def test_normal_torus_round_trip():
    nt = to_normal_torus(make_t2())
    back = normal_torus_from_json(normal_torus_to_json(nt))
    assert back.nodes == nt.nodes
    assert back.crossings == nt.crossings
    assert sorted((l.node, l.half_edge) for l in back.leaves) == sorted(
        (l.node, l.half_edge) for l in nt.leaves
    )
    assert position_to_json(back.position) == position_to_json(nt.position)


def test_decorated_round_trip_preserves_canonical_form():
    d = decorate(to_normal_torus(make_t2()), "F2", "A")
    back = decorated_from_json(decorated_to_json(d))
    assert canonicalize(back) == canonicalize(d)
    assert back.base_piece == "F2"


def test_dumps_deterministic():
    t = make_t0()
    assert dumps(position_to_json(t)) == dumps(position_to_json(make_t0()))


def test_load_any_dispatch():
    kind, value = load_any(dumps(graph_to_json(build_standard(2))))
    assert kind == "sphere_graph"
    kind, value = load_any(dumps(position_to_json(make_t0())))
    assert kind == "position"


def test_schema_errors():
    with pytest.raises(SchemaError, match="not valid JSON"):
        load_any("{nope")
    with pytest.raises(SchemaError, match="unknown kind"):
        load_any(json.dumps({"format": 1, "kind": "mystery"}))
    bad = graph_to_json(build_standard(2))
    bad["format"] = 99
    with pytest.raises(SchemaError, match="unsupported format"):
        graph_from_json(bad)
    mangled = position_to_json(make_t0())
    del mangled["pieces"][0]["boundary"][0]["circle"]
    with pytest.raises(SchemaError, match="malformed position"):
        position_from_json(mangled)


def test_dot_exports_mention_everything():
    g = build_standard(2)
    dot = serialize.graph_to_dot(g)
    for name in ("p0", "p1", "s0", "s1", "s2"):
        assert name in dot
    t = make_t2()
    pdot = serialize.position_to_dot(t)
    for name in ("F0", "F1", "F2", "c0@s0"):
        assert name in pdot
    ndot = serialize.normal_torus_to_dot(to_normal_torus(t))
    assert "triangle" in ndot and "hexagon" in ndot
    d = decorate(to_normal_torus(t), "F2", "A")
    sdot = serialize.normal_torus_to_dot(d.torus, d.signs)
    assert "+" in sdot and "-" in sdot
