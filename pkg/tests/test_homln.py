import numpy as np
import pytest

from mlncraft import (
    build_network,
    compose_communities_and,
    compose_hub_sets,
    compose_layers,
    load_communities,
    parse_expr,
    rank_layers_by_avg_degree,
)
from mlncraft.analysis import HubSet
from mlncraft.errors import ComplementTooLarge, ExpressionError, HeterogeneousNetwork, UnknownLayer
from mlncraft.generate import LayerSpec, SyntheticSpec, generate_synthetic


def _hom(*edge_lists, n=4, names="ABCDEF"):
    labels = [chr(ord("a") + i) for i in range(n)]
    return build_network(
        [{"name": names[i], "labels": labels, "edges": edges} for i, edges in enumerate(edge_lists)]
    )


def _edge_labels(layer):
    return sorted((layer.label(u), layer.label(v)) for u, v in layer.edges.tolist())


def test_and_not_or():
    net = _hom([(0, 1), (1, 2)], [(0, 1), (2, 3)])
    assert _edge_labels(compose_layers(net, "A AND B")) == [("a", "b")]
    assert _edge_labels(compose_layers(net, "A AND NOT B")) == [("b", "c")]
    empty = _hom([], n=3)
    assert compose_layers(empty, "NOT A").m == 3
    disjoint = _hom([(0, 1), (2, 3), (4, 5)], [(0, 2), (1, 3), (4, 6), (5, 7)], n=8)
    assert compose_layers(disjoint, "A OR B").m == 7


def test_parser_precedence_is_left_to_right():
    assert str(parse_expr("A OR B AND C")) == str(parse_expr("(A OR B) AND C"))
    assert str(parse_expr("NOT A AND B")) == str(parse_expr("(NOT A) AND B"))
    for bad in ("", "A AND", "A B", "(A", "AND A", "A OR OR B"):
        with pytest.raises(ExpressionError):
            parse_expr(bad)


def test_compose_errors():
    net = _hom([(0, 1)], [(1, 2)])
    with pytest.raises(UnknownLayer):
        compose_layers(net, "A AND Z")
    het = build_network(
        [{"name": "A", "n": 2, "edges": [], "entity_type": "x"}, {"name": "B", "n": 2, "edges": [], "entity_type": "y"}],
        [("A", "B", [(0, 0)])],
    )
    with pytest.raises(HeterogeneousNetwork):
        compose_layers(het, "A AND B")
    with pytest.raises(ComplementTooLarge):
        compose_layers(_hom([], n=12), "NOT A", complement_cap=10)


def test_compose_communities_identical_layers():
    net = _hom([(0, 1), (2, 3)], [(0, 1), (2, 3)])
    ca = load_communities(net.layer("A"), [0, 0, 1, 1])
    cb = load_communities(net.layer("B"), [0, 0, 1, 1])
    assert compose_communities_and(ca, cb).labels.tolist() == [0, 0, 1, 1]


def test_compose_communities_split():
    # A: clique {a,b,c}; B splits {a,b} from {c}
    net = _hom([(0, 1), (1, 2), (0, 2)], [(0, 1), (1, 2), (0, 2)], n=3)
    ca = load_communities(net.layer("A"), [0, 0, 0])
    cb = load_communities(net.layer("B"), [0, 0, 1])
    assert compose_communities_and(ca, cb).labels.tolist() == [0, 0, 1]


def test_compose_communities_nothing_shared():
    net = _hom([(0, 1)], [(2, 3)])
    ca = load_communities(net.layer("A"), [0, 0, 1, 1])
    cb = load_communities(net.layer("B"), [0, 0, 1, 1])
    assert compose_communities_and(ca, cb).count == 4


def test_hub_set_algebra():
    a = HubSet("A", "degree", frozenset({"a", "b"}), "above_mean")
    b = HubSet("B", "degree", frozenset({"b", "c"}), "above_mean")
    empty = HubSet("E", "degree", frozenset(), "above_mean")
    assert compose_hub_sets(a, b, "AND") == {"b"}
    assert compose_hub_sets(a, b, "MINUS") == {"a"}
    assert compose_hub_sets(a, empty, "OR") == a.hubs
    with pytest.raises(ExpressionError):
        compose_hub_sets(a, b, "XOR")


def test_rank_layers_by_average_degree():
    ten = [(i, (i + 1) % 10) for i in range(10)]
    net = _hom(ten[:5], ten, n=10)
    assert rank_layers_by_avg_degree(net) == [("B", 2.0), ("A", 1.0)]
    tied = _hom(ten[:3], ten[3:6], n=10)
    assert [name for name, _ in rank_layers_by_avg_degree(tied)] == ["A", "B"]


def test_rank_matches_planted_edge_counts():
    p_in = [0.05, 0.3, 0.1, 0.2, 0.15, 0.25]
    spec = SyntheticSpec([LayerSpec(f"H{i}", 120, 1, p, 0.0, "person") for i, p in enumerate(p_in)], seed=4)
    net, _ = generate_synthetic(spec)
    counts = {layer.name: layer.m for layer in net.layers}
    assert [name for name, _ in rank_layers_by_avg_degree(net)] == sorted(counts, key=lambda k: -counts[k])
    assert net.kind == "homogeneous"
