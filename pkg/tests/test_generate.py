import numpy as np
import pytest

from mlncraft import build_cbg, load_communities
from mlncraft.errors import MLNError
from mlncraft.generate import CouplingSpec, LayerSpec, SyntheticSpec, _triangle_pairs, generate_synthetic


def test_degenerate_probabilities_give_cliques():
    net, planted = generate_synthetic(SyntheticSpec([LayerSpec("A", 12, 3, 1.0, 0.0)]))
    layer = net.layer("A")
    assert layer.m == 3 * 6
    for u, v in layer.edges.tolist():
        assert planted["A"][u] == planted["A"][v]


def test_perfect_block_coupling():
    spec = SyntheticSpec(
        [LayerSpec("A", 20, 4, 0.5, 0.0, "a"), LayerSpec("B", 12, 4, 0.5, 0.0, "b")],
        [CouplingSpec("A", "B", 1.0, 0.0)],
        seed=1,
    )
    net, planted = generate_synthetic(spec)
    cbg = build_cbg(net, load_communities(net.layer("A"), planted["A"]), load_communities(net.layer("B"), planted["B"]))
    assert cbg.edge_left.tolist() == cbg.edge_right.tolist() == [0, 1, 2, 3]


def test_seed_determinism():
    spec = SyntheticSpec.from_shorthand("3x500,deg10,seed9")
    a, _ = generate_synthetic(spec)
    b, _ = generate_synthetic(spec)
    for la, lb in zip(a.layers, b.layers):
        assert np.array_equal(la.edges, lb.edges)
    for x, y in zip(a.inter, b.inter):
        assert np.array_equal(x.edges, y.edges)


def test_shorthand_shape():
    spec = SyntheticSpec.from_shorthand("3x10000,deg20")
    assert [l.name for l in spec.layers] == ["L0", "L1", "L2"]
    assert [(c.layer_a, c.layer_b) for c in spec.couplings] == [("L0", "L1"), ("L1", "L2"), ("L2", "L0")]
    assert spec.layers[0].blocks == 50
    with pytest.raises(MLNError):
        SyntheticSpec.from_shorthand("three layers")
    with pytest.raises(MLNError):
        SyntheticSpec([LayerSpec("A", 5, 1, 1.5)]).validate()


def test_average_degree_close_to_target():
    net, _ = generate_synthetic(SyntheticSpec.from_shorthand("1x4000,deg20", seed=2))
    layer = net.layer("L0")
    assert 2 * layer.m / layer.n == pytest.approx(20, rel=0.05)


def test_triangle_decoding():
    for s in (2, 3, 7, 50):
        x = np.arange(s * (s - 1) // 2)
        i, j = _triangle_pairs(x, s)
        expected = [(a, b) for a in range(s) for b in range(a + 1, s)]
        assert list(zip(i.tolist(), j.tolist())) == expected


def test_spec_dict_round_trip():
    spec = SyntheticSpec.from_shorthand("2x100,deg6,blocks4,seed3")
    assert SyntheticSpec.from_dict(spec.as_dict()) == spec
