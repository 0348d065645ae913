"""Acceptance criteria 1-12.  Each test records a PASS/FAIL line that is
repeated in the pytest terminal summary."""

import itertools
import os
import subprocess
import sys
import time

import networkx as nx
import numpy as np
import pytest
from sklearn.metrics import normalized_mutual_info_score

from _gen import (
    all_matchings,
    block_starts,
    clique_layer,
    fixture_f1,
    fixture_f2,
    matrix_edges,
    pair_scan_cbg,
    random_hemln,
    random_matrix,
    random_partition,
)
from mlncraft import (
    WeightedBipartite,
    apply_metric,
    brute_force_matching,
    build_cbg,
    build_network,
    compose_communities_and,
    compose_layers,
    detect_communities,
    k_community,
    load_communities,
    louvain,
    max_weight_matching,
    two_community,
)
from mlncraft.bench import bench
from mlncraft.generate import LayerSpec, SyntheticSpec, generate_synthetic
from mlncraft.kcommunity import INCONSISTENT, NO_MATCH, PARTIAL, TOTAL


def test_1_matching_equals_brute_force(report):
    rng = np.random.default_rng(1)
    mismatches = 0
    start = time.perf_counter()
    for _ in range(1000):
        g = WeightedBipartite.from_matrix(random_matrix(rng, 6))
        fast, slow = max_weight_matching(g), brute_force_matching(g)
        if fast.pairs != slow.pairs or abs(fast.total_weight - slow.total_weight) > 1e-9:
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10.0
    report(1, ok, f"1000 random CBGs (sides <= 6): {mismatches} mismatches, {elapsed:.2f} s (limit 10 s)")
    assert ok


def test_2_build_cbg_equals_pair_scan(report):
    rng = np.random.default_rng(2)
    bad = 0
    for i in range(200):
        net = random_hemln(rng, layers=2, max_n=50)
        a, b = net.layers
        if i % 2:
            ca, cb = detect_communities(a, seed=i), detect_communities(b, seed=i)
        else:
            ca, cb = random_partition(rng, a), random_partition(rng, b)
        cbg = build_cbg(net, ca, cb)
        got = {(int(l), int(r)): int(c) for l, r, c in zip(cbg.edge_left, cbg.edge_right, cbg.inter_edge_count)}
        if got != pair_scan_cbg(net, ca, cb):
            bad += 1
    report(2, bad == 0, f"200 random MLNs (<= 50 vertices/layer): {bad} differ from the pair scan")
    assert bad == 0


def test_3_matching_size_bound(report):
    rng = np.random.default_rng(3)
    violations = 0
    for i in range(1000):
        w = random_matrix(rng, 8)
        m = max_weight_matching(WeightedBipartite.from_matrix(w))
        lefts = [l for l, _ in m.pairs]
        rights = [r for _, r in m.pairs]
        one_to_one = len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)
        if len(m) > min(w.shape) or not one_to_one:
            violations += 1
    report(3, violations == 0, f"1000 instances: {violations} with |matching| > min(|C_i|, |C_j|)")
    assert violations == 0


def _normalized(result):
    out = set()
    for e in result.elements:
        (link,) = e.links
        out.add((frozenset(e.tuple), round(link.weight, 12), link.inter_edge_count, frozenset(link.edges if link.left_layer < link.right_layer else ((v, u) for u, v in link.edges))))
    return out


def test_4_two_community_commutes(report):
    rng = np.random.default_rng(4)
    bad = 0
    for i in range(200):
        net = random_hemln(rng, layers=2, max_n=30, p_inter=0.08)
        a, b = net.layers
        sets = {a.name: random_partition(rng, a), b.name: random_partition(rng, b)}
        metric = ("we", "wd", "wh")[i % 3]
        ij = two_community(net, a.name, b.name, metric, sets)
        ji = two_community(net, b.name, a.name, metric, sets)
        if _normalized(ij) != _normalized(ji):
            bad += 1
    report(4, bad == 0, f"200 instances: {bad} where two_community(i,j) != two_community(j,i)")
    assert bad == 0


def test_5_scaling_keeps_pairs(report):
    rng = np.random.default_rng(5)
    instances = changed = 0
    while instances < 200:
        w = random_matrix(rng, 5, integer=False)
        totals = sorted((t for _, t in all_matchings(matrix_edges(w))), reverse=True)
        if len(totals) > 1 and totals[0] - totals[1] < 1e-6:
            continue  # not a unique optimum
        instances += 1
        base = max_weight_matching(WeightedBipartite.from_matrix(w)).pairs
        for c in (0.5, 3.0, 10.0):
            if max_weight_matching(WeightedBipartite.from_matrix(w * c)).pairs != base:
                changed += 1
    report(5, changed == 0, f"200 unique-optimum instances x c in (0.5, 3, 10): {changed} changed pair sets")
    assert changed == 0


def _clique_instance(rng):
    sizes_i = rng.integers(1, 5, size=int(rng.integers(2, 6))).tolist()
    sizes_j = rng.integers(1, 5, size=int(rng.integers(2, 6))).tolist()
    doc_i, lab_i = clique_layer("I", sizes_i, "TI")
    doc_j, lab_j = clique_layer("J", sizes_j, "TJ")
    si, sj = block_starts(sizes_i), block_starts(sizes_j)
    inter = []
    for a, b in itertools.product(range(len(sizes_i)), range(len(sizes_j))):
        if rng.random() < 0.5:
            k = int(rng.integers(1, min(sizes_i[a], sizes_j[b]) + 1))
            us = rng.choice(sizes_i[a], size=k, replace=False) + si[a]
            vs = rng.choice(sizes_j[b], size=k, replace=False) + sj[b]
            inter += list(zip(us.tolist(), vs.tolist()))
    net = build_network([doc_i, doc_j], [("I", "J", inter)])
    sets = {"I": load_communities(net.layer("I"), lab_i), "J": load_communities(net.layer("J"), lab_j)}
    return net, sets


def test_6_hub_metric_keeps_shared_pairs(report):
    rng = np.random.default_rng(6)
    violations = 0
    for _ in range(100):
        net, sets = _clique_instance(rng)
        pairs = {m: {e.tuple for e in two_community(net, "I", "J", m, sets).elements} for m in ("we", "wd", "wh")}
        violations += len((pairs["we"] & pairs["wd"]) - pairs["wh"])
    report(6, violations == 0, f"100 clique instances: {violations} pairs matched by we and wd but not wh")
    assert violations == 0


def _clique_pair(sa, sb, drop_intra=False, drop_inter=False):
    doc_a, _ = clique_layer("A", [sa], "TA")
    doc_b, _ = clique_layer("B", [sb], "TB")
    if drop_intra:
        doc_a["edges"] = doc_a["edges"][1:]
    inter = [(u, v) for u in range(sa) for v in range(sb)]
    if drop_inter:
        inter = inter[1:]
    net = build_network([doc_a, doc_b], [("A", "B", inter)])
    sets = {n: load_communities(net.layer(n), np.zeros(net.layer(n).n, dtype=int)) for n in "AB"}
    cbg = build_cbg(net, sets["A"], sets["B"])
    return apply_metric(cbg, "wd").weights, apply_metric(cbg, "wh").weights


def test_7_weight_ranges(report):
    rng = np.random.default_rng(7)
    above = 0
    for i in range(100):
        net = random_hemln(rng, layers=2, max_n=30, p_intra=0.3, p_inter=0.1)
        a, b = net.layers
        cbg = build_cbg(net, random_partition(rng, a), random_partition(rng, b))
        for metric in ("wd", "wh"):
            above += int((apply_metric(cbg, metric).weights > 1.0).sum())
    exact_one = below_one = 0
    for _ in range(50):
        sa, sb = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        wd, wh = _clique_pair(sa, sb)
        exact_one += int(wd[0] == 1.0 and wh[0] == 1.0)
        if rng.random() < 0.5:
            wd, _ = _clique_pair(sa, sb, drop_intra=True)
        else:
            wd, _ = _clique_pair(sa, sb, drop_inter=True)
        below_one += int(len(wd) == 1 and wd[0] < 1.0)
    ok = above == 0 and exact_one == 50 and below_one == 50
    report(7, ok, f"{above} weights above 1; wd == 1 on {exact_one}/50 full cliques; wd < 1 on {below_one}/50 perturbations")
    assert ok


def test_8_kcommunity_fixtures(report):
    net, sets = fixture_f1()
    r1 = k_community(net, "A,B,C", "we", sets)
    s1 = sorted((e.status, e.failure_kind) for e in r1.elements)
    net, sets = fixture_f2()
    r2 = k_community(net, "A,B,C,A", "we", sets)
    s2 = sorted((e.status, e.failure_kind) for e in r2.elements)
    ok = s1 == sorted([(TOTAL, None)] * 2 + [(PARTIAL, NO_MATCH)]) and s2 == sorted(
        [(TOTAL, None), (PARTIAL, INCONSISTENT), (PARTIAL, NO_MATCH)]
    )
    report(8, ok, f"F1 -> {[s for s, _ in s1].count(TOTAL)} total + no_match; F2 -> {[k or s for s, k in s2]}")
    assert ok


def test_9_homln_composition_sound(report):
    rng = np.random.default_rng(9)
    violations = 0
    for i in range(100):
        n = int(rng.integers(2, 41))
        docs = [
            {"name": name, "n": n, "edges": [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]}
            for name, p in (("A", 0.25), ("B", 0.25))
        ]
        net = build_network(docs)
        a, b = net.layers
        if i % 2:
            ca, cb = detect_communities(a, seed=i), detect_communities(b, seed=i)
        else:
            ca, cb = random_partition(rng, a, 4), random_partition(rng, b, 4)
        composed = compose_communities_and(ca, cb)
        and_layer = compose_layers(net, "A AND B")
        g_and = nx.Graph()
        g_and.add_nodes_from(range(n))
        g_and.add_edges_from(map(tuple, and_layer.edges.tolist()))
        component = {v: k for k, comp in enumerate(nx.connected_components(g_and)) for v in comp}
        for c in range(composed.count):
            members = composed.members(c).tolist()
            if len({component[v] for v in members}) != 1:
                violations += 1
            for u, v in itertools.combinations(members, 2):
                if g_and.has_edge(u, v) and not (ca.labels[u] == ca.labels[v] and cb.labels[u] == cb.labels[v]):
                    violations += 1
            if len({int(ca.labels[v]) for v in members}) != 1 or len({int(cb.labels[v]) for v in members}) != 1:
                violations += 1
    report(9, violations == 0, f"100 random 2-layer HoMLNs: {violations} containment violations")
    assert violations == 0


def test_10_louvain_planted_partition(report):
    spec = SyntheticSpec([LayerSpec("P", 100, 4, 0.9, 0.01)], seed=10)
    net, planted = generate_synthetic(spec)
    start = time.perf_counter()
    labels = louvain(net.layer("P"), seed=10)
    elapsed = time.perf_counter() - start
    nmi = normalized_mutual_info_score(planted["P"], labels)
    ok = nmi >= 0.95 and elapsed < 1.0
    report(10, ok, f"4 x 25 planted blocks: NMI {nmi:.4f} (>= 0.95), {elapsed:.3f} s (< 1 s)")
    assert ok


@pytest.mark.slow
def test_11_composition_is_cheap(report):
    net, _ = generate_synthetic(SyntheticSpec.from_shorthand("3x10000,deg20"))
    rep = bench(net, "L0,L1,L2,L0", "we", repetitions=5)
    largest = max(rep.layer_seconds.values())
    ok = rep.ratio <= 0.5
    report(
        11,
        ok,
        f"3 x 10000, deg 20, cyclic ordering: composition {rep.composition_total * 1e3:.1f} ms vs "
        f"largest layer {largest * 1e3:.1f} ms, ratio {rep.ratio:.3f} (<= 0.5, median of 5)",
    )
    assert ok


# --- 12: CLI determinism ------------------------------------------------------

_CLI_CASES = [
    ("info", ["info", "--mln", "{h}"]),
    ("communities", ["communities", "--mln", "{g}", "--seed", "3"]),
    ("communities --parallel", ["communities", "--mln", "{g}", "--seed", "3", "--parallel"]),
    ("hubs", ["hubs", "--mln", "{g}", "--layer", "L1", "--metric", "closeness"]),
    ("hubs community", ["hubs", "--mln", "{g}", "--layer", "L1", "--community", "0", "--seed", "3"]),
    ("compose", ["compose", "--mln", "{h}", "--expr", "A AND B", "--communities-and", "--parallel"]),
    ("two-community", ["two-community", "--mln", "{g}", "--layers", "L1,L0", "--metric", "wd"]),
    ("kcommunity", ["kcommunity", "--mln", "{g}", "--order", "L0,L1,L2,L0", "--metric", "wh"]),
    ("kcommunity --parallel", ["kcommunity", "--mln", "{g}", "--order", "L0,L1,L2,L0", "--metric", "wh", "--parallel"]),
    ("rank", ["rank", "--result", "{k}"]),
    ("rank layers", ["rank", "--mln", "{h}"]),
    ("generate", ["generate", "--generate", "2x60,deg6,blocks3", "--seed", "5"]),
]


def _cli(args, out=None, hashseed="0"):
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    cmd = [sys.executable, "-m", "mlncraft", *args] + (["--out", str(out)] if out else [])
    proc = subprocess.run(cmd, capture_output=True, env=env)
    assert proc.returncode == 0, proc.stderr.decode()
    return out.read_bytes() if out else proc.stdout


@pytest.fixture(scope="module")
def cli_inputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    g, h, k = d / "g.mln", d / "h.mln", d / "k.json"
    _cli(["generate", "--generate", "3x200,deg8,blocks4", "--seed", "1"], g)
    h.write_text("[layers]\nA\nB\n[intra]\nA a b\nA b c\nA a c\nA c d\nB a b\nB c d\nB a d\nB b c\n")
    _cli(["kcommunity", "--mln", str(g), "--order", "L0,L1,L2,L0"], k)
    return {"g": str(g), "h": str(h), "k": str(k), "dir": d}


@pytest.mark.slow
def test_12_cli_determinism(report, cli_inputs):
    import json

    differing = []
    for name, template in _CLI_CASES:
        args = [a.format(**cli_inputs) for a in template]
        runs = [_cli(args, cli_inputs["dir"] / f"run{i}.out", hashseed=str(i)) for i in range(2)]
        if runs[0] != runs[1]:
            differing.append(name)
    serial = _cli(["communities", "--mln", cli_inputs["g"], "--seed", "3"])
    parallel = _cli(["communities", "--mln", cli_inputs["g"], "--seed", "3", "--parallel"])
    if serial != parallel:
        differing.append("communities serial vs --parallel")
    # bench reports wall-clock times; every non-timing field must still repeat
    stable = ("ordering", "metric", "repetitions", "backend", "match_counts")
    benches = [
        json.loads(_cli(["bench", "--mln", cli_inputs["g"], "--order", "L0,L1,L2,L0", "--repetitions", "2"], hashseed=str(i)))
        for i in range(2)
    ]
    if [{k: b[k] for k in stable} for b in benches] != [{k: benches[0][k] for k in stable}] * 2:
        differing.append("bench")
    ok = not differing
    report(12, ok, f"{len(_CLI_CASES) + 2} CLI runs repeated with fixed seeds: differing {differing or 'none'}")
    assert ok
