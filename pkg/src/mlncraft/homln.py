"""Boolean composition of homogeneous multilayer networks.

Layers of a homogeneous network share one vertex universe, so AND, OR and
NOT act directly on edge sets.  Community and hub results computed once per
layer are composed without re-analysing the aggregated graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .analysis import HubSet
from .errors import ComplementTooLarge, ExpressionError, HeterogeneousNetwork, VertexUniverseMismatch
from .model import CommunitySet, Layer, MultilayerNetwork

COMPLEMENT_CAP = 20_000
AND, OR, NOT, MINUS = "AND", "OR", "NOT", "MINUS"


@dataclass(frozen=True)
class Ref:
    layer: str

    def __str__(self):
        return self.layer


@dataclass(frozen=True)
class Not:
    operand: object

    def __str__(self):
        inner = str(self.operand)
        return f"NOT {inner}" if isinstance(self.operand, Ref) else f"NOT ({inner})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        def wrap(x):
            return f"({x})" if isinstance(x, BinOp) and x.op != self.op else str(x)

        return f"{wrap(self.left)} {self.op} {wrap(self.right)}"


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_expr(text: str):
    """Parse ``expr := term | expr (AND|OR) term``,
    ``term := [NOT] name | [NOT] ( expr )``; operators are left-associative
    with equal precedence."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"cannot tokenize {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise ExpressionError("empty layer expression")
    at = 0

    def peek():
        return tokens[at] if at < len(tokens) else None

    def term():
        nonlocal at
        tok = peek()
        if tok is None:
            raise ExpressionError("expression ends where a layer name was expected")
        if tok.upper() == NOT:
            at += 1
            return Not(term())
        if tok == "(":
            at += 1
            node = expr()
            if peek() != ")":
                raise ExpressionError("missing ')'")
            at += 1
            return node
        if tok == ")" or tok.upper() in (AND, OR):
            raise ExpressionError(f"unexpected {tok!r}")
        at += 1
        return Ref(tok)

    def expr():
        nonlocal at
        node = term()
        while peek() is not None and peek().upper() in (AND, OR):
            op = peek().upper()
            at += 1
            node = BinOp(op, node, term())
        return node

    tree = expr()
    if at != len(tokens):
        raise ExpressionError(f"unexpected {tokens[at]!r}")
    return tree


def _require_homogeneous(net):
    if not net.is_homogeneous:
        raise HeterogeneousNetwork("layer composition needs a homogeneous network")


def _complement_keys(n, keys, cap):
    if n > cap:
        raise ComplementTooLarge(f"complement of a {n}-vertex layer exceeds the cap of {cap}")
    rows = keys // n
    bounds = np.searchsorted(rows, np.arange(n + 1))
    out = []
    for u in range(n - 1):
        present = keys[bounds[u]:bounds[u + 1]] % n
        out.append(u * n + np.setdiff1d(np.arange(u + 1, n, dtype=np.int64), present, assume_unique=True))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _eval(net, node, cap):
    if isinstance(node, Ref):
        return net.layer(node.layer).edge_keys
    if isinstance(node, Not):
        n = net.layers[0].n
        return _complement_keys(n, _eval(net, node.operand, cap), cap)
    left = _eval(net, node.left, cap)
    right = _eval(net, node.right, cap)
    if node.op == AND:
        return np.intersect1d(left, right, assume_unique=True)
    return np.union1d(left, right)


def compose_layers(net: MultilayerNetwork, expr, complement_cap: int = COMPLEMENT_CAP) -> Layer:
    """Materialise the layer described by a Boolean expression over layers."""
    _require_homogeneous(net)
    tree = parse_expr(expr) if isinstance(expr, str) else expr
    keys = _eval(net, tree, complement_cap)
    base = net.layers[0]
    n = base.n
    edges = np.stack([keys // n, keys % n], axis=1) if len(keys) else np.zeros((0, 2), dtype=np.int64)
    return Layer.from_edges(str(tree), n, edges, base.entity_type, base.labels)


def compose_communities_and(cset_a: CommunitySet, cset_b: CommunitySet) -> CommunitySet:
    """Communities of ``A AND B`` composed from each layer's communities.

    An edge survives when it is present in both layers and stays inside one
    community in each; the result is the connected components of the
    surviving edges, singletons included.
    """
    la, lb = cset_a.layer, cset_b.layer
    if la.vertex_universe() != lb.vertex_universe():
        raise VertexUniverseMismatch(f"layers {la.name!r} and {lb.name!r} have different vertex sets")
    n = la.n
    keys, ia, ib = np.intersect1d(la.edge_keys, lb.edge_keys, assume_unique=True, return_indices=True)
    e = la.edges[ia]
    keep = (cset_a.labels[e[:, 0]] == cset_a.labels[e[:, 1]]) & (cset_b.labels[e[:, 0]] == cset_b.labels[e[:, 1]])
    e = e[keep]
    graph = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    _, labels = csgraph.connected_components(graph, directed=False)
    and_edges = np.stack([keys // n, keys % n], axis=1) if len(keys) else np.zeros((0, 2), dtype=np.int64)
    and_layer = Layer.from_edges(f"{la.name} AND {lb.name}", n, and_edges, la.entity_type, la.labels)
    return CommunitySet(and_layer, labels)


def compose_hub_sets(set_a: HubSet, set_b: HubSet, op: str) -> frozenset:
    op = op.upper()
    a, b = set(set_a.hubs), set(set_b.hubs)
    if op == AND:
        return frozenset(a & b)
    if op == OR:
        return frozenset(a | b)
    if op == MINUS:
        return frozenset(a - b)
    raise ExpressionError(f"unknown hub set operation {op!r}")


def rank_layers_by_avg_degree(net: MultilayerNetwork) -> list[tuple[str, float]]:
    """Layers in descending order of average degree ``2|E|/|V|``."""
    _require_homogeneous(net)
    rows = [(layer.id, layer.name, 2.0 * layer.m / layer.n if layer.n else 0.0) for layer in net.layers]
    rows.sort(key=lambda r: (-r[2], r[0]))
    return [(name, avg) for _, name, avg in rows]
