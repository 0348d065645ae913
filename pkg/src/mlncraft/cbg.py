"""Community bipartite graphs and their inter-layer weight metrics.

Each community of the two layers becomes one meta node; a meta edge joins
two communities whenever at least one inter-layer edge connects their
members.  Metrics only assign weights, so one graph structure can be
re-weighted any number of times.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable

import numpy as np

from .analysis import community_hub_counts, community_hub_mask
from .errors import MLNError
from .model import CommunitySet, MultilayerNetwork

WE = "we"
WD = "wd"
WH = "wh"


@dataclass(frozen=True)
class MetaNode:
    side: str
    layer: str
    community: int


@dataclass(frozen=True)
class MetaEdge:
    left: int
    right: int
    inter_edge_count: int
    weight: float | None


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CommunityBipartiteGraph:
    """Meta-bipartite graph between the communities of two layers.

    Meta edges are parallel arrays sorted by ``(edge_left, edge_right)``.
    ``inter_u``/``inter_v`` list every contributing inter-layer edge (left
    layer vertex, right layer vertex) and ``inter_pair`` the index of the
    meta edge it falls on.
    """

    left_set: CommunitySet
    right_set: CommunitySet
    left_nodes: np.ndarray
    right_nodes: np.ndarray
    edge_left: np.ndarray
    edge_right: np.ndarray
    inter_edge_count: np.ndarray
    inter_u: np.ndarray
    inter_v: np.ndarray
    inter_pair: np.ndarray
    weights: np.ndarray | None = None
    metric: str | None = None

    @property
    def left_layer(self) -> str:
        return self.left_set.layer.name

    @property
    def right_layer(self) -> str:
        return self.right_set.layer.name

    @property
    def n_edges(self) -> int:
        return len(self.edge_left)

    @property
    def left_set_nodes(self) -> list[MetaNode]:
        return [MetaNode("left", self.left_layer, int(c)) for c in self.left_nodes]

    @property
    def right_set_nodes(self) -> list[MetaNode]:
        return [MetaNode("right", self.right_layer, int(c)) for c in self.right_nodes]

    @property
    def meta_edges(self) -> list[MetaEdge]:
        w = self.weights
        return [
            MetaEdge(int(a), int(b), int(c), None if w is None else float(w[i]))
            for i, (a, b, c) in enumerate(zip(self.edge_left, self.edge_right, self.inter_edge_count))
        ]

    def edge_index(self, left: int, right: int) -> int | None:
        hit = np.flatnonzero((self.edge_left == left) & (self.edge_right == right))
        return int(hit[0]) if len(hit) else None

    @cached_property
    def _by_pair(self):
        order = np.lexsort((self.inter_v, self.inter_u, self.inter_pair))
        bounds = np.searchsorted(self.inter_pair[order], np.arange(self.n_edges + 1))
        return order, bounds

    def inter_edges_of(self, index: int) -> list[tuple[int, int]]:
        """Inter-layer edges on one meta edge, as (left vertex, right vertex)."""
        order, bounds = self._by_pair
        sel = order[bounds[index]:bounds[index + 1]]
        return list(zip(self.inter_u[sel].tolist(), self.inter_v[sel].tolist()))

    def with_weights(self, weights, metric: str) -> "CommunityBipartiteGraph":
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.edge_left.shape:
            raise MLNError(f"{len(weights)} weights for {self.n_edges} meta edges")
        return replace(self, weights=_frozen(weights), metric=metric)

    def swapped(self) -> "CommunityBipartiteGraph":
        """The same graph with left and right sides exchanged."""
        order = np.lexsort((self.edge_left, self.edge_right))
        remap = np.empty_like(order)
        remap[order] = np.arange(len(order))
        return CommunityBipartiteGraph(
            left_set=self.right_set,
            right_set=self.left_set,
            left_nodes=self.right_nodes,
            right_nodes=self.left_nodes,
            edge_left=_frozen(self.edge_right[order]),
            edge_right=_frozen(self.edge_left[order]),
            inter_edge_count=_frozen(self.inter_edge_count[order]),
            inter_u=self.inter_v,
            inter_v=self.inter_u,
            inter_pair=_frozen(remap[self.inter_pair]),
            weights=None if self.weights is None else _frozen(self.weights[order]),
            metric=self.metric,
        )


def build_cbg(net: MultilayerNetwork, cset_i: CommunitySet, cset_j: CommunitySet, left_communities=None):
    """Community bipartite graph between two coupled layers.

    ``left_communities`` restricts the left side to the given community ids
    (used when extending k-communities); the right side always holds every
    community of its layer.
    """
    layer_i = net.layer(cset_i.layer.name)
    layer_j = net.layer(cset_j.layer.name)
    src, dst = net.inter_edges(layer_i.id, layer_j.id)
    if left_communities is None:
        left_nodes = np.arange(cset_i.count, dtype=np.int64)
    else:
        left_nodes = np.unique(np.asarray(list(left_communities), dtype=np.int64))
    right_nodes = np.arange(cset_j.count, dtype=np.int64)

    cu = cset_i.labels[src]
    cv = cset_j.labels[dst]
    if left_communities is not None:
        keep = np.isin(cu, left_nodes)
        src, dst, cu, cv = src[keep], dst[keep], cu[keep], cv[keep]
    width = max(cset_j.count, 1)
    keys = cu * width + cv
    span = max(cset_i.count, 1) * width
    if span <= 4 * len(keys) + 1024:
        # dense key range: count without sorting
        tally = np.bincount(keys, minlength=span)
        uniq = np.flatnonzero(tally)
        rank = np.zeros(span, dtype=np.int64)
        rank[uniq] = np.arange(len(uniq))
        inverse, counts = rank[keys], tally[uniq]
    else:
        uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    return CommunityBipartiteGraph(
        left_set=cset_i,
        right_set=cset_j,
        left_nodes=_frozen(left_nodes),
        right_nodes=_frozen(right_nodes),
        edge_left=_frozen(uniq // width),
        edge_right=_frozen(uniq % width),
        inter_edge_count=_frozen(counts.astype(np.int64)),
        inter_u=_frozen(src),
        inter_v=_frozen(dst),
        inter_pair=_frozen(inverse.ravel().astype(np.int64)),
    )


def _coupling_fraction(cbg, literal_denominator):
    size_i = cbg.left_set.sizes
    if literal_denominator:
        # |V_i^m| * |V_i^n|: the right community's id indexes the left layer
        if len(cbg.edge_right) and cbg.edge_right.max() >= cbg.left_set.count:
            raise MLNError(
                "literal denominator needs a left-layer community for every right community id"
            )
        other = size_i[cbg.edge_right]
    else:
        other = cbg.right_set.sizes[cbg.edge_right]
    return cbg.inter_edge_count / (size_i[cbg.edge_left] * other.astype(np.float64))


def weight_we(cbg: CommunityBipartiteGraph) -> CommunityBipartiteGraph:
    """Aggregate interaction: the number of inter-layer edges per pair."""
    return cbg.with_weights(cbg.inter_edge_count.astype(np.float64), WE)


def weight_wd(cbg: CommunityBipartiteGraph, literal_denominator: bool = False) -> CommunityBipartiteGraph:
    """Dense community interaction: density x coupled fraction x density."""
    left = cbg.left_set.densities[cbg.edge_left]
    right = cbg.right_set.densities[cbg.edge_right]
    return cbg.with_weights(left * _coupling_fraction(cbg, literal_denominator) * right, WD)


def _as_hub_mask(cset: CommunitySet, hubs) -> np.ndarray:
    if hubs is None:
        return community_hub_mask(cset)
    if isinstance(hubs, np.ndarray) and hubs.dtype == bool:
        return hubs
    mask = np.zeros(cset.layer.n, dtype=bool)
    items = hubs.values() if isinstance(hubs, dict) else hubs
    for h in items:
        mask[list(getattr(h, "hubs", h))] = True
    return mask


def _participating(cbg, vertices, mask, n):
    sel = mask[vertices]
    if not sel.any():
        return np.zeros(cbg.n_edges, dtype=np.int64)
    keys = np.unique(cbg.inter_pair[sel] * n + vertices[sel])
    return np.bincount(keys // n, minlength=cbg.n_edges)


def weight_wh(cbg: CommunityBipartiteGraph, hubs_i=None, hubs_j=None, literal_denominator: bool = False):
    """Hub interaction: hub participation x coupled fraction x hub participation.

    A hub participates when it is an endpoint of at least one inter-layer
    edge between the paired communities; each hub counts once.  Hub sets
    default to the community degree hubs of each layer.
    """
    mask_i = _as_hub_mask(cbg.left_set, hubs_i)
    mask_j = _as_hub_mask(cbg.right_set, hubs_j)
    if hubs_i is None:
        total_i = community_hub_counts(cbg.left_set)
    else:
        total_i = np.bincount(cbg.left_set.labels[mask_i], minlength=cbg.left_set.count)
    if hubs_j is None:
        total_j = community_hub_counts(cbg.right_set)
    else:
        total_j = np.bincount(cbg.right_set.labels[mask_j], minlength=cbg.right_set.count)
    part_i = _participating(cbg, cbg.inter_u, mask_i, cbg.left_set.layer.n)
    part_j = _participating(cbg, cbg.inter_v, mask_j, cbg.right_set.layer.n)
    denom_i = total_i[cbg.edge_left].astype(np.float64)
    denom_j = total_j[cbg.edge_right].astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(denom_i > 0, part_i / denom_i, 0.0)
        right = np.where(denom_j > 0, part_j / denom_j, 0.0)
    return cbg.with_weights(left * _coupling_fraction(cbg, literal_denominator) * right, WH)


METRICS: dict[str, Callable] = {WE: weight_we, WD: weight_wd, WH: weight_wh}


def register_metric(name: str, fn: Callable) -> None:
    """Add a weighting function ``fn(cbg, **options) -> weighted cbg``."""
    METRICS[name] = fn


def apply_metric(cbg: CommunityBipartiteGraph, metric: str, **options) -> CommunityBipartiteGraph:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise MLNError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    if metric == WE:
        return fn(cbg)
    return fn(cbg, **options)
