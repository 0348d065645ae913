"""Per-layer analysis: community detection, centrality and hubs.

These are the one-time costs of the decoupled approach; every multilayer
query afterwards only composes their results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import _backend
from .errors import KExceedsVertexCount, MissingVertexAssignment, MLNError, UnknownVertex
from .model import CommunitySet, Layer, canonical_labels

DEGREE = "degree"
CLOSENESS = "closeness"
ABOVE_MEAN = "above_mean"
TOP_K = "top_k"

MAX_PASSES = 100


@dataclass(frozen=True)
class CentralityScores:
    layer: str
    metric: str
    scores: np.ndarray

    def __getitem__(self, v):
        return self.scores[v]


@dataclass(frozen=True)
class HubSet:
    scope: str
    metric: str
    hubs: frozenset
    threshold_rule: str

    def __contains__(self, v):
        return v in self.hubs

    def __len__(self):
        return len(self.hubs)


def _weighted_csr(layer: Layer) -> sparse.csr_matrix:
    n = layer.n
    data = np.ones(len(layer.indices), dtype=np.float64)
    return sparse.csr_matrix((data, layer.indices, layer.indptr), shape=(n, n))


def _aggregate(adj: sparse.csr_matrix, labels: np.ndarray, c: int) -> sparse.csr_matrix:
    coo = adj.tocoo()
    agg = sparse.coo_matrix((coo.data, (labels[coo.row], labels[coo.col])), shape=(c, c)).tocsr()
    agg.sum_duplicates()
    agg.sort_indices()
    return agg


def louvain(layer: Layer, seed: int = 0, resolution: float = 1.0, kernels=None) -> np.ndarray:
    """Louvain modularity maximisation; returns canonical community labels.

    Each level visits vertices in a permutation drawn from ``seed``, moves
    every vertex to the neighbouring community of largest modularity gain
    (strictly larger than staying), then collapses communities into
    super-vertices.  Levels repeat until no vertex moves.
    """
    kernels = kernels or _backend.kernels
    n = layer.n
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if layer.m == 0:
        return np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    adj = _weighted_csr(layer)
    m2 = float(adj.sum())
    membership = np.arange(n, dtype=np.int64)
    while True:
        size = adj.shape[0]
        k = np.asarray(adj.sum(axis=1)).ravel().astype(np.float64)
        order = rng.permutation(size).astype(np.int64)
        local, moved = kernels.louvain_local_move(
            adj.indptr.astype(np.int64),
            adj.indices.astype(np.int64),
            adj.data.astype(np.float64),
            k,
            order,
            float(resolution),
            m2,
            MAX_PASSES,
        )
        if moved == 0:
            break
        local = canonical_labels(local)
        c = int(local.max()) + 1
        membership = local[membership]
        if c == size:
            break
        adj = _aggregate(adj, local, c)
    return canonical_labels(membership)


def modularity(layer: Layer, labels, resolution: float = 1.0) -> float:
    """Newman modularity of a partition of an unweighted layer."""
    if layer.m == 0:
        return 0.0
    labels = np.asarray(labels)
    m = float(layer.m)
    e = layer.edges
    inside = labels[e[:, 0]] == labels[e[:, 1]]
    tot = np.bincount(labels, weights=layer.degrees.astype(np.float64))
    return float(inside.sum() / m - resolution * np.sum((tot / (2.0 * m)) ** 2))


def detect_communities(layer: Layer, seed: int = 0, resolution: float = 1.0) -> CommunitySet:
    return CommunitySet(layer, louvain(layer, seed=seed, resolution=resolution))


def load_communities(layer: Layer, assignment) -> CommunitySet:
    """Build a community set from an external vertex -> community mapping.

    ``assignment`` is a dict keyed by vertex id or label, or a sequence with
    one community id per vertex.
    """
    if isinstance(assignment, dict):
        labels = np.full(layer.n, -1, dtype=np.int64)
        ids = {}
        for key, cid in assignment.items():
            v = int(key) if isinstance(key, (int, np.integer)) else layer.vertex(key)
            if not 0 <= v < layer.n:
                raise UnknownVertex(f"layer {layer.name!r} has no vertex {key!r}")
            labels[v] = ids.setdefault(cid, len(ids))
        missing = np.flatnonzero(labels < 0)
        if len(missing):
            raise MissingVertexAssignment(
                f"layer {layer.name!r}: {len(missing)} vertices lack a community, e.g. {layer.label(int(missing[0]))!r}"
            )
    else:
        labels = np.asarray(assignment)
        if labels.shape != (layer.n,):
            raise MissingVertexAssignment(
                f"layer {layer.name!r}: assignment covers {labels.size} of {layer.n} vertices"
            )
    return CommunitySet(layer, labels)


def _closeness(layer: Layer, chunk: int = 256) -> np.ndarray:
    n = layer.n
    out = np.zeros(n, dtype=np.float64)
    if n < 2:
        return out
    adj = _weighted_csr(layer)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        dist = csgraph.shortest_path(adj, method="D", unweighted=True, indices=rows)
        finite = np.isfinite(dist)
        reach = finite.sum(axis=1)
        total = np.where(finite, dist, 0.0).sum(axis=1)
        r1 = reach - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            score = (r1 / (n - 1.0)) * (r1 / total)
        out[rows] = np.where(reach > 1, score, 0.0)
    return out


def centrality(layer: Layer, metric: str = DEGREE) -> CentralityScores:
    """Degree or closeness centrality of every vertex.

    Closeness uses the Wasserman-Faust scaling so disconnected layers get
    comparable scores: ``((r-1)/(n-1)) * ((r-1)/sum of distances)`` where
    ``r`` counts the vertices reachable from ``v`` including itself.
    """
    if metric == DEGREE:
        scores = layer.degrees.copy()
    elif metric == CLOSENESS:
        scores = _closeness(layer)
    else:
        raise MLNError(f"unknown centrality metric {metric!r}")
    scores.setflags(write=False)
    return CentralityScores(layer.name, metric, scores)


def _rule_text(rule, k):
    return f"top_k({k})" if rule == TOP_K else rule


def layer_hubs(scores: CentralityScores, rule: str = ABOVE_MEAN, k: int | None = None) -> HubSet:
    s = np.asarray(scores.scores)
    n = len(s)
    if n == 0:
        raise MLNError("cannot select hubs from an empty score set")
    if rule == ABOVE_MEAN:
        if np.issubdtype(s.dtype, np.integer):
            hubs = np.flatnonzero(s * n >= s.sum())
        else:
            mean = s.sum() / n
            hubs = np.flatnonzero(s >= mean - 1e-12 * max(1.0, abs(mean)))
    elif rule == TOP_K:
        if k is None or k < 0:
            raise MLNError("top_k needs a non-negative k")
        if k > n:
            raise KExceedsVertexCount(f"k={k} exceeds the {n} scored vertices")
        hubs = np.lexsort((np.arange(n), -s))[:k]
    else:
        raise MLNError(f"unknown hub rule {rule!r}")
    return HubSet(scores.layer, scores.metric, frozenset(int(v) for v in hubs), _rule_text(rule, k))


def community_hub_mask(cset: CommunitySet) -> np.ndarray:
    """Boolean mask of community hubs over all vertices of the layer.

    A vertex is a hub when its degree inside its own community is at least
    the community's average internal degree ``2|E|/|V|``.  The comparison is
    done in integers, so every member of a clique or of any regular
    community is a hub.
    """
    cached = cset._cache.get("hub_mask")
    if cached is not None:
        return cached
    lab = cset.labels
    e = cset.layer.edges
    inside = e[lab[e[:, 0]] == lab[e[:, 1]]]
    deg_in = np.bincount(inside.ravel(), minlength=cset.layer.n)
    mask = deg_in * cset.sizes[lab] >= 2 * cset.internal_edges[lab]
    mask.setflags(write=False)
    cset._cache["hub_mask"] = mask
    return mask


def community_hub_counts(cset: CommunitySet) -> np.ndarray:
    cached = cset._cache.get("hub_counts")
    if cached is None:
        cached = np.bincount(cset.labels[community_hub_mask(cset)], minlength=cset.count)
        cset._cache["hub_counts"] = cached
    return cached


def community_hubs(layer: Layer, community) -> HubSet:
    """Degree hubs of one community, measured inside its induced subgraph."""
    members = np.asarray(community.members, dtype=np.int64)
    inside = np.zeros(layer.n, dtype=bool)
    inside[members] = True
    e = layer.edges
    sub = e[inside[e[:, 0]] & inside[e[:, 1]]]
    deg = np.bincount(sub.ravel(), minlength=layer.n)[members]
    hubs = members[deg * len(members) >= 2 * len(sub)]
    return HubSet(
        scope=f"{layer.name}:community {community.id}",
        metric=DEGREE,
        hubs=frozenset(int(v) for v in hubs),
        threshold_rule="induced degree >= community mean",
    )
