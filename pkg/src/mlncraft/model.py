"""Multilayer network data model.

Layers are undirected simple graphs over dense integer vertex ids
``0..n-1``.  Heterogeneous layers are joined by explicit bipartite
inter-layer edge sets; homogeneous layers share one vertex universe and
are coupled implicitly by vertex identity.

All arrays held by these objects are marked read-only once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DanglingEndpoint,
    DuplicateLayerName,
    MLNError,
    NoCouplingBetweenLayers,
    SelfLoop,
    UnknownLayer,
    UnknownVertex,
)

HOMOGENEOUS = "homogeneous"
HETEROGENEOUS = "heterogeneous"


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _as_pairs(edges) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise MLNError("edges must be a sequence of (u, v) pairs")
    return arr


def _unique_rows(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr.reshape(0, 2)
    return np.unique(arr, axis=0)


@dataclass(frozen=True, eq=False)
class Layer:
    """One layer of a multilayer network.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    rows sorted lexicographically.  Build instances with :meth:`from_edges`.
    """

    name: str
    n: int
    edges: np.ndarray
    entity_type: str = "entity"
    labels: tuple | None = None
    id: int | None = None

    @classmethod
    def from_edges(cls, name, n, edges=(), entity_type="entity", labels=None, id=None):
        n = int(n)
        if n < 0:
            raise MLNError(f"layer {name!r}: vertex count must be non-negative")
        arr = _as_pairs(edges)
        if len(arr):
            bad = (arr < 0) | (arr >= n)
            if bad.any():
                row = arr[bad.any(axis=1)][0]
                raise DanglingEndpoint(
                    f"layer {name!r}: edge ({row[0]}, {row[1]}) references a vertex outside 0..{n - 1}"
                )
            loops = arr[:, 0] == arr[:, 1]
            if loops.any():
                v = arr[loops][0, 0]
                raise SelfLoop(f"layer {name!r}: self-loop on vertex {v}")
            arr = np.sort(arr, axis=1)
        arr = _unique_rows(arr)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise MLNError(f"layer {name!r}: {len(labels)} labels for {n} vertices")
        return cls(str(name), n, _frozen(arr), str(entity_type), labels, id)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        return _frozen(deg)

    @cached_property
    def _csr(self):
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return _frozen(indptr), _frozen(dst[order].astype(np.int64))

    @property
    def indptr(self) -> np.ndarray:
        return self._csr[0]

    @property
    def indices(self) -> np.ndarray:
        """Neighbour lists in CSR order, each list sorted ascending."""
        return self._csr[1]

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` codes of the canonical edges, for set algebra."""
        return _frozen(self.edges[:, 0] * self.n + self.edges[:, 1])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        u, v = min(u, v), max(u, v)
        key = u * self.n + v
        i = np.searchsorted(self.edge_keys, key)
        return bool(i < len(self.edge_keys) and self.edge_keys[i] == key)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels or ())}

    def vertex(self, label) -> int:
        """Vertex id for a label (or for an integer id when unlabelled)."""
        if self.labels is None:
            v = int(label)
            if not 0 <= v < self.n:
                raise UnknownVertex(f"layer {self.name!r} has no vertex {label!r}")
            return v
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise UnknownVertex(f"layer {self.name!r} has no vertex {label!r}") from None

    def vertex_universe(self) -> tuple:
        return self.labels if self.labels is not None else tuple(range(self.n))

    def __repr__(self):
        return f"Layer({self.name!r}, n={self.n}, m={self.m}, entity={self.entity_type!r})"


@dataclass(frozen=True, eq=False)
class InterLayerEdgeSet:
    """Bipartite edges between two layers, stored with ``layer_a < layer_b``.

    Row ``(u, v)`` of ``edges`` joins vertex ``u`` of ``layer_a`` to vertex
    ``v`` of ``layer_b``.
    """

    layer_a: int
    layer_b: int
    edges: np.ndarray
    implicit: bool = False

    def __len__(self):
        return len(self.edges)

    def oriented(self, from_layer: int) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays ``(in from_layer, in the other layer)``."""
        if from_layer == self.layer_a:
            return self.edges[:, 0], self.edges[:, 1]
        if from_layer == self.layer_b:
            return self.edges[:, 1], self.edges[:, 0]
        raise UnknownLayer(f"layer {from_layer} is not an endpoint of this coupling")


@dataclass(frozen=True)
class SubgraphView:
    vertices: tuple
    n: int
    m: int
    degrees: dict


@dataclass(frozen=True)
class Community:
    layer: int
    id: int
    members: tuple
    internal_edge_count: int
    density: float

    @property
    def size(self) -> int:
        return len(self.members)


def density(size, internal_edges):
    """Edge density ``2|E| / (|V| (|V| - 1))``; a singleton has density 1."""
    size = np.asarray(size, dtype=np.float64)
    internal_edges = np.asarray(internal_edges, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 2.0 * internal_edges / (size * (size - 1.0))
    return np.where(size < 2, 1.0, d)


class CommunitySet:
    """A partition of one layer's vertices into communities.

    Community ids are canonical: ``0..c-1`` numbered in order of each
    community's smallest vertex, so equal partitions compare equal.
    """

    def __init__(self, layer: Layer, labels):
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (layer.n,):
            raise MLNError(
                f"layer {layer.name!r}: assignment has {labels.size} entries for {layer.n} vertices"
            )
        self.layer = layer
        self.labels = _frozen(canonical_labels(labels))
        self._cache = {}

    @property
    def count(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def __len__(self):
        return self.count

    @cached_property
    def sizes(self) -> np.ndarray:
        return _frozen(np.bincount(self.labels, minlength=self.count))

    @cached_property
    def internal_edges(self) -> np.ndarray:
        e = self.layer.edges
        lab = self.labels
        inside = lab[e[:, 0]] == lab[e[:, 1]]
        return _frozen(np.bincount(lab[e[inside, 0]], minlength=self.count))

    @cached_property
    def densities(self) -> np.ndarray:
        return _frozen(density(self.sizes, self.internal_edges))

    @cached_property
    def _member_lists(self):
        order = np.argsort(self.labels, kind="stable")
        bounds = np.concatenate([[0], np.cumsum(self.sizes)])
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.count)]

    def members(self, c: int) -> np.ndarray:
        return self._member_lists[c]

    def __getitem__(self, c: int) -> Community:
        return Community(
            layer=self.layer.id if self.layer.id is not None else -1,
            id=int(c),
            members=tuple(int(v) for v in self.members(c)),
            internal_edge_count=int(self.internal_edges[c]),
            density=float(self.densities[c]),
        )

    @property
    def communities(self) -> list[Community]:
        return [self[c] for c in range(self.count)]

    def assignment(self) -> dict:
        return {int(v): int(c) for v, c in enumerate(self.labels)}

    def __eq__(self, other):
        if not isinstance(other, CommunitySet):
            return NotImplemented
        return self.layer.name == other.layer.name and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.layer.name, self.labels.tobytes()))

    def __repr__(self):
        return f"CommunitySet(layer={self.layer.name!r}, communities={self.count})"


def canonical_labels(labels) -> np.ndarray:
    """Renumber arbitrary labels to 0..c-1 by first occurrence."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.ravel()]


class MultilayerNetwork:
    """An immutable collection of layers and inter-layer edge sets."""

    def __init__(self, layers: Sequence[Layer], inter: Sequence[InterLayerEdgeSet]):
        self.layers = tuple(layers)
        self.inter = tuple(sorted(inter, key=lambda s: (s.layer_a, s.layer_b)))
        self._by_name = {layer.name: layer for layer in self.layers}
        self._coupling = {(s.layer_a, s.layer_b): s for s in self.inter}

    @cached_property
    def kind(self) -> str:
        types = {layer.entity_type for layer in self.layers}
        if len(types) <= 1:
            universes = {layer.vertex_universe() for layer in self.layers}
            if len(universes) <= 1:
                return HOMOGENEOUS
        return HETEROGENEOUS

    @property
    def is_homogeneous(self) -> bool:
        return self.kind == HOMOGENEOUS

    def layer(self, key) -> Layer:
        if isinstance(key, Layer):
            key = key.id if key.id is not None else key.name
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if 0 <= key < len(self.layers):
                return self.layers[key]
            raise UnknownLayer(f"no layer with id {key}")
        try:
            return self._by_name[str(key)]
        except KeyError:
            raise UnknownLayer(f"no layer named {key!r}") from None

    @property
    def layer_names(self) -> list[str]:
        return [layer.name for layer in self.layers]

    def coupling(self, a, b) -> InterLayerEdgeSet | None:
        """The edge set joining two layers, or ``None`` if they are uncoupled.

        Homogeneous networks without an explicit set are coupled by identity.
        """
        i, j = self.layer(a).id, self.layer(b).id
        if i == j:
            return None
        lo, hi = min(i, j), max(i, j)
        found = self._coupling.get((lo, hi))
        if found is None and self.is_homogeneous:
            found = self._identity_coupling(lo, hi)
        return found

    def _identity_coupling(self, lo, hi):
        key = ("identity", lo, hi)
        cache = self.__dict__.setdefault("_implicit", {})
        if key not in cache:
            ids = np.arange(self.layers[lo].n, dtype=np.int64)
            cache[key] = InterLayerEdgeSet(lo, hi, _frozen(np.stack([ids, ids], axis=1)), implicit=True)
        return cache[key]

    def inter_edges(self, a, b) -> tuple[np.ndarray, np.ndarray]:
        """Inter-layer edges oriented from layer ``a`` to layer ``b``."""
        s = self.coupling(a, b)
        if s is None:
            raise NoCouplingBetweenLayers(
                f"layers {self.layer(a).name!r} and {self.layer(b).name!r} are not coupled"
            )
        return s.oriented(self.layer(a).id)

    def meta_edges(self) -> list[tuple[str, str]]:
        """Coupled layer pairs, i.e. the edges of the layer meta-graph."""
        if self.is_homogeneous and not self.inter:
            n = len(self.layers)
            return [(self.layers[i].name, self.layers[j].name) for i in range(n) for j in range(i + 1, n)]
        return [(self.layers[s.layer_a].name, self.layers[s.layer_b].name) for s in self.inter]

    def __repr__(self):
        return f"MultilayerNetwork({self.kind}, layers={self.layer_names}, couplings={len(self.inter)})"


def _layer_from_spec(spec) -> Layer:
    if isinstance(spec, Layer):
        return spec
    if isinstance(spec, dict):
        labels = spec.get("labels")
        n = spec.get("n", len(labels) if labels is not None else None)
        if n is None:
            raise MLNError(f"layer spec {spec.get('name')!r} needs 'n' or 'labels'")
        return Layer.from_edges(
            spec["name"], n, spec.get("edges", ()), spec.get("entity_type", spec.get("entity", "entity")), labels
        )
    raise MLNError(f"cannot build a layer from {type(spec).__name__}")


def build_network(layers: Iterable, inter: Iterable = ()) -> MultilayerNetwork:
    """Validate layer and coupling specs and assemble a network.

    ``layers`` holds :class:`Layer` objects or dicts with ``name``, ``n`` (or
    ``labels``), ``edges`` and optional ``entity_type``.  ``inter`` holds
    ``(layer_a, layer_b, edges)`` triples naming layers by name or id, or
    ready :class:`InterLayerEdgeSet` objects.
    """
    built = []
    seen = set()
    for i, spec in enumerate(layers):
        layer = _layer_from_spec(spec)
        if layer.name in seen:
            raise DuplicateLayerName(f"layer name {layer.name!r} used twice")
        seen.add(layer.name)
        built.append(replace(layer, id=i) if layer.id != i else layer)

    by_name = {layer.name: layer for layer in built}

    def resolve(key):
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if 0 <= key < len(built):
                return built[key]
        elif str(key) in by_name:
            return by_name[str(key)]
        raise UnknownLayer(f"inter-layer edges reference unknown layer {key!r}")

    merged: dict[tuple[int, int], list[np.ndarray]] = {}
    for spec in inter:
        if isinstance(spec, InterLayerEdgeSet):
            a, b, arr = built[spec.layer_a], built[spec.layer_b], np.asarray(spec.edges, dtype=np.int64)
        else:
            ka, kb, edges = spec
            a, b, arr = resolve(ka), resolve(kb), _as_pairs(edges)
        if a.id == b.id:
            raise MLNError(f"inter-layer edges must join two different layers, got {a.name!r} twice")
        arr = arr.reshape(-1, 2)
        for col, layer in ((0, a), (1, b)):
            bad = (arr[:, col] < 0) | (arr[:, col] >= layer.n)
            if bad.any():
                raise DanglingEndpoint(
                    f"inter edge {tuple(int(x) for x in arr[bad][0])} between {a.name!r} and {b.name!r}: "
                    f"vertex {int(arr[bad][0, col])} does not exist in layer {layer.name!r}"
                )
        if a.id > b.id:
            a, b, arr = b, a, arr[:, ::-1]
        merged.setdefault((a.id, b.id), []).append(arr)

    sets = [
        InterLayerEdgeSet(ia, ib, _frozen(_unique_rows(np.concatenate(parts))))
        for (ia, ib), parts in merged.items()
    ]
    return MultilayerNetwork(built, sets)


def induced_subgraph(layer: Layer, members) -> SubgraphView:
    """Vertex count, edge count and within-view degrees of ``members``."""
    members = np.unique(np.asarray(list(members), dtype=np.int64))
    if len(members) and (members[0] < 0 or members[-1] >= layer.n):
        bad = members[(members < 0) | (members >= layer.n)][0]
        raise UnknownVertex(f"layer {layer.name!r} has no vertex {bad}")
    mask = np.zeros(layer.n, dtype=bool)
    mask[members] = True
    e = layer.edges
    inside = e[mask[e[:, 0]] & mask[e[:, 1]]]
    deg = np.bincount(inside.ravel(), minlength=layer.n)
    return SubgraphView(
        vertices=tuple(int(v) for v in members),
        n=len(members),
        m=len(inside),
        degrees={int(v): int(deg[v]) for v in members},
    )


def inter_edges_between(net: MultilayerNetwork, comm_a: Community, comm_b: Community) -> set:
    """The inter-layer edges with one endpoint in each community."""
    src, dst = net.inter_edges(comm_a.layer, comm_b.layer)
    in_a = np.zeros(net.layer(comm_a.layer).n, dtype=bool)
    in_a[list(comm_a.members)] = True
    in_b = np.zeros(net.layer(comm_b.layer).n, dtype=bool)
    in_b[list(comm_b.members)] = True
    keep = in_a[src] & in_b[dst]
    return {(int(u), int(v)) for u, v in zip(src[keep], dst[keep])}
