"""2-community and k-community detection over a layer ordering.

A k-community extends a (k-1)-community by matching the communities of its
last layer against the next layer of the ordering.  Elements that fail to
extend are kept as partial elements; in a cyclic ordering the closing match
must return to the element's own starting community.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .analysis import detect_communities
from .cbg import apply_metric, build_cbg
from .errors import IllegalRepeat, MLNError, UncoupledConsecutiveLayers
from .matching import max_weight_matching
from .model import MultilayerNetwork

TOTAL = "total"
PARTIAL = "partial"
NO_MATCH = "no_match"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class LayerOrdering:
    layers: tuple
    cyclic: bool

    @property
    def k(self) -> int:
        return len(self.layers) - 1 if self.cyclic else len(self.layers)

    def __str__(self):
        return ",".join(self.layers)


@dataclass(frozen=True)
class Link:
    left_layer: str
    left: int
    right_layer: str
    right: int
    weight: float
    inter_edge_count: int
    edges: tuple = ()


@dataclass(frozen=True)
class KCommunityElement:
    tuple: tuple
    links: tuple
    status: str
    truncation_point: int | None = None
    failure_kind: str | None = None
    mismatched_with: int | None = None

    @property
    def strength(self) -> float:
        """Bottleneck strength: the weakest link along the element."""
        return min(link.weight for link in self.links) if self.links else 0.0


@dataclass(frozen=True)
class KCommunityResult:
    ordering: LayerOrdering
    metric: str
    elements: tuple
    per_step_match_counts: tuple

    @property
    def totals(self) -> list:
        return [e for e in self.elements if e.status == TOTAL]

    @property
    def partials(self) -> list:
        return [e for e in self.elements if e.status == PARTIAL]


def parse_ordering(net: MultilayerNetwork, text) -> LayerOrdering:
    """Parse ``"M,A,D,M"``-style orderings; a repeated first layer at the
    end makes the ordering cyclic."""
    names = [t.strip() for t in text.split(",")] if isinstance(text, str) else list(text)
    if len(names) < 2 or any(t == "" for t in names):
        raise MLNError(f"ordering {text!r} needs at least two layer names")
    names = [net.layer(t).name for t in names]
    cyclic = len(names) >= 3 and names[0] == names[-1]
    body = names[:-1] if cyclic else names
    seen = set()
    for name in body:
        if name in seen:
            raise IllegalRepeat(f"layer {name!r} repeats inside ordering {text!r}")
        seen.add(name)
    if not cyclic and names[-1] in set(names[:-1]):
        raise IllegalRepeat(f"layer {names[-1]!r} repeats inside ordering {text!r}")
    for a, b in zip(names, names[1:]):
        if net.coupling(a, b) is None:
            raise UncoupledConsecutiveLayers(f"layers {a!r} and {b!r} have no inter-layer edges between them")
    return LayerOrdering(tuple(names), cyclic)


def _community_sets(net, names, community_sets, seed):
    sets = dict(community_sets or {})
    for name in names:
        if name not in sets:
            sets[name] = detect_communities(net.layer(name), seed=seed)
    return sets


def _match(net, cset_left, cset_right, metric, options, left_communities=None, timings=None):
    start = time.perf_counter()
    cbg = build_cbg(net, cset_left, cset_right, left_communities)
    weighted = apply_metric(cbg, metric, **options)
    matching = max_weight_matching(weighted)
    if timings is not None:
        timings.append(time.perf_counter() - start)
    return weighted, matching


def _link(cbg, left, right, weight, flip=False):
    index = cbg.edge_index(left, right)
    edges = cbg.inter_edges_of(index)
    count = int(cbg.inter_edge_count[index])
    if flip:
        return Link(cbg.right_layer, right, cbg.left_layer, left, weight, count, tuple(sorted((v, u) for u, v in edges)))
    return Link(cbg.left_layer, left, cbg.right_layer, right, weight, count, tuple(edges))


def _two_community_elements(net, name_i, name_j, metric, sets, options, timings=None):
    layer_i, layer_j = net.layer(name_i), net.layer(name_j)
    flip = layer_i.id > layer_j.id
    if flip:
        cbg, matching = _match(net, sets[name_j], sets[name_i], metric, options, timings=timings)
    else:
        cbg, matching = _match(net, sets[name_i], sets[name_j], metric, options, timings=timings)
    elements = []
    for (a, b), w in matching.per_pair_weight.items():
        link = _link(cbg, a, b, w, flip)
        elements.append(
            KCommunityElement(((link.left_layer, link.left), (link.right_layer, link.right)), (link,), TOTAL)
        )
    elements.sort(key=lambda e: e.tuple)
    return elements


def two_community(net, layer_i, layer_j, metric="we", community_sets=None, seed=0, **options) -> KCommunityResult:
    """Pair the communities of two coupled layers by maximum-weight matching.

    The matching is always solved with the lower-id layer on the left, so
    ``two_community(i, j)`` and ``two_community(j, i)`` select the same pairs.
    """
    ordering = parse_ordering(net, [layer_i, layer_j])
    name_i, name_j = ordering.layers
    sets = _community_sets(net, ordering.layers, community_sets, seed)
    elements = _two_community_elements(net, name_i, name_j, metric, sets, options)
    return KCommunityResult(ordering, metric, tuple(elements), (len(elements),))


def k_community(net, ordering, metric="we", community_sets=None, seed=0, timings=None, **options) -> KCommunityResult:
    """Recursive k-community detection along ``ordering``.

    Step one pairs the first two layers.  Each later step matches the
    communities that still head a live element against every community of
    the next layer.  ``timings``, when a list, receives the wall-clock
    seconds of every step's bipartite graph build, weighting and matching.
    """
    if not isinstance(ordering, LayerOrdering):
        ordering = parse_ordering(net, ordering)
    names = ordering.layers
    sets = _community_sets(net, dict.fromkeys(names), community_sets, seed)

    live = _two_community_elements(net, names[0], names[1], metric, sets, options, timings)
    counts = [len(live)]
    finished = []

    for t in range(1, len(names) - 1):
        closing = ordering.cyclic and t + 1 == len(names) - 1
        heads = [e.tuple[-1][1] for e in live]
        cbg, matching = _match(net, sets[names[t]], sets[names[t + 1]], metric, options, heads, timings)
        partner = {a: (b, w) for (a, b), w in matching.per_pair_weight.items()}
        counts.append(len(matching))
        extended = []
        for element in live:
            head = element.tuple[-1][1]
            if head not in partner:
                finished.append(_truncate(element, t + 1, NO_MATCH))
                continue
            right, w = partner[head]
            if closing and right != element.tuple[0][1]:
                finished.append(_truncate(element, t + 1, INCONSISTENT, right))
                continue
            link = _link(cbg, head, right, w)
            extended.append(
                KCommunityElement(element.tuple + ((names[t + 1], right),), element.links + (link,), TOTAL)
            )
        live = extended

    elements = tuple(sorted(live + finished, key=_first_pair))
    return KCommunityResult(ordering, metric, elements, tuple(counts))


def _first_pair(element):
    return element.tuple[0][1], element.tuple[1][1]


def _truncate(element, point, kind, mismatched=None):
    return KCommunityElement(element.tuple, element.links, PARTIAL, point, kind, mismatched)


def rank_elements(result: KCommunityResult) -> list:
    """Elements by descending bottleneck strength, then first link weight,
    then ascending community tuple."""
    return sorted(result.elements, key=lambda e: (-e.strength, -e.links[0].weight, e.tuple))
