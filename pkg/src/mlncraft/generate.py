"""Planted-partition multilayer network generator.

Each layer is a planted-partition graph with contiguous, near-equal blocks.
Inter-layer edges are denser between blocks paired by index (block ``b`` of
one layer with block ``b`` of the other) than elsewhere.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import MLNError
from .model import build_network


@dataclass
class LayerSpec:
    name: str
    n: int
    blocks: int = 1
    p_in: float = 0.1
    p_out: float = 0.0
    entity_type: str | None = None


@dataclass
class CouplingSpec:
    layer_a: str
    layer_b: str
    p_match: float
    p_cross: float = 0.0


@dataclass
class SyntheticSpec:
    layers: list
    couplings: list = field(default_factory=list)
    seed: int = 0

    def validate(self):
        names = set()
        for layer in self.layers:
            if layer.n < 0 or layer.blocks < 1:
                raise MLNError(f"layer {layer.name!r}: need n >= 0 and at least one block")
            for p in (layer.p_in, layer.p_out):
                if not 0.0 <= p <= 1.0:
                    raise MLNError(f"layer {layer.name!r}: probability {p} outside [0, 1]")
            names.add(layer.name)
        for c in self.couplings:
            if c.layer_a not in names or c.layer_b not in names:
                raise MLNError(f"coupling {c.layer_a}-{c.layer_b} names an unknown layer")
            for p in (c.p_match, c.p_cross):
                if not 0.0 <= p <= 1.0:
                    raise MLNError(f"coupling {c.layer_a}-{c.layer_b}: probability {p} outside [0, 1]")
        return self

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticSpec":
        return cls(
            layers=[LayerSpec(**d) for d in doc["layers"]],
            couplings=[CouplingSpec(**d) for d in doc.get("couplings", [])],
            seed=int(doc.get("seed", 0)),
        ).validate()

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_shorthand(cls, text: str, seed: int | None = None) -> "SyntheticSpec":
        """Parse ``"3x10000,deg20[,blocks50][,inter2][,seed7]"``.

        Builds layers ``L0..L{k-1}`` of distinct entity types with 80% of
        each vertex's expected degree inside its block, couples consecutive
        layers (closing the cycle for three or more layers) with ``inter``
        expected inter-layer edges per vertex, 80% of them inside the paired
        block.
        """
        parts = [p.strip() for p in text.split(",") if p.strip()]
        m = re.fullmatch(r"(\d+)x(\d+)", parts[0]) if parts else None
        if not m:
            raise MLNError(f"bad generator shorthand {text!r}; expected e.g. '3x10000,deg20'")
        count, n = int(m.group(1)), int(m.group(2))
        opts = {"deg": 10.0, "blocks": max(1, n // 200), "inter": 2.0, "seed": 0}
        for part in parts[1:]:
            km = re.fullmatch(r"(deg|blocks|inter|seed)(\d+(?:\.\d+)?)", part)
            if not km:
                raise MLNError(f"bad generator option {part!r}")
            opts[km.group(1)] = float(km.group(2))
        blocks = max(1, min(int(opts["blocks"]), max(n, 1)))
        size = n / blocks
        deg, inter = opts["deg"], opts["inter"]
        if blocks == 1:
            p_in, p_out = deg / max(n - 1, 1), 0.0
            p_match, p_cross = inter / max(n, 1), 0.0
        else:
            p_in = 0.8 * deg / max(size - 1, 1)
            p_out = 0.2 * deg / (n - size)
            p_match = 0.8 * inter / size
            p_cross = 0.2 * inter / (n - size)
        clip = lambda p: float(min(1.0, p))  # noqa: E731
        layers = [LayerSpec(f"L{i}", n, blocks, clip(p_in), clip(p_out), f"T{i}") for i in range(count)]
        pairs = [(i, i + 1) for i in range(count - 1)]
        if count >= 3:
            pairs.append((count - 1, 0))
        couplings = [CouplingSpec(f"L{a}", f"L{b}", clip(p_match), clip(p_cross)) for a, b in pairs]
        return cls(layers, couplings, int(opts["seed"]) if seed is None else seed).validate()


def _block_bounds(n, blocks):
    sizes = np.full(blocks, n // blocks)
    sizes[: n % blocks] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


def _sample(rng, population, p):
    if population == 0 or p <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(population, dtype=np.int64)
    k = int(rng.binomial(population, p))
    return np.sort(rng.choice(population, size=k, replace=False)).astype(np.int64)


def _triangle_pairs(x, s):
    """Decode row-major indices of the strict upper triangle of an s x s grid."""
    start = lambda i: i * (2 * s - i - 1) // 2  # noqa: E731
    b = 2 * s - 1
    i = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * x, 0.0))) / 2.0).astype(np.int64)
    i = np.clip(i, 0, max(s - 2, 0))
    for _ in range(2):
        i = np.where(start(i + 1) <= x, i + 1, i)
        i = np.where(start(i) > x, i - 1, i)
    j = x - start(i) + i + 1
    return i, j


def _planted_layer(rng, spec: LayerSpec):
    bounds = _block_bounds(spec.n, spec.blocks)
    parts = []
    for a in range(spec.blocks):
        lo_a, s_a = bounds[a], bounds[a + 1] - bounds[a]
        picks = _sample(rng, s_a * (s_a - 1) // 2, spec.p_in)
        if len(picks):
            i, j = _triangle_pairs(picks, s_a)
            parts.append(np.stack([lo_a + i, lo_a + j], axis=1))
        for b in range(a + 1, spec.blocks):
            lo_b, s_b = bounds[b], bounds[b + 1] - bounds[b]
            picks = _sample(rng, s_a * s_b, spec.p_out)
            if len(picks):
                parts.append(np.stack([lo_a + picks // s_b, lo_b + picks % s_b], axis=1))
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    labels = np.repeat(np.arange(spec.blocks), np.diff(bounds))
    return edges, labels


def _coupling(rng, spec: CouplingSpec, la: LayerSpec, lb: LayerSpec):
    ba, bb = _block_bounds(la.n, la.blocks), _block_bounds(lb.n, lb.blocks)
    parts = []
    for a in range(la.blocks):
        for b in range(lb.blocks):
            s_a, s_b = ba[a + 1] - ba[a], bb[b + 1] - bb[b]
            picks = _sample(rng, s_a * s_b, spec.p_match if a == b else spec.p_cross)
            if len(picks):
                parts.append(np.stack([ba[a] + picks // s_b, bb[b] + picks % s_b], axis=1))
    return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)


def generate_synthetic(spec: SyntheticSpec):
    """Build the network described by ``spec``.

    Returns ``(network, planted)`` where ``planted`` maps each layer name to
    its block label per vertex.  Identical specs give identical networks.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    layer_docs, planted = [], {}
    for ls in spec.layers:
        edges, labels = _planted_layer(rng, ls)
        layer_docs.append({"name": ls.name, "n": ls.n, "edges": edges, "entity_type": ls.entity_type or ls.name})
        planted[ls.name] = labels
    by_name = {ls.name: ls for ls in spec.layers}
    inter = [
        (c.layer_a, c.layer_b, _coupling(rng, c, by_name[c.layer_a], by_name[c.layer_b])) for c in spec.couplings
    ]
    return build_network(layer_docs, inter), planted
