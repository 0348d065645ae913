"""MLN text files and canonical JSON result documents.

MLN format, one file per network::

    # comment
    [layers]
    A entity=actor
    D entity=director
    [vertices]        # optional, declares isolated vertices
    A tom
    [intra]
    A tom ann
    [inter]
    A tom D joe

Vertex tokens are arbitrary whitespace-free strings.  Layers with the same
entity type share one vertex table, ids assigned in order of first
appearance.  An untagged layer takes its own name as entity type, unless
the file has no ``[inter]`` section, in which case untagged layers share a
common type (a homogeneous network).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .analysis import CentralityScores, HubSet
from .errors import MLNError, ParseError
from .kcommunity import KCommunityElement, KCommunityResult, LayerOrdering, Link
from .model import CommunitySet, MultilayerNetwork, build_network

SCHEMA = "mlncraft/1"
SECTIONS = ("layers", "vertices", "intra", "inter")
DEFAULT_ENTITY = "entity"


def parse_mln(text: str, path=None) -> MultilayerNetwork:
    section = None
    layer_lines = []
    records = []
    has_inter = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or line[1:-1].strip().lower() not in SECTIONS:
                raise ParseError(f"unknown section header {line!r}", lineno, path)
            section = line[1:-1].strip().lower()
            has_inter = has_inter or section == "inter"
            continue
        tokens = line.split()
        if section is None:
            raise ParseError("content before the first section header", lineno, path)
        if section == "layers":
            name, entity = tokens[0], None
            for opt in tokens[1:]:
                key, sep, value = opt.partition("=")
                if key != "entity" or not sep or not value:
                    raise ParseError(f"bad layer option {opt!r}", lineno, path)
                entity = value
            layer_lines.append((lineno, name, entity))
            continue
        expected = {"vertices": 2, "intra": 3, "inter": 4}[section]
        if len(tokens) != expected:
            raise ParseError(f"{section} line needs {expected} fields, got {len(tokens)}", lineno, path)
        records.append((lineno, section, tokens))

    entity_of = {}
    for lineno, name, entity in layer_lines:
        if name in entity_of:
            raise ParseError(f"layer {name!r} declared twice", lineno, path)
        entity_of[name] = entity or (name if has_inter else DEFAULT_ENTITY)

    tables: dict[str, dict] = {t: {} for t in entity_of.values()}

    def vid(layer, token, lineno):
        if layer not in entity_of:
            raise ParseError(f"unknown layer {layer!r}", lineno, path)
        table = tables[entity_of[layer]]
        return table.setdefault(token, len(table))

    intra = {name: [] for name in entity_of}
    inter = []
    for lineno, section, tokens in records:
        if section == "vertices":
            vid(tokens[0], tokens[1], lineno)
        elif section == "intra":
            layer, u, v = tokens
            if u == v:
                raise ParseError(f"self-loop on {u!r} in layer {layer!r}", lineno, path)
            intra[layer].append((vid(layer, u, lineno), vid(layer, v, lineno)))
        else:
            la, u, lb, v = tokens
            if la == lb:
                raise ParseError(f"inter edge joins layer {la!r} to itself", lineno, path)
            inter.append((la, lb, (vid(la, u, lineno), vid(lb, v, lineno))))

    layers = []
    for name, entity in entity_of.items():
        labels = list(tables[entity])
        layers.append({"name": name, "n": len(labels), "labels": labels, "edges": intra[name], "entity_type": entity})
    grouped = {}
    for la, lb, edge in inter:
        grouped.setdefault((la, lb), []).append(edge)
    return build_network(layers, [(a, b, edges) for (a, b), edges in grouped.items()])


def load_mln(path) -> MultilayerNetwork:
    return parse_mln(Path(path).read_text(), str(path))


def format_mln(net: MultilayerNetwork) -> str:
    out = ["[layers]"]
    for layer in net.layers:
        out.append(f"{layer.name} entity={layer.entity_type}")
    out.append("[vertices]")
    for layer in net.layers:
        out.extend(f"{layer.name} {layer.label(v)}" for v in range(layer.n))
    out.append("[intra]")
    for layer in net.layers:
        out.extend(f"{layer.name} {layer.label(u)} {layer.label(v)}" for u, v in layer.edges.tolist())
    if net.inter:
        out.append("[inter]")
        for s in net.inter:
            a, b = net.layers[s.layer_a], net.layers[s.layer_b]
            out.extend(f"{a.name} {a.label(u)} {b.name} {b.label(v)}" for u, v in s.edges.tolist())
    return "\n".join(out) + "\n"


def save_mln(net: MultilayerNetwork, path) -> None:
    Path(path).write_text(format_mln(net))


# --- JSON documents -------------------------------------------------------


def _link_doc(link: Link) -> dict:
    return {
        "left_layer": link.left_layer,
        "left": link.left,
        "right_layer": link.right_layer,
        "right": link.right,
        "weight": link.weight,
        "inter_edge_count": link.inter_edge_count,
        "edges": [list(e) for e in link.edges],
    }


def _element_doc(e: KCommunityElement) -> dict:
    return {
        "tuple": [[layer, c] for layer, c in e.tuple],
        "links": [_link_doc(link) for link in e.links],
        "status": e.status,
        "truncation_point": e.truncation_point,
        "failure_kind": e.failure_kind,
        "mismatched_with": e.mismatched_with,
        "strength": e.strength,
    }


def _cset_doc(cset: CommunitySet) -> dict:
    layer = cset.layer
    return {
        "layer": layer.name,
        "n": layer.n,
        "vertices": list(layer.vertex_universe()) if layer.labels is not None else None,
        "assignment": cset.labels.tolist(),
        "communities": [
            {
                "id": c,
                "size": int(cset.sizes[c]),
                "internal_edges": int(cset.internal_edges[c]),
                "density": float(cset.densities[c]),
            }
            for c in range(cset.count)
        ],
    }


def to_document(obj) -> dict:
    """Plain-dict form of a result object, tagged with schema and type."""
    from .bench import BenchReport

    if isinstance(obj, KCommunityResult):
        doc = {
            "type": "kcommunity",
            "ordering": list(obj.ordering.layers),
            "cyclic": obj.ordering.cyclic,
            "metric": obj.metric,
            "per_step_match_counts": list(obj.per_step_match_counts),
            "elements": [_element_doc(e) for e in obj.elements],
        }
    elif isinstance(obj, CommunitySet):
        doc = {"type": "communities", **_cset_doc(obj)}
    elif isinstance(obj, dict) and obj and all(isinstance(v, CommunitySet) for v in obj.values()):
        doc = {"type": "community_sets", "layers": {name: _cset_doc(c) for name, c in obj.items()}}
    elif isinstance(obj, HubSet):
        doc = {
            "type": "hubs",
            "scope": obj.scope,
            "metric": obj.metric,
            "threshold_rule": obj.threshold_rule,
            "hubs": sorted(obj.hubs),
        }
    elif isinstance(obj, CentralityScores):
        doc = {"type": "centrality", "layer": obj.layer, "metric": obj.metric, "scores": obj.scores.tolist()}
    elif isinstance(obj, BenchReport):
        doc = {"type": "bench", **obj.as_dict()}
    elif isinstance(obj, dict) and "type" in obj:
        doc = dict(obj)
    else:
        raise MLNError(f"cannot serialise {type(obj).__name__}")
    doc["schema"] = SCHEMA
    return doc


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_document(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def save_result(obj, path) -> None:
    try:
        Path(path).write_text(dumps(obj))
    except OSError as exc:
        raise MLNError(f"cannot write {path}: {exc}") from exc


def _element_from(doc) -> KCommunityElement:
    links = tuple(
        Link(
            d["left_layer"], d["left"], d["right_layer"], d["right"], d["weight"], d["inter_edge_count"],
            tuple(tuple(e) for e in d["edges"]),
        )
        for d in doc["links"]
    )
    return KCommunityElement(
        tuple((layer, c) for layer, c in doc["tuple"]),
        links,
        doc["status"],
        doc["truncation_point"],
        doc["failure_kind"],
        doc["mismatched_with"],
    )


def _cset_from(doc, net):
    if net is None:
        raise MLNError("loading community sets needs the network they partition")
    return CommunitySet(net.layer(doc["layer"]), np.asarray(doc["assignment"], dtype=np.int64))


def from_document(doc: dict, net: MultilayerNetwork | None = None):
    if doc.get("schema") != SCHEMA:
        raise MLNError(f"unsupported schema {doc.get('schema')!r}")
    kind = doc.get("type")
    if kind == "kcommunity":
        return KCommunityResult(
            LayerOrdering(tuple(doc["ordering"]), doc["cyclic"]),
            doc["metric"],
            tuple(_element_from(e) for e in doc["elements"]),
            tuple(doc["per_step_match_counts"]),
        )
    if kind == "communities":
        return _cset_from(doc, net)
    if kind == "community_sets":
        return {name: _cset_from(d, net) for name, d in doc["layers"].items()}
    if kind == "hubs":
        return HubSet(doc["scope"], doc["metric"], frozenset(doc["hubs"]), doc["threshold_rule"])
    if kind == "centrality":
        return CentralityScores(doc["layer"], doc["metric"], np.asarray(doc["scores"]))
    if kind == "bench":
        from .bench import BenchReport

        return BenchReport.from_dict(doc)
    raise MLNError(f"unknown document type {kind!r}")


def loads(text: str, net=None):
    return from_document(json.loads(text), net)


def load_result(path, net=None):
    return loads(Path(path).read_text(), net)


_INT = {"type": "integer"}
_NUM = {"type": "number"}
_STR = {"type": "string"}
_NULLABLE_INT = {"type": ["integer", "null"]}

_LINK = {
    "type": "object",
    "required": ["left_layer", "left", "right_layer", "right", "weight", "inter_edge_count", "edges"],
    "properties": {
        "left_layer": _STR,
        "left": _INT,
        "right_layer": _STR,
        "right": _INT,
        "weight": _NUM,
        "inter_edge_count": _INT,
        "edges": {"type": "array", "items": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2}},
    },
}

_CSET = {
    "type": "object",
    "required": ["layer", "n", "assignment", "communities"],
    "properties": {
        "layer": _STR,
        "n": _INT,
        "assignment": {"type": "array", "items": _INT},
        "communities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "size", "internal_edges", "density"],
                "properties": {"id": _INT, "size": _INT, "internal_edges": _INT, "density": _NUM},
            },
        },
    },
}

SCHEMAS = {
    "kcommunity": {
        "type": "object",
        "required": ["schema", "type", "ordering", "cyclic", "metric", "per_step_match_counts", "elements"],
        "properties": {
            "schema": {"const": SCHEMA},
            "ordering": {"type": "array", "items": _STR, "minItems": 2},
            "cyclic": {"type": "boolean"},
            "metric": _STR,
            "per_step_match_counts": {"type": "array", "items": _INT},
            "elements": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["tuple", "links", "status", "truncation_point", "failure_kind"],
                    "properties": {
                        "tuple": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
                        "links": {"type": "array", "items": _LINK},
                        "status": {"enum": ["total", "partial"]},
                        "truncation_point": _NULLABLE_INT,
                        "failure_kind": {"enum": ["no_match", "inconsistent", None]},
                        "mismatched_with": _NULLABLE_INT,
                        "strength": _NUM,
                    },
                },
            },
        },
    },
    "communities": {**_CSET, "required": _CSET["required"] + ["schema", "type"]},
    "community_sets": {
        "type": "object",
        "required": ["schema", "type", "layers"],
        "properties": {"layers": {"type": "object", "additionalProperties": _CSET}},
    },
    "hubs": {
        "type": "object",
        "required": ["schema", "type", "scope", "metric", "threshold_rule", "hubs"],
        "properties": {"hubs": {"type": "array", "items": _INT}, "metric": _STR, "scope": _STR},
    },
    "centrality": {
        "type": "object",
        "required": ["schema", "type", "layer", "metric", "scores"],
        "properties": {"scores": {"type": "array", "items": _NUM}},
    },
    "bench": {
        "type": "object",
        "required": [
            "schema", "type", "layer_seconds", "step_seconds", "composition_total",
            "baseline_seconds", "ratio", "repetitions",
        ],
        "properties": {
            "layer_seconds": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            "step_seconds": {"type": "array", "items": {"type": "number", "minimum": 0}},
            "composition_total": {"type": "number", "minimum": 0},
            "baseline_seconds": {"type": "number", "minimum": 0},
        },
    },
    "info": {
        "type": "object",
        "required": ["schema", "type", "kind", "layers", "couplings"],
    },
    "layer": {
        "type": "object",
        "required": ["schema", "type", "expression", "n", "m"],
    },
    "layer_ranking": {
        "type": "object",
        "required": ["schema", "type", "ranking"],
    },
    "ranked_elements": {
        "type": "object",
        "required": ["schema", "type", "elements"],
    },
    "generated": {
        "type": "object",
        "required": ["schema", "type", "seed", "planted"],
    },
}
