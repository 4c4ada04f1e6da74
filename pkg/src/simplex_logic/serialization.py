"""JSON documents for simplicial models, Kripke models and patterns.

Each document carries a ``format`` header.  ``dumps_*`` is canonical (sorted
keys, natural ordering of vertices and worlds), so load/save/load is the
identity and dumped files are stable under version control.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Union

from .dynamics import CommunicationGraph, CommunicationPattern
from .kripke import PartialEpistemicModel, build_kripke
from .simplicial import ModelError, SimplicialModel, build_model, natural_key, simplex_key

MODEL_FORMAT = "simplex-model/1"
KRIPKE_FORMAT = "kripke-model/1"
PATTERN_FORMAT = "comm-pattern/1"

PathLike = Union[str, Path]


class DocumentError(ModelError):
    """Malformed document; ``line``/``column`` are set for syntax errors."""

    def __init__(self, message: str, source: str = "<string>", line: int = 0, column: int = 0):
        where = f"{source}:{line}:{column}" if line else source
        super().__init__(f"{where}: {message}")
        self.source, self.line, self.column = source, line, column


def _parse(text: str, source: str, expected: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, source, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object", source)
    fmt = doc.get("format")
    if fmt != expected:
        raise DocumentError(f"expected format {expected!r}, found {fmt!r}", source)
    return doc


def _field(doc, key, source, kind=None, default=...):
    if key not in doc:
        if default is ...:
            raise DocumentError(f"missing field {key!r}", source)
        return default
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise DocumentError(f"field {key!r} has the wrong type", source)
    return val


def _dump(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# simplicial models

def loads_model(text: str, source: str = "<string>") -> SimplicialModel:
    doc = _parse(text, source, MODEL_FORMAT)
    agents = _field(doc, "agents", source, list)
    local = bool(_field(doc, "local", source, bool, False))
    colours, vlabels = {}, {}
    for i, v in enumerate(_field(doc, "vertices", source, list)):
        if not isinstance(v, dict) or "id" not in v or "colour" not in v:
            raise DocumentError(f"vertex #{i} needs 'id' and 'colour'", source)
        if v["id"] in colours:
            raise DocumentError(f"duplicate vertex id {v['id']!r}", source)
        colours[v["id"]] = v["colour"]
        if v.get("labels"):
            vlabels[v["id"]] = v["labels"]
    worlds, labels = {}, {}
    for i, w in enumerate(_field(doc, "worlds", source, list)):
        if not isinstance(w, dict) or "vertices" not in w:
            raise DocumentError(f"world #{i} needs 'vertices'", source)
        name = w.get("name", f"w{i}")
        if name in worlds:
            raise DocumentError(f"duplicate world name {name!r}", source)
        worlds[name] = w["vertices"]
        if w.get("labels"):
            labels[name] = w["labels"]
    try:
        return build_model(
            agents,
            colours,
            worlds,
            labels or None,
            local=local,
            vertex_labels=vlabels or None,
            owners=_field(doc, "owners", source, dict, None),
            props=_field(doc, "props", source, list, ()),
        )
    except DocumentError:
        raise
    except ModelError as exc:
        raise DocumentError(str(exc), source) from None


def dumps_model(m: SimplicialModel) -> str:
    vertices = []
    for v in sorted(m.vertices, key=natural_key):
        entry = {"id": v, "colour": m.colours[v]}
        if m.local and m.vertex_labels.get(v):
            entry["labels"] = sorted(m.vertex_labels[v])
        vertices.append(entry)
    worlds = []
    for w in sorted(m.worlds, key=lambda w: natural_key(m.name_of(w))):
        entry = {"name": m.name_of(w), "vertices": sorted(w, key=natural_key)}
        if not m.local and m.label(w):
            entry["labels"] = sorted(m.label(w))
        worlds.append(entry)
    doc = {
        "format": MODEL_FORMAT,
        "agents": list(m.agents),
        "local": m.local,
        "vertices": vertices,
        "worlds": worlds,
    }
    if m.owners:
        doc["owners"] = dict(sorted(m.owners.items()))
    if m.declared_props:
        doc["props"] = sorted(m.declared_props)
    return _dump(doc)


def load_model(path: PathLike) -> SimplicialModel:
    return loads_model(Path(path).read_text(encoding="utf-8"), str(path))


def save_model(m: SimplicialModel, path: PathLike) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8")


# --------------------------------------------------------------------------
# Kripke models

def loads_kripke(text: str, source: str = "<string>") -> PartialEpistemicModel:
    doc = _parse(text, source, KRIPKE_FORMAT)
    agents = _field(doc, "agents", source, list)
    names, labels = [], {}
    for i, w in enumerate(_field(doc, "worlds", source, list)):
        if not isinstance(w, dict) or "name" not in w:
            raise DocumentError(f"world #{i} needs 'name'", source)
        names.append(w["name"])
        if w.get("labels"):
            labels[w["name"]] = w["labels"]
    rel = _field(doc, "relations", source, dict)
    try:
        return build_kripke(
            agents,
            names,
            {a: [tuple(p) for p in pairs] for a, pairs in rel.items()},
            labels,
            props=_field(doc, "props", source, list, ()),
        )
    except ModelError as exc:
        raise DocumentError(str(exc), source) from None


def _kripke_entries(k: PartialEpistemicModel, a: str) -> List[List[str]]:
    out = []
    for block in k.classes[a]:
        members = sorted(block, key=natural_key)
        if len(members) == 1:
            out.append(members)
        else:
            out += [[x, y] for x, y in zip(members, members[1:])]
    return sorted(out, key=lambda e: [natural_key(x) for x in e])


def dumps_kripke(k: PartialEpistemicModel) -> str:
    doc = {
        "format": KRIPKE_FORMAT,
        "agents": list(k.agents),
        "worlds": [
            {"name": w, **({"labels": sorted(k.label(w))} if k.label(w) else {})} for w in k.worlds
        ],
        "relations": {a: _kripke_entries(k, a) for a in k.agents},
    }
    if k.declared_props:
        doc["props"] = sorted(k.declared_props)
    return _dump(doc)


def load_kripke(path: PathLike) -> PartialEpistemicModel:
    return loads_kripke(Path(path).read_text(encoding="utf-8"), str(path))


def save_kripke(k: PartialEpistemicModel, path: PathLike) -> None:
    Path(path).write_text(dumps_kripke(k), encoding="utf-8")


# --------------------------------------------------------------------------
# patterns

def loads_pattern(text: str, source: str = "<string>") -> CommunicationPattern:
    doc = _parse(text, source, PATTERN_FORMAT)
    agents = _field(doc, "agents", source, list)
    graphs = []
    for i, g in enumerate(_field(doc, "graphs", source, list)):
        if not isinstance(g, dict) or not isinstance(g.get("out"), dict):
            raise DocumentError(f"graph #{i} needs an 'out' object", source)
        try:
            graphs.append(CommunicationGraph.from_out(agents, g["out"], g.get("name", "")))
        except ModelError as exc:
            raise DocumentError(f"graph #{i}: {exc}", source) from None
    try:
        return CommunicationPattern(graphs)
    except ModelError as exc:
        raise DocumentError(str(exc), source) from None


def dumps_pattern(p: CommunicationPattern) -> str:
    doc = {
        "format": PATTERN_FORMAT,
        "agents": list(p.agents),
        "graphs": [{"name": g.label(), "out": g.out_map()} for g in p],
    }
    return _dump(doc)


def load_pattern(path: PathLike) -> CommunicationPattern:
    return loads_pattern(Path(path).read_text(encoding="utf-8"), str(path))


def save_pattern(p: CommunicationPattern, path: PathLike) -> None:
    Path(path).write_text(dumps_pattern(p), encoding="utf-8")
