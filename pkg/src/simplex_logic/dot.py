"""Graphviz export of a simplicial model.

Vertices become coloured nodes, the 1-skeleton becomes solid edges, and every
world gets a box node joined to its vertices by dotted edges.
"""
from __future__ import annotations

from itertools import combinations
from typing import List

from .simplicial import SimplicialModel, natural_key

PALETTE = ["white", "gray70", "black", "lightblue", "salmon", "palegreen", "gold", "plum"]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(m: SimplicialModel, name: str = "model") -> str:
    colour_of = {a: PALETTE[i % len(PALETTE)] for i, a in enumerate(m.agents)}
    lines: List[str] = [f"graph {_q(name)} {{", "  node [style=filled];"]
    for v in sorted(m.vertices, key=natural_key):
        a = m.colours[v]
        props = sorted(m.vertex_labels.get(v, ())) if m.local else []
        label = f"{a}:{','.join(props)}" if props else a
        font = "white" if colour_of[a] == "black" else "black"
        lines.append(
            f"  {_q(v)} [label={_q(label)}, fillcolor={_q(colour_of[a])}, fontcolor={_q(font)}];"
        )
    edges = set()
    for w in m.worlds:
        for x, y in combinations(sorted(w, key=natural_key), 2):
            edges.add((x, y))
    for x, y in sorted(edges, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f"  {_q(x)} -- {_q(y)};")
    for w in sorted(m.worlds, key=lambda w: natural_key(m.name_of(w))):
        wn = m.name_of(w)
        props = sorted(m.label(w))
        label = wn + (f" [{','.join(props)}]" if props and not m.local else "")
        node = _q("world:" + wn)
        lines.append(f"  {node} [shape=box, style=dashed, label={_q(label)}];")
        for v in sorted(w, key=natural_key):
            lines.append(f"  {node} -- {_q(v)} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"
