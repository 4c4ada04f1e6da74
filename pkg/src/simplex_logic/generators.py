"""Seeded random models and formulas for the property suites.

``SIMPLEX_SEED`` overrides the default base seed.
"""
from __future__ import annotations

import os
import random
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .formula import (
    Alive,
    And,
    Atom,
    Bottom,
    C,
    D,
    Dead,
    E,
    Formula,
    Implies,
    K,
    Not,
    Or,
    Top,
    conj,
    disj,
)
from .kripke import PartialEpistemicModel, build_kripke, frame_properties
from .simplicial import SimplicialModel, build_model, natural_key, simplex_key

DEFAULT_SEED = 20240601
AGENT_NAMES = "abcdef"


def base_seed() -> int:
    raw = os.environ.get("SIMPLEX_SEED")
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def rng_for(tag: str, index: int = 0) -> random.Random:
    return random.Random(f"{base_seed()}:{tag}:{index}")


def _random_chromatic_simplex(rng: random.Random, by_colour: Dict[str, List[str]]) -> frozenset:
    cols = [c for c in by_colour if by_colour[c]]
    k = rng.randint(1, len(cols))
    return frozenset(rng.choice(by_colour[c]) for c in rng.sample(cols, k))


def random_model(
    rng: random.Random,
    *,
    max_vertices: int = 8,
    max_agents: int = 4,
    props: Sequence[str] = ("p", "q"),
    local: Optional[bool] = None,
) -> SimplicialModel:
    """A random generalized model: random facets, then every other simplex
    joins the worlds with probability one half."""
    n_agents = rng.randint(1, max_agents)
    agents = tuple(AGENT_NAMES[:n_agents])
    n_vertices = rng.randint(n_agents, max(n_agents, max_vertices))
    colours = {}
    by_colour: Dict[str, List[str]] = {a: [] for a in agents}
    for i in range(n_vertices):
        a = agents[i] if i < n_agents else rng.choice(agents)
        v = f"{a}{len(by_colour[a])}"
        by_colour[a].append(v)
        colours[v] = a
    # cover every vertex with some simplex
    tops = []
    for v in colours:
        if not any(v in s for s in tops):
            s = set(_random_chromatic_simplex(rng, by_colour))
            s = {u for u in s if colours[u] != colours[v]} | {v}
            tops.append(frozenset(s))
    for _ in range(rng.randint(0, 3)):
        tops.append(_random_chromatic_simplex(rng, by_colour))
    facets = [s for s in set(tops) if not any(s < t for t in tops)]
    faces = set()
    for f in facets:
        items = sorted(f)
        for r in range(1, len(items)):
            faces.update(frozenset(c) for c in combinations(items, r))
    faces -= set(facets)
    extra = [s for s in sorted(faces, key=simplex_key) if rng.random() < 0.5]
    worlds = sorted(set(facets) | set(extra), key=simplex_key)
    names = {f"w{i}": sorted(w, key=natural_key) for i, w in enumerate(worlds)}
    if local is None:
        local = rng.random() < 0.5
    if local:
        owners = {p: rng.choice(agents) for p in props}
        vlab = {}
        for v, a in colours.items():
            vlab[v] = [p for p, o in owners.items() if o == a and rng.random() < 0.5]
        return build_model(agents, colours, names, local=True, vertex_labels=vlab, owners=owners, props=props)
    labels = {n: [p for p in props if rng.random() < 0.5] for n in names}
    return build_model(agents, colours, names, labels, props=props)


def random_formula(
    rng: random.Random,
    agents: Sequence[str],
    props: Sequence[str],
    depth: int = 3,
    size: int = 4,
) -> Formula:
    """Random formula of modal depth at most ``depth`` over every connective."""
    agents = sorted(agents)

    def group():
        return tuple(rng.sample(agents, rng.randint(1, len(agents))))

    def gen(d: int, s: int) -> Formula:
        if s <= 0 or rng.random() < 0.2:
            r = rng.random()
            if r < 0.6:
                return Atom(rng.choice(props))
            if r < 0.7:
                return rng.choice([Top(), Bottom()])
            return rng.choice([Alive, Dead])(group())
        ops = ["not", "and", "or", "imp"]
        if d > 0:
            ops += ["K", "D", "E", "C"] * 2
        op = rng.choice(ops)
        if op == "not":
            return Not(gen(d, s - 1))
        if op in ("and", "or", "imp"):
            cls = {"and": And, "or": Or, "imp": Implies}[op]
            return cls(gen(d, s // 2), gen(d, s // 2))
        if op == "K":
            return K(rng.choice(agents), gen(d - 1, s - 1))
        return {"D": D, "E": E, "C": C}[op](group(), gen(d - 1, s - 1))

    return gen(depth, size)


def random_guarded(
    rng: random.Random,
    agents: Sequence[str],
    owners: Dict[str, str],
    depth: int = 2,
    size: int = 4,
) -> Formula:
    """Random guarded positive formula of modal depth at most ``depth``."""
    agents = sorted(agents)
    props = sorted(owners)

    def group():
        return tuple(rng.sample(agents, rng.randint(1, len(agents))))

    def prop_over(b) -> Formula:
        mine = [p for p in props if owners[p] in b]
        if not mine:
            return rng.choice([Top(), Bottom()])
        lits = [Atom(p) if rng.random() < 0.6 else Not(Atom(p)) for p in rng.sample(mine, min(2, len(mine)))]
        return rng.choice([conj, disj])(lits)

    def leaf() -> Formula:
        b = group()
        return Implies(Alive(b), prop_over(b))

    def gen(d: int, s: int) -> Formula:
        if s <= 0 or rng.random() < 0.3:
            return leaf()
        ops = ["and", "or"] + (["K", "D", "E", "C"] if d > 0 else [])
        op = rng.choice(ops)
        if op == "and":
            return And(gen(d, s // 2), gen(d, s // 2))
        if op == "or":
            return Or(gen(d, s // 2), gen(d, s // 2))
        if op == "K":
            return K(rng.choice(agents), gen(d - 1, s - 1))
        return {"D": D, "E": E, "C": C}[op](group(), gen(d - 1, s - 1))

    return gen(depth, size)


def random_kripke(
    rng: random.Random,
    *,
    max_worlds: int = 7,
    max_agents: int = 4,
    props: Sequence[str] = ("p", "q"),
    proper: bool = True,
) -> PartialEpistemicModel:
    """Random partial epistemic model; with ``proper`` draws are retried until
    the model is proper and has no empty world."""
    while True:
        n_agents = rng.randint(1, max_agents)
        agents = tuple(AGENT_NAMES[:n_agents])
        worlds = [f"w{i}" for i in range(rng.randint(1, max_worlds))]
        rel = {}
        for a in agents:
            dom = [w for w in worlds if rng.random() < 0.75]
            rng.shuffle(dom)
            entries = []
            blocks: List[List[str]] = []
            for w in dom:
                if blocks and rng.random() < 0.5:
                    rng.choice(blocks).append(w)
                else:
                    blocks.append([w])
            for blk in blocks:
                entries.append((blk[0],))
                entries += [(x, y) for x, y in zip(blk, blk[1:])]
            rel[a] = entries
        labels = {w: [p for p in props if rng.random() < 0.5] for w in worlds}
        k = build_kripke(agents, worlds, rel, labels, props=props)
        if not proper:
            return k
        rep = frame_properties(k)
        if rep.proper and rep.no_empty_world:
            return k


def random_submodel(rng: random.Random, m: SimplicialModel) -> Tuple[SimplicialModel, Dict[str, str]]:
    """A random nonempty subset of the worlds with its inclusion map."""
    worlds = [w for w in m.worlds if rng.random() < 0.6] or [rng.choice(m.worlds)]
    sub = m.with_worlds(worlds)
    return sub, {v: v for v in sub.vertices}
