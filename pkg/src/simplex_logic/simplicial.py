"""Chromatic simplicial complexes and generalized simplicial models.

A simplex is a ``frozenset`` of vertex ids (strings).  A model keeps its
complex as the downward closure of its worlds, which is enough because every
facet has to be a world.  Worlds carry human-readable names used by the file
format and the CLI; the world itself is the vertex set.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from .formula import (
    TRUE_PROP,
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
    atoms,
)

__all__ = [
    "ModelError",
    "Simplex",
    "ChromaticComplex",
    "SimplicialModel",
    "build_model",
    "facets",
    "is_minimal",
    "is_maximal",
    "satisfies",
    "reachable_worlds",
    "valid_in_model",
    "SimplicialChecker",
    "natural_key",
]

Simplex = FrozenSet[str]


class ModelError(ValueError):
    """Invalid model data."""


def natural_key(s: str):
    """Sort key ordering ``w2`` before ``w10``."""
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def simplex_key(x: Simplex):
    return (len(x), sorted(map(natural_key, x)))


def downward_closure(simplexes: Iterable[Simplex]) -> FrozenSet[Simplex]:
    out = set()
    for x in simplexes:
        items = sorted(x)
        for k in range(1, len(items) + 1):
            for sub in combinations(items, k):
                out.add(frozenset(sub))
    return frozenset(out)


@dataclass(frozen=True)
class ChromaticComplex:
    colours: Mapping[str, str]
    simplexes: FrozenSet[Simplex]

    def __post_init__(self):
        for x in self.simplexes:
            if not x:
                raise ModelError("simplexes must be nonempty")
            cols = [self.colours[v] for v in x]
            if len(set(cols)) != len(cols):
                raise ModelError(f"simplex {sorted(x)} repeats a colour")
        for v in self.colours:
            if frozenset([v]) not in self.simplexes:
                raise ModelError(f"vertex {v!r} is not a simplex")
        for x in self.simplexes:
            for k in range(1, len(x)):
                for sub in combinations(sorted(x), k):
                    if frozenset(sub) not in self.simplexes:
                        raise ModelError("simplex set is not downward-closed")

    @property
    def vertices(self) -> FrozenSet[str]:
        return frozenset(self.colours)

    def chi(self, x: Iterable[str]) -> FrozenSet[str]:
        return frozenset(self.colours[v] for v in x)

    def facets(self) -> FrozenSet[Simplex]:
        return _maximal(self.simplexes)


def _maximal(simplexes) -> FrozenSet[Simplex]:
    simplexes = list(simplexes)
    return frozenset(
        x for x in simplexes if not any(x < y for y in simplexes)
    )


@dataclass(frozen=True, eq=False)
class SimplicialModel:
    """A chromatic complex with a distinguished set of labelled worlds.

    ``world_names`` maps names to worlds.  For local models
    ``vertex_labels`` holds the per-vertex propositions and ``owners`` the
    agent owning each proposition; world labels are the union of the vertex
    labels.
    """

    agents: Tuple[str, ...]
    colours: Mapping[str, str]
    world_names: Mapping[str, Simplex]
    labels: Mapping[Simplex, FrozenSet[str]]
    local: bool = False
    vertex_labels: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    owners: Mapping[str, str] = field(default_factory=dict)
    declared_props: FrozenSet[str] = frozenset()

    # derived, filled in __post_init__
    def __post_init__(self):
        worlds = tuple(sorted(self.world_names.values(), key=simplex_key))
        if len(set(worlds)) != len(worlds):
            raise ModelError("two names refer to the same world")
        set_ = object.__setattr__
        set_(self, "_worlds", worlds)
        set_(self, "_names", {w: n for n, w in self.world_names.items()})
        set_(self, "_complex", ChromaticComplex(dict(self.colours), downward_closure(worlds)))

    @property
    def worlds(self) -> Tuple[Simplex, ...]:
        return self._worlds

    @property
    def complex(self) -> ChromaticComplex:
        return self._complex

    @property
    def vertices(self) -> FrozenSet[str]:
        return frozenset(self.colours)

    @property
    def simplexes(self) -> FrozenSet[Simplex]:
        return self._complex.simplexes

    @property
    def props(self) -> FrozenSet[str]:
        out = set(self.declared_props)
        for lab in self.labels.values():
            out |= lab
        out |= set(self.owners)
        return frozenset(out)

    def chi(self, x: Iterable[str]) -> FrozenSet[str]:
        return frozenset(self.colours[v] for v in x)

    def name_of(self, w: Simplex) -> str:
        return self._names[w]

    def world(self, ref) -> Simplex:
        """Look a world up by name, by vertex collection, or pass it through."""
        if isinstance(ref, str):
            if ref in self.world_names:
                return self.world_names[ref]
            w = frozenset(v.strip() for v in ref.split(",") if v.strip())
        else:
            w = frozenset(ref)
        if w not in self._names:
            raise ModelError(f"unknown world {ref!r}")
        return w

    def label(self, w: Simplex) -> FrozenSet[str]:
        return self.labels.get(w, frozenset())

    def __eq__(self, other):
        if not isinstance(other, SimplicialModel):
            return NotImplemented
        return (
            self.agents == other.agents
            and dict(self.colours) == dict(other.colours)
            and dict(self.world_names) == dict(other.world_names)
            and {w: frozenset(v) for w, v in self.labels.items() if v}
            == {w: frozenset(v) for w, v in other.labels.items() if v}
            and self.local == other.local
            and {v: frozenset(l) for v, l in self.vertex_labels.items() if l}
            == {v: frozenset(l) for v, l in other.vertex_labels.items() if l}
            and dict(self.owners) == dict(other.owners)
            and self.props == other.props
        )

    __hash__ = None

    def with_worlds(self, worlds: Iterable[Simplex], names: Optional[Mapping[Simplex, str]] = None):
        """Same vertices/labelling restricted or extended to ``worlds``.

        Vertices not covered by any of the new worlds are dropped.
        """
        worlds = list(dict.fromkeys(frozenset(w) for w in worlds))
        names = dict(names or {})
        used = set()
        world_names = {}
        for w in worlds:
            n = names.get(w) or self._names.get(w)
            if n is None or n in used:
                n = "{" + ",".join(sorted(w, key=natural_key)) + "}"
            used.add(n)
            world_names[n] = w
        verts = set().union(*worlds) if worlds else set()
        colours = {v: c for v, c in self.colours.items() if v in verts}
        if self.local:
            vlab = {v: l for v, l in self.vertex_labels.items() if v in verts}
            labels = {w: frozenset().union(*(vlab.get(v, frozenset()) for v in w)) for w in worlds}
        else:
            vlab = {}
            labels = {w: self.labels.get(w, frozenset()) for w in worlds}
            missing = [w for w in worlds if w not in self._names and w not in self.labels]
            if missing:
                raise ModelError("new worlds of a world-labelled model need labels")
        return SimplicialModel(
            agents=self.agents,
            colours=colours,
            world_names=world_names,
            labels=labels,
            local=self.local,
            vertex_labels=vlab,
            owners=dict(self.owners),
            declared_props=self.declared_props,
        )

    def maximal_closure(self) -> "SimplicialModel":
        """The model on the same complex whose worlds are all simplexes.

        Only defined for local models, where new worlds inherit the union of
        their vertex labels.
        """
        if not self.local:
            raise ModelError("maximal closure needs vertex labels")
        return self.with_worlds(sorted(self.simplexes, key=simplex_key))


def build_model(
    agents: Sequence[str],
    colours: Mapping[str, str],
    worlds: Mapping[str, Iterable[str]] | Sequence[Iterable[str]],
    labels: Optional[Mapping[str, Iterable[str]]] = None,
    *,
    local: bool = False,
    vertex_labels: Optional[Mapping[str, Iterable[str]]] = None,
    owners: Optional[Mapping[str, str]] = None,
    props: Iterable[str] = (),
) -> SimplicialModel:
    """Validate raw data and assemble a :class:`SimplicialModel`.

    ``worlds`` maps world names to vertex lists (a plain list gets names
    ``w0, w1, ...``).  ``labels`` maps world names to propositions and is only
    used for world-labelled models.  For local models, ``vertex_labels`` gives
    each vertex its propositions; ``owners`` optionally pins the owner of each
    proposition, otherwise the owner is the colour of the vertices carrying it.
    """
    agents = tuple(agents)
    if len(set(agents)) != len(agents) or not agents:
        raise ModelError("agents must be a nonempty list of distinct names")
    for v, c in colours.items():
        if c not in agents:
            raise ModelError(f"vertex {v!r} has unknown colour {c!r}")
    if not isinstance(worlds, Mapping):
        worlds = {f"w{i}": w for i, w in enumerate(worlds)}
    if not worlds:
        raise ModelError("a model needs at least one world")
    world_names: Dict[str, Simplex] = {}
    for name, vs in worlds.items():
        vs = list(vs)
        w = frozenset(vs)
        if not w:
            raise ModelError(f"world {name!r} is empty")
        if len(w) != len(vs):
            raise ModelError(f"world {name!r} lists a vertex twice")
        for v in w:
            if v not in colours:
                raise ModelError(f"world {name!r} uses unknown vertex {v!r}")
        cols = [colours[v] for v in w]
        if len(set(cols)) != len(cols):
            raise ModelError(f"world {name!r} has two vertices of the same colour")
        if w in world_names.values():
            raise ModelError(f"world {name!r} duplicates another world")
        world_names[name] = w
    covered = set().union(*world_names.values())
    stray = set(colours) - covered
    if stray:
        raise ModelError(f"vertices {sorted(stray)} belong to no world")

    labels = dict(labels or {})
    for name in labels:
        if name not in world_names:
            raise ModelError(f"label on unknown world {name!r}")
    owners = dict(owners or {})
    vlab: Dict[str, FrozenSet[str]] = {}
    if local:
        if labels:
            raise ModelError("local models are labelled on vertices, not worlds")
        for v, ps in (vertex_labels or {}).items():
            if v not in colours:
                raise ModelError(f"label on unknown vertex {v!r}")
            ps = frozenset(ps)
            for p in ps:
                owner = owners.setdefault(p, colours[v])
                if owner != colours[v]:
                    raise ModelError(
                        f"proposition {p!r} owned by {owner!r} labels vertex {v!r} of colour {colours[v]!r}"
                    )
            if ps:
                vlab[v] = ps
        for p, a in owners.items():
            if a not in agents:
                raise ModelError(f"proposition {p!r} owned by unknown agent {a!r}")
        wlabels = {
            w: frozenset().union(*(vlab.get(v, frozenset()) for v in w))
            for w in world_names.values()
        }
    else:
        if vertex_labels:
            raise ModelError("vertex labels require a local model")
        wlabels = {world_names[n]: frozenset(ps) for n, ps in labels.items()}
    return SimplicialModel(
        agents=agents,
        colours=dict(colours),
        world_names=world_names,
        labels=wlabels,
        local=local,
        vertex_labels=vlab,
        owners=owners,
        declared_props=frozenset(props),
    )


def facets(c) -> FrozenSet[Simplex]:
    """Inclusion-maximal simplexes of a complex or model."""
    if isinstance(c, SimplicialModel):
        # every simplex lies in some world
        return _maximal(c.worlds)
    return _maximal(c.simplexes)


def is_minimal(m: SimplicialModel) -> bool:
    return frozenset(m.worlds) == facets(m)


def is_maximal(m: SimplicialModel) -> bool:
    return frozenset(m.worlds) == m.simplexes


# --------------------------------------------------------------------------
# satisfaction

def _step_ok(shared: FrozenSet[str], group: FrozenSet[str], mode: str) -> bool:
    if mode == "vertex":
        return bool(shared & group)
    if mode == "face":
        return group <= shared
    raise ValueError(f"unknown common-knowledge step mode {mode!r}")


def reachable_worlds(
    m: SimplicialModel, w, agents: Iterable[str], *, mode: str = "vertex"
) -> FrozenSet[Simplex]:
    """Worlds reachable from ``w`` (itself included) through chains of worlds
    sharing a vertex coloured in ``agents``.

    ``mode="face"`` instead requires consecutive worlds to share the whole
    ``agents``-coloured face.
    """
    start = m.world(w)
    group = frozenset(agents)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in m.worlds:
            if y not in seen and _step_ok(m.chi(x & y), group, mode):
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


class SimplicialChecker:
    """Evaluator for one model working on world sets as bitmasks.

    Bit ``i`` stands for ``m.worlds[i]``.  Extensions are cached per formula,
    so a checker should not be shared between threads; :func:`satisfies`
    builds a fresh one per call.
    """

    def __init__(self, m: SimplicialModel, *, mode: str = "vertex"):
        if mode not in ("vertex", "face"):
            raise ValueError(f"unknown common-knowledge step mode {mode!r}")
        self.m = m
        self.mode = mode
        self.props = m.props | {TRUE_PROP}
        self.index = {w: i for i, w in enumerate(m.worlds)}
        self.full = (1 << len(m.worlds)) - 1
        self._chi = [m.chi(w) for w in m.worlds]
        self._by_vertex: Dict[str, int] = {}
        for i, w in enumerate(m.worlds):
            for v in w:
                self._by_vertex[v] = self._by_vertex.get(v, 0) | (1 << i)
        self._cache: Dict[Formula, int] = {}
        self._rows: Dict[FrozenSet[str], Tuple[int, ...]] = {}
        self._components: Dict[FrozenSet[str], Tuple[int, ...]] = {}

    def check_props(self, f: Formula):
        unknown = atoms(f) - self.props
        if unknown:
            raise ModelError(f"unknown propositions {sorted(unknown)}")

    def rows(self, group: FrozenSet[str]) -> Tuple[int, ...]:
        """Per world, the worlds containing its ``group``-coloured face.

        The row is empty when a member of ``group`` is dead in the world.
        """
        group = frozenset(group)
        rows = self._rows.get(group)
        if rows is None:
            out = []
            for i, w in enumerate(self.m.worlds):
                face = [v for v in w if self.m.colours[v] in group]
                if len(face) < len(group):
                    out.append(0)
                    continue
                mask = self.full
                for v in face:
                    mask &= self._by_vertex[v]
                out.append(mask)
            rows = self._rows[group] = tuple(out)
        return rows

    def components(self, group: FrozenSet[str]) -> Tuple[int, ...]:
        """Masks of the classes of reachability through ``group`` steps."""
        group = frozenset(group)
        comps = self._components.get(group)
        if comps is None:
            n = len(self.m.worlds)
            if self.mode == "vertex":
                # one step: two worlds sharing a vertex coloured in the group
                adj = [0] * n
                for v, mask in self._by_vertex.items():
                    if self.m.colours[v] in group:
                        for i in _bits(mask):
                            adj[i] |= mask
            else:
                adj = list(self.rows(group))
            seen = 0
            out = []
            for i in range(n):
                if seen >> i & 1:
                    continue
                comp = frontier = 1 << i
                while frontier:
                    nxt = 0
                    for j in _bits(frontier):
                        nxt |= adj[j]
                    frontier = nxt & ~comp
                    comp |= frontier
                seen |= comp
                out.append(comp)
            comps = self._components[group] = tuple(out)
        return comps

    def component(self, w: Simplex, group: FrozenSet[str]) -> FrozenSet[Simplex]:
        bit = 1 << self.index[w]
        for comp in self.components(group):
            if comp & bit:
                return frozenset(self.m.worlds[i] for i in _bits(comp))
        return frozenset()  # pragma: no cover

    def box(self, group, ext: int) -> int:
        out = 0
        for i, row in enumerate(self.rows(frozenset(group))):
            if not row & ~ext:
                out |= 1 << i
        return out

    def ext(self, f: Formula) -> int:
        hit = self._cache.get(f)
        if hit is None:
            hit = self._cache[f] = self._ext(f)
        return hit

    def _ext(self, f: Formula) -> int:
        if isinstance(f, Atom):
            out = 0
            for i, w in enumerate(self.m.worlds):
                if f.name in self.m.label(w):
                    out |= 1 << i
            return out
        if isinstance(f, Top):
            return self.full
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, Not):
            return self.full & ~self.ext(f.sub)
        if isinstance(f, And):
            return self.ext(f.left) & self.ext(f.right)
        if isinstance(f, Or):
            return self.ext(f.left) | self.ext(f.right)
        if isinstance(f, Implies):
            return (self.full & ~self.ext(f.left)) | self.ext(f.right)
        if isinstance(f, D):
            return self.box(f.agents, self.ext(f.sub))
        if isinstance(f, K):
            return self.box((f.agent,), self.ext(f.sub))
        if isinstance(f, E):
            sub = self.ext(f.sub)
            out = self.full
            for a in f.agents:
                out &= self.box((a,), sub)
            return out
        if isinstance(f, C):
            sub = self.ext(f.sub)
            out = 0
            for comp in self.components(frozenset(f.agents)):
                if not comp & ~sub:
                    out |= comp
            return out
        if isinstance(f, Alive):
            group = set(f.agents)
            return self._mask(lambda chi: group <= chi)
        if isinstance(f, Dead):
            group = set(f.agents)
            return self._mask(lambda chi: not group & chi)
        raise TypeError(f"not a formula: {f!r}")

    def _mask(self, pred) -> int:
        out = 0
        for i, chi in enumerate(self._chi):
            if pred(chi):
                out |= 1 << i
        return out

    def holds(self, w: Simplex, f: Formula) -> bool:
        return bool(self.ext(f) >> self.index[w] & 1)

    def worlds_of(self, mask: int) -> Tuple[Simplex, ...]:
        return tuple(self.m.worlds[i] for i in _bits(mask))

    def counterexample(self, f: Formula) -> Optional[Simplex]:
        self.check_props(f)
        bad = self.full & ~self.ext(f)
        if not bad:
            return None
        return self.m.worlds[(bad & -bad).bit_length() - 1]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def satisfies(m: SimplicialModel, w, f: Formula, *, mode: str = "vertex") -> bool:
    """Truth of ``f`` at world ``w`` (a name, vertex list or simplex)."""
    world = m.world(w)
    checker = SimplicialChecker(m, mode=mode)
    checker.check_props(f)
    return checker.holds(world, f)


def valid_in_model(
    m: SimplicialModel, f: Formula, *, mode: str = "vertex"
) -> Tuple[bool, Optional[Simplex]]:
    """``(True, None)`` if ``f`` holds everywhere, else ``(False, world)``."""
    w = SimplicialChecker(m, mode=mode).counterexample(f)
    return w is None, w
