"""Partial epistemic models: Kripke models whose relations are PERs.

Each agent's relation is stored as a partition of its domain (the worlds where
the agent is alive); two worlds are related iff they lie in the same block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

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
from .simplicial import ModelError, SimplicialModel, natural_key

__all__ = [
    "PartialEpistemicModel",
    "FrameReport",
    "build_kripke",
    "frame_properties",
    "kappa",
    "sigma",
    "SigmaResult",
    "satisfies_kripke",
    "properify",
    "KripkeChecker",
]


def _sorted(ws):
    return sorted(ws, key=natural_key)


@dataclass(frozen=True, eq=False)
class PartialEpistemicModel:
    """Worlds, one PER per agent (as a domain partition) and world labels."""

    agents: Tuple[str, ...]
    worlds: Tuple[str, ...]
    classes: Mapping[str, Tuple[FrozenSet[str], ...]]
    labels: Mapping[str, FrozenSet[str]]
    declared_props: FrozenSet[str] = frozenset()
    #: pairs the builder had to add to make the input symmetric-transitive
    closure_added: Mapping[str, FrozenSet[Tuple[str, str]]] = field(default_factory=dict)

    def __post_init__(self):
        block = {}
        for a in self.agents:
            seen = set()
            for cls in self.classes.get(a, ()):
                if seen & cls:
                    raise ModelError(f"relation of {a!r} is not a partition")
                seen |= cls
                for w in cls:
                    block[(a, w)] = cls
        object.__setattr__(self, "_block", block)

    def related(self, a: str, w: str, v: str) -> bool:
        cls = self._block.get((a, w))
        return cls is not None and v in cls

    def related_group(self, group: Iterable[str], w: str, v: str) -> bool:
        return all(self.related(a, w, v) for a in group)

    def live(self, w: str) -> FrozenSet[str]:
        return frozenset(a for a in self.agents if (a, w) in self._block)

    def block(self, a: str, w: str) -> Optional[FrozenSet[str]]:
        return self._block.get((a, w))

    def pairs(self, a: str) -> FrozenSet[Tuple[str, str]]:
        return frozenset((x, y) for cls in self.classes.get(a, ()) for x in cls for y in cls)

    def label(self, w: str) -> FrozenSet[str]:
        return self.labels.get(w, frozenset())

    @property
    def props(self) -> FrozenSet[str]:
        out = set(self.declared_props)
        for lab in self.labels.values():
            out |= lab
        return frozenset(out)

    def __eq__(self, other):
        if not isinstance(other, PartialEpistemicModel):
            return NotImplemented
        return (
            self.agents == other.agents
            and set(self.worlds) == set(other.worlds)
            and all(set(self.classes.get(a, ())) == set(other.classes.get(a, ())) for a in self.agents)
            and {w: l for w, l in self.labels.items() if l} == {w: l for w, l in other.labels.items() if l}
            and self.props == other.props
        )

    __hash__ = None


def build_kripke(
    agents: Sequence[str],
    worlds: Sequence[str],
    relations: Mapping[str, Iterable[Sequence[str]]],
    labels: Optional[Mapping[str, Iterable[str]]] = None,
    props: Iterable[str] = (),
) -> PartialEpistemicModel:
    """Build a model from per-agent pair lists.

    Each entry of ``relations[a]`` is a pair ``(w, v)`` or a singleton
    ``(w,)`` (a loop).  The PER closure is taken; pairs added by the closure
    are recorded in ``closure_added``.
    """
    agents = tuple(agents)
    worlds = tuple(worlds)
    if len(set(worlds)) != len(worlds):
        raise ModelError("duplicate world names")
    known = set(worlds)
    classes = {}
    added = {}
    for a, entries in relations.items():
        if a not in agents:
            raise ModelError(f"relation for unknown agent {a!r}")
        given = set()
        parent: Dict[str, str] = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for entry in entries:
            entry = tuple(entry)
            if len(entry) not in (1, 2):
                raise ModelError(f"bad relation entry {entry!r} for {a!r}")
            for w in entry:
                if w not in known:
                    raise ModelError(f"relation for {a!r} mentions unknown world {w!r}")
                parent.setdefault(w, w)
            x, y = entry[0], entry[-1]
            given.add((x, y))
            parent[find(x)] = find(y)
        groups: Dict[str, set] = {}
        for w in parent:
            groups.setdefault(find(w), set()).add(w)
        cls = tuple(sorted((frozenset(g) for g in groups.values()), key=lambda c: natural_key(min(c, key=natural_key))))
        classes[a] = cls
        closed = {(x, y) for c in cls for x in c for y in c}
        extra = closed - given - {(y, x) for x, y in given}
        if extra:
            added[a] = frozenset(extra)
    labels = dict(labels or {})
    for w in labels:
        if w not in known:
            raise ModelError(f"label on unknown world {w!r}")
    return PartialEpistemicModel(
        agents=agents,
        worlds=worlds,
        classes={a: classes.get(a, ()) for a in agents},
        labels={w: frozenset(ps) for w, ps in labels.items()},
        declared_props=frozenset(props),
        closure_added=added,
    )


@dataclass
class FrameReport:
    proper: bool
    no_empty_world: bool
    minimal: bool
    maximal: bool
    witnesses: Dict[str, tuple] = field(default_factory=dict)


def frame_properties(k: PartialEpistemicModel) -> FrameReport:
    """Evaluate the no-empty-world, proper, minimal and maximal predicates.

    ``witnesses`` holds, for each failing property, a counterexample:
    ``no_empty_world -> (w,)``, ``proper -> (w, v)``, ``minimal -> (sub, w)``
    and ``maximal -> (w, missing_alive_set)``.
    """
    live = {w: k.live(w) for w in k.worlds}
    worlds = _sorted(k.worlds)
    wit: Dict[str, tuple] = {}
    for w in worlds:
        if not live[w]:
            wit["no_empty_world"] = (w,)
            break
    for w, v in combinations(worlds, 2):
        if live[w] == live[v] and k.related_group(live[w], w, v):
            wit["proper"] = (w, v)
            break
    for w in worlds:
        for v in worlds:
            if live[w] < live[v] and k.related_group(live[w], w, v):
                wit.setdefault("minimal", (w, v))
    for v in worlds:
        if "maximal" in wit:
            break
        agents = sorted(live[v])
        for r in range(1, len(agents)):
            for group in combinations(agents, r):
                group = frozenset(group)
                if not any(live[w] == group and k.related_group(group, w, v) for w in worlds):
                    wit["maximal"] = (v, tuple(sorted(group)))
                    break
            if "maximal" in wit:
                break
    return FrameReport(
        proper="proper" not in wit,
        no_empty_world="no_empty_world" not in wit,
        minimal="minimal" not in wit,
        maximal="maximal" not in wit,
        witnesses=wit,
    )


# --------------------------------------------------------------------------
# conversions

def kappa(m: SimplicialModel) -> PartialEpistemicModel:
    """Kripke model on the same worlds: ``w ~a v`` iff ``a`` colours a vertex
    of ``w & v``.  World ids are the simplicial world names."""
    classes = {}
    for a in m.agents:
        blocks: Dict[str, set] = {}
        for w in m.worlds:
            for v in w:
                if m.colours[v] == a:
                    blocks.setdefault(v, set()).add(m.name_of(w))
        classes[a] = tuple(frozenset(b) for b in blocks.values())
    # the same world can't sit in two blocks: a world has one a-vertex
    return PartialEpistemicModel(
        agents=m.agents,
        worlds=tuple(m.name_of(w) for w in m.worlds),
        classes=classes,
        labels={m.name_of(w): m.label(w) for w in m.worlds},
        declared_props=m.props,
    )


@dataclass
class SigmaResult:
    model: SimplicialModel
    #: Kripke world -> simplicial world
    world_map: Dict[str, frozenset]


def sigma(k: PartialEpistemicModel) -> SigmaResult:
    """Simplicial model with one vertex ``a:[w]`` per agent class.

    The vertex id uses the least world of the class.  Requires a proper model
    with no empty world.
    """
    rep = frame_properties(k)
    if not rep.no_empty_world:
        raise ModelError(f"world {rep.witnesses['no_empty_world'][0]!r} has no live agent")
    if not rep.proper:
        w, v = rep.witnesses["proper"]
        raise ModelError(f"model is not proper: {w!r} and {v!r} are indistinguishable")
    colours = {}
    vertex_of = {}
    for a in k.agents:
        for cls in k.classes.get(a, ()):
            vid = f"{a}:[{min(cls, key=natural_key)}]"
            colours[vid] = a
            for w in cls:
                vertex_of[(a, w)] = vid
    world_map = {
        w: frozenset(vertex_of[(a, w)] for a in k.live(w)) for w in k.worlds
    }
    model = SimplicialModel(
        agents=k.agents,
        colours=colours,
        world_names={w: x for w, x in world_map.items()},
        labels={world_map[w]: k.label(w) for w in k.worlds},
        declared_props=k.props,
    )
    return SigmaResult(model=model, world_map=world_map)


# --------------------------------------------------------------------------
# satisfaction

def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class KripkeChecker:
    """Evaluates formulas as sets of worlds (bitmasks over ``k.worlds``)."""

    def __init__(self, k: PartialEpistemicModel, *, mode: str = "vertex"):
        self.k = k
        self.mode = mode
        self.index = {w: i for i, w in enumerate(k.worlds)}
        self.all = (1 << len(k.worlds)) - 1
        self._cache: Dict[Formula, int] = {}
        self._group_nbrs: Dict[FrozenSet[str], List[int]] = {}
        self._agent_mask = {}
        for a in k.agents:
            masks = [0] * len(k.worlds)
            for cls in k.classes.get(a, ()):
                m = 0
                for w in cls:
                    m |= 1 << self.index[w]
                for w in cls:
                    masks[self.index[w]] = m
            self._agent_mask[a] = masks
        self._alive = {
            a: sum(1 << i for i, m in enumerate(self._agent_mask[a]) if m) for a in k.agents
        }

    def nbrs(self, group: FrozenSet[str]) -> List[int]:
        """``~group`` successors of each world, as bitmasks."""
        out = self._group_nbrs.get(group)
        if out is None:
            out = []
            for i in range(len(self.k.worlds)):
                m = self.all
                for a in group:
                    m &= self._agent_mask[a][i]
                out.append(m)
            self._group_nbrs[group] = out
        return out

    def _box(self, group, ext: int) -> int:
        nb = self.nbrs(frozenset(group))
        out = 0
        for i, m in enumerate(nb):
            if m & ~ext == 0:
                out |= 1 << i
        return out

    def _common(self, group, ext: int) -> int:
        group = frozenset(group)
        if self.mode == "vertex":
            steps = [0] * len(self.k.worlds)
            for a in group:
                for i, m in enumerate(self._agent_mask[a]):
                    steps[i] |= m
        elif self.mode == "face":
            steps = self.nbrs(group)
        else:
            raise ValueError(f"unknown common-knowledge step mode {self.mode!r}")
        # both step relations are symmetric, so reachability is the
        # connected component
        out = 0
        done = 0
        for i in range(len(self.k.worlds)):
            if done >> i & 1:
                continue
            comp = 1 << i
            frontier = comp
            while frontier:
                nxt = 0
                for j in _bits(frontier):
                    nxt |= steps[j]
                frontier = nxt & ~comp
                comp |= nxt
            done |= comp
            if comp & ~ext == 0:
                out |= comp
        return out

    def ext(self, f: Formula) -> int:
        hit = self._cache.get(f)
        if hit is None:
            hit = self._ext(f)
            self._cache[f] = hit
        return hit

    def _ext(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return sum(1 << i for i, w in enumerate(self.k.worlds) if f.name in self.k.label(w))
        if isinstance(f, Top):
            return self.all
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, Not):
            return self.all & ~self.ext(f.sub)
        if isinstance(f, And):
            return self.ext(f.left) & self.ext(f.right)
        if isinstance(f, Or):
            return self.ext(f.left) | self.ext(f.right)
        if isinstance(f, Implies):
            return (self.all & ~self.ext(f.left)) | self.ext(f.right)
        if isinstance(f, D):
            return self._box(f.agents, self.ext(f.sub))
        if isinstance(f, K):
            return self._box((f.agent,), self.ext(f.sub))
        if isinstance(f, E):
            sub = self.ext(f.sub)
            out = self.all
            for a in f.agents:
                out &= self._box((a,), sub)
            return out
        if isinstance(f, C):
            return self._common(f.agents, self.ext(f.sub))
        if isinstance(f, Alive):
            out = self.all
            for a in f.agents:
                out &= self._alive.get(a, 0)
            return out
        if isinstance(f, Dead):
            out = self.all
            for a in f.agents:
                out &= ~self._alive.get(a, 0)
            return out
        raise TypeError(f"not a formula: {f!r}")

    def holds(self, w: str, f: Formula) -> bool:
        return bool(self.ext(f) >> self.index[w] & 1)


def satisfies_kripke(k: PartialEpistemicModel, w: str, f: Formula, *, mode: str = "vertex") -> bool:
    if w not in k.worlds:
        raise ModelError(f"unknown world {w!r}")
    unknown = atoms(f) - k.props - {TRUE_PROP}
    if unknown:
        raise ModelError(f"unknown propositions {sorted(unknown)}")
    return KripkeChecker(k, mode=mode).holds(w, f)


# --------------------------------------------------------------------------
# properification

@dataclass
class ProperifyResult:
    model: PartialEpistemicModel
    #: original world -> class representative (world id of the quotient)
    quotient: Dict[str, str]


def properify(k: PartialEpistemicModel) -> ProperifyResult:
    """Quotient by ``w == v`` iff same live set and related by every live agent.

    Equivalent worlds must carry equal labels.  Each class is named after its
    least world.
    """
    live = {w: k.live(w) for w in k.worlds}
    rep: Dict[str, str] = {}
    reps: List[str] = []
    for w in _sorted(k.worlds):
        for r in reps:
            if live[r] == live[w] and k.related_group(live[w], r, w):
                if k.label(r) != k.label(w):
                    raise ModelError(
                        f"equivalent worlds {r!r} and {w!r} carry different labels"
                    )
                rep[w] = r
                break
        else:
            rep[w] = w
            reps.append(w)
    classes = {}
    for a in k.agents:
        classes[a] = tuple(
            frozenset(rep[w] for w in cls) for cls in k.classes.get(a, ())
        )
    model = PartialEpistemicModel(
        agents=k.agents,
        worlds=tuple(w for w in k.worlds if rep[w] == w),
        classes=classes,
        labels={r: k.label(r) for r in reps},
        declared_props=k.props,
    )
    return ProperifyResult(model=model, quotient=rep)
