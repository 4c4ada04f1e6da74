"""Tasks, morphisms of simplicial models and solvability.

A task instance bundles an input model ``I``, a protocol model ``P`` and a
task model ``T`` with their projections to ``I``.  The task is solvable by
the protocol iff some morphism ``δ: P -> T`` commutes with the projections;
:func:`find_decision_map` searches for one exhaustively.  The extra
conditions some formulations put on ``δ`` are not enforced.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dynamics import CommunicationPattern, iterate_update
from .formula import Alive, Atom, C, Formula, Implies, conj, disj, is_guarded_positive
from .simplicial import (
    ModelError,
    Simplex,
    SimplicialChecker,
    SimplicialModel,
    build_model,
    natural_key,
    simplex_key,
)

__all__ = [
    "MorphismCheck",
    "TaskInstance",
    "ObstructionReport",
    "SearchStats",
    "input_prop",
    "binary_input_model",
    "consensus_task",
    "identity_task",
    "task_model",
    "consensus_instance",
    "is_morphism",
    "find_decision_map",
    "find_decision_map_with_stats",
    "check_obstruction",
    "check_knowledge_gain",
    "sv1_obstruction",
    "rv1_obstruction",
    "alive_all_obstruction",
]

DECISIONS = (0, 1)


def input_prop(agent: str, value) -> str:
    return f"input_{agent}={value}"


# --------------------------------------------------------------------------
# morphisms

@dataclass
class MorphismCheck:
    ok: bool
    violation: str = ""

    def __bool__(self):
        return self.ok


def is_morphism(f: Mapping[str, str], a: SimplicialModel, b: SimplicialModel) -> MorphismCheck:
    """Colour-preserving simplicial map sending worlds to worlds and keeping
    labels (vertex labels when both models are local, else world labels)."""
    for v in sorted(a.vertices, key=natural_key):
        if v not in f:
            return MorphismCheck(False, f"vertex {v} is not mapped")
        if f[v] not in b.colours:
            return MorphismCheck(False, f"vertex {v} maps to unknown vertex {f[v]}")
        if a.colours[v] != b.colours[f[v]]:
            return MorphismCheck(False, f"vertex {v} changes colour")
        if a.local and b.local and a.vertex_labels.get(v, frozenset()) != b.vertex_labels.get(f[v], frozenset()):
            return MorphismCheck(False, f"vertex {v} changes label")
    b_worlds = set(b.worlds)
    for w in a.worlds:
        img = frozenset(f[v] for v in w)
        name = a.name_of(w)
        if img not in b.simplexes:
            return MorphismCheck(False, f"world {name} does not map to a simplex")
        if img not in b_worlds:
            return MorphismCheck(False, f"world {name} does not map to a world")
        if not (a.local and b.local) and a.label(w) != b.label(img):
            return MorphismCheck(False, f"world {name} changes label")
    return MorphismCheck(True)


def compose(g: Mapping[str, str], f: Mapping[str, str]) -> Dict[str, str]:
    """``g ∘ f``."""
    return {v: g[u] for v, u in f.items()}


# --------------------------------------------------------------------------
# models

def _world_name(vertices: Iterable[str]) -> str:
    return "".join(sorted(vertices, key=natural_key))


def binary_input_model(agents: Sequence[str], crash_worlds: bool = True, values=DECISIONS) -> SimplicialModel:
    """Pseudosphere of input assignments; vertex ``a0`` carries ``input_a=0``.

    With ``crash_worlds`` the faces missing one agent are worlds too.
    """
    agents = tuple(agents)
    colours = {f"{a}{x}": a for a in agents for x in values}
    labels = {f"{a}{x}": {input_prop(a, x)} for a in agents for x in values}
    sizes = [len(agents)] + ([len(agents) - 1] if crash_worlds and len(agents) > 1 else [])
    worlds = {}
    for size in sizes:
        for group in combinations(agents, size):
            for vals in product(values, repeat=size):
                verts = [f"{a}{x}" for a, x in zip(group, vals)]
                worlds[_world_name(verts)] = verts
    owners = {input_prop(a, x): a for a in agents for x in values}
    return build_model(agents, colours, worlds, local=True, vertex_labels=labels, owners=owners)


def _input_of(m: SimplicialModel, v: str) -> Tuple[str, Optional[str]]:
    """Owner agent and value of the single input proposition at ``v``."""
    labs = m.vertex_labels.get(v, frozenset())
    for p in labs:
        if p.startswith("input_") and "=" in p:
            return m.colours[v], p.split("=", 1)[1]
    return m.colours[v], None


def task_model(
    i: SimplicialModel,
    allowed: Callable[[SimplicialModel, Simplex, object], bool],
    decisions: Sequence = DECISIONS,
) -> Tuple[SimplicialModel, Dict[str, str]]:
    """Worlds ``w^d`` for each input world ``w`` and uniform decision ``d``
    with ``allowed(i, w, d)``; returns the model and its projection."""
    colours, labels, proj, worlds = {}, {}, {}, {}
    for w in i.worlds:
        for d in decisions:
            if not allowed(i, w, d):
                continue
            verts = []
            for v in w:
                t = f"{v}^{d}"
                colours[t] = i.colours[v]
                labels[t] = i.vertex_labels.get(v, frozenset())
                proj[t] = v
                verts.append(t)
            worlds[f"{i.name_of(w)}^{d}"] = sorted(verts, key=natural_key)
    if not worlds:
        raise ModelError("the task allows no output at all")
    t = build_model(i.agents, colours, worlds, local=True, vertex_labels=labels, owners=i.owners)
    return t, proj


def _inputs(i: SimplicialModel, w: Simplex) -> List[str]:
    return [_input_of(i, v)[1] for v in w]


def _sv1(i, w, d) -> bool:
    return str(d) in _inputs(i, w)


def _rv1(i, w, d) -> bool:
    return _sv1(i, w, d) or i.chi(w) != frozenset(i.agents)


def consensus_task(i: SimplicialModel, variant: str = "SV1", decisions=DECISIONS):
    """Uniform decision equal to some alive agent's input (SV1), or to some
    agent's input where a crashed agent's input may be anything (RV1)."""
    rules = {"SV1": _sv1, "RV1": _rv1}
    try:
        rule = rules[variant.upper()]
    except KeyError:
        raise ModelError(f"unknown consensus variant {variant!r}") from None
    return task_model(i, rule, decisions)


def identity_task(i: SimplicialModel, decisions=DECISIONS):
    """Every uniform decision is allowed everywhere."""
    return task_model(i, lambda *_: True, decisions)


@dataclass
class TaskInstance:
    input: SimplicialModel
    protocol: SimplicialModel
    protocol_projection: Dict[str, str]
    task: SimplicialModel
    task_projection: Dict[str, str]
    decisions: Tuple = DECISIONS

    def validate(self) -> None:
        for label, model, proj in (
            ("protocol", self.protocol, self.protocol_projection),
            ("task", self.task, self.task_projection),
        ):
            check = is_morphism(proj, model, self.input)
            if not check:
                raise ModelError(f"{label} projection is not a morphism: {check.violation}")


def consensus_instance(
    agents: Sequence[str] = ("a", "b", "c"),
    variant: str = "SV1",
    pattern: Optional[CommunicationPattern] = None,
    rounds: int = 1,
    *,
    crash_worlds: bool = True,
    input_model: Optional[SimplicialModel] = None,
) -> TaskInstance:
    from .dynamics import pattern_detectable_broadcast

    i = input_model or binary_input_model(agents, crash_worlds)
    pattern = pattern or pattern_detectable_broadcast(i.agents, 1)
    upd = iterate_update(i, pattern, rounds)
    if variant.lower() == "identity":
        t, tp = identity_task(i)
    else:
        t, tp = consensus_task(i, variant)
    return TaskInstance(i, upd.model, upd.projection, t, tp)


# --------------------------------------------------------------------------
# search

@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    protocol_vertices: int = 0
    protocol_worlds: int = 0


def _candidates(t: TaskInstance) -> Dict[str, List[str]]:
    by_base: Dict[str, List[str]] = {}
    for v, base in t.task_projection.items():
        by_base.setdefault(base, []).append(v)
    out = {}
    for u in t.protocol.vertices:
        cands = by_base.get(t.protocol_projection[u], [])
        out[u] = sorted(cands, key=natural_key)
    return out


def find_decision_map_with_stats(t: TaskInstance) -> Tuple[Optional[Dict[str, str]], SearchStats]:
    """Backtracking search for ``δ: P -> T`` with ``π ∘ δ = π``.

    Candidate images of a protocol vertex are the task vertices above the
    same input vertex, so colours, labels and commutation hold by
    construction; the search only has to send every world to a world.
    """
    p, task = t.protocol, t.task
    stats = SearchStats(protocol_vertices=len(p.vertices), protocol_worlds=len(p.worlds))
    cands = _candidates(t)
    worlds_of: Dict[str, List[Simplex]] = {v: [] for v in p.vertices}
    for w in p.worlds:
        for v in w:
            worlds_of[v].append(w)
    order = sorted(p.vertices, key=lambda v: (-len(worlds_of[v]), natural_key(v)))
    # faces of task worlds, per colour set, for partial-image pruning
    t_faces: Dict[FrozenSet[str], set] = {}
    t_worlds = set(task.worlds)
    for w in task.worlds:
        cols = task.chi(w)
        bucket = t_faces.setdefault(cols, set())
        items = sorted(w)
        for r in range(1, len(items) + 1):
            for sub in combinations(items, r):
                bucket.add(frozenset(sub))
    world_cols = {w: p.chi(w) for w in p.worlds}
    assign: Dict[str, str] = {}

    def consistent(u: str) -> bool:
        for w in worlds_of[u]:
            img = frozenset(assign[v] for v in w if v in assign)
            if len(img) == len(w):
                if img not in t_worlds:
                    return False
            elif img not in t_faces.get(world_cols[w], ()):
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        u = order[k]
        for c in cands[u]:
            stats.nodes += 1
            assign[u] = c
            if consistent(u) and search(k + 1):
                return True
            del assign[u]
        stats.backtracks += 1
        return False

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 100))
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(limit)
    return (dict(assign) if found else None), stats


def find_decision_map(t: TaskInstance) -> Optional[Dict[str, str]]:
    return find_decision_map_with_stats(t)[0]


# --------------------------------------------------------------------------
# obstructions

@dataclass
class ObstructionReport:
    formula: Formula
    guarded: bool
    valid_on_task: bool
    task_counterexample: Optional[str] = None
    protocol_falsifier: Optional[str] = None
    guard_violation: Optional[str] = None

    @property
    def established(self) -> bool:
        return self.guarded and self.valid_on_task and self.protocol_falsifier is not None

    @property
    def verdict(self) -> str:
        return "obstruction established" if self.established else "not an obstruction"

    def lines(self) -> List[str]:
        out = [f"formula: {self.formula}"]
        out.append("guarded positive: " + ("yes" if self.guarded else f"no ({self.guard_violation})"))
        out.append(
            "valid on task: "
            + ("yes" if self.valid_on_task else f"no (counterexample {self.task_counterexample})")
        )
        out.append(
            "false on protocol: "
            + (f"yes (world {self.protocol_falsifier})" if self.protocol_falsifier else "no")
        )
        out.append(f"verdict: {self.verdict}")
        return out


def check_obstruction(t: TaskInstance, phi: Formula, *, strict: bool = False) -> ObstructionReport:
    """Evaluate ``phi`` on the task and protocol models.

    A formula that is not guarded positive is still evaluated but never
    counts as an obstruction; with ``strict`` it raises instead.
    """
    guarded, locus = is_guarded_positive(phi, t.input.owners)
    if strict and not guarded:
        raise ModelError(f"formula is not guarded positive: {locus}")
    cex = SimplicialChecker(t.task).counterexample(phi)
    fals = SimplicialChecker(t.protocol).counterexample(phi)
    return ObstructionReport(
        formula=phi,
        guarded=guarded,
        valid_on_task=cex is None,
        task_counterexample=None if cex is None else t.task.name_of(cex),
        protocol_falsifier=None if fals is None else t.protocol.name_of(fals),
        guard_violation=None if guarded else str(locus),
    )


def check_knowledge_gain(
    f: Mapping[str, str], c: SimplicialModel, d: SimplicialModel, phi: Formula
) -> Tuple[bool, Optional[Simplex]]:
    """Check ``d, f(X) ⊨ phi  implies  c, X ⊨ phi`` at every world of ``c``.

    Returns ``(True, None)`` or ``(False, X)``; a failure on valid input
    means a bug.
    """
    check = is_morphism(f, c, d)
    if not check:
        raise ModelError(f"not a morphism: {check.violation}")
    guarded, locus = is_guarded_positive(phi, c.owners or d.owners)
    if not guarded:
        raise ModelError(f"formula is not guarded positive: {locus}")
    cc, dc = SimplicialChecker(c), SimplicialChecker(d)
    for x in c.worlds:
        y = frozenset(f[v] for v in x)
        if dc.holds(y, phi) and not cc.holds(x, phi):
            return False, x
    return True, None


def _nonempty(agents):
    agents = sorted(agents)
    return [g for r in range(1, len(agents) + 1) for g in combinations(agents, r)]


def sv1_obstruction(agents: Sequence[str], value) -> Formula:
    """``C_A`` of: every alive group has a member with input ``value``."""
    body = conj(
        Implies(Alive(b), disj(Atom(input_prop(x, value)) for x in b)) for b in _nonempty(agents)
    )
    return C(tuple(agents), body)


def rv1_obstruction(agents: Sequence[str], value) -> Formula:
    """``C_A`` of: whenever a group is alive, some agent has input ``value``."""
    body = conj(
        Implies(Alive(b), disj(Atom(input_prop(x, value)) for x in sorted(agents)))
        for b in _nonempty(agents)
    )
    return C(tuple(agents), body)


def alive_all_obstruction(agents: Sequence[str], value) -> Formula:
    """``C_A(alive_A => some input equals value)``."""
    agents = tuple(sorted(agents))
    return C(agents, Implies(Alive(agents), disj(Atom(input_prop(x, value)) for x in agents)))
