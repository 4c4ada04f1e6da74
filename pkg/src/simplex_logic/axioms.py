"""Semantic validity of the axiom schemas on finite simplicial models.

Schemas are instantiated over nonempty agent sets and a finite pool of slot
formulas, and every instance is checked at every world.  A finite pool only
bounds the check; the frame predicates :func:`is_minimal` and
:func:`is_maximal` give the exact answer for Min and Max, and
:func:`classify` cross-checks the two.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .formula import Alive, And, Atom, Bottom, D, Dead, Formula, Implies, K, Not, Top, conj, disj
from .simplicial import SimplicialChecker, SimplicialModel, is_maximal, is_minimal

__all__ = [
    "AxiomSchema",
    "ValidityReport",
    "SCHEMAS",
    "SC_SCHEMAS",
    "default_pool",
    "nonempty_subsets",
    "instances",
    "check_schema",
    "dedupe_pool",
    "classify",
]


def nonempty_subsets(agents: Sequence[str], proper: bool = False) -> List[Tuple[str, ...]]:
    agents = sorted(agents)
    top = len(agents) - 1 if proper else len(agents)
    return [c for r in range(1, top + 1) for c in combinations(agents, r)]


def _dead(agents: Iterable[str]) -> Formula:
    agents = tuple(agents)
    return Dead(agents) if agents else Top()


def _complement(agents: Sequence[str], group) -> Tuple[str, ...]:
    return tuple(a for a in sorted(agents) if a not in group)


@dataclass(frozen=True)
class AxiomSchema:
    """A named schema; ``build(agents, pool, atoms)`` yields
    ``(parameters, formula)`` instances in canonical order."""

    name: str
    slots: str
    build: Callable[[Sequence[str], Sequence[Formula], Sequence[Formula]], Iterable[Tuple[tuple, Formula]]]


def _k(agents, pool, _atoms, groups=None):
    for b in groups or nonempty_subsets(agents):
        for phi, psi in product(pool, repeat=2):
            yield (b, phi, psi), Implies(D(b, Implies(phi, psi)), Implies(D(b, phi), D(b, psi)))


def _b(agents, pool, _atoms, groups=None):
    for b in groups or nonempty_subsets(agents):
        for phi in pool:
            yield (b, phi), Implies(phi, D(b, Not(D(b, Not(phi)))))


def _4(agents, pool, _atoms, groups=None):
    for b in groups or nonempty_subsets(agents):
        for phi in pool:
            yield (b, phi), Implies(D(b, phi), D(b, D(b, phi)))


def _5(agents, pool, _atoms, groups=None):
    for b in groups or nonempty_subsets(agents):
        for phi in pool:
            yield (b, phi), Implies(Not(D(b, phi)), D(b, Not(D(b, phi))))


def _t(agents, pool, _atoms):
    for a in sorted(agents):
        for phi in pool:
            yield (a, phi), Implies(K(a, phi), phi)


def _mono(agents, pool, _atoms):
    subsets = nonempty_subsets(agents)
    for b in subsets:
        for b2 in subsets:
            if set(b) <= set(b2):
                for phi in pool:
                    yield (b, b2, phi), Implies(D(b, phi), D(b2, phi))


def _union(agents, _pool, _atoms):
    subsets = nonempty_subsets(agents)
    for b, b2 in product(subsets, repeat=2):
        yield (b, b2), Implies(And(Alive(b), Alive(b2)), Alive(set(b) | set(b2)))


def _ne(agents, _pool, _atoms):
    yield (), disj(Alive((a,)) for a in sorted(agents))


def _p(agents, _pool, atoms):
    # the atomic instances are the ones that matter
    for b in nonempty_subsets(agents):
        rest = _complement(agents, b)
        for phi in atoms:
            hyp = conj([Alive(b), _dead(rest), phi])
            yield (b, phi), Implies(hyp, D(b, Implies(_dead(rest), phi)))


def _min(agents, _pool, _atoms):
    for b in nonempty_subsets(agents, proper=True):
        rest = _complement(agents, b)
        yield (b,), Implies(And(Alive(b), Dead(rest)), D(b, Dead(rest)))


def _max(agents, _pool, _atoms):
    for b in nonempty_subsets(agents, proper=True):
        rest = _complement(agents, b)
        yield (b,), Implies(Alive(b), Not(D(b, Not(Dead(rest)))))


def _dead_knows(agents, pool, _atoms):
    for a in sorted(agents):
        for phi in pool:
            yield (a, phi), Implies(Dead((a,)), K(a, phi))


def _alive_t(agents, pool, _atoms):
    for b in nonempty_subsets(agents):
        for phi in pool:
            yield (b, phi), Implies(Alive(b), Implies(D(b, phi), phi))


def _alive_knows_alive(agents, _pool, _atoms):
    for b in nonempty_subsets(agents):
        yield (b,), Implies(Alive(b), D(b, Alive(b)))


SCHEMAS: Dict[str, AxiomSchema] = {
    s.name: s
    for s in [
        AxiomSchema("K", "B, phi, psi", _k),
        AxiomSchema("B", "B, phi", _b),
        AxiomSchema("4", "B, phi", _4),
        AxiomSchema("5", "B, phi", _5),
        AxiomSchema("T", "a, phi", _t),
        AxiomSchema("Mono", "B <= B', phi", _mono),
        AxiomSchema("Union", "B, B'", _union),
        AxiomSchema("NE", "", _ne),
        AxiomSchema("P", "B, p", _p),
        AxiomSchema("Min", "B < A", _min),
        AxiomSchema("Max", "B < A", _max),
        # theorems derivable from the axioms above
        AxiomSchema("DeadKnows", "a, phi", _dead_knows),
        AxiomSchema("AliveT", "B, phi", _alive_t),
        AxiomSchema("AliveKnowsAlive", "B", _alive_knows_alive),
    ]
}

SC_SCHEMAS = ("K", "B", "4", "5", "Mono", "Union", "NE", "P")
SYSTEMS = {
    "sc": SC_SCHEMAS,
    "scmin": SC_SCHEMAS + ("Min",),
    "scmax": SC_SCHEMAS + ("Max",),
}


def default_pool(m: SimplicialModel, *, modal: bool = True, constants: bool = True) -> List[Formula]:
    """Atoms of ``m``, their negations and, if ``modal``, ``D_B p`` for every
    nonempty ``B`` and atom ``p``.  With ``constants`` the pool also holds
    ``true`` and ``false``, so models without propositions get a pool."""
    props = sorted(m.props)
    pool: List[Formula] = [Top(), Bottom()] if constants else []
    pool += [Atom(p) for p in props]
    pool += [Not(Atom(p)) for p in props]
    if modal:
        pool += [D(b, Atom(p)) for b in nonempty_subsets(m.agents) for p in props]
    return pool


def dedupe_pool(checker: SimplicialChecker, pool: Sequence[Formula]) -> List[Formula]:
    """First pool formula of each distinct extension, in pool order."""
    seen = {}
    for f in pool:
        seen.setdefault(checker.ext(f), f)
    return list(seen.values())


@dataclass
class ValidityReport:
    schema: str
    instances: int
    valid: bool
    #: parameters and world of the first failing instance
    counterexample: Optional[Tuple[tuple, frozenset]] = None
    failures: int = 0


#: schemas whose instances only depend on the accessibility of their group
ROW_SCHEMAS = ("K", "B", "4", "5")


def instances(schema: str, m: SimplicialModel, pool: Sequence[Formula], groups=None):
    atoms_ = [Atom(p) for p in sorted(m.props)]
    if groups is not None:
        return SCHEMAS[schema].build(m.agents, pool, atoms_, groups)
    return SCHEMAS[schema].build(m.agents, pool, atoms_)


def dedupe_groups(checker: SimplicialChecker, agents: Sequence[str]) -> List[Tuple[str, ...]]:
    """First group of each distinct accessibility, in canonical order."""
    seen = {}
    for b in nonempty_subsets(agents):
        seen.setdefault(checker.rows(frozenset(b)), b)
    return list(seen.values())


def check_schema(
    m: SimplicialModel,
    schema: str,
    pool: Optional[Sequence[Formula]] = None,
    *,
    checker: Optional[SimplicialChecker] = None,
    dedupe: bool = True,
) -> ValidityReport:
    """Check every instance of ``schema`` at every world of ``m``.

    Truth of an instance only depends on the extensions of its slots (and,
    for some schemas, on the accessibility of the group), so by default
    equivalent slot fillings are checked once.
    """
    if pool is None:
        pool = default_pool(m)
    checker = checker or SimplicialChecker(m)
    for f in pool:
        checker.check_props(f)
    groups = None
    if dedupe:
        pool = dedupe_pool(checker, pool)
        if schema in ROW_SCHEMAS:
            groups = dedupe_groups(checker, m.agents)
    count = 0
    failures = 0
    first = None
    full = checker.full
    for params, f in instances(schema, m, pool, groups):
        count += 1
        bad = full & ~checker.ext(f)
        if bad:
            w = checker.worlds_of(bad & -bad)[0]
            failures += 1
            if first is None:
                first = (params, w)
    return ValidityReport(schema, count, failures == 0, first, failures)


@dataclass
class Classification:
    sc: bool
    min: bool
    max: bool
    reports: Dict[str, ValidityReport] = field(default_factory=dict)
    #: schemas whose finite-pool verdict disagrees with the frame predicate
    disagreements: List[str] = field(default_factory=list)


def classify(m: SimplicialModel, pool: Optional[Sequence[Formula]] = None) -> Classification:
    """SC verdict from the schema checks; Min/Max verdicts from the frame
    predicates, corroborated by the Min/Max schema checks."""
    checker = SimplicialChecker(m)
    if pool is None:
        pool = default_pool(m)
    reports = {s: check_schema(m, s, pool, checker=checker) for s in SC_SCHEMAS + ("Min", "Max")}
    minimal, maximal = is_minimal(m), is_maximal(m)
    disagreements = [
        name for name, frame in (("Min", minimal), ("Max", maximal)) if reports[name].valid != frame
    ]
    return Classification(
        sc=all(reports[s].valid for s in SC_SCHEMAS),
        min=minimal,
        max=maximal,
        reports=reports,
        disagreements=disagreements,
    )
