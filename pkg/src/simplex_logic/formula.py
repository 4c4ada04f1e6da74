"""Epistemic formulas with distributed and common knowledge.

Formulas are immutable trees of frozen dataclasses.  Agent-set arguments are
stored as sorted tuples so that structurally equal formulas compare (and hash)
equal regardless of how they were written.

The concrete syntax accepted by :func:`parse_formula` is::

    formula := "true" | "false" | prop | "~" formula
             | formula "&" formula | formula "|" formula | formula "=>" formula
             | "K" agent formula | "D" agentset formula | "E" agentset formula
             | "C" agentset formula | "alive" agentset | "dead" agentset
             | "(" formula ")"
    agentset := "{" agent ("," agent)* "}"

Precedence, tightest first: modal operators and ``~``, then ``&``, ``|`` and
``=>``.  ``&`` and ``|`` associate to the left, ``=>`` to the right.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

__all__ = [
    "TRUE_PROP",
    "Formula",
    "Atom",
    "Top",
    "Bottom",
    "Not",
    "And",
    "Or",
    "Implies",
    "D",
    "K",
    "E",
    "C",
    "Alive",
    "Dead",
    "FormulaSyntaxError",
    "parse_formula",
    "render",
    "desugar",
    "is_guarded_positive",
    "conj",
    "disj",
    "atoms",
    "agents_of",
    "modal_depth",
]

#: reserved proposition used to encode ``true`` as ``__t | ~__t``
TRUE_PROP = "__t"

AgentSet = Tuple[str, ...]


def _agent_set(agents: Union[str, Iterable[str]]) -> AgentSet:
    if isinstance(agents, str):
        agents = (agents,)
    if isinstance(agents, (tuple, frozenset)):
        return _agent_set_cached(agents)
    return _agent_set_uncached(agents)


@lru_cache(maxsize=4096)
def _agent_set_cached(agents) -> AgentSet:
    return _agent_set_uncached(agents)


def _agent_set_uncached(agents) -> AgentSet:
    out = tuple(sorted(set(agents)))
    if not out:
        raise ValueError("agent set must be nonempty")
    for a in out:
        if not a or any(ch.isspace() for ch in a):
            raise ValueError(f"invalid agent name {a!r}")
    return out


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class _GroupOp(Formula):
    """Shared constructor logic for operators indexed by an agent set."""

    __slots__ = ()

    def __post_init__(self):
        object.__setattr__(self, "agents", _agent_set(self.agents))


@dataclass(frozen=True)
class D(_GroupOp):
    """Distributed knowledge of a nonempty group."""

    agents: AgentSet
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class K(Formula):
    agent: str
    sub: Formula

    def __post_init__(self):
        _agent_set(self.agent)

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class E(_GroupOp):
    """Everybody in the group knows."""

    agents: AgentSet
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class C(_GroupOp):
    """Common knowledge of a nonempty group."""

    agents: AgentSet
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Alive(_GroupOp):
    agents: AgentSet


@dataclass(frozen=True)
class Dead(_GroupOp):
    agents: AgentSet



def _cache_hash(cls):
    # formulas are immutable trees that get hashed over and over as cache keys
    raw = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = raw(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


for _cls in (Atom, Top, Bottom, Not, And, Or, Implies, D, K, E, C, Alive, Dead):
    _cache_hash(_cls)
del _cls

def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out: Optional[Formula] = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return Top() if out is None else out


def disj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    out: Optional[Formula] = None
    for f in formulas:
        out = f if out is None else Or(out, f)
    return Bottom() if out is None else out


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.children())


def atoms(f: Formula) -> frozenset:
    """Names of the atomic propositions occurring in ``f``."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def agents_of(f: Formula) -> frozenset:
    out = set()
    for g in subformulas(f):
        if isinstance(g, K):
            out.add(g.agent)
        elif isinstance(g, _GroupOp):
            out.update(g.agents)
    return frozenset(out)


def modal_depth(f: Formula) -> int:
    inner = max((modal_depth(c) for c in f.children()), default=0)
    if isinstance(f, (D, K, E, C)):
        return inner + 1
    return inner


# --------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    """Raised on malformed formula text; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>=>)
  | (?P<punct>[~&|(){},])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:=[A-Za-z0-9_]+)?)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false", "K", "D", "E", "C", "alive", "dead"}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, agents, props):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.agents = None if agents is None else set(agents)
        self.props = None if props is None else set(props)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok[2], self.text)

    def expect(self, value):
        tok = self.advance()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self):
        f = self.implication()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.peek()[1] == "=>":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek()[1] == "|":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def agent(self):
        tok = self.advance()
        if tok[0] != "name" or tok[1] in _KEYWORDS or "=" in tok[1]:
            raise self.error(f"expected agent name, found {tok[1] or 'end of input'!r}", tok)
        if self.agents is not None and tok[1] not in self.agents:
            raise self.error(f"unknown agent {tok[1]!r}", tok)
        return tok[1]

    def agentset(self):
        start = self.expect("{")
        if self.peek()[1] == "}":
            raise self.error("empty agent set", start)
        names = [self.agent()]
        while self.peek()[1] == ",":
            self.advance()
            names.append(self.agent())
        self.expect("}")
        return tuple(names)

    def unary(self):
        tok = self.peek()
        kind, value = tok[0], tok[1]
        if value == "~":
            self.advance()
            return Not(self.unary())
        if value == "(":
            self.advance()
            f = self.implication()
            self.expect(")")
            return f
        if kind != "name":
            raise self.error(f"unexpected token {value or 'end of input'!r}")
        self.advance()
        if value == "true":
            return Top()
        if value == "false":
            return Bottom()
        if value == "K":
            a = self.agent()
            return K(a, self.unary())
        if value in ("D", "E", "C"):
            group = self.agentset()
            return {"D": D, "E": E, "C": C}[value](group, self.unary())
        if value == "alive":
            return Alive(self.agentset())
        if value == "dead":
            return Dead(self.agentset())
        if self.props is not None and value not in self.props:
            raise self.error(f"unknown proposition {value!r}", tok)
        return Atom(value)


def parse_formula(
    text: str,
    agents: Optional[Iterable[str]] = None,
    props: Optional[Iterable[str]] = None,
) -> Formula:
    """Parse ``text`` into a formula AST.

    When ``agents`` or ``props`` are given, names outside them are rejected.
    Derived operators are kept as their own nodes; see :func:`desugar`.
    """
    return _Parser(text, agents, props).parse()


# --------------------------------------------------------------------------
# rendering

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _set(agents) -> str:
    return "{" + ",".join(agents) + "}"


def render(f: Formula) -> str:
    """Canonical text form; ``parse_formula(render(f)) == f``."""
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Alive):
        return "alive" + _set(f.agents)
    if isinstance(f, Dead):
        return "dead" + _set(f.agents)
    if isinstance(f, Not):
        return "~" + _render(f.sub, _PREC_UNARY)
    if isinstance(f, K):
        return f"K {f.agent} " + _render(f.sub, _PREC_UNARY)
    if isinstance(f, (D, E, C)):
        op = type(f).__name__
        return op + _set(f.agents) + " " + _render(f.sub, _PREC_UNARY)
    if isinstance(f, And):
        s, prec = _render(f.left, _PREC_AND) + " & " + _render(f.right, _PREC_AND + 1), _PREC_AND
    elif isinstance(f, Or):
        s, prec = _render(f.left, _PREC_OR) + " | " + _render(f.right, _PREC_OR + 1), _PREC_OR
    elif isinstance(f, Implies):
        s, prec = _render(f.left, _PREC_IMP + 1) + " => " + _render(f.right, _PREC_IMP), _PREC_IMP
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if prec < ctx else s


# --------------------------------------------------------------------------
# desugaring

_T = Atom(TRUE_PROP)


def _or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def _true() -> Formula:
    return _or(_T, Not(_T))


def _false() -> Formula:
    return Not(_true())


def desugar(f: Formula) -> Formula:
    """Rewrite ``f`` into the core fragment Atom / Not / And / D / C.

    ``true`` becomes ``__t | ~__t`` (itself expanded), so the result does not
    depend on the propositions of any particular model.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, Top):
        return _true()
    if isinstance(f, Bottom):
        return _false()
    if isinstance(f, Not):
        return Not(desugar(f.sub))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return _or(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return _or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, D):
        return D(f.agents, desugar(f.sub))
    if isinstance(f, C):
        return C(f.agents, desugar(f.sub))
    if isinstance(f, K):
        return D((f.agent,), desugar(f.sub))
    if isinstance(f, E):
        body = desugar(f.sub)
        return _core_conj(D((a,), body) for a in f.agents)
    if isinstance(f, Alive):
        return Not(D(f.agents, _false()))
    if isinstance(f, Dead):
        return _core_conj(D((a,), _false()) for a in f.agents)
    raise TypeError(f"not a formula: {f!r}")


def _core_conj(parts) -> Formula:
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# --------------------------------------------------------------------------
# guarded positive fragment

def _propositional_locus(
    f: Formula, guard: AgentSet, owners: Mapping[str, str]
) -> Optional[Formula]:
    """First subformula of ``f`` that leaves propositional logic over the
    propositions owned by ``guard``, or ``None``."""
    if isinstance(f, Atom):
        owner = owners.get(f.name)
        return None if owner is not None and owner in guard else f
    if isinstance(f, (Top, Bottom)):
        return None
    if isinstance(f, (Not, And, Or, Implies)):
        for c in f.children():
            bad = _propositional_locus(c, guard, owners)
            if bad is not None:
                return bad
        return None
    return f


def is_guarded_positive(
    f: Formula, owners: Mapping[str, str]
) -> Tuple[bool, Optional[Formula]]:
    """Check membership in the guarded positive fragment.

    The fragment is built with ``&``, ``|``, ``D``/``K``/``E`` and ``C`` from
    guards ``alive{B} => psi`` where ``psi`` is propositional and mentions only
    propositions owned (per ``owners``) by agents of ``B``.

    Returns ``(True, None)`` or ``(False, locus)`` with the first offending
    subformula in left-to-right order.
    """
    if isinstance(f, (And, Or)):
        for c in f.children():
            ok, bad = is_guarded_positive(c, owners)
            if not ok:
                return ok, bad
        return True, None
    if isinstance(f, (D, K, E, C)):
        return is_guarded_positive(f.sub, owners)
    if isinstance(f, Implies) and isinstance(f.left, Alive):
        bad = _propositional_locus(f.right, f.left.agents, owners)
        return (bad is None), bad
    return False, f
