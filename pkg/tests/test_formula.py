import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplex_logic.formula import (
    TRUE_PROP,
    Alive,
    And,
    Atom,
    Bottom,
    C,
    D,
    Dead,
    E,
    FormulaSyntaxError,
    Implies,
    K,
    Not,
    Or,
    Top,
    atoms,
    conj,
    desugar,
    disj,
    is_guarded_positive,
    modal_depth,
    parse_formula,
    render,
    subformulas,
)
from simplex_logic.generators import random_formula, random_model, rng_for
from simplex_logic.simplicial import SimplicialChecker

p, q = Atom("p"), Atom("q")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("p", p),
        ("~p", Not(p)),
        ("p & q | p", Or(And(p, q), p)),
        ("p => q => p", Implies(p, Implies(q, p))),
        ("D{b,c} p", D(("b", "c"), p)),
        ("D{c,b} p", D(("b", "c"), p)),
        ("K a false", K("a", Bottom())),
        ("E{a,b} ~q", E(("a", "b"), Not(q))),
        ("C{a} (p & q)", C(("a",), And(p, q))),
        ("alive{a,b} => dead{c}", Implies(Alive(("a", "b")), Dead(("c",)))),
        ("true", Top()),
        ("input_a=0", Atom("input_a=0")),
    ],
)
def test_parse_examples(text, expected):
    assert parse_formula(text) == expected


def test_modal_binds_tighter_than_connectives():
    assert parse_formula("K a p & q") == And(K("a", p), q)


@pytest.mark.parametrize(
    "text, pos",
    [("p &", 3), ("(p", 2), ("D{} p", 1), ("p q", 2), ("K p", 2), ("p # q", 2)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text, agents=["a", "b"])
    assert info.value.pos == pos


def test_unknown_names_rejected_when_declared():
    with pytest.raises(FormulaSyntaxError, match="agent"):
        parse_formula("K z p", agents=["a"])
    with pytest.raises(FormulaSyntaxError, match="proposition"):
        parse_formula("r", agents=["a"], props=["p"])


def test_empty_group_rejected_by_constructor():
    with pytest.raises(ValueError):
        D((), p)


def test_conj_disj_of_nothing():
    assert conj([]) == Top()
    assert disj([]) == Bottom()
    assert conj([p]) == p


def test_walkers():
    f = parse_formula("K a (p & D{a,b} q)")
    assert atoms(f) == {"p", "q"}
    assert modal_depth(f) == 2
    assert len(list(subformulas(f))) == 5


formulas = st.integers(0, 10**6).map(
    lambda seed: random_formula(rng_for("formula-roundtrip", seed), ["a", "b", "c"], ["p", "q"])
)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_render_parse_roundtrip(f):
    assert parse_formula(render(f)) == f


CORE = (Atom, Not, And, D, C)


def _core_only(f):
    return all(isinstance(g, CORE) for g in subformulas(f))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_desugar_uses_core_and_preserves_truth(seed):
    rng = rng_for("desugar", seed)
    m = random_model(rng, max_vertices=6, max_agents=3)
    f = random_formula(rng, m.agents, sorted(m.props))
    g = desugar(f)
    assert _core_only(g)
    checker = SimplicialChecker(m)
    assert checker.ext(f) == checker.ext(g)


def test_true_desugars_to_reserved_tautology():
    assert desugar(Top()) == Not(And(Not(Atom(TRUE_PROP)), Not(Not(Atom(TRUE_PROP)))))


OWNERS = {"input_a=0": "a", "input_b=0": "b"}


@pytest.mark.parametrize(
    "text, ok",
    [
        ("alive{a} => input_a=0", True),
        ("C{a,b} (alive{a,b} => input_a=0 | input_b=0)", True),
        ("K a (alive{a} => ~input_a=0) & D{a,b} (alive{b} => true)", True),
        ("alive{a} => input_b=0", False),
        ("input_a=0", False),
        ("~(alive{a} => input_a=0)", False),
        ("alive{a} => K a input_a=0", False),
    ],
)
def test_guarded_positive(text, ok):
    f = parse_formula(text)
    verdict, locus = is_guarded_positive(f, OWNERS)
    assert verdict is ok
    assert (locus is None) is ok
