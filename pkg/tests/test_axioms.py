import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplex_logic import gallery
from simplex_logic.axioms import (
    SC_SCHEMAS,
    SCHEMAS,
    check_schema,
    classify,
    default_pool,
    instances,
    nonempty_subsets,
)
from simplex_logic.generators import random_model, rng_for
from simplex_logic.simplicial import SimplicialChecker, build_model, is_maximal, is_minimal


def test_nonempty_subsets():
    assert len(nonempty_subsets("abc")) == 7
    assert len(nonempty_subsets("abc", proper=True)) == 6


def test_default_pool_shape():
    m = gallery.c3()
    pool = default_pool(m)
    # constants, p, ~p and D_B p for the 7 groups
    assert len(pool) == 2 + 1 + 1 + 7
    assert len(default_pool(m, modal=False, constants=False)) == 2


def test_instance_order_is_canonical():
    m = gallery.c3()
    first = [params for params, _ in instances("Union", m, [])]
    assert first[0] == (("a",), ("a",))
    assert first == sorted(first, key=lambda p: (nonempty_subsets("abc").index(p[0]), nonempty_subsets("abc").index(p[1])))


def test_minimal_model_verdicts():
    c = classify(gallery.c4())
    assert c.sc and c.min and not c.max
    assert c.reports["Min"].valid and not c.reports["Max"].valid


def test_min_fails_at_the_edge_world():
    c = classify(gallery.c5())
    assert not c.min
    params, world = c.reports["Min"].counterexample
    assert world == gallery.c5().world("w2")
    assert params == (("a", "b"),)


def test_max_fails_for_the_missing_face():
    m = gallery.c5()
    rep = check_schema(m, "Max")
    failing = {
        params[0]
        for params, f in instances("Max", m, [])
        if SimplicialChecker(m).counterexample(f) is not None
    }
    assert not rep.valid and ("b", "c") in failing


def test_maximal_model_verdicts():
    c = classify(gallery.c6())
    assert c.sc and c.max and not c.min


def test_t_fails_with_dead_agents_and_holds_on_pure_models():
    assert not check_schema(gallery.c3(), "T").valid
    assert check_schema(gallery.c1(), "T").valid


def test_dedupe_does_not_change_verdicts():
    for name in ("c1", "c2", "c3", "seven-worlds"):
        m = gallery.MODELS[name]()
        for schema in SCHEMAS:
            a = check_schema(m, schema)
            b = check_schema(m, schema, dedupe=False)
            assert a.valid == b.valid, (name, schema)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_soundness_on_random_models(seed):
    m = random_model(rng_for("axioms-prop", seed))
    for schema in SC_SCHEMAS + ("DeadKnows", "AliveT", "AliveKnowsAlive"):
        rep = check_schema(m, schema)
        assert rep.valid, (schema, rep.counterexample)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_min_max_track_frame_predicates(seed):
    m = random_model(rng_for("frames-prop", seed))
    assert check_schema(m, "Min").valid == is_minimal(m)
    assert check_schema(m, "Max").valid == is_maximal(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_t_schema_tracks_purity_of_worlds(seed):
    m = random_model(rng_for("t-prop", seed))
    has_dead = any(len(w) < len(m.agents) for w in m.worlds)
    assert check_schema(m, "T").valid == (not has_dead)


def test_p_with_full_group_uses_true():
    m = build_model(("a",), {"a0": "a"}, {"w": ["a0"]}, {"w": ["p"]})
    assert check_schema(m, "P").valid


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_p_stays_valid_over_the_whole_pool(seed):
    m = random_model(rng_for("p-pool", seed))
    checker = SimplicialChecker(m)
    pool = default_pool(m)
    for params, f in SCHEMAS["P"].build(m.agents, pool, pool):
        assert checker.counterexample(f) is None, params
