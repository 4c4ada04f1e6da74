import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import kripke_holds
from simplex_logic import gallery
from simplex_logic.formula import parse_formula
from simplex_logic.generators import random_formula, random_kripke, random_model, rng_for
from simplex_logic.kripke import (
    KripkeChecker,
    build_kripke,
    frame_properties,
    kappa,
    properify,
    satisfies_kripke,
    sigma,
)
from simplex_logic.simplicial import ModelError, SimplicialChecker, is_maximal, is_minimal


def test_closure_is_recorded():
    k = build_kripke(("a",), ["u", "v", "w"], {"a": [("u", "v"), ("v", "w")]})
    assert k.related("a", "u", "w") and k.related("a", "w", "u")
    assert ("u", "w") in k.closure_added["a"]


def test_loops_and_live_sets():
    k = gallery.frame_proper()
    assert k.live("w2") == {"a", "b", "c"}
    assert k.live("w3") == {"a", "b"}
    assert not k.related("c", "w3", "w3")


def test_unknown_world_rejected():
    with pytest.raises(ModelError):
        build_kripke(("a",), ["u"], {"a": [("u", "x")]})


@pytest.mark.parametrize(
    "frame, proper, minimal, maximal",
    [
        (gallery.frame_not_proper, False, True, False),
        (gallery.frame_proper, True, False, False),
        (gallery.frame_minimal, True, True, False),
        (gallery.frame_maximal, True, False, True),
    ],
)
def test_small_frames(frame, proper, minimal, maximal):
    rep = frame_properties(frame())
    assert (rep.proper, rep.minimal, rep.maximal) == (proper, minimal, maximal)
    assert rep.no_empty_world


def test_empty_world_detected():
    k = build_kripke(("a",), ["u", "v"], {"a": [("u",)]})
    rep = frame_properties(k)
    assert not rep.no_empty_world and rep.witnesses["no_empty_world"] == ("v",)
    with pytest.raises(ModelError):
        sigma(k)


def test_sigma_rejects_improper():
    with pytest.raises(ModelError, match="not proper"):
        sigma(gallery.frame_not_proper())


def test_sigma_vertex_ids_and_world_shapes():
    res = sigma(gallery.frame_maximal())
    sizes = sorted(len(x) for x in res.world_map.values())
    assert sizes == [1, 1, 2]
    assert "a:[w6]" in res.model.vertices
    assert is_maximal(res.model)


def test_kappa_of_frames_matches_simplicial_predicates():
    for name in ("c1", "c4", "c5", "c6", "seven-worlds"):
        m = gallery.MODELS[name]()
        rep = frame_properties(kappa(m))
        assert rep.proper and rep.no_empty_world
        assert rep.minimal == is_minimal(m)
        assert rep.maximal == is_maximal(m)


def test_seven_world_live_sets():
    k = kappa(gallery.seven_worlds())
    live = ["".join(sorted(k.live(w))) for w in k.worlds]
    assert sorted(live) == sorted(["abc", "ab", "ab", "abc", "ac", "bc", "c"])


def test_properify_merges_indistinguishable_worlds():
    res = properify(gallery.frame_not_proper())
    assert len(res.model.worlds) == 1
    assert res.quotient == {"w0": "w0", "w1": "w0"}
    assert frame_properties(res.model).proper


def test_properify_refuses_label_clash():
    k = build_kripke(("a",), ["u", "v"], {"a": [("u", "v")]}, {"u": ["p"]})
    with pytest.raises(ModelError):
        properify(k)


def test_kripke_dead_agent_knows_everything():
    k = gallery.frame_proper()
    assert satisfies_kripke(k, "w3", parse_formula("K c false"))
    assert not satisfies_kripke(k, "w2", parse_formula("K c false"))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_kripke_checker_agrees_with_oracle(seed):
    rng = rng_for("kripke-oracle", seed)
    k = random_kripke(rng, max_worlds=6, max_agents=3, proper=False)
    f = random_formula(rng, k.agents, ["p", "q"], depth=3)
    checker = KripkeChecker(k)
    for w in k.worlds:
        assert checker.holds(w, f) == kripke_holds(k, w, f)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_kappa_preserves_truth(seed):
    rng = rng_for("kappa", seed)
    m = random_model(rng)
    k = kappa(m)
    f = random_formula(rng, m.agents, sorted(m.props))
    sc, kc = SimplicialChecker(m), KripkeChecker(k)
    for w in m.worlds:
        assert sc.holds(w, f) == kc.holds(m.name_of(w), f)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_sigma_preserves_truth(seed):
    rng = rng_for("sigma", seed)
    k = random_kripke(rng)
    res = sigma(k)
    f = random_formula(rng, k.agents, ["p", "q"])
    sc, kc = SimplicialChecker(res.model), KripkeChecker(k)
    for w in k.worlds:
        assert kc.holds(w, f) == sc.holds(res.world_map[w], f)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_kappa_sigma_roundtrip_is_isomorphic(seed):
    k = random_kripke(rng_for("roundtrip", seed))
    back = kappa(sigma(k).model)
    # world ids of the round trip are sigma's world names, i.e. the originals
    assert back == k
