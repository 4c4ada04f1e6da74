"""One test per acceptance criterion, each at its stated tolerance."""
import time
from collections import Counter

import pytest

from conftest import ACCEPTANCE
from simplex_logic import gallery
from simplex_logic.axioms import SC_SCHEMAS, classify
from simplex_logic.dynamics import (
    pattern_detectable_broadcast,
    pattern_immediate_snapshot_initial_crashes,
    pattern_undetectable_broadcast,
    product_update,
)
from simplex_logic.formula import parse_formula
from simplex_logic.generators import (
    AGENT_NAMES,
    random_formula,
    random_guarded,
    random_kripke,
    random_model,
    random_submodel,
    rng_for,
)
from simplex_logic.kripke import KripkeChecker, frame_properties, kappa, sigma
from simplex_logic.simplicial import SimplicialChecker, is_maximal, is_minimal, satisfies
from simplex_logic.tasks import (
    binary_input_model,
    check_knowledge_gain,
    check_obstruction,
    consensus_instance,
    find_decision_map,
    is_morphism,
    rv1_obstruction,
    sv1_obstruction,
)

ABC = ("a", "b", "c")
CORPUS_SIZE = 200


def record(num, ok, detail):
    ACCEPTANCE[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="module")
def corpus():
    models = [random_model(rng_for("corpus", i), max_vertices=8, max_agents=4) for i in range(CORPUS_SIZE)]
    assert all(len(m.vertices) <= 8 and len(m.agents) <= 4 for m in models)
    return models


@pytest.fixture(scope="module")
def classified(corpus):
    start = time.perf_counter()
    verdicts = [classify(m) for m in corpus]
    return verdicts, time.perf_counter() - start


def test_criterion_1_small_model_judgments():
    table = [
        (gallery.c1, "w1", "~K b p"),
        (gallery.c1, "w1", "~K c p"),
        (gallery.c1, "w1", "D{b,c} p"),
        (gallery.c2, "w1", "K a p & K b p"),
        (gallery.c2, "w1", "~K c p"),
        (gallery.c2, "w4", "K a p"),
        (gallery.c2, "w4", "K a false"),
        (gallery.c3, "w1", "D{b,c} p"),
        (gallery.c3, "w1", "~D{a,b} p"),
        (gallery.c3, "w2", "D{a,b} false"),
    ]
    start = time.perf_counter()
    wrong = [(b.__name__, w, t) for b, w, t in table if not satisfies(b(), w, parse_formula(t))]
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < 1.0
    record(1, ok, f"{len(table) - len(wrong)}/{len(table)} judgments, {elapsed:.3f}s")
    assert ok, wrong


def test_criterion_2_min_max_judgments():
    table = [
        (gallery.c4, "w2", "~K a dead{c}"),
        (gallery.c4, "w2", "~K b dead{c}"),
        (gallery.c4, "w2", "D{a,b} dead{c}"),
        (gallery.c5, "w2", "~D{a,b} dead{c}"),
        (gallery.c5, "w1", "D{b,c} ~dead{a}"),
        (gallery.c6, "w1", "~D{b,c} ~dead{a}"),
        (gallery.c6, "w1", "~D{a} ~dead{b,c}"),
    ]
    start = time.perf_counter()
    wrong = [(b.__name__, w, t) for b, w, t in table if not satisfies(b(), w, parse_formula(t))]
    c4, c5, c6 = classify(gallery.c4()), classify(gallery.c5()), classify(gallery.c6())
    min_cex = c5.reports["Min"].counterexample
    verdicts = (
        c4.min
        and c4.reports["Min"].valid
        and not c5.min
        and min_cex is not None
        and min_cex[1] == gallery.c5().world("w2")
        and c6.max
        and c6.reports["Max"].valid
    )
    elapsed = time.perf_counter() - start
    ok = not wrong and verdicts and elapsed < 1.0
    record(2, ok, f"{len(table) - len(wrong)}/{len(table)} judgments, verdicts {'ok' if verdicts else 'wrong'}, {elapsed:.3f}s")
    assert ok, wrong


def test_criterion_3_soundness(classified):
    verdicts, elapsed = classified
    bad = [
        (i, s, c.reports[s].counterexample)
        for i, c in enumerate(verdicts)
        for s in SC_SCHEMAS
        if not c.reports[s].valid
    ]
    instances = sum(c.reports[s].instances for c in verdicts for s in SC_SCHEMAS)
    ok = not bad and len(verdicts) >= 200 and elapsed < 30.0
    record(3, ok, f"{len(verdicts)} models, {instances} instances, {len(bad)} counterexamples, {elapsed:.1f}s")
    assert ok, bad[:5]


def test_criterion_4_frame_characterisation(corpus, classified):
    verdicts, _ = classified
    disagreements = [
        i
        for i, (m, c) in enumerate(zip(corpus, verdicts))
        if c.reports["Min"].valid != is_minimal(m) or c.reports["Max"].valid != is_maximal(m)
    ]
    n_min = sum(is_minimal(m) for m in corpus)
    n_max = sum(is_maximal(m) for m in corpus)
    ok = not disagreements
    record(4, ok, f"{len(disagreements)} disagreements ({n_min} minimal, {n_max} maximal models)")
    assert ok, disagreements[:5]


def test_criterion_5_kripke_correspondence(corpus):
    start = time.perf_counter()
    formulas = {
        n: [random_formula(rng_for("corr-formula", n * 1000 + j), AGENT_NAMES[:n], ["p", "q"], depth=3) for j in range(500)]
        for n in range(1, 5)
    }
    disagreements = 0
    checks = 0
    for m in corpus:
        sc, kc = SimplicialChecker(m), KripkeChecker(kappa(m))
        for f in formulas[len(m.agents)]:
            for w in m.worlds:
                checks += 1
                disagreements += sc.holds(w, f) != kc.holds(m.name_of(w), f)
    k_models = 0
    for i in range(100):
        rng = rng_for("corr-kripke", i)
        k = random_kripke(rng)
        rep = frame_properties(k)
        assert rep.proper and rep.no_empty_world
        k_models += 1
        res = sigma(k)
        sc, kc = SimplicialChecker(res.model), KripkeChecker(k)
        for f in formulas[len(k.agents)]:
            for w in k.worlds:
                checks += 1
                disagreements += kc.holds(w, f) != sc.holds(res.world_map[w], f)
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and k_models == 100 and elapsed < 60.0
    record(5, ok, f"{checks} checks, {disagreements} disagreements, {elapsed:.1f}s")
    assert ok


def test_criterion_6_pattern_counts():
    counts = (
        len(pattern_detectable_broadcast(ABC, 1)),
        len(pattern_undetectable_broadcast(ABC, 1)),
        len(pattern_immediate_snapshot_initial_crashes(ABC)),
    )
    ok = counts == (10, 13, 25)
    record(6, ok, f"detectable/undetectable/immediate = {counts}")
    assert ok


def test_criterion_7_update_counts():
    tri = gallery.triangle()
    results = {}
    slow = []
    for name, pattern in (
        ("detectable", pattern_detectable_broadcast(ABC, 1)),
        ("undetectable", pattern_undetectable_broadcast(ABC, 1)),
        ("immediate", pattern_immediate_snapshot_initial_crashes(ABC)),
    ):
        start = time.perf_counter()
        results[name] = product_update(tri, pattern)
        if time.perf_counter() - start >= 1.0:
            slow.append(name)
    start = time.perf_counter()
    glued = product_update(gallery.glued_triangles(), pattern_detectable_broadcast(ABC, 1))
    if time.perf_counter() - start >= 1.0:
        slow.append("glued")
    dims = Counter(len(w) for w in results["immediate"].model.worlds)
    ok = (
        len(results["detectable"].model.worlds) == 10
        and len(results["undetectable"].model.worlds) == 13
        and len(results["immediate"].model.worlds) == 25
        and dims == {3: 13, 2: 9, 1: 3}
        and len(glued.model.worlds) == 19
        and len(glued.merged) == 1
        and all(len(glued.sources[w]) == 2 for w in glued.merged)
        and not slow
    )
    record(
        7,
        ok,
        f"10/13/25 -> {[len(r.model.worlds) for r in results.values()]}, dims {dict(dims)}, "
        f"glued {len(glued.model.worlds)} with {len(glued.merged)} merged",
    )
    assert ok


def test_criterion_8_consensus_impossibility():
    start = time.perf_counter()
    sv1 = consensus_instance(ABC, "SV1")
    rv1 = consensus_instance(ABC, "RV1")
    assert len(sv1.input.worlds) == 20
    none_sv1 = find_decision_map(sv1) is None
    none_rv1 = find_decision_map(rv1) is None
    phi = sv1_obstruction(ABC, 0) | sv1_obstruction(ABC, 1)
    psi = rv1_obstruction(ABC, 0) | rv1_obstruction(ABC, 1)
    rep_phi = check_obstruction(sv1, phi)
    rep_psi = check_obstruction(rv1, psi)
    elapsed = time.perf_counter() - start
    ok = none_sv1 and none_rv1 and rep_phi.established and rep_psi.established and elapsed < 60.0
    record(
        8,
        ok,
        f"SV1 unsolvable={none_sv1}, RV1 unsolvable={none_rv1}; "
        f"phi: guarded={rep_phi.guarded} valid_on_T={rep_phi.valid_on_task} (cex {rep_phi.task_counterexample}); "
        f"psi: guarded={rep_psi.guarded} valid_on_T={rep_psi.valid_on_task} (cex {rep_psi.task_counterexample}); "
        f"{elapsed:.1f}s",
    )
    assert ok


def test_criterion_9_identity_task():
    start = time.perf_counter()
    inst = consensus_instance(ABC, "identity")
    delta = find_decision_map(inst)
    verified = delta is not None and bool(is_morphism(delta, inst.protocol, inst.task))
    constant_zero = delta is not None and all(t.endswith("^0") for t in delta.values())
    elapsed = time.perf_counter() - start
    ok = verified and constant_zero and elapsed < 5.0
    record(9, ok, f"solvable={delta is not None}, constant 0={constant_zero}, morphism={verified}, {elapsed:.2f}s")
    assert ok


def test_criterion_10_knowledge_gain():
    start = time.perf_counter()
    violations = []
    for i in range(500):
        rng = rng_for("acceptance-gain", i)
        d = random_model(rng, local=True)
        c, f = random_submodel(rng, d)
        phi = random_guarded(rng, d.agents, dict(d.owners), depth=2)
        ok, where = check_knowledge_gain(f, c, d, phi)
        if not ok:
            violations.append((i, where))
    elapsed = time.perf_counter() - start
    ok = not violations and elapsed < 30.0
    record(10, ok, f"500 pairs, {len(violations)} violations, {elapsed:.1f}s")
    assert ok, violations[:5]
