import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplex_logic import gallery
from simplex_logic.dynamics import pattern_immediate_snapshot_initial_crashes
from simplex_logic.generators import random_kripke, random_model, rng_for
from simplex_logic.serialization import (
    DocumentError,
    dumps_kripke,
    dumps_model,
    dumps_pattern,
    load_kripke,
    load_model,
    load_pattern,
    loads_kripke,
    loads_model,
    loads_pattern,
)


def test_shipped_files_roundtrip(data_dir):
    files = sorted(data_dir.iterdir())
    assert files
    for path in files:
        text = path.read_text()
        if path.suffix == ".model":
            assert dumps_model(load_model(path)) == text
        elif path.suffix == ".kripke":
            assert dumps_kripke(load_kripke(path)) == text
        elif path.suffix == ".pattern":
            assert dumps_pattern(load_pattern(path)) == text


def test_shipped_models_match_gallery(data_dir):
    for name, build in gallery.MODELS.items():
        assert load_model(data_dir / f"{name}.model") == build()
    for name, build in gallery.FRAMES.items():
        assert load_kripke(data_dir / f"frame-{name}.kripke") == build()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_model_roundtrip(seed):
    m = random_model(rng_for("io", seed))
    again = loads_model(dumps_model(m))
    assert again == m
    assert dumps_model(again) == dumps_model(m)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_random_kripke_roundtrip(seed):
    k = random_kripke(rng_for("io-k", seed), proper=False)
    assert loads_kripke(dumps_kripke(k)) == k


def test_pattern_roundtrip():
    p = pattern_immediate_snapshot_initial_crashes("abc")
    assert set(loads_pattern(dumps_pattern(p))) == set(p)


def test_syntax_error_has_location():
    with pytest.raises(DocumentError) as info:
        loads_model('{\n  "format": "simplex-model/1",\n  "agents": [oops]\n}', "x.model")
    assert (info.value.line, info.value.column) == (3, 14)
    assert str(info.value).startswith("x.model:3:14")


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"format": "other"}, "expected format"),
        ({"format": "simplex-model/1", "agents": ["a"]}, "missing field 'vertices'"),
        (
            {"format": "simplex-model/1", "agents": ["a"], "vertices": [{"id": "x"}], "worlds": []},
            "needs 'id' and 'colour'",
        ),
        (
            {
                "format": "simplex-model/1",
                "agents": ["a"],
                "vertices": [{"id": "x", "colour": "z"}],
                "worlds": [{"vertices": ["x"]}],
            },
            "unknown colour",
        ),
    ],
)
def test_structural_errors(doc, message):
    with pytest.raises(DocumentError, match=message):
        loads_model(json.dumps(doc))


def test_bad_pattern_graph():
    doc = {"format": "comm-pattern/1", "agents": ["a"], "graphs": [{"out": {"a": []}}]}
    with pytest.raises(DocumentError, match="alive"):
        loads_pattern(json.dumps(doc))
