"""Small named models used as fixtures and CLI examples."""
from __future__ import annotations

from typing import Callable, Dict

from .dynamics import pattern_detectable_broadcast, product_update
from .kripke import PartialEpistemicModel, build_kripke
from .simplicial import SimplicialModel, build_model

ABC = ("a", "b", "c")


def _colours(*vertices: str) -> Dict[str, str]:
    return {v: v[0] for v in vertices}


def c1() -> SimplicialModel:
    colours = _colours("a1", "b1", "c1", "a2", "b2", "c2")
    worlds = {
        "w1": ["a1", "b1", "c1"],
        "w2": ["b1", "a2", "c1"],
        "w3": ["c1", "b2", "a2"],
        "w4": ["c2", "b1", "a1"],
    }
    return build_model(ABC, colours, worlds, {"w1": ["p"], "w2": ["p"]})


def c2() -> SimplicialModel:
    colours = _colours("a", "b", "c", "c'", "b'")
    worlds = {"w1": ["a", "b", "c"], "w2": ["b", "c'"], "w3": ["b'", "c"], "w4": ["c'", "b'"]}
    return build_model(ABC, colours, worlds, {"w1": ["p"], "w2": ["p"]})


def c3() -> SimplicialModel:
    colours = _colours("a", "b", "c")
    worlds = {"w1": ["a", "b", "c"], "w2": ["b", "c"], "w3": ["a", "b"], "w4": ["b"]}
    return build_model(ABC, colours, worlds, {"w1": ["p"], "w2": ["p"]})


def c4() -> SimplicialModel:
    colours = _colours("a", "b", "c", "a'", "b'", "c'")
    worlds = {"w1": ["a", "b", "c"], "w2": ["a", "b'"], "w3": ["a'", "b'", "c'"]}
    return build_model(ABC, colours, worlds)


def c5() -> SimplicialModel:
    colours = _colours("a", "b", "c")
    return build_model(ABC, colours, {"w1": ["a", "b", "c"], "w2": ["a", "b"]})


def c6() -> SimplicialModel:
    colours = _colours("a", "b", "c")
    worlds = {
        "w1": ["a", "b", "c"],
        "w2": ["a", "b"],
        "w3": ["b", "c"],
        "w4": ["a", "c"],
        "w5": ["a"],
        "w6": ["b"],
        "w7": ["c"],
    }
    return build_model(ABC, colours, worlds)


def seven_worlds() -> SimplicialModel:
    """Two triangles joined by two edges, plus three lower-dimensional worlds."""
    colours = _colours("a", "b", "c", "a'", "b'", "c'")
    worlds = {
        "w1": ["a", "b", "c"],
        "w2": ["a", "b'"],
        "w3": ["a'", "b"],
        "w4": ["a'", "b'", "c'"],
        "w5": ["a", "c"],
        "w6": ["b", "c"],
        "w7": ["c'"],
    }
    return build_model(ABC, colours, worlds)


def triangle() -> SimplicialModel:
    return build_model(ABC, _colours("a", "b", "c"), {"w": ["a", "b", "c"]}, local=True)


def glued_triangles() -> SimplicialModel:
    """Two triangles sharing the b-c edge."""
    colours = _colours("a", "b", "c", "a'")
    worlds = {"w": ["a", "b", "c"], "w'": ["a'", "b", "c"]}
    return build_model(ABC, colours, worlds, local=True)


def detectable_triangle() -> SimplicialModel:
    """The single triangle after one round of detectable broadcast."""
    return product_update(triangle(), pattern_detectable_broadcast(ABC, 1)).model


def frame_not_proper() -> PartialEpistemicModel:
    return build_kripke(("a", "b"), ["w0", "w1"], {"a": [("w0", "w1")], "b": [("w0", "w1")]})


def frame_proper() -> PartialEpistemicModel:
    return build_kripke(
        ABC, ["w2", "w3"], {"a": [("w2", "w3")], "b": [("w2", "w3")], "c": [("w2",)]}
    )


def frame_minimal() -> PartialEpistemicModel:
    return build_kripke(ABC, ["w4", "w5"], {"a": [("w4", "w5")], "b": [("w4",)], "c": [("w5",)]})


def frame_maximal() -> PartialEpistemicModel:
    return build_kripke(
        ("a", "b"), ["w6", "w7", "w8"], {"a": [("w6", "w7")], "b": [("w7", "w8")]}
    )


MODELS: Dict[str, Callable[[], SimplicialModel]] = {
    "c1": c1,
    "c2": c2,
    "c3": c3,
    "c4": c4,
    "c5": c5,
    "c6": c6,
    "seven-worlds": seven_worlds,
    "triangle": triangle,
    "glued-triangles": glued_triangles,
    "detectable-triangle": detectable_triangle,
}

FRAMES: Dict[str, Callable[[], PartialEpistemicModel]] = {
    "not-proper": frame_not_proper,
    "proper": frame_proper,
    "minimal": frame_minimal,
    "maximal": frame_maximal,
}
