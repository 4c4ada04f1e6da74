"""Epistemic logic on generalized simplicial models with dying agents."""
from .formula import parse_formula, render
from .simplicial import SimplicialModel, build_model, satisfies
from .kripke import kappa, sigma, satisfies_kripke

__all__ = [
    "parse_formula",
    "render",
    "SimplicialModel",
    "build_model",
    "satisfies",
    "kappa",
    "sigma",
    "satisfies_kripke",
]
