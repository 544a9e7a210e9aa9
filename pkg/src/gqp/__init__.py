"""Spectral Galerkin solver and estimate checks for quasilinear parabolic equations."""

from .assembly import GalerkinSystem, growth_bound, rhs, verify_growth
from .basis import SineBasis, eval_basis, eval_basis_grad, eval_field, eval_field_grad, project_initial
from .estimates import bv_report, energy_report, h10_norm, hm1_norm, l2_norm, strong_residual
from .integrator import Trajectory, integrate, stability_ceiling
from .problem import REGISTRY_PROBLEMS, ProblemSpec, load_problem, make_problem, validate_hypotheses

__version__ = "0.1.0"

__all__ = [
    "GalerkinSystem",
    "ProblemSpec",
    "REGISTRY_PROBLEMS",
    "SineBasis",
    "Trajectory",
    "bv_report",
    "energy_report",
    "eval_basis",
    "eval_basis_grad",
    "eval_field",
    "eval_field_grad",
    "growth_bound",
    "h10_norm",
    "hm1_norm",
    "integrate",
    "l2_norm",
    "load_problem",
    "make_problem",
    "project_initial",
    "rhs",
    "stability_ceiling",
    "strong_residual",
    "validate_hypotheses",
    "verify_growth",
]
