"""Right-hand side g(C) of the Galerkin coefficient ODE and its growth bound.

    g_p(C) = - sum_ij (B_ij(u_m) d_j u_m, d_i w_p) - sum_i (f_i'(u_m) d_i u_m, w_p)

Inner products are evaluated by composite Gauss-Legendre quadrature with
the nonlinearities sampled pointwise at the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SineBasis
from .problem import HypothesisReport, ProblemSpec, validate_hypotheses
from .quadrature import QuadratureGrid, assembly_grid


class AssemblyError(ValueError):
    """Dimension mismatch or non-finite values during assembly."""


class HypothesisError(RuntimeError):
    """Hypothesis report missing or failed."""


class GrowthBoundViolation(AssertionError):
    """||g(C)|| exceeded alpha ||C|| for some sampled C."""

    def __init__(self, message: str, C: np.ndarray):
        super().__init__(message)
        self.C = C


class GalerkinSystem:
    """Basis tables at the quadrature nodes plus the right-hand side.

    Building this once per (spec, m, quad) and calling :meth:`rhs`
    repeatedly avoids re-evaluating the basis on every step.
    """

    def __init__(self, spec: ProblemSpec, m: int, quad: QuadratureGrid | None = None):
        if m < 1:
            raise AssemblyError("m must be >= 1")
        self.spec = spec
        self.m = m
        self.quad = quad if quad is not None else assembly_grid(spec.dim, m)
        if self.quad.dim != spec.dim:
            raise AssemblyError("quadrature dimension does not match the problem")
        self.basis = SineBasis(spec.dim, m)
        self.W = self.basis.values(self.quad.nodes)  # (m, nq)
        self.G = self.basis.gradients(self.quad.nodes)  # (d, m, nq)
        self.wq = np.asarray(self.quad.weights)
        self.Ww = self.W * self.wq
        self.Gw = self.G * self.wq

    def fields(self, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """u_m and grad u_m at the quadrature nodes."""
        return C @ self.W, np.einsum("k,jkn->jn", C, self.G)

    def rhs(self, C) -> np.ndarray:
        C = np.asarray(C, dtype=float)
        if C.shape != (self.m,):
            raise AssemblyError(f"expected {self.m} coefficients, got shape {C.shape}")
        u, du = self.fields(C)
        B = self.spec.B
        if B.isotropic:
            flux = B.matrix(u)[0, 0] * du
        else:
            flux = np.einsum("ijn,jn->in", B.matrix(u), du)
        conv = np.sum(self.spec.f.derivative(u) * du, axis=0)
        if not (np.all(np.isfinite(flux)) and np.all(np.isfinite(conv))):
            raise AssemblyError("non-finite integrand at a quadrature node")
        return -np.einsum("ikn,in->k", self.Gw, flux) - self.Ww @ conv


def rhs(C, spec: ProblemSpec, quad: QuadratureGrid | None = None) -> np.ndarray:
    """g(C) for a single coefficient vector (builds the basis tables each call)."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 1:
        raise AssemblyError("coefficient vector must be 1-D")
    return GalerkinSystem(spec, C.size, quad).rhs(C)


@dataclass(frozen=True)
class GrowthBound:
    m: int
    M: np.ndarray
    alpha: float

    def to_dict(self) -> dict:
        return {"m": self.m, "M": self.M.tolist(), "alpha": self.alpha}


def _checked_report(spec: ProblemSpec, report: HypothesisReport | None) -> HypothesisReport:
    if report is None:
        raise HypothesisError("growth bound needs a validated HypothesisReport")
    if not report.passed:
        raise HypothesisError(f"hypotheses failed: {report.to_dict()['pass']}")
    return report


def growth_bound(m: int, spec: ProblemSpec, report: HypothesisReport | None) -> GrowthBound:
    """Linear-growth constant alpha with ||g(C)||_2 <= alpha ||C||_2.

    M[p, k] = sum_j ||d_j w_k|| (||B|| sum_i ||d_i w_p|| + ||f'||), with the
    closed-form partial-derivative norms ||d_j w_k|| = k_j pi.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    report = _checked_report(spec, report)
    norms = SineBasis(spec.dim, m).partial_norms.sum(axis=1)  # sum_j ||d_j w_k||
    M = np.outer(report.b_sup * norms + report.fprime_sup, norms)
    return GrowthBound(m, M, float(np.sqrt(np.sum(M**2))))


def verify_growth(
    samples,
    spec: ProblemSpec,
    bound: GrowthBound,
    quad: QuadratureGrid | None = None,
    atol: float = 1e-8,
) -> dict:
    """Check ||g(C)|| <= alpha ||C|| + atol for every sample and each unit vector.

    Raises :class:`GrowthBoundViolation` carrying the offending vector.
    """
    system = GalerkinSystem(spec, bound.m, quad)
    vecs = [np.asarray(c, dtype=float) for c in samples] + list(np.eye(bound.m))
    worst = 0.0
    for C in vecs:
        g = np.linalg.norm(system.rhs(C))
        lim = bound.alpha * np.linalg.norm(C)
        if g > lim + atol:
            raise GrowthBoundViolation(
                f"||g(C)|| = {g:.6e} exceeds alpha ||C|| = {lim:.6e}", C
            )
        if lim > 0:
            worst = max(worst, g / lim)
    return {"n_checked": len(vecs), "max_ratio": worst, "alpha": bound.alpha}


def sampled_lipschitz(
    spec: ProblemSpec,
    m: int,
    rng: np.random.Generator,
    n_pairs: int = 50,
    radius: float = 1e-3,
    scale: float = 1.0,
    quad: QuadratureGrid | None = None,
) -> float:
    """Largest ||g(C) - g(C')|| / ||C - C'|| over random nearby pairs."""
    system = GalerkinSystem(spec, m, quad)
    best = 0.0
    for _ in range(n_pairs):
        C = scale * rng.standard_normal(m)
        step = rng.standard_normal(m)
        step *= radius / np.linalg.norm(step)
        diff = np.linalg.norm(system.rhs(C + step) - system.rhs(C))
        best = max(best, diff / radius)
    return best
