"""Norms of Galerkin trajectories and the energy / BV estimate reports.

Spatial norms of coefficient vectors are spectral (Parseval over the sine
eigenbasis); L1 norms are by quadrature on a dedicated norm grid.  Time
integrals use the trapezoid rule over the trajectory's output times.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .basis import SineBasis
from .integrator import SpectralState, Trajectory
from .problem import HypothesisReport, ProblemSpec, validate_hypotheses
from .quadrature import QuadratureGrid, projection_grid


def _eigenvalues(n: int, dim: int) -> np.ndarray:
    return SineBasis(dim, n).eigenvalues


def l2_norm(C) -> float:
    return float(np.linalg.norm(np.asarray(C, dtype=float)))


def h10_norm(C, dim: int = 1) -> float:
    """Gradient seminorm sqrt(sum lambda_k C_k^2)."""
    C = np.asarray(C, dtype=float)
    return float(np.sqrt(np.sum(_eigenvalues(C.size, dim) * C**2)))


def hm1_norm(Cdot, dim: int = 1) -> float:
    """Dual norm sqrt(sum Cdot_k^2 / lambda_k)."""
    Cdot = np.asarray(Cdot, dtype=float)
    return float(np.sqrt(np.sum(Cdot**2 / _eigenvalues(Cdot.size, dim))))


def _trapz(values: np.ndarray, times: np.ndarray) -> float:
    return float(np.trapezoid(values, times, axis=0))


def norm_grid(traj: Trajectory) -> QuadratureGrid:
    return projection_grid(traj.spec.dim, traj.m)


# ---------------------------------------------------------------------------
# energy estimate


@dataclass(frozen=True)
class EnergyReport:
    max_l2: float
    l2h10: float
    l2hm1: float
    u0_l2: float
    A_empirical: float | None
    gronwall_ok: bool
    gronwall_rate: float
    epsilon: float | None
    young_constant: float

    def to_dict(self) -> dict:
        return asdict(self)


def energy_series(traj: Trajectory) -> dict[str, np.ndarray]:
    """Per-output-time ||u||_{L2}, ||u||_{H1_0} and ||u_t||_{H^-1}."""
    lam = traj.basis.eigenvalues
    return {
        "t": traj.times,
        "l2": np.sqrt(np.sum(traj.C**2, axis=1)),
        "h10": np.sqrt(np.sum(lam * traj.C**2, axis=1)),
        "hm1": np.sqrt(np.sum(traj.Cdot**2 / lam, axis=1)),
    }


def energy_report(traj: Trajectory, report: HypothesisReport | None = None) -> EnergyReport:
    """Energy norms plus the Gronwall check eta(t) <= exp(rate t) eta(0).

    The Young split uses C = ||f'||^2 / 2 and epsilon = theta / (2 C), so
    that theta - C epsilon = theta / 2 > 0; with D = d the Gronwall rate for
    eta = ||u_m||^2 is D / epsilon.  Without convection the rate is 0.
    """
    spec = traj.spec
    report = report or validate_hypotheses(spec)
    s = energy_series(traj)
    max_l2 = float(np.max(s["l2"]))
    l2h10 = math.sqrt(_trapz(s["h10"] ** 2, s["t"]))
    l2hm1 = math.sqrt(_trapz(s["hm1"] ** 2, s["t"]))
    u0_l2 = float(s["l2"][0])
    A = (max_l2 + l2h10 + l2hm1) / u0_l2 if u0_l2 > 0 else None

    young = 0.5 * report.fprime_sup**2
    if young > 0:
        eps = spec.theta / (2.0 * young)
        rate = spec.dim / eps
    else:
        eps, rate = None, 0.0
    eta = s["l2"] ** 2
    ok = bool(np.all(eta <= np.exp(rate * s["t"]) * eta[0] * (1.0 + 1e-6)))
    return EnergyReport(max_l2, l2h10, l2hm1, u0_l2, A, ok, rate, eps, young)


def dissipation_violation(traj: Trajectory) -> float:
    """Largest relative increase of ||C(t)|| between consecutive outputs (0 if none)."""
    n = np.sqrt(np.sum(traj.C**2, axis=1))
    if n[0] == 0:
        return 0.0
    return float(max(0.0, np.max(np.diff(n)) / n[0]))


# ---------------------------------------------------------------------------
# BV estimate


@dataclass(frozen=True)
class BVReport:
    dt_l1: float
    grad_l1: float
    total: float
    initial_dt_l1: float
    initial_bound: float
    monotone_violation: float
    grad_l1_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


class _TrajectoryFields:
    """u_t and grad u sampled on a norm grid at every output time."""

    def __init__(self, traj: Trajectory, quad: QuadratureGrid | None = None):
        self.quad = quad or norm_grid(traj)
        basis = traj.basis
        self.W = basis.values(self.quad.nodes)
        self.G = basis.gradients(self.quad.nodes)
        self.traj = traj

    def dt_l1_slices(self) -> np.ndarray:
        return np.abs(self.traj.Cdot @ self.W) @ self.quad.weights

    def grad_l1_slices(self) -> np.ndarray:
        # sum_j int |d_j u| dx at each output time
        du = np.einsum("tk,jkn->tjn", self.traj.C, self.G)
        return np.abs(du).sum(axis=1) @ self.quad.weights

    def grad_l2_partials(self, C: np.ndarray) -> np.ndarray:
        du = np.einsum("k,jkn->jn", C, self.G)
        return np.sqrt((du**2) @ self.quad.weights)


def dt_l1_monotonicity(traj: Trajectory, quad: QuadratureGrid | None = None) -> float:
    """max(0, largest increase of t -> int |u_t| dx between consecutive outputs)."""
    slices = _TrajectoryFields(traj, quad).dt_l1_slices()
    if slices.size < 2:
        return 0.0
    return float(max(0.0, np.max(np.diff(slices))))


def bv_report(
    traj: Trajectory,
    report: HypothesisReport | None = None,
    quad: QuadratureGrid | None = None,
) -> BVReport:
    """L1(Omega_T) norms of u_t and grad u with the bounds from the BV argument.

    ``initial_bound`` is max|B_ij| sum_ij ||d_i u(0)|| ||d_j u(0)||
    + max|f_i'| sum_i ||d_i u(0)|| |Omega|^(1/2), with L2 norms of the
    partial derivatives of u_m(., 0).  ``grad_l1_bound`` is
    d ||u_m||_{L2(0,T;H1_0)} |Omega_T|^(1/2).
    """
    spec = traj.spec
    report = report or validate_hypotheses(spec)
    fields = _TrajectoryFields(traj, quad)
    dt_slices = fields.dt_l1_slices()
    grad_slices = fields.grad_l1_slices()
    t = traj.times
    dt_l1 = _trapz(dt_slices, t)
    grad_l1 = _trapz(grad_slices, t)

    partials0 = fields.grad_l2_partials(traj.C[0])
    initial_bound = (
        report.b_sup * float(np.sum(np.outer(partials0, partials0)))
        + report.fprime_sup * float(np.sum(partials0)) * math.sqrt(spec.volume)
    )
    monotone = float(max(0.0, np.max(np.diff(dt_slices)))) if dt_slices.size > 1 else 0.0
    h10 = energy_series(traj)["h10"]
    D3 = math.sqrt(_trapz(h10**2, t))
    bound = spec.dim * D3 * math.sqrt(spec.volume * spec.horizon)
    return BVReport(
        dt_l1=dt_l1,
        grad_l1=grad_l1,
        total=dt_l1 + grad_l1,
        initial_dt_l1=float(dt_slices[0]),
        initial_bound=initial_bound,
        monotone_violation=monotone,
        grad_l1_bound=bound,
    )


def time_series(traj: Trajectory, quad: QuadratureGrid | None = None) -> dict[str, np.ndarray]:
    """Columns t, l2, h10, hm1, dt_l1_slice for plotting."""
    s = energy_series(traj)
    s["dt_l1_slice"] = _TrajectoryFields(traj, quad).dt_l1_slices()
    return s


# ---------------------------------------------------------------------------
# strong-form residual


class ResidualEvaluator:
    """L2 norm of u_t - sum_ij d_i(B_ij(u) d_j u) + sum_i f_i'(u) d_i u."""

    def __init__(self, spec: ProblemSpec, m: int, quad: QuadratureGrid | None = None):
        self.spec = spec
        self.quad = quad or projection_grid(spec.dim, m)
        basis = SineBasis(spec.dim, m)
        self.W = basis.values(self.quad.nodes)
        self.G = basis.gradients(self.quad.nodes)
        self.H = basis.hessians(self.quad.nodes)

    def pointwise(self, C: np.ndarray, Cdot: np.ndarray) -> np.ndarray:
        u = C @ self.W
        du = np.einsum("k,jkn->jn", C, self.G)
        d2u = np.einsum("k,ijkn->ijn", C, self.H)
        B = self.spec.B.matrix(u)
        dB = self.spec.B.derivative(u)
        # d_i(B_ij(u) d_j u) = B_ij'(u) d_i u d_j u + B_ij(u) d_ij u
        div = np.einsum("ijn,in,jn->n", dB, du, du) + np.einsum("ijn,ijn->n", B, d2u)
        conv = np.sum(self.spec.f.derivative(u) * du, axis=0)
        return Cdot @ self.W - div + conv

    def __call__(self, C: np.ndarray, Cdot: np.ndarray) -> float:
        r = self.pointwise(np.asarray(C, dtype=float), np.asarray(Cdot, dtype=float))
        return float(np.sqrt((r**2) @ self.quad.weights))


def strong_residual(state: SpectralState, spec: ProblemSpec, quad: QuadratureGrid | None = None) -> float:
    return ResidualEvaluator(spec, state.C.size, quad)(state.C, state.Cdot)


def residual_series(traj: Trajectory, quad: QuadratureGrid | None = None) -> np.ndarray:
    ev = ResidualEvaluator(traj.spec, traj.m, quad)
    return np.array([ev(c, cd) for c, cd in zip(traj.C, traj.Cdot)])
