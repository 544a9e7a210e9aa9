"""Reference solutions and the m-refinement convergence harness.

Independent of the Galerkin path: a separation-of-variables formula for
the linear heat equation and a 1D finite-difference method-of-lines solver
for the full quasilinear problem.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assembly import GalerkinSystem
from .basis import SineBasis
from .estimates import bv_report, energy_report
from .integrator import Trajectory, integrate, rk4_step
from .problem import ProblemSpec, validate_hypotheses
from .quadrature import QuadratureGrid, projection_grid


class OracleError(ValueError):
    """Oracle called outside its domain of validity."""


def closed_form_heat(spec: ProblemSpec, t, x) -> np.ndarray:
    """amplitude exp(-theta lambda_k t) prod_j sin(k_j pi x_j) for eigenmode data."""
    if spec.f.id != "zero" and np.any(spec.f.coeffs != 0):
        raise OracleError("closed form needs zero flux")
    if spec.B.id != "constant":
        raise OracleError("closed form needs constant diffusion")
    if spec.u0.id != "eigenmode":
        raise OracleError("closed form needs eigenmode initial data")
    p = dict(spec.u0.params)
    k = np.asarray(p["k"], dtype=float)
    lam = np.pi**2 * float(np.sum(k**2))
    pts = np.asarray(x, dtype=float)
    pts = pts.reshape(-1, 1) if spec.dim == 1 else pts.reshape(-1, spec.dim)
    shape = np.exp(-spec.theta * lam * np.asarray(t, dtype=float))
    out = np.full(pts.shape[0], p["amplitude"])
    for j in range(spec.dim):
        out = out * np.sin(k[j] * np.pi * pts[:, j])
    return np.multiply.outer(shape, out) if np.ndim(t) else shape * out


# ---------------------------------------------------------------------------
# finite-difference reference


@dataclass(frozen=True)
class GridField:
    x: np.ndarray
    values: np.ndarray
    t: float

    def __call__(self, points) -> np.ndarray:
        return np.interp(np.asarray(points, dtype=float).ravel(), self.x, self.values)


def fd_stable_dt(spec: ProblemSpec, n_cells: int) -> float:
    """Explicit step limit h^2 / (2 b_sup d)."""
    h = 1.0 / n_cells
    return h * h / (2.0 * validate_hypotheses(spec).b_sup * spec.dim)


def _fd_rhs(spec: ProblemSpec, h: float):
    f, B = spec.f, spec.B

    def rhs(u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        b = B.matrix(u)[0, 0]
        bface = 0.5 * (b[1:] + b[:-1])
        flux = bface * np.diff(u) / h  # B_{i+1/2} (u_{i+1} - u_i) / h
        fu = f(u)[0]
        out[1:-1] = np.diff(flux) / h - (fu[2:] - fu[:-2]) / (2.0 * h)
        return out

    return rhs


def fd_reference_solve(
    spec: ProblemSpec, n_cells: int, dt: float | None = None, n_outputs: int = 200
) -> list[GridField]:
    """Conservative central differences in space, RK4 in time (1D only).

    Face diffusivities are arithmetic means of the nodal B(u); the
    convective term is central.  Boundary nodes stay pinned to 0.
    """
    if spec.dim != 1:
        raise OracleError("fd oracle is 1D-only")
    if n_cells < 2:
        raise OracleError("n_cells must be >= 2")
    limit = fd_stable_dt(spec, n_cells)
    if dt is None:
        dt = 0.8 * limit
    if dt > limit:
        raise OracleError(f"dt={dt:.6g} violates the explicit stability bound {limit:.6g}")
    h = 1.0 / n_cells
    x = np.linspace(0.0, 1.0, n_cells + 1)
    u = spec.u0(x)
    u[0] = u[-1] = 0.0
    spacing = spec.horizon / n_outputs
    substeps = max(1, math.ceil(spacing / dt - 1e-9))
    k = spacing / substeps
    rhs = _fd_rhs(spec, h)
    times = np.linspace(0.0, spec.horizon, n_outputs + 1)
    out = [GridField(x, u.copy(), 0.0)]
    for i in range(1, n_outputs + 1):
        for _ in range(substeps):
            u = rk4_step(rhs, u, k)
        if not np.all(np.isfinite(u)):
            raise OracleError(f"non-finite fd values before t={times[i]:.6g}")
        out.append(GridField(x, u.copy(), float(times[i])))
    return out


# ---------------------------------------------------------------------------
# space-time distances


class SpectralSource:
    """Galerkin trajectory as a field evaluable at (t, x)."""

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self.horizon = traj.spec.horizon
        self._basis = SineBasis(traj.spec.dim, traj.m)
        self._last: tuple | None = None  # (points, basis values), reused across time slices

    def __call__(self, t: float, points) -> np.ndarray:
        if self._last is None or self._last[0] is not points:
            self._last = (points, self._basis.values(points))
        return self.traj.coefficients_at(t) @ self._last[1]


class GridSource:
    """Sequence of GridFields at uniform times, linear in x and in t."""

    def __init__(self, fields: list[GridField]):
        self.fields = fields
        self.times = np.array([g.t for g in fields])
        self.horizon = float(self.times[-1])

    def __call__(self, t: float, points) -> np.ndarray:
        T = self.times
        i = int(np.clip(np.searchsorted(T, t, side="right") - 1, 0, T.size - 2))
        s = (t - T[i]) / (T[i + 1] - T[i])
        return (1.0 - s) * self.fields[i](points) + s * self.fields[i + 1](points)


class FunctionSource:
    def __init__(self, fun, horizon: float):
        self.fun = fun
        self.horizon = horizon

    def __call__(self, t: float, points) -> np.ndarray:
        return np.broadcast_to(self.fun(t, points), (np.asarray(points).shape[0],))


def l1_spacetime_distance(a, b, quad: QuadratureGrid, times) -> float:
    """Trapezoid in time of the quadrature L1(Omega) distance |a - b|."""
    ha = getattr(a, "horizon", None)
    hb = getattr(b, "horizon", None)
    if ha is not None and hb is not None and abs(ha - hb) > 1e-12:
        raise OracleError(f"mismatched horizons {ha} and {hb}")
    times = np.asarray(times, dtype=float)
    pts = _eval_points(quad)
    slices = np.array([np.abs(a(t, pts) - b(t, pts)) @ quad.weights for t in times])
    return float(np.trapezoid(slices, times))


def _eval_points(quad: QuadratureGrid) -> np.ndarray:
    return quad.nodes[:, 0] if quad.dim == 1 else quad.nodes


# ---------------------------------------------------------------------------
# weak-form residual against test functions outside V_m


def weak_residual(traj: Trajectory, n_test: int | None = None, quad: QuadratureGrid | None = None) -> float:
    """L2(0,T) norm of the weak-form defect over test functions w_1..w_n_test.

    The defect for w_p is (u_t, w_p) + (B(u) grad u, grad w_p)
    + (f'(u) . grad u, w_p).  It vanishes for p <= m by construction, so
    only the modes the truncation cannot see contribute.
    """
    spec, m = traj.spec, traj.m
    n_test = n_test or 2 * m
    system = GalerkinSystem(spec, n_test, quad or projection_grid(spec.dim, n_test))
    defects = []
    for C, Cdot in zip(traj.C, traj.Cdot):
        Cext = np.zeros(n_test)
        Cext[: min(m, n_test)] = C[:n_test]
        pad = np.zeros(n_test)
        pad[: min(m, n_test)] = Cdot[:n_test]
        # mode ordering of the m-truncation is a prefix of the n_test one
        defects.append(np.sum((pad - system.rhs(Cext)) ** 2))
    return math.sqrt(float(np.trapezoid(defects, traj.times)))


# ---------------------------------------------------------------------------
# convergence harness


@dataclass
class ConvergenceTable:
    m_list: list[int]
    cauchy_l1: list[float]
    bv_total: list[float]
    A_empirical: list[float | None]
    fd_distance: float | None = None
    fd_self_error: float | None = None
    weak_residual: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "m_list": list(self.m_list),
            "cauchy_l1": list(self.cauchy_l1),
            "bv_total": list(self.bv_total),
            "A_empirical": list(self.A_empirical),
            "fd_distance": self.fd_distance,
            "fd_self_error": self.fd_self_error,
            "weak_residual": list(self.weak_residual),
        }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GQP_THREADS", "1")))
    except ValueError:
        return 1


def spectral_distance(ta: Trajectory, tb: Trajectory, quad: QuadratureGrid | None = None) -> float:
    """L1(Omega_T) distance between two trajectories on shared output times."""
    if abs(ta.spec.horizon - tb.spec.horizon) > 1e-12:
        raise OracleError("mismatched horizons")
    if ta.times.shape != tb.times.shape or np.any(np.abs(ta.times - tb.times) > 1e-12):
        raise OracleError("trajectories must share output times")
    quad = quad or projection_grid(ta.spec.dim, max(ta.m, tb.m))
    da = ta.C @ SineBasis(ta.spec.dim, ta.m).values(quad.nodes)
    db = tb.C @ SineBasis(tb.spec.dim, tb.m).values(quad.nodes)
    return float(np.trapezoid(np.abs(da - db) @ quad.weights, ta.times))


def fd_distance(traj: Trajectory, fields: list[GridField], quad: QuadratureGrid | None = None) -> float:
    quad = quad or projection_grid(1, traj.m)
    pts = quad.nodes[:, 0]
    spec_vals = traj.C @ SineBasis(1, traj.m).values(pts)
    if len(fields) != traj.times.size:
        raise OracleError("fd fields and trajectory must share output times")
    fd_vals = np.array([g(pts) for g in fields])
    return float(np.trapezoid(np.abs(spec_vals - fd_vals) @ quad.weights, traj.times))


def grid_distance(a: list[GridField], b: list[GridField], quad: QuadratureGrid) -> float:
    pts = quad.nodes[:, 0]
    va = np.array([g(pts) for g in a])
    vb = np.array([g(pts) for g in b])
    times = np.array([g.t for g in a])
    return float(np.trapezoid(np.abs(va - vb) @ quad.weights, times))


@dataclass(frozen=True)
class FDSelfConvergence:
    n_cells: list[int]
    errors: list[float]  # ||u_n - u_2n|| for consecutive pairs
    ratios: list[float]


def fd_self_convergence(
    spec: ProblemSpec,
    n_cells: list[int],
    n_outputs: int = 200,
    quad: QuadratureGrid | None = None,
    solutions: dict | None = None,
) -> FDSelfConvergence:
    """L1(Omega_T) differences of FD solutions under grid halving."""
    quad = quad or projection_grid(1, 64)
    sols = solutions if solutions is not None else {}
    for n in n_cells:
        if n not in sols:
            sols[n] = fd_reference_solve(spec, n, n_outputs=n_outputs)
    errors = [grid_distance(sols[a], sols[b], quad) for a, b in zip(n_cells, n_cells[1:])]
    ratios = [e1 / e2 for e1, e2 in zip(errors, errors[1:]) if e2 > 0]
    return FDSelfConvergence(list(n_cells), errors, ratios)


def convergence_study(
    spec: ProblemSpec,
    m_list,
    dt: float | None = None,
    n_outputs: int = 200,
    fd_cells: int = 100,
) -> ConvergenceTable:
    """Run the Galerkin solver for each m and tabulate Cauchy differences.

    In 1D the finest trajectory is also compared with a finite-difference
    solution on ``fd_cells`` cells, and the FD self-error is measured
    against a solution on ``2 fd_cells`` cells.
    """
    m_list = [int(m) for m in m_list]
    if any(b != 2 * a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must double at each step")
    report = validate_hypotheses(spec)

    def run(m):
        return integrate(spec, m, dt, n_outputs, report=report)

    workers = min(_threads(), len(m_list))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajs = list(pool.map(run, m_list))
    else:
        trajs = [run(m) for m in m_list]

    quad = projection_grid(spec.dim, max(m_list))
    cauchy = [spectral_distance(a, b, quad) for a, b in zip(trajs, trajs[1:])]
    table = ConvergenceTable(
        m_list=m_list,
        cauchy_l1=cauchy,
        bv_total=[bv_report(t, report).total for t in trajs],
        A_empirical=[energy_report(t, report).A_empirical for t in trajs],
        weak_residual=[weak_residual(t) for t in trajs],
    )
    if spec.dim == 1:
        coarse = fd_reference_solve(spec, fd_cells, n_outputs=n_outputs)
        fine = fd_reference_solve(spec, 2 * fd_cells, n_outputs=n_outputs)
        table.fd_distance = fd_distance(trajs[-1], coarse, quad)
        table.fd_self_error = grid_distance(coarse, fine, quad)
    return table


def uniqueness_probe(spec: ProblemSpec, m: int, dt_pair, n_outputs: int = 200) -> float:
    """L1(Omega_T) distance between two runs that differ only in the time step."""
    a, b = dt_pair
    if a == b:
        raise ValueError("dt values must differ")
    report = validate_hypotheses(spec)
    ta = integrate(spec, m, a, n_outputs, report=report)
    tb = integrate(spec, m, b, n_outputs, report=report)
    return spectral_distance(ta, tb)
