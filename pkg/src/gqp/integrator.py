"""Fixed-step classical RK4 for the coefficient ODE C' = g(C)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .assembly import AssemblyError, GalerkinSystem, growth_bound
from .basis import SineBasis, project_initial
from .problem import HypothesisReport, ProblemSpec, validate_hypotheses
from .quadrature import QuadratureGrid, projection_grid


class IntegrationError(RuntimeError):
    """Non-finite coefficients during time stepping."""


class StepSizeError(ValueError):
    """Requested step exceeds the stability ceiling."""


@dataclass(frozen=True)
class SpectralState:
    t: float
    C: np.ndarray
    Cdot: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Coefficients and their time derivatives at uniform output times."""

    times: np.ndarray  # (N+1,)
    C: np.ndarray  # (N+1, m)
    Cdot: np.ndarray  # (N+1, m)
    dt_internal: float
    m: int
    spec: ProblemSpec

    @property
    def basis(self) -> SineBasis:
        return SineBasis(self.spec.dim, self.m)

    @property
    def states(self) -> list[SpectralState]:
        return [SpectralState(float(t), c, cd) for t, c, cd in zip(self.times, self.C, self.Cdot)]

    def __iter__(self) -> Iterator[SpectralState]:
        return iter(self.states)

    def __len__(self) -> int:
        return self.times.size

    def coefficients_at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation of C(t) from the stored C and Cdot."""
        T = self.times
        if t < T[0] - 1e-12 or t > T[-1] + 1e-12:
            raise ValueError(f"t={t} outside [0, {T[-1]}]")
        i = int(np.clip(np.searchsorted(T, t, side="right") - 1, 0, T.size - 2))
        h = T[i + 1] - T[i]
        s = (t - T[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * self.C[i] + h10 * h * self.Cdot[i] + h01 * self.C[i + 1] + h11 * h * self.Cdot[i + 1]


def stability_ceiling(spec: ProblemSpec, m: int, report: HypothesisReport | None = None) -> float:
    """Largest admissible RK4 step: min(0.5 / alpha_1, 2.5 / (b_sup lambda_max)).

    alpha_1 is the growth constant of the one-mode truncation; lambda_max
    the largest eigenvalue kept in the m-mode truncation.
    """
    report = report or validate_hypotheses(spec)
    alpha1 = growth_bound(1, spec, report).alpha
    lam_max = float(SineBasis(spec.dim, m).eigenvalues.max())
    return min(0.5 / alpha1, 2.5 / (report.b_sup * lam_max))


def rk4_step(fun, y: np.ndarray, h: float) -> np.ndarray:
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    spec: ProblemSpec,
    m: int,
    dt: float | None = None,
    n_outputs: int = 200,
    quad: QuadratureGrid | None = None,
    report: HypothesisReport | None = None,
    check_ceiling: bool = True,
) -> Trajectory:
    """Integrate the Galerkin system from the projected initial datum to T.

    The internal step is the largest step not exceeding ``dt`` that divides
    the output spacing T / n_outputs.  ``dt=None`` uses half the stability
    ceiling.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n_outputs < 1:
        raise ValueError("n_outputs must be >= 1")
    report = report or validate_hypotheses(spec)
    ceiling = stability_ceiling(spec, m, report)
    if dt is None:
        dt = 0.5 * ceiling
    if not dt > 0:
        raise StepSizeError(f"dt must be > 0, got {dt}")
    if check_ceiling and dt > ceiling:
        raise StepSizeError(f"dt={dt:.6g} exceeds the stability ceiling {ceiling:.6g}")

    T = spec.horizon
    spacing = T / n_outputs
    substeps = max(1, math.ceil(spacing / dt - 1e-9))
    h = spacing / substeps

    system = GalerkinSystem(spec, m, quad)
    C = project_initial(spec.u0, m, spec.dim, projection_grid(spec.dim, m))
    times = np.linspace(0.0, T, n_outputs + 1)
    Cs = np.empty((n_outputs + 1, m))
    Cdots = np.empty((n_outputs + 1, m))
    Cs[0] = C
    Cdots[0] = system.rhs(C)
    step = 0
    for out in range(1, n_outputs + 1):
        for _ in range(substeps):
            step += 1
            try:
                # overflow shows up as non-finite values, checked below
                with np.errstate(over="ignore", invalid="ignore"):
                    C = rk4_step(system.rhs, C, h)
            except AssemblyError as exc:
                raise IntegrationError(f"blow-up at step {step}: {exc}") from None
            if not np.all(np.isfinite(C)):
                raise IntegrationError(f"non-finite coefficients at step {step} (t={step * h:.6g})")
        Cs[out] = C
        Cdots[out] = system.rhs(C)
    for arr in (times, Cs, Cdots):
        arr.setflags(write=False)
    return Trajectory(times, Cs, Cdots, h, m, spec)
