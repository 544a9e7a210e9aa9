"""Problem data for the quasilinear parabolic IBVP on the unit box.

The equation is

    u_t + div f(u) = sum_ij (B_ij(u) u_{x_j})_{x_i}   in (0,1)^d x (0,T)

with u = 0 on the boundary and u(., 0) = u0.  Flux, diffusion and initial
data come from a closed registry of smooth closed-form functions; a
:class:`ProblemSpec` names one entry of each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np


class RegistryError(KeyError):
    """Unknown registry id or invalid registry parameters."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ConfigError(ValueError):
    """Malformed problem or run configuration."""


def _as_vector(value, dim: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(dim, float(arr[0]))
    if arr.shape != (dim,):
        raise RegistryError(f"parameter {name!r} must be a scalar or a length-{dim} list")
    return arr


# ---------------------------------------------------------------------------
# flux registry


@dataclass(frozen=True)
class Flux:
    """Component-wise flux f = (f_1, ..., f_d) with derivative access."""

    id: str
    dim: int
    coeffs: np.ndarray

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        c = self.coeffs.reshape((self.dim,) + (1,) * u.ndim)
        if self.id == "zero":
            return np.zeros((self.dim,) + u.shape)
        if self.id == "linear_transport":
            return c * u
        return c * np.sin(u)

    def derivative(self, u) -> np.ndarray:
        """f_i'(u) stacked along the leading axis."""
        u = np.asarray(u, dtype=float)
        c = self.coeffs.reshape((self.dim,) + (1,) * u.ndim)
        if self.id == "zero":
            return np.zeros((self.dim,) + u.shape)
        if self.id == "linear_transport":
            return c * np.ones_like(u)
        return c * np.cos(u)


FLUX_IDS = ("zero", "linear_transport", "sine")


def registry_flux(flux_id: str, params: Mapping[str, Any] | None = None, dim: int = 1) -> Flux:
    """Look up a flux.

    ``linear_transport`` takes ``c`` (f_i = c_i u), ``sine`` takes ``a``
    (f_i = a_i sin u).  Scalars broadcast over the ``dim`` components.
    """
    params = dict(params or {})
    if flux_id not in FLUX_IDS:
        raise RegistryError(f"unknown flux id {flux_id!r}; expected one of {FLUX_IDS}")
    if flux_id == "zero":
        coeffs = np.zeros(dim)
    elif flux_id == "linear_transport":
        coeffs = _as_vector(params.get("c", 1.0), dim, "c")
    else:
        coeffs = _as_vector(params.get("a", 1.0), dim, "a")
    return Flux(flux_id, dim, coeffs)


# ---------------------------------------------------------------------------
# diffusion registry


@dataclass(frozen=True)
class Diffusion:
    """Diffusion matrix B(u) with its theta-ellipticity constant.

    ``matrix(u)`` and ``derivative(u)`` return arrays of shape
    ``(d, d) + u.shape``.
    """

    id: str
    dim: int
    theta: float
    beta: float = 0.0

    def _scalar(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # diagonal value and its derivative
        if self.id == "constant":
            return np.full_like(u, self.theta), np.zeros_like(u)
        if self.id == "gauss_bump":
            with np.errstate(over="ignore"):
                e = np.exp(-u * u)
            return self.theta + e, -2.0 * u * e
        if self.id == "rational":
            r = 1.0 / (1.0 + u * u)
            return self.theta + r, -2.0 * u * r * r
        e = np.exp(-u * u)
        return self.theta + abs(self.beta) + e, -2.0 * u * e

    def matrix(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        diag, _ = self._scalar(u)
        out = np.zeros((self.dim, self.dim) + u.shape)
        for i in range(self.dim):
            out[i, i] = diag
        if self.id == "anisotropic":
            out[0, 1] = self.beta
            out[1, 0] = self.beta
        return out

    def derivative(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        _, ddiag = self._scalar(u)
        out = np.zeros((self.dim, self.dim) + u.shape)
        for i in range(self.dim):
            out[i, i] = ddiag
        return out

    @property
    def isotropic(self) -> bool:
        return self.id != "anisotropic"


DIFFUSION_IDS = ("constant", "gauss_bump", "rational", "anisotropic")


def registry_diffusion(
    diffusion_id: str, params: Mapping[str, Any] | None = None, dim: int = 1
) -> Diffusion:
    """Look up a diffusion matrix.

    All entries take ``theta``.  ``anisotropic`` (d=2 only) also takes
    ``beta``, the constant off-diagonal; its diagonal is
    theta + |beta| + exp(-u^2) so the smallest eigenvalue stays >= theta.
    """
    params = dict(params or {})
    if diffusion_id not in DIFFUSION_IDS:
        raise RegistryError(
            f"unknown diffusion id {diffusion_id!r}; expected one of {DIFFUSION_IDS}"
        )
    theta = float(params.get("theta", 1.0))
    if not theta > 0:
        raise RegistryError(f"diffusion theta must be > 0, got {theta}")
    beta = 0.0
    if diffusion_id == "anisotropic":
        if dim != 2:
            raise RegistryError("anisotropic diffusion requires dim=2")
        beta = float(params.get("beta", 0.0))
    return Diffusion(diffusion_id, dim, theta, beta)


# ---------------------------------------------------------------------------
# initial data registry


@dataclass(frozen=True)
class InitialDatum:
    """Initial datum u0, vanishing on the boundary of the unit box."""

    id: str
    dim: int
    params: tuple = ()

    def __call__(self, x) -> np.ndarray:
        pts = _as_points(x, self.dim)
        p = dict(self.params)
        if self.id == "eigenmode":
            k = p["k"]
            out = np.full(pts.shape[0], p["amplitude"])
            for j in range(self.dim):
                out = out * np.sin(k[j] * np.pi * pts[:, j])
            return out
        if self.id == "parabola":
            out = np.full(pts.shape[0], p["amplitude"])
            for j in range(self.dim):
                out = out * pts[:, j] * (1.0 - pts[:, j])
            return out
        # two_mode: a w_(1,..,1) + b w_(2,1,..,1), unnormalized sines
        first = np.ones(pts.shape[0])
        second = np.sin(2.0 * np.pi * pts[:, 0])
        for j in range(self.dim):
            s = np.sin(np.pi * pts[:, j])
            first = first * s
            if j > 0:
                second = second * s
        return p["a"] * first + p["b"] * second


INITIAL_IDS = ("eigenmode", "parabola", "two_mode")


def registry_initial(
    initial_id: str, params: Mapping[str, Any] | None = None, dim: int = 1
) -> InitialDatum:
    """Look up an initial datum.

    ``eigenmode``: amplitude * prod_j sin(k_j pi x_j) (``k``, ``amplitude``).
    ``parabola``: amplitude * prod_j x_j (1 - x_j).
    ``two_mode``: a sin(pi x) + b sin(2 pi x) in 1D, with the remaining
    factors sin(pi y) in 2D.
    """
    params = dict(params or {})
    if initial_id not in INITIAL_IDS:
        raise RegistryError(
            f"unknown initial id {initial_id!r}; expected one of {INITIAL_IDS}"
        )
    if initial_id == "eigenmode":
        k = np.atleast_1d(params.get("k", 1)).astype(int)
        if k.size == 1:
            k = np.full(dim, int(k[0]))
        if k.shape != (dim,) or np.any(k < 1):
            raise RegistryError("eigenmode k must be positive integers, one per dimension")
        clean = (("amplitude", float(params.get("amplitude", 1.0))), ("k", tuple(int(v) for v in k)))
    elif initial_id == "parabola":
        clean = (("amplitude", float(params.get("amplitude", 1.0))),)
    else:
        clean = (("a", float(params.get("a", 1.0))), ("b", float(params.get("b", 0.5))))
    return InitialDatum(initial_id, dim, clean)


def _as_points(x, dim: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if dim == 1:
        return pts.reshape(-1, 1)
    return pts.reshape(-1, dim)


# ---------------------------------------------------------------------------
# problem spec


@dataclass(frozen=True)
class Entry:
    """A registry reference: ``id`` plus ``params``."""

    id: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "params": _plain(dict(self.params))}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass(frozen=True)
class ProblemSpec:
    """PDE data: flux, diffusion, initial datum, horizon and dimension."""

    dim: int
    flux: Entry
    diffusion: Entry
    initial: Entry
    horizon: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")
        # resolve eagerly so bad ids fail at construction
        object.__setattr__(self, "_f", registry_flux(self.flux.id, self.flux.params, self.dim))
        object.__setattr__(
            self, "_b", registry_diffusion(self.diffusion.id, self.diffusion.params, self.dim)
        )
        object.__setattr__(
            self, "_u0", registry_initial(self.initial.id, self.initial.params, self.dim)
        )

    @property
    def f(self) -> Flux:
        return self._f

    @property
    def B(self) -> Diffusion:
        return self._b

    @property
    def u0(self) -> InitialDatum:
        return self._u0

    @property
    def theta(self) -> float:
        return self._b.theta

    @property
    def volume(self) -> float:
        return 1.0

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "flux": self.flux.to_dict(),
            "diffusion": self.diffusion.to_dict(),
            "initial": self.initial.to_dict(),
            "horizon": self.horizon,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProblemSpec":
        """Build from the JSON problem block, naming the offending key on error."""
        if not isinstance(data, Mapping):
            raise ConfigError("problem block must be an object")
        allowed = {"dim", "flux", "diffusion", "initial", "horizon"}
        for key in data:
            if key not in allowed:
                raise ConfigError(f"unknown problem key {key!r}")
        for key in sorted(allowed):
            if key not in data:
                raise ConfigError(f"missing problem key {key!r}")
        entries = {}
        for key in ("flux", "diffusion", "initial"):
            block = data[key]
            if not isinstance(block, Mapping) or "id" not in block:
                raise ConfigError(f"problem key {key!r} needs an 'id'")
            extra = set(block) - {"id", "params"}
            if extra:
                raise ConfigError(f"unknown key {sorted(extra)[0]!r} in problem.{key}")
            params = block.get("params", {}) or {}
            if not isinstance(params, Mapping):
                raise ConfigError(f"problem.{key}.params must be an object")
            entries[key] = Entry(str(block["id"]), dict(params))
        try:
            dim = int(data["dim"])
            horizon = float(data["horizon"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for 'dim' or 'horizon': {exc}") from None
        try:
            return cls(dim=dim, horizon=horizon, **entries)
        except RegistryError as exc:
            raise ConfigError(str(exc)) from None


def load_problem(path: str | Path) -> ProblemSpec:
    """Read a problem spec from a JSON file (either bare or under ``problem``)."""
    data = json.loads(Path(path).read_text())
    if "problem" in data:
        data = data["problem"]
    return ProblemSpec.from_dict(data)


def make_problem(dim, flux, diffusion, initial, horizon=0.1) -> ProblemSpec:
    """Shorthand: each of flux/diffusion/initial is an id or an (id, params) pair."""

    def entry(v):
        if isinstance(v, str):
            return Entry(v, {})
        return Entry(v[0], dict(v[1]))

    return ProblemSpec(dim, entry(flux), entry(diffusion), entry(initial), float(horizon))


# Registry problems used by the verification suite.
REGISTRY_PROBLEMS: dict[str, ProblemSpec] = {
    "heat_1d": make_problem(1, "zero", ("constant", {"theta": 1.0}), ("eigenmode", {"k": 1})),
    "transport_rational_1d": make_problem(
        1, ("linear_transport", {"c": 1.0}), ("rational", {"theta": 0.5}), "parabola"
    ),
    "sine_gauss_1d": make_problem(
        1, ("sine", {"a": 1.0}), ("gauss_bump", {"theta": 1.0}), ("parabola", {"amplitude": 4.0})
    ),
    "sine_gauss_2d": make_problem(
        2, ("sine", {"a": [1.0, 1.0]}), ("gauss_bump", {"theta": 1.0}),
        ("parabola", {"amplitude": 16.0}),
    ),
    "anisotropic_2d": make_problem(
        2, ("linear_transport", {"c": [1.0, 0.5]}),
        ("anisotropic", {"theta": 0.5, "beta": 0.25}), ("two_mode", {"a": 1.0, "b": 0.5}),
    ),
}


# ---------------------------------------------------------------------------
# hypothesis validation


@dataclass(frozen=True)
class HypothesisReport:
    fprime_sup: float
    b_sup: float
    min_ellipticity: float
    u0_sup: float
    theta: float
    pass_HF: bool
    pass_HB: bool
    pass_HI: bool

    @property
    def passed(self) -> bool:
        return self.pass_HF and self.pass_HB and self.pass_HI

    def to_dict(self) -> dict:
        return {
            "fprime_sup": self.fprime_sup,
            "b_sup": self.b_sup,
            "min_ellipticity": self.min_ellipticity,
            "u0_sup": self.u0_sup,
            "pass": {"HF": self.pass_HF, "HB": self.pass_HB, "HI": self.pass_HI},
        }


def validate_hypotheses(
    spec: ProblemSpec, n_samples: int = 2001, tol_ellip: float = 1e-12
) -> HypothesisReport:
    """Sample the registry functions and check (HF), (HB), (HI).

    States u range over a uniform grid on [-U, U] with U = max(10, 2 sup|u0|);
    the grid has an odd number of points so that u = 0 is included.  Unit
    vectors are sampled uniformly on the circle in 2D.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    n = n_samples | 1

    side = np.linspace(0.0, 1.0, 257 if spec.dim == 1 else 129)
    if spec.dim == 1:
        xs = side
    else:
        X, Y = np.meshgrid(side, side, indexing="ij")
        xs = np.column_stack([X.ravel(), Y.ravel()])
    u0_sup = float(np.max(np.abs(spec.u0(xs))))

    U = max(10.0, 2.0 * u0_sup)
    u = np.linspace(-U, U, n)
    fprime_sup = float(np.max(np.abs(spec.f.derivative(u))))
    Bu = spec.B.matrix(u)
    b_sup = float(np.max(np.abs(Bu)))

    if spec.dim == 1:
        min_ellip = float(np.min(Bu[0, 0]))
    else:
        ang = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        xi = np.stack([np.cos(ang), np.sin(ang)])  # (2, n_ang)
        # xi^T B(u) xi for every (u, xi) pair
        q = np.einsum("ia,iju,ja->ua", xi, Bu, xi)
        min_ellip = float(np.min(q))

    return HypothesisReport(
        fprime_sup=fprime_sup,
        b_sup=b_sup,
        min_ellipticity=min_ellip,
        u0_sup=u0_sup,
        theta=spec.theta,
        pass_HF=math.isfinite(fprime_sup),
        pass_HB=math.isfinite(b_sup) and min_ellip >= spec.theta - tol_ellip,
        pass_HI=math.isfinite(u0_sup),
    )
