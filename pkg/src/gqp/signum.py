"""Smooth signum approximations used as multipliers in the BV argument.

sg_n(s) = tanh(n s), and the composite multiplier

    H_n(y) = tanh(n y sin(exp(y^2 / (n (1 + y^2))) / 3)),

both of which converge pointwise to sign(y) as n -> infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def sg(s):
    return np.sign(s)


def sg_n(n: float, s):
    return np.tanh(n * np.asarray(s, dtype=float))


def sg_n_prime(n: float, s):
    """n sech^2(n s), written via cosh to stay finite for large |n s|."""
    z = n * np.asarray(s, dtype=float)
    with np.errstate(over="ignore"):
        return n / np.cosh(z) ** 2


def sg_n_prime_exponential(n: float, z):
    """The same factor as 4n / (e^z + e^-z)^2, with z = n s already formed."""
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return 4.0 * n / (np.exp(z) + np.exp(-z)) ** 2


def _inner(n: float, y):
    y = np.asarray(y, dtype=float)
    return np.exp(y * y / (n * (1.0 + y * y))) / 3.0


def exotic_multiplier(n: float, y):
    """H_n(y)."""
    y = np.asarray(y, dtype=float)
    return np.tanh(n * y * np.sin(_inner(n, y)))


def exotic_multiplier_prime(n: float, y):
    """dH_n/dy by the chain rule."""
    y = np.asarray(y, dtype=float)
    a = _inner(n, y)
    # d/dy [y sin(a(y))] with a' = a * 2y / (n (1 + y^2)^2)
    inner_prime = np.sin(a) + y * np.cos(a) * a * 2.0 * y / (n * (1.0 + y * y) ** 2)
    return sg_n_prime(n, y * np.sin(a)) * inner_prime


@dataclass(frozen=True)
class SgnProbe:
    n: float
    grid: np.ndarray
    sg_n: np.ndarray
    sg_n_prime: np.ndarray
    H_n: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "grid": self.grid.tolist(),
            "sg_n": self.sg_n.tolist(),
            "sg_n_prime": self.sg_n_prime.tolist(),
            "H_n": self.H_n.tolist(),
        }


def sgn_probe(n: float, grid) -> SgnProbe:
    if n < 1:
        raise ValueError("n must be >= 1")
    grid = np.asarray(grid, dtype=float)
    return SgnProbe(float(n), grid, sg_n(n, grid), sg_n_prime(n, grid), exotic_multiplier(n, grid))


def sgn_family_sup(y_max: float = 10.0, step: float = 1e-5) -> float:
    """sup over y in [0, y_max] of y sech^2(y).

    |s| sg_n'(s) = |ns| sech^2(ns), so this single supremum bounds every n.
    """
    y = np.arange(0.0, y_max + step / 2, step)
    return float(np.max(y / np.cosh(y) ** 2))


@dataclass(frozen=True)
class LimitCheck:
    y: float
    tol: float
    n: int | None
    converged: bool


def exotic_limit_check(y: float, tol: float = 1e-6, n_max: int = 10**6) -> LimitCheck:
    """Smallest integer n with |H_n(y) - sg(y)| <= tol.

    For fixed y != 0 the error is non-increasing in n (n sin(exp(c/n)/3)
    increases with n), so a doubling search followed by bisection finds it.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")

    def err(n):
        return abs(float(exotic_multiplier(n, y)) - float(sg(y)))

    if y == 0 or err(1) <= tol:
        return LimitCheck(y, tol, 1, True)
    hi = 1
    while err(hi) > tol:
        if hi >= n_max:
            return LimitCheck(y, tol, None, False)
        hi = min(2 * hi, n_max)
    lo = hi // 2  # err(lo) > tol
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if err(mid) <= tol:
            hi = mid
        else:
            lo = mid
    return LimitCheck(y, tol, hi, True)


def mvt_decay_probe(n_list, y_grid) -> list[dict]:
    """Decay table for the mean-value-theorem step of the initial-time bound.

    For each (n, y) row:

    - ``bracket``: |H_n(y) - H_n(0)|, evaluated directly;
    - ``deviation``: n |H_n(y) - sg_n(y sin(1/3))|, the scaled gap between
      the composite multiplier and tanh with the inner exponential frozen
      at its n -> infinity value;
    - ``cos_term``: sup over xi in [0, y] of the chain-rule cosine term
      |xi cos(a) a 2 xi / (n (1 + xi^2)^2)|, which is O(1/n);
    - ``factor_identity_err``: |n sech^2(z) - 4n / (e^z + e^-z)^2| at
      z = n y sin(a(y)).
    """
    rows = []
    s13 = np.sin(1.0 / 3.0)
    for y in y_grid:
        y = float(y)
        xi = np.linspace(0.0, y, 201) if y != 0 else np.zeros(1)
        for n in n_list:
            n = float(n)
            h = float(exotic_multiplier(n, y))
            a = _inner(n, xi)
            cos_term = float(np.max(np.abs(xi * np.cos(a) * a * 2.0 * xi / (n * (1.0 + xi**2) ** 2))))
            z = n * y * float(np.sin(_inner(n, y)))
            ident = abs(float(sg_n_prime(n, z / n)) - float(sg_n_prime_exponential(n, z)))
            rows.append(
                {
                    "n": n,
                    "y": y,
                    "bracket": abs(h - float(exotic_multiplier(n, 0.0))),
                    "deviation": n * abs(h - float(sg_n(n, y * s13))),
                    "cos_term": cos_term,
                    "factor_identity_err": ident,
                }
            )
    return rows
