"""Dirichlet-Laplacian sine eigenbasis on the unit interval and unit square.

w_k(x) = prod_j sqrt(2) sin(k_j pi x_j) is orthonormal in L2 and
orthogonal in H1_0 with ||grad w_k||^2 = lambda_k = pi^2 |k|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import QuadratureGrid, projection_grid

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class BasisIndex:
    dim: int
    k: tuple[int, ...]
    linear_index: int


@dataclass(frozen=True)
class Eigenpair:
    index: BasisIndex
    lam: float


@lru_cache(maxsize=None)
def _ordered_indices(dim: int, m: int) -> tuple[tuple[int, ...], ...]:
    if dim == 1:
        return tuple((k,) for k in range(1, m + 1))
    cand = [(k1, k2) for k1 in range(1, m + 1) for k2 in range(1, m + 1)]
    cand.sort(key=lambda k: (k[0] ** 2 + k[1] ** 2, k))
    return tuple(cand[:m])


def truncation(dim: int, m: int) -> list[BasisIndex]:
    """First ``m`` multi-indices in eigenvalue order (ties lexicographic)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    return [BasisIndex(dim, k, i) for i, k in enumerate(_ordered_indices(dim, m))]


def eigenpairs(dim: int, m: int) -> list[Eigenpair]:
    return [Eigenpair(ix, np.pi**2 * sum(k * k for k in ix.k)) for ix in truncation(dim, m)]


def _check_points(x, dim: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(-1, dim)
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise ValueError("evaluation point outside the closed unit box")
    return pts


def _single_point(x, dim: int) -> bool:
    return np.ndim(x) == 0 if dim == 1 else np.shape(x) == (dim,)


class SineBasis:
    """The truncated basis {w_1, ..., w_m} with vectorized evaluation.

    Evaluation methods take points of shape (n,) in 1D or (n, 2) in 2D and
    return arrays whose last axis indexes points.
    """

    def __init__(self, dim: int, m: int):
        self.dim = dim
        self.m = m
        self.indices = truncation(dim, m)
        self.k = np.array([ix.k for ix in self.indices], dtype=float)  # (m, dim)
        self.eigenvalues = np.pi**2 * np.sum(self.k**2, axis=1)
        # ||d w_k / d x_j||_{L2} = k_j pi
        self.partial_norms = np.pi * self.k

    def __repr__(self) -> str:
        return f"SineBasis(dim={self.dim}, m={self.m})"

    def _factors(self, pts):
        arg = np.pi * self.k[:, :, None] * pts.T[None, :, :]  # (m, dim, n)
        return SQRT2 * np.sin(arg), SQRT2 * np.pi * self.k[:, :, None] * np.cos(arg), arg

    def values(self, x) -> np.ndarray:
        """(m, n) array of w_k(x)."""
        pts = _check_points(x, self.dim)
        s, _, _ = self._factors(pts)
        return np.prod(s, axis=1)

    def gradients(self, x) -> np.ndarray:
        """(dim, m, n) array of d w_k / d x_j."""
        pts = _check_points(x, self.dim)
        s, c, _ = self._factors(pts)
        if self.dim == 1:
            return c[:, 0][None]
        return np.stack([c[:, 0] * s[:, 1], s[:, 0] * c[:, 1]])

    def hessians(self, x) -> np.ndarray:
        """(dim, dim, m, n) array of second partial derivatives."""
        pts = _check_points(x, self.dim)
        s, c, _ = self._factors(pts)
        k2 = (np.pi * self.k) ** 2
        if self.dim == 1:
            return (-k2[:, 0, None] * s[:, 0])[None, None]
        h = np.empty((2, 2, self.m, pts.shape[0]))
        h[0, 0] = -k2[:, 0, None] * s[:, 0] * s[:, 1]
        h[1, 1] = -k2[:, 1, None] * s[:, 0] * s[:, 1]
        h[0, 1] = h[1, 0] = c[:, 0] * c[:, 1]
        return h


def eval_basis(index: BasisIndex, x) -> np.ndarray | float:
    pts = _check_points(x, index.dim)
    out = np.ones(pts.shape[0])
    for j, kj in enumerate(index.k):
        out = out * SQRT2 * np.sin(kj * np.pi * pts[:, j])
    return float(out[0]) if _single_point(x, index.dim) else out


def eval_basis_grad(index: BasisIndex, x) -> np.ndarray:
    """Gradient of w_k; shape (dim,) for one point, else (dim, n)."""
    pts = _check_points(x, index.dim)
    s = [SQRT2 * np.sin(kj * np.pi * pts[:, j]) for j, kj in enumerate(index.k)]
    c = [SQRT2 * kj * np.pi * np.cos(kj * np.pi * pts[:, j]) for j, kj in enumerate(index.k)]
    if index.dim == 1:
        g = np.stack([c[0]])
    else:
        g = np.stack([c[0] * s[1], s[0] * c[1]])
    return g[:, 0] if _single_point(x, index.dim) else g


def project_initial(u0, m: int, dim: int = 1, quad: QuadratureGrid | None = None) -> np.ndarray:
    """Coefficients C_k(0) = (u0, w_k) by quadrature."""
    if m < 1:
        raise ValueError("m must be >= 1")
    quad = quad or projection_grid(dim, m)
    basis = SineBasis(dim, m)
    vals = u0(quad.nodes if dim == 2 else quad.nodes[:, 0])
    return basis.values(quad.nodes) @ (quad.weights * vals)


def _coefficients(C, dim: int) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    if C.ndim != 1 or C.size < 1:
        raise ValueError("coefficient vector must be 1-D and non-empty")
    return C


def eval_field(C, points, dim: int = 1) -> np.ndarray:
    """u_m = sum_k C_k w_k at the given points."""
    C = _coefficients(C, dim)
    return C @ SineBasis(dim, C.size).values(points)


def eval_field_grad(C, points, dim: int = 1) -> np.ndarray:
    """grad u_m at the given points, shape (dim, n)."""
    C = _coefficients(C, dim)
    return np.einsum("k,jkn->jn", C, SineBasis(dim, C.size).gradients(points))
