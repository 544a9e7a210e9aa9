import numpy as np
import pytest
from scipy import integrate

from gqp.basis import (
    BasisIndex,
    SineBasis,
    eigenpairs,
    eval_basis,
    eval_basis_grad,
    eval_field,
    eval_field_grad,
    project_initial,
    truncation,
)
from gqp.problem import registry_initial
from gqp.quadrature import composite_grid, projection_grid


def ix(*k):
    return BasisIndex(len(k), tuple(k), 0)


def test_point_values():
    assert eval_basis(ix(1), 0.5) == pytest.approx(1.4142136, abs=1e-7)
    assert eval_basis(ix(2), 0.5) == pytest.approx(0.0, abs=1e-15)
    assert eval_basis_grad(ix(1), 0.0)[0] == pytest.approx(np.sqrt(2) * np.pi)
    assert eval_basis_grad(ix(1), 0.5)[0] == pytest.approx(0.0, abs=1e-15)


def test_outside_domain():
    with pytest.raises(ValueError):
        eval_basis(ix(1), 1.5)
    with pytest.raises(ValueError):
        eval_basis_grad(ix(1, 1), [0.5, -0.1])


def test_orthogonality_against_adaptive_quadrature():
    q = composite_grid(1, 8)
    x = q.nodes[:, 0]
    ours = q.weights @ (eval_basis(ix(1), x) * eval_basis(ix(3), x))
    ref, _ = integrate.quad(lambda s: 2 * np.sin(np.pi * s) * np.sin(3 * np.pi * s), 0, 1)
    assert ours == pytest.approx(0.0, abs=1e-12)
    assert ref == pytest.approx(0.0, abs=1e-12)
    d2 = q.weights @ eval_basis_grad(ix(2), x)[0] ** 2
    assert d2 == pytest.approx(4 * np.pi**2, abs=1e-10)


def test_2d_ordering_is_by_eigenvalue_then_lexicographic():
    ks = [b.k for b in truncation(2, 6)]
    assert ks == [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]
    lams = [e.lam for e in eigenpairs(2, 20)]
    assert lams == sorted(lams)
    assert len(set(b.k for b in truncation(2, 40))) == 40


def test_eigenvalues():
    assert SineBasis(1, 3).eigenvalues == pytest.approx(np.pi**2 * np.array([1, 4, 9]))
    assert SineBasis(2, 2).eigenvalues == pytest.approx(np.pi**2 * np.array([2, 5]))


@pytest.mark.parametrize("dim,m", [(1, 16), (2, 12)])
def test_gram_matrices(dim, m):
    b = SineBasis(dim, m)
    q = projection_grid(dim, m)
    W = b.values(q.nodes)
    G = b.gradients(q.nodes)
    np.testing.assert_allclose((W * q.weights) @ W.T, np.eye(m), atol=1e-10)
    stiff = np.einsum("jan,jbn,n->ab", G, G, q.weights)
    np.testing.assert_allclose(stiff, np.diag(b.eigenvalues), atol=1e-10 * b.eigenvalues.max())


@pytest.mark.parametrize("dim", [1, 2])
def test_field_gradient_matches_central_differences(dim, rng):
    C = rng.standard_normal(6)
    h = 1e-4
    if dim == 1:
        x = rng.uniform(0.1, 0.9, 20)
        fd = (eval_field(C, x + h) - eval_field(C, x - h)) / (2 * h)
        ex = eval_field_grad(C, x)[0]
        np.testing.assert_allclose(ex, fd, rtol=1e-6, atol=1e-6 * np.abs(ex).max())
    else:
        p = rng.uniform(0.1, 0.9, (20, 2))
        ex = eval_field_grad(C, p, 2)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (eval_field(C, p + e, 2) - eval_field(C, p - e, 2)) / (2 * h)
            np.testing.assert_allclose(ex[j], fd, rtol=1e-6, atol=1e-6 * np.abs(ex).max())


def test_hessians_match_finite_differences(rng):
    b = SineBasis(2, 5)
    p = rng.uniform(0.1, 0.9, (7, 2))
    h = 1e-5
    H = b.hessians(p)
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (b.gradients(p + e) - b.gradients(p - e)) / (2 * h)
        np.testing.assert_allclose(H[:, j], fd, atol=1e-5 * np.abs(H).max())


def test_projections():
    sine = registry_initial("eigenmode", {"k": 1})
    np.testing.assert_allclose(project_initial(sine, 2), [1 / np.sqrt(2), 0.0], atol=1e-12)
    par = registry_initial("parabola")
    C = project_initial(par, 2)
    ref, _ = integrate.quad(lambda s: s * (1 - s) * np.sqrt(2) * np.sin(np.pi * s), 0, 1)
    assert ref == pytest.approx(4 * np.sqrt(2) / np.pi**3, abs=1e-12)
    assert C[0] == pytest.approx(0.182442, abs=1e-6)
    assert C[0] == pytest.approx(ref, abs=1e-9)
    assert C[1] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        project_initial(par, 0)


def test_field_examples():
    assert np.all(eval_field(np.zeros(4), np.linspace(0, 1, 9)) == 0)
    assert eval_field([1.0, 0.0, 0.0], [0.5])[0] == pytest.approx(np.sqrt(2))
    direct = np.sqrt(2) * (np.sin(np.pi / 4) + np.sin(np.pi / 2))
    assert eval_field([1.0, 1.0], [0.25])[0] == pytest.approx(direct, abs=1e-12)
    assert direct == pytest.approx(2.4142136, abs=1e-7)
