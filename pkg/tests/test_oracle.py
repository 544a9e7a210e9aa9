import math

import numpy as np
import pytest

from gqp.integrator import integrate
from gqp.oracle import (
    FunctionSource,
    GridField,
    GridSource,
    OracleError,
    SpectralSource,
    closed_form_heat,
    convergence_study,
    fd_reference_solve,
    fd_self_convergence,
    fd_stable_dt,
    l1_spacetime_distance,
    spectral_distance,
    uniqueness_probe,
    weak_residual,
)
from gqp.problem import REGISTRY_PROBLEMS, make_problem
from gqp.quadrature import projection_grid

E = math.exp(-math.pi**2 * 0.1)


def heat(k=1):
    return make_problem(1, "zero", ("constant", {"theta": 1.0}), ("eigenmode", {"k": k}))


def test_closed_form_examples():
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(closed_form_heat(heat(), 0.0, x), heat().u0(x), atol=1e-15)
    assert closed_form_heat(heat(), 0.1, 0.5)[0] == pytest.approx(0.372708, abs=1e-6)
    assert closed_form_heat(heat(), 0.1, 0.5)[0] == pytest.approx(E, abs=1e-15)
    assert closed_form_heat(heat(2), 0.037, 0.5)[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(OracleError):
        closed_form_heat(REGISTRY_PROBLEMS["sine_gauss_1d"], 0.1, 0.5)


def test_fd_heat_example():
    fields = fd_reference_solve(heat(), 200, dt=1e-5)
    assert fields[-1](np.array([0.5]))[0] == pytest.approx(0.37271, abs=2e-4)
    assert fields[-1].t == pytest.approx(0.1)


def test_fd_zero_datum(zero_data_1d):
    assert all(np.all(g.values == 0) for g in fd_reference_solve(zero_data_1d, 20))


def test_fd_boundary_pinned():
    fields = fd_reference_solve(REGISTRY_PROBLEMS["sine_gauss_1d"], 50)
    assert all(g.values[0] == 0.0 and g.values[-1] == 0.0 for g in fields)


def test_fd_errors():
    with pytest.raises(OracleError, match="1D-only"):
        fd_reference_solve(REGISTRY_PROBLEMS["sine_gauss_2d"], 10)
    with pytest.raises(OracleError, match="stability"):
        fd_reference_solve(heat(), 100, dt=1.0)
    spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
    assert fd_stable_dt(spec, 10) == pytest.approx(0.01 / 4, rel=1e-6)


def test_fd_second_order_against_closed_form():
    # nodal error, so that interpolation error (also O(h^2), opposite sign) stays out
    errs = []
    for n in (20, 40, 80):
        final = fd_reference_solve(heat(), n, n_outputs=10)[-1]
        errs.append(np.max(np.abs(final.values - closed_form_heat(heat(), 0.1, final.x))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.5 <= r <= 4.5 for r in ratios)


def test_l1_distance_examples():
    q = projection_grid(1, 8)
    tr = integrate(heat(), 2, dt=1e-4)
    a = SpectralSource(tr)
    assert l1_spacetime_distance(a, a, q, tr.times) == 0.0
    exact = FunctionSource(lambda t, p: closed_form_heat(heat(), t, p), 0.1)
    assert l1_spacetime_distance(a, exact, q, tr.times) <= 1e-6
    one = FunctionSource(lambda t, p: 1.0, 1.0)
    zero = FunctionSource(lambda t, p: 0.0, 1.0)
    assert l1_spacetime_distance(one, zero, q, np.linspace(0, 1, 11)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(OracleError):
        l1_spacetime_distance(a, one, q, tr.times)


def test_spectral_source_tracks_points():
    tr = integrate(heat(), 2, dt=1e-4)
    src = SpectralSource(tr)
    a = src(0.05, np.array([0.5]))
    b = src(0.05, np.array([0.25]))
    assert a[0] != b[0]
    assert b[0] == pytest.approx(closed_form_heat(heat(), 0.05, 0.25)[0], abs=1e-6)


def test_grid_field_interpolates():
    g = GridField(np.array([0.0, 0.5, 1.0]), np.array([0.0, 1.0, 0.0]), 0.0)
    np.testing.assert_allclose(g(np.array([0.25, 0.75])), [0.5, 0.5])


def test_heat_pairwise_agreement():
    q = projection_grid(1, 16)
    spec = heat()
    tr = integrate(spec, 4, dt=1e-4, n_outputs=50)
    fd = fd_reference_solve(spec, 200, n_outputs=50)
    exact = FunctionSource(lambda t, p: closed_form_heat(spec, t, p), 0.1)
    s, g = SpectralSource(tr), GridSource(fd)
    for a, b in ((s, g), (s, exact), (g, exact)):
        assert l1_spacetime_distance(a, b, q, tr.times) <= 5e-4


def test_convergence_heat_single_mode():
    table = convergence_study(heat(), (1, 2, 4), dt=1e-4, n_outputs=50, fd_cells=50)
    assert len(table.cauchy_l1) == 2
    assert max(table.cauchy_l1) <= 1e-8
    assert table.fd_distance is not None and table.fd_self_error > 0
    d = table.to_dict()
    assert all(np.isfinite(v) and v >= 0 for v in d["cauchy_l1"] + d["bv_total"] + d["A_empirical"])
    with pytest.raises(ValueError):
        convergence_study(heat(), (1, 3))


def test_convergence_threads_do_not_change_results(monkeypatch):
    spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
    monkeypatch.setenv("GQP_THREADS", "1")
    a = convergence_study(spec, (4, 8), n_outputs=20, fd_cells=20).to_dict()
    monkeypatch.setenv("GQP_THREADS", "3")
    b = convergence_study(spec, (4, 8), n_outputs=20, fd_cells=20).to_dict()
    assert a == b


def test_spectral_distance_needs_shared_times():
    spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
    with pytest.raises(OracleError):
        spectral_distance(integrate(spec, 4, n_outputs=10), integrate(spec, 4, n_outputs=20))


def test_uniqueness_examples(zero_data_1d):
    assert uniqueness_probe(heat(), 4, (1e-4, 5e-5)) <= 1e-8
    assert uniqueness_probe(zero_data_1d, 4, (1e-4, 5e-5)) == 0.0
    assert uniqueness_probe(REGISTRY_PROBLEMS["sine_gauss_1d"], 16, (1e-4, 5e-5)) <= 1e-6
    with pytest.raises(ValueError):
        uniqueness_probe(heat(), 4, (1e-4, 1e-4))


def test_weak_residual():
    assert weak_residual(integrate(heat(), 2, dt=1e-4)) <= 1e-10
    spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
    r = [weak_residual(integrate(spec, m, n_outputs=50)) for m in (4, 8, 16)]
    assert all(a > b for a, b in zip(r, r[1:]))


def test_fd_self_convergence_reuses_solutions():
    spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
    sols = {}
    res = fd_self_convergence(spec, [20, 40, 80], n_outputs=20, solutions=sols)
    assert set(sols) == {20, 40, 80}
    assert len(res.errors) == 2 and len(res.ratios) == 1
    assert 3 <= res.ratios[0] <= 5
