"""
Galerkin solve of the linear heat equation
==========================================

With f = 0, B = I and u0 = sin(pi x) the solution is e^{-pi^2 t} sin(pi x),
so every output of the solver can be compared with the exact field.
"""

import numpy as np

from gqp.basis import SineBasis
from gqp.integrator import integrate, stability_ceiling
from gqp.oracle import closed_form_heat
from gqp.problem import REGISTRY_PROBLEMS

spec = REGISTRY_PROBLEMS["heat_1d"]
print("stability ceiling m=4:", stability_ceiling(spec, 4))

traj = integrate(spec, 4, dt=1e-4)
x = np.linspace(0, 1, 257)
approx = traj.C @ SineBasis(1, 4).values(x)
exact = closed_form_heat(spec, traj.times, x)
print("max abs error over all outputs:", np.abs(approx - exact).max())
print("C_1(T) =", traj.C[-1, 0], " exact:", np.exp(-np.pi**2 * 0.1) / np.sqrt(2))

# dense output between stored times uses cubic Hermite interpolation
print("C_1(0.0123) =", traj.coefficients_at(0.0123)[0])
