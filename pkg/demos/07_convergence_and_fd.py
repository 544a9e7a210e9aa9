"""
m-refinement and a finite-difference cross-check
================================================

L1 Cauchy differences ||u_m - u_2m|| shrink with m, and the finest Galerkin
solution agrees with an independent finite-difference solution to within
the FD discretization error.
"""

from gqp.oracle import convergence_study, fd_self_convergence
from gqp.problem import REGISTRY_PROBLEMS

spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
table = convergence_study(spec, [4, 8, 16, 32])
print("cauchy_l1:", table.cauchy_l1)
print("bv_total:", table.bv_total)
print("fd_distance:", table.fd_distance, " fd self-error:", table.fd_self_error)

sc = fd_self_convergence(spec, [25, 50, 100, 200])
print("fd halving ratios (order 2 gives 4):", sc.ratios)
