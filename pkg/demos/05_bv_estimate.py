"""
BV estimate and its diagnostics
===============================

||d_t u_m||_{L1} + ||grad u_m||_{L1} over the space-time cylinder stays
bounded in m.  The monotonicity of t -> int |d_t u_m| and the strong
residual are reported, not asserted.
"""

from gqp.estimates import bv_report, residual_series
from gqp.integrator import integrate
from gqp.problem import REGISTRY_PROBLEMS

spec = REGISTRY_PROBLEMS["transport_rational_1d"]
for m in (4, 8, 16, 32):
    traj = integrate(spec, m)
    bv = bv_report(traj)
    print(f"m={m:3d}  total={bv.total:.6f}  grad={bv.grad_l1:.4f} <= {bv.grad_l1_bound:.4f}"
          f"  monotone_violation={bv.monotone_violation:.1e}  residual(T)={residual_series(traj)[-1]:.2e}")
