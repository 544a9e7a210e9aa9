"""
Energy estimate across truncation levels
========================================

max ||u_m||_L2 + ||u_m||_{L2 H1_0} + ||d_t u_m||_{L2 H-1} <= A ||u_0||_L2
with A independent of m.  The ratio A_empirical should barely move with m.
"""

from gqp.estimates import energy_report
from gqp.integrator import integrate
from gqp.problem import REGISTRY_PROBLEMS

spec = REGISTRY_PROBLEMS["sine_gauss_1d"]
for m in (4, 8, 16, 32):
    e = energy_report(integrate(spec, m))
    print(f"m={m:3d}  A={e.A_empirical:.6f}  gronwall_ok={e.gronwall_ok}  rate={e.gronwall_rate}")
