"""
Smooth signum approximations
============================

sg_n(s) = tanh(n s) and the composite multiplier H_n both tend to sign(y).
|s| sg_n'(s) is bounded by one n-independent constant.
"""

import numpy as np

from gqp.signum import exotic_limit_check, mvt_decay_probe, sgn_family_sup

print("sup_y y sech^2 y =", sgn_family_sup())

for y in (1e-2, 1e-1, 1.0, 10.0, -1.0):
    c = exotic_limit_check(y, 1e-6)
    print(f"y={y:6g}: |H_n(y) - sg(y)| <= 1e-6 from n = {c.n}")

for row in mvt_decay_probe([10, 20, 40, 80], [1.0]):
    print({k: float(np.round(v, 10)) for k, v in row.items()})
