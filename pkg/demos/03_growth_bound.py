"""
Linear growth of the Galerkin right-hand side
=============================================

The coefficient ODE C' = g(C) satisfies ||g(C)|| <= alpha ||C|| with alpha
the Frobenius norm of a matrix built from ||B||_inf, ||f'||_inf and the
partial-derivative norms of the basis.
"""

import numpy as np

from gqp.assembly import growth_bound, sampled_lipschitz, verify_growth
from gqp.problem import REGISTRY_PROBLEMS, validate_hypotheses

rng = np.random.default_rng(0)
for name, spec in REGISTRY_PROBLEMS.items():
    rep = validate_hypotheses(spec)
    gb = growth_bound(8, spec, rep)
    res = verify_growth(list(rng.standard_normal((100, 8))), spec, gb)
    L = sampled_lipschitz(spec, 8, rng, n_pairs=20)
    print(f"{name:24s} alpha={gb.alpha:10.2f}  max ||g||/(alpha||C||)={res['max_ratio']:.3f}  sampled L={L:.1f}")
