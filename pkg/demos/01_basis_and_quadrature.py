"""
Sine eigenbasis and composite Gauss-Legendre quadrature
=======================================================

The Dirichlet Laplacian on (0,1)^d has eigenfunctions
w_k = prod_j sqrt(2) sin(k_j pi x_j) with eigenvalues pi^2 |k|^2.
"""

import numpy as np

from gqp.basis import SineBasis, project_initial, truncation
from gqp.problem import registry_initial
from gqp.quadrature import projection_grid

# first modes in 2D, ordered by eigenvalue with ties broken lexicographically
for b in truncation(2, 6):
    print(b.linear_index, b.k, np.pi**2 * sum(k * k for k in b.k))

# the Gram matrix is the identity on the default projection grid
basis = SineBasis(1, 16)
q = projection_grid(1, 16)
W = basis.values(q.nodes)
print("gram error:", np.abs((W * q.weights) @ W.T - np.eye(16)).max())

# projecting x(1-x): only odd modes survive, C_1 = 4 sqrt(2) / pi^3
C = project_initial(registry_initial("parabola"), 6)
print("coefficients:", np.round(C, 8))
print("closed form C_1:", 4 * np.sqrt(2) / np.pi**3)
