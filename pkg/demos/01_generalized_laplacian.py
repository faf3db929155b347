"""From a weighted triangle to its generalized Laplacian.

Walks through the core construction: Gromov products, the barycenter star
expansion, the closed-form operator for a single 2-simplex, and the
graph-type test that tells you when the operator still looks like an
ordinary graph Laplacian.
"""

import numpy as np

from simplexsp import (
    SimplicialComplex,
    complex_laplacian,
    gromov_product,
    is_graph_type,
    shape_constant,
    simplex_laplacian,
    star_expansion,
    two_simplex_closed_form,
)

np.set_printoptions(precision=4, suppress=True)

# A triangle with side lengths 3, 4, 5.
w12, w13, w23 = 3.0, 4.0, 5.0
print("Triangle with edge weights", (w12, w13, w23))

print("\nGromov products (one per vertex):")
print("  at v1:", gromov_product(w12, w13, w23))
print("  at v2:", gromov_product(w12, w23, w13))
print("  at v3:", gromov_product(w13, w23, w12))

se = star_expansion((1, 2, 3), {(1, 2): w12, (1, 3): w13, (2, 3): w23})
print("\nStar-expansion barycenter weights:", se.star_weights)

closed = two_simplex_closed_form(w12, w13, w23)
oracle = simplex_laplacian(se)
print("\nClosed-form generalized Laplacian:")
print(closed.matrix)
print("max |closed - star-expansion oracle| =", np.abs(closed.matrix - oracle.matrix).max())

print("\nShape constant:", shape_constant(w12, w13, w23))
print("Graph type?", is_graph_type(closed, tol=1e-12))

# A long-and-thin triangle stops being of graph type.
skinny = two_simplex_closed_form(0.2, 1.0, 1.0)
print("\nSkinny triangle (0.2, 1, 1): shape constant =", shape_constant(0.2, 1.0, 1.0))
print("Graph type?", is_graph_type(skinny, tol=1e-12))

# Laplacian of a whole complex: a triangle with a pendant edge.
x = SimplicialComplex(
    [1, 2, 3, 4],
    {(1, 2): w12, (1, 3): w13, (2, 3): w23, (3, 4): 2.0},
    [(1, 2, 3)],
)
print("\nComplex Laplacian (triangle + pendant edge):")
print(complex_laplacian(x).matrix)
