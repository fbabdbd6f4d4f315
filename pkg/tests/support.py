"""Shared builders for the test suite."""

from __future__ import annotations

import random

from conic_forge.brauer import Component, Curve, DiscriminantGraph


def random_graph(rng: random.Random, n_max: int = 10) -> DiscriminantGraph:
    n = rng.randint(1, n_max)
    comps = [Component(f"S{k}", True) for k in range(n)]
    curves = []
    if n > 1:
        for k in range(rng.randint(0, 2 * n)):
            i, j = rng.sample(range(n), 2)
            curves.append(Curve(i, j, f"C{k}", rng.randint(0, 1), rng.randint(0, 1),
                                rng.random() < 0.5, rng.random() < 0.5, rng.random() < 0.8))
    return DiscriminantGraph(comps, curves)


def hpt_model_graph() -> DiscriminantGraph:
    comps = [Component("D+", True), Component("D-", True)]
    names = ("M1", "M2", "M3", "L1", "L2", "L3")
    curves = [Curve(0, 1, nm, 0, 0, True, True, True) for nm in names]
    return DiscriminantGraph(comps, curves)


COMBINE_SHAPES = {
    # A type, deg c, deg b
    "cayley": ((1, 1, 1), 3, 4),
    "quadric": ((2, 2, 2), 3, 2),
    "unbalanced": ((3, 1, 1), 2, 2),
}


def random_graded_matrix(rng: random.Random, dtype, p: int, variables=("S", "T", "U", "V")):
    from conic_forge.conic import GradedConicBundle
    from conic_forge.poly import random_poly

    n = len(dtype)
    M = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = random_poly(variables, p, (dtype[i] + dtype[j]) // 2, rng)
    return GradedConicBundle(tuple(tuple(r) for r in M))


def combine_instance(rng: random.Random, shape: str, p: int = 10007):
    from conic_forge.poly import random_poly

    dtype, dc, db = COMBINE_SHAPES[shape]
    A = random_graded_matrix(rng, dtype, p)
    c = random_poly(A.variables, p, dc, rng)
    b = random_poly(A.variables, p, db, rng)
    return A, b, c
