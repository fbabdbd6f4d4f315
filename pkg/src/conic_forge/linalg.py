"""Exact linear algebra over F_p and the linear-algebra certificates built on it.

Matrices are lists of integer rows; FLINT's ``nmod_mat`` does the
elimination.  On top of that sit

* multiplicity conditions for linear systems of forms (Hasse derivatives),
* Macaulay-matrix certificates: ``g`` vanishes on ``V(I)`` and ``V(I)`` is empty,
  decided by comparing ranks of degree slices of ideals.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

import flint

from .poly import MultiPoly, monomials


class Inconsistent(ArithmeticError):
    """A linear system with no solution; ``certificate`` is y with yA = 0, y.b != 0."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


def to_mat(rows: Sequence[Sequence[int]], ncols: int, p: int):
    if not rows:
        return flint.nmod_mat(0, ncols, [], p)
    return flint.nmod_mat([list(r) for r in rows], p)


def _table(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in M.table()] if M.nrows() else []


def rank(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    if not rows:
        return 0
    return to_mat(rows, ncols, p).rank()


def rref(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Nonzero rows of the reduced row echelon form."""
    if not rows:
        return []
    R, r = to_mat(rows, ncols, p).rref()
    return _table(R)[:r]


def nullspace(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : A x = 0}, in reduced echelon form (deterministic)."""
    if ncols == 0:
        return []
    if not rows:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    X, nullity = to_mat(rows, ncols, p).nullspace()
    basis = [[int(X[i, j]) for i in range(ncols)] for j in range(nullity)]
    return rref(basis, ncols, p)


def solve_affine(rows: Sequence[Sequence[int]], rhs: Sequence[int], ncols: int, p: int) -> list[int]:
    """A particular solution of A x = b, free variables set to zero."""
    aug = [list(r) + [b % p] for r, b in zip(rows, rhs)]
    R = rref(aug, ncols + 1, p)
    x = [0] * ncols
    for row in R:
        lead = next(i for i, v in enumerate(row) if v)
        if lead == ncols:
            raise Inconsistent("linear system is inconsistent", _fredholm_witness(rows, rhs, ncols, p))
        x[lead] = row[ncols]
    return x


def _fredholm_witness(rows, rhs, ncols, p):
    """y with y A = 0 and y b = 1."""
    m = len(rows)
    transposed = [[rows[i][j] for i in range(m)] for j in range(ncols)]
    for y in nullspace(transposed, m, p):
        s = sum(a * b for a, b in zip(y, rhs)) % p
        if s:
            inv = pow(s, -1, p)
            return [v * inv % p for v in y]
    return None


def mat_vec(rows, x, p):
    return [sum(a * b for a, b in zip(r, x)) % p for r in rows]


# -- conditions on forms -----------------------------------------------------------

def hasse_row(exps: Sequence[tuple], point: Sequence[int], beta: tuple, p: int) -> list[int]:
    """Row giving the Hasse derivative D^beta of a form at ``point``, per monomial."""
    row = []
    for a in exps:
        v = 1
        for ai, bi, x in zip(a, beta, point):
            if ai < bi:
                v = 0
                break
            v = v * comb(ai, bi) * pow(x, ai - bi, p) % p
        row.append(v)
    return row


def multiplicity_rows(nvars: int, degree: int, point: Sequence[int], mult: int, p: int,
                      exps: Sequence[tuple] | None = None) -> list[list[int]]:
    """Linear conditions for a form of the given degree to have multiplicity >= mult at point.

    Uses all Hasse derivatives of order mult-1; for forms this is equivalent to
    the vanishing of all derivatives of order < mult (Euler), and gives
    binom(mult+1, 2) rows in the plane.
    """
    if mult <= 0:
        return []
    exps = exps if exps is not None else monomials(nvars, degree)
    return [hasse_row(exps, point, beta, p) for beta in monomials(nvars, mult - 1)]


def form_from_vector(vec: Sequence[int], exps: Sequence[tuple], variables, p) -> MultiPoly:
    return MultiPoly(variables, p, {e: c for e, c in zip(exps, vec) if c % p})


def vector_from_form(f: MultiPoly, exps: Sequence[tuple]) -> list[int]:
    index = {e: i for i, e in enumerate(exps)}
    v = [0] * len(exps)
    for e, c in f.terms.items():
        v[index[e]] = c
    return v


def multiplicity_at(f: MultiPoly, point: Sequence[int], cap: int | None = None) -> int:
    """Largest m with all Hasse derivatives of order < m vanishing at point."""
    p = f.p
    if f.is_zero():
        raise ValueError("zero form has infinite multiplicity")
    cap = f.degree if cap is None else cap
    exps = list(f.terms)
    coeffs = [f.terms[e] for e in exps]
    for order in range(cap + 1):
        for beta in monomials(f.nvars, order):
            row = hasse_row(exps, point, beta, p)
            if sum(a * b for a, b in zip(row, coeffs)) % p:
                return order
    return cap + 1


# -- Macaulay certificates -----------------------------------------------------------

def _macaulay_rows(gens: Sequence[MultiPoly], degree: int, index: dict) -> list[list[int]]:
    n = len(index)
    rows = []
    for g in gens:
        if g.is_zero() or g.degree > degree:
            continue
        for m in monomials(g.nvars, degree - g.degree):
            row = [0] * n
            for e, c in g.terms.items():
                row[index[tuple(a + b for a, b in zip(e, m))]] = c
            rows.append(row)
    return rows


def ideal_slice_rank(gens: Sequence[MultiPoly], degree: int) -> tuple[int, int]:
    """(rank of the degree slice of the ideal, number of monomials of that degree)."""
    g0 = next(g for g in gens if not g.is_zero())
    exps = monomials(g0.nvars, degree)
    index = {e: i for i, e in enumerate(exps)}
    rows = _macaulay_rows(gens, degree, index)
    return rank(rows, len(exps), g0.p), len(exps)


def empty_locus_degree(gens: Sequence[MultiPoly], max_degree: int) -> int | None:
    """Smallest degree D <= max_degree at which (gens)_D is everything, else None.

    A full slice proves that the gens have no common zero in projective space
    over the algebraic closure.
    """
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        return None
    if any(g.degree == 0 for g in nonzero):
        return 0
    start = min(g.degree for g in nonzero)
    for D in range(start, max_degree + 1):
        r, n = ideal_slice_rank(nonzero, D)
        if r == n:
            return D
    return None


def vanishes_on(g: MultiPoly, gens: Sequence[MultiPoly], extra: int) -> bool:
    """Certificate that g vanishes on V(gens): every m*g with deg m = extra lies in the ideal."""
    if g.is_zero():
        return True
    D = g.degree + extra
    exps = monomials(g.nvars, D)
    index = {e: i for i, e in enumerate(exps)}
    rows = _macaulay_rows([h for h in gens if not h.is_zero()], D, index)
    r0 = rank(rows, len(exps), g.p)
    rows += _macaulay_rows([g], D, index)
    return rank(rows, len(exps), g.p) == r0


def all_vanish_on(gs: Sequence[MultiPoly], gens: Sequence[MultiPoly], degree: int) -> bool:
    """vanishes_on for several forms at once, all multiplied up to the same total degree."""
    gs = [g for g in gs if not g.is_zero()]
    if not gs:
        return True
    if any(g.degree > degree for g in gs):
        return False
    exps = monomials(gs[0].nvars, degree)
    index = {e: i for i, e in enumerate(exps)}
    rows = _macaulay_rows([h for h in gens if not h.is_zero()], degree, index)
    r0 = rank(rows, len(exps), gs[0].p)
    rows += _macaulay_rows(gs, degree, index)
    return rank(rows, len(exps), gs[0].p) == r0


def projective_dimension_count(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)
