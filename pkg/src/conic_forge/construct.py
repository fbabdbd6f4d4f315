"""Linear systems of plane curves and the determinantal constructions built on them.

* ``solve_linear_system`` -- forms of a given degree with prescribed
  multiplicities at points (and optionally prescribed restrictions to lines);
* ``combine`` -- glue a 3x3 bundle A and a 2x2 block [[b, c], [c, d]] into N
  with det N = -det A det B, d the lower-right minor of A;
* ``sqrt_mod_contact`` -- a square root of f modulo s^2, s the contact line;
* ``determinantal_rep`` -- f = r^2 - q t;
* ``lift_to_P3`` -- preimages of plane forms under the Cayley parametrization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .cayley import TYPE_SLOT, LineConfig, line_parameter_points
from .conic import GradedConicBundle, adjugate, det_matrix, discriminant
from .linalg import (Inconsistent, form_from_vector, hasse_row, multiplicity_at, multiplicity_rows, nullspace,
                     rank, solve_affine)
from .poly import (P2_VARS, X_VARS, MultiPoly, NotAPerfectSquare, NotDivisible, ProjPoint, monomials,
                   restrict_to_line, sqrt_binary_form)


class ConstructError(ValueError):
    pass


class NotNodalOnContact(ConstructError):
    pass


class LiftInfeasible(ConstructError):
    pass


class DivisibilityFailure(ConstructError):
    pass


class NotInImage(ConstructError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class IdentityFailure(ConstructError):
    pass


@dataclass
class LinearSystem:
    """Forms of a given degree with multiplicity conditions and fixed restrictions to lines.

    ``restrictions`` holds (A, B, h): the form restricted to the line through
    A and B, parametrised as l*A + m*B, must equal the binary form h.
    """

    degree: int
    conditions: list = field(default_factory=list)
    restrictions: list = field(default_factory=list)
    variables: tuple = P2_VARS

    def exponents(self) -> list[tuple]:
        return monomials(len(self.variables), self.degree)

    def homogeneous_rows(self, p: int) -> list[list[int]]:
        exps = self.exponents()
        rows = []
        for P, m in self.conditions:
            rows += multiplicity_rows(len(self.variables), self.degree, P.coords, m, p, exps)
        for A, B, _h in self.restrictions:
            rows += restriction_rows(exps, A, B, self.variables, p)[0]
        return rows

    def rhs(self, p: int) -> list[int]:
        exps = self.exponents()
        out = []
        for P, m in self.conditions:
            out += [0] * comb(m - 1 + len(self.variables) - 1, len(self.variables) - 1)
        for A, B, h in self.restrictions:
            _, keys = restriction_rows(exps, A, B, self.variables, p)
            out += [h.terms.get(k, 0) for k in keys]
        return out

    def equation_count(self) -> int:
        return sum(comb(m + 1, 2) for _, m in self.conditions)


def restriction_rows(exps, A: ProjPoint, B: ProjPoint, variables, p) -> tuple[list[list[int]], list[tuple]]:
    """Rows expressing the coefficients of f(l A + m B) in terms of the coefficients of f."""
    degree = sum(exps[0])
    keys = [(degree - k, k) for k in range(degree + 1)]
    index = {k: i for i, k in enumerate(keys)}
    cols = []
    for e in exps:
        r = restrict_to_line(MultiPoly(variables, p, {e: 1}), A, B)
        col = [0] * len(keys)
        for k, c in r.terms.items():
            col[index[k]] = c
        cols.append(col)
    rows = [[cols[j][i] for j in range(len(exps))] for i in range(len(keys))]
    return rows, keys


def solve_linear_system(system: LinearSystem, p: int) -> list[MultiPoly]:
    """Basis (reduced echelon, deterministic) of the homogeneous system; restrictions must be absent."""
    if system.restrictions:
        raise ValueError("use solve_affine_system for prescribed restrictions")
    exps = system.exponents()
    basis = nullspace(system.homogeneous_rows(p), len(exps), p)
    return [form_from_vector(v, exps, system.variables, p) for v in basis]


def solve_affine_system(system: LinearSystem, p: int) -> tuple[MultiPoly, list[MultiPoly]]:
    """Particular solution (free variables zero) and the homogeneous kernel."""
    exps = system.exponents()
    rows = system.homogeneous_rows(p)
    rhs = system.rhs(p)
    try:
        x = solve_affine(rows, rhs, len(exps), p)
    except Inconsistent as exc:
        raise LiftInfeasible(f"no form of degree {system.degree} meets the conditions") from exc
    kernel = nullspace(rows, len(exps), p)
    return (form_from_vector(x, exps, system.variables, p),
            [form_from_vector(v, exps, system.variables, p) for v in kernel])


def base_point_conditions(cfg: LineConfig, b: Sequence[int]) -> list[tuple[ProjPoint, int]]:
    return [(cfg.base_point(*pair), b[slot]) for pair, slot in TYPE_SLOT.items() if b[slot] > 0]


def genericity_check(cfg: LineConfig, d: int = 6) -> dict:
    """Surjectivity of forms of degree 3d/2-6 onto the base points with multiplicity d/2-2."""
    p = cfg.p
    n, m = 3 * d // 2 - 6, d // 2 - 2
    if n < 0 or m <= 0:
        return {"surjective": True, "rank": 0, "conditions": 0, "kernel_witness": None}
    exps = monomials(3, n)
    rows = []
    for P in cfg.base_points.values():
        rows += multiplicity_rows(3, n, P.coords, m, p, exps)
    r = rank(rows, len(exps), p)
    witness = None
    if r < len(rows):
        transposed = [[rows[i][j] for i in range(len(rows))] for j in range(len(exps))]
        witness = nullspace(transposed, len(rows), p)[0]
    return {"surjective": r == len(rows), "rank": r, "conditions": len(rows), "kernel_witness": witness}


# -- combining determinants ---------------------------------------------------------

def combine(A: GradedConicBundle, b: MultiPoly, c: MultiPoly) -> dict:
    """N = [[c^2 a00 - b det A, c a01, c a02], [c a01, a11, a12], [c a02, a12, a22]]."""
    E = A.entries
    detA = discriminant(A)
    d = adjugate(A)[0][0]
    if not c.is_zero() and not b.is_zero():
        if b.degree + detA.degree != 2 * c.degree + E[0][0].degree:
            raise ConstructError(f"degree identity fails: {b.degree}+{detA.degree} != 2*{c.degree}+{E[0][0].degree}")
    n00 = c * c * E[0][0] - b * detA
    N = [[n00, c * E[0][1], c * E[0][2]],
         [c * E[0][1], E[1][1], E[1][2]],
         [c * E[0][2], E[1][2], E[2][2]]]
    detB = b * d - c * c
    detN = det_matrix(N)
    if not (detN + detA * detB).is_zero():
        raise IdentityFailure("det N + det A det B is not zero")
    bundle = GradedConicBundle(tuple(tuple(r) for r in N))
    return {"N": bundle, "B": [[b, c], [c, d]], "det_N": detN, "det_B": detB}


# -- square root modulo the contact line ------------------------------------------------

def sqrt_mod_contact(f: MultiPoly, cfg: LineConfig, nodes: Sequence[ProjPoint], d: int) -> dict:
    """g of degree 3d/2 with s^2 | f - g^2 and multiplicity d/2 at the six base points."""
    p = f.p
    s = cfg.contact
    if s is None:
        raise ConstructError("line configuration has no contact line")
    if d % 2 or d < 4:
        raise ConstructError("d must be even and at least 4")
    if p <= 3 * d:
        raise ConstructError(f"p = {p} must exceed 3d = {3 * d}")
    n = 3 * d // 2
    if f.degree != 3 * d:
        raise ConstructError(f"f has degree {f.degree}, expected {3 * d}")
    for P in nodes:
        if s.eval_int(P.coords) or multiplicity_at(f, P.coords, cap=2) < 2:
            raise NotNodalOnContact(f"f is not singular at the prescribed point {P} of the contact line")
    A, B = line_parameter_points(s)
    h = restrict_to_line(f, A, B)
    if h.is_zero():
        raise NotNodalOnContact("f vanishes on the contact line")
    try:
        e, c = sqrt_binary_form(h)
    except NotAPerfectSquare as exc:
        raise NotNodalOnContact(f"restriction of f to the contact line is not a square: {exc}") from exc
    if int(c) != 1:
        raise NotNodalOnContact(f"restriction of f to the contact line is {int(c)} times a square, {int(c)} a non-residue")
    base = list(cfg.base_points.values())
    # (a) g0 with fixed restriction and multiplicity d/2 at the base points
    sys_a = LinearSystem(n, [(P, d // 2) for P in base], [(A, B, e)])
    g0, _ = solve_affine_system(sys_a, p)
    # (b) divide out s and the four lines
    try:
        f1 = (f - g0 * g0).exact_div(s)
        f1p = f1.exact_div(cfg.product_of_lines())
    except NotDivisible as exc:
        raise DivisibilityFailure(f"step (b): {exc}") from exc
    # (c) g1' on the line: f1' / (2 g0), then any plane lift
    target = restrict_to_line(f1p, A, B)
    try:
        q = target.exact_div(e.scale(2))
    except NotDivisible as exc:
        raise DivisibilityFailure(f"step (c): g0 does not divide f1' on the contact line: {exc}") from exc
    g1p, _ = solve_affine_system(LinearSystem(n - 5, [], [(A, B, q)]), p)
    # (d) g2' making g1' + s g2' of multiplicity d/2 - 2 at the base points
    m = d // 2 - 2
    g2p = MultiPoly.zero(P2_VARS, p)
    if m > 0:
        g2p = _solve_correction(g1p, s, n - 6, base, m, p)
    # (e) assemble
    prod = cfg.product_of_lines()
    g = g0 + s * g1p * prod
    if not g2p.is_zero():
        g = g + s * s * g2p * prod
    try:
        (f - g * g).exact_div(s * s)
    except NotDivisible as exc:
        raise DivisibilityFailure(f"s^2 does not divide f - g^2: {exc}") from exc
    mults = [multiplicity_at(g, P.coords, cap=d // 2) for P in base]
    if any(mm != d // 2 for mm in mults):
        raise DivisibilityFailure(f"multiplicities of g at the base points are {mults}, expected {d // 2}")
    return {"g": g, "g0": g0, "g1p": g1p, "g2p": g2p, "f1p": f1p, "base_multiplicities": mults}


def _solve_correction(g1p: MultiPoly, s: MultiPoly, degree: int, points, m: int, p: int) -> MultiPoly:
    exps = monomials(3, degree)
    shifted = [(s * MultiPoly(P2_VARS, p, {e: 1})) for e in exps]
    rows, rhs = [], []
    for P in points:
        for beta in monomials(3, m - 1):
            rows.append([_hasse_value(h, P.coords, beta) for h in shifted])
            rhs.append(-_hasse_value(g1p, P.coords, beta) % p)
    try:
        x = solve_affine(rows, rhs, len(exps), p)
    except Inconsistent as exc:
        raise LiftInfeasible("no correction term g2' exists (genericity fails)") from exc
    return form_from_vector(x, exps, P2_VARS, p)


def _hasse_value(f: MultiPoly, point, beta) -> int:
    exps = list(f.terms)
    row = hasse_row(exps, point, beta, f.p)
    return sum(a * f.terms[e] for a, e in zip(row, exps)) % f.p


def determinantal_rep(f: MultiPoly, q: MultiPoly, r: MultiPoly, cfg: LineConfig | None = None,
                      d: int | None = None) -> dict:
    """t = -(f - r^2)/q, so that det [[q, r], [r, t]] = -f."""
    try:
        t = -((f - r * r).exact_div(q))
    except NotDivisible as exc:
        raise DivisibilityFailure(f"q does not divide f - r^2: {exc}") from exc
    if not (q * t - r * r + f).is_zero():
        raise IdentityFailure("q t - r^2 + f is not zero")
    out = {"t": t, "B": [[q, r], [r, t]]}
    if cfg is not None and d is not None and not t.is_zero():
        mults = [multiplicity_at(t, P.coords, cap=d - 2) for P in cfg.base_points.values()]
        if t.degree != 3 * d - 6 or any(m != d - 2 for m in mults):
            raise DivisibilityFailure(f"t has degree {t.degree} and base multiplicities {mults}")
        out["base_multiplicities"] = mults
    return out


def lift_to_P3(g: MultiPoly, X: Sequence[MultiPoly], m: int) -> dict:
    """G of degree m on P^3 with G(X_0, ..., X_3) = g; echelon representative."""
    p = g.p
    exps3 = monomials(4, m)
    exps2 = monomials(3, 3 * m)
    index = {e: i for i, e in enumerate(exps2)}
    cols = []
    for e in exps3:
        pull = MultiPoly(X_VARS, p, {e: 1}).substitute(X)
        col = [0] * len(exps2)
        for k, c in pull.terms.items():
            col[index[k]] = c
        cols.append(col)
    rows = [[cols[j][i] for j in range(len(exps3))] for i in range(len(exps2))]
    if not g.is_zero() and g.degree != 3 * m:
        raise NotInImage(f"g has degree {g.degree}, expected {3 * m}")
    rhs = [g.terms.get(e, 0) for e in exps2]
    try:
        x = solve_affine(rows, rhs, len(exps3), p)
    except Inconsistent as exc:
        raise NotInImage("g is not a pullback of a form of degree m", witness=exc.certificate) from exc
    kernel = nullspace(rows, len(exps3), p)
    G = form_from_vector(x, exps3, X_VARS, p)
    return {"G": G, "kernel_dimension": len(kernel),
            "kernel": [form_from_vector(v, exps3, X_VARS, p) for v in kernel]}
