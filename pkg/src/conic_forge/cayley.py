"""The Cayley cubic as the image of P^2 under cubics through six points.

Four lines L_1..L_4 in general position meet in six base points E_ij.  The
cubics Y_i (product of the lines other than L_{i+1}) span the system of
cubics through those points; suitable signed sums X_0..X_3 map P^2 onto the
four-nodal cubic surface det M = 0, M the standard symmetric matrix.

Plane curves are tracked by their class on the six-point blowup; a type
(b1, b2, b3) prescribes multiplicities b1 at E14, E23, b2 at E24, E13 and
b3 at E34, E12.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .conic import GradedConicBundle, adjugate, det_matrix
from .gf import inv_int
from .linalg import nullspace
from .poly import (P2_VARS, X_VARS, MultiPoly, ProjPoint, parse, proportional, restrict_to_line)


class CayleyError(ValueError):
    pass


class DegenerateConfig(CayleyError):
    pass


class NotContact(CayleyError):
    pass


PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
# base point -> index of b in the type triple
TYPE_SLOT = {(1, 4): 0, (2, 3): 0, (2, 4): 1, (1, 3): 1, (3, 4): 2, (1, 2): 2}
# order of the general class vector (alpha; b12, b34, b13, b24, b14, b23)
BETA_ORDER = ((1, 2), (3, 4), (1, 3), (2, 4), (1, 4), (2, 3))
NODE_MATRIX = (
    (1, -1, 0, -1, 0, -1, 0),
    (1, -1, 0, 0, -1, 0, -1),
    (1, 0, -1, -1, 0, 0, -1),
    (1, 0, -1, 0, -1, -1, 0),
)
# X = SIGNS * Y
SIGNS = ((-1, 1, 1, 1), (-1, -1, -1, 1), (1, -1, 1, 1), (1, 1, -1, 1))


def linear_coeffs(L: MultiPoly) -> tuple[int, ...]:
    if L.degree != 1:
        raise DegenerateConfig(f"{L} is not linear")
    n = L.nvars
    return tuple(L.terms.get(tuple(1 if j == i else 0 for j in range(n)), 0) for i in range(n))


def cross(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, int, int]:
    return ((a[1] * b[2] - a[2] * b[1]) % p, (a[2] * b[0] - a[0] * b[2]) % p, (a[0] * b[1] - a[1] * b[0]) % p)


def line_through(P: ProjPoint, Q: ProjPoint) -> MultiPoly:
    c = cross(P.coords, Q.coords, P.p)
    if not any(c):
        raise DegenerateConfig("points coincide")
    return MultiPoly.linear(c, P2_VARS, P.p)


def standard_cayley_matrix(p: int) -> list[list[MultiPoly]]:
    x0, x1, x2, x3 = MultiPoly.gens(X_VARS, p)
    return [[x0, x1, x2], [x1, x0, x3], [x2, x3, x0]]


@dataclass
class LineConfig:
    """Four lines in general position and a contact line in P^2."""

    p: int
    lines: tuple
    contact: MultiPoly | None = None
    _base: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.lines = tuple(self.lines)
        if len(self.lines) != 4:
            raise DegenerateConfig("exactly four lines are needed")
        coeffs = [linear_coeffs(L) for L in self.lines]
        base = {}
        for i, j in PAIRS:
            c = cross(coeffs[i - 1], coeffs[j - 1], self.p)
            if not any(c):
                raise DegenerateConfig(f"lines L{i} and L{j} coincide")
            base[(i, j)] = ProjPoint(c, self.p)
        if len(set(base.values())) != 6:
            raise DegenerateConfig("three of the lines are concurrent")
        self._base = base
        if self.contact is not None:
            self.check_contact(self.contact)

    @property
    def base_points(self) -> dict:
        return dict(self._base)

    def base_point(self, i: int, j: int) -> ProjPoint:
        return self._base[(min(i, j), max(i, j))]

    def check_contact(self, Lc: MultiPoly):
        c = linear_coeffs(Lc)
        for L in self.lines:
            if proportional(L, Lc)[0]:
                raise DegenerateConfig("contact line coincides with one of the lines")
        for key, P in self._base.items():
            if Lc.eval_int(P.coords) == 0:
                raise DegenerateConfig(f"contact line passes through base point E{key[0]}{key[1]}")
        return c

    def with_contact(self, Lc: MultiPoly) -> "LineConfig":
        return LineConfig(self.p, self.lines, Lc)

    def product_of_lines(self) -> MultiPoly:
        L = self.lines
        return L[0] * L[1] * L[2] * L[3]

    def contact_points(self) -> dict:
        """L_c n L_i for i = 1..4."""
        if self.contact is None:
            raise DegenerateConfig("no contact line")
        c = linear_coeffs(self.contact)
        return {i + 1: ProjPoint(cross(c, linear_coeffs(L), self.p), self.p) for i, L in enumerate(self.lines)}

    def to_record(self) -> dict:
        rec = {"p": self.p, "lines": [L.format() for L in self.lines]}
        if self.contact is not None:
            rec["contact"] = self.contact.format()
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "LineConfig":
        p = int(rec["p"])
        lines = [parse(s, P2_VARS, p) for s in rec["lines"]]
        contact = parse(rec["contact"], P2_VARS, p) if rec.get("contact") else None
        return cls(p, tuple(lines), contact)

    def dumps(self) -> str:
        return json.dumps(self.to_record(), indent=2, sort_keys=True)


def random_line_config(p: int, rng: random.Random, attempts: int = 100) -> LineConfig:
    for _ in range(attempts):
        lines = [MultiPoly.linear([rng.randrange(p) for _ in range(3)], P2_VARS, p) for _ in range(4)]
        if any(L.is_zero() for L in lines):
            continue
        try:
            return LineConfig(p, tuple(lines))
        except DegenerateConfig:
            continue
    raise DegenerateConfig("could not draw lines in general position")


def normalized_lines(cfg: LineConfig) -> tuple[MultiPoly, ...]:
    """Rescale the lines so that L1 - L2 - L3 - L4 = 0.

    Four lines in P^2 satisfy one linear relation c1 L1 + ... + c4 L4 = 0 with
    all c_i nonzero (general position); the signed sums defining X_0..X_3 only
    give the Cayley cubic for this normalisation.
    """
    p = cfg.p
    coeffs = [linear_coeffs(L) for L in cfg.lines]
    rows = [[coeffs[k][i] for k in range(4)] for i in range(3)]
    kernel = nullspace(rows, 4, p)
    if len(kernel) != 1 or not all(kernel[0]):
        raise DegenerateConfig("lines do not satisfy a unique relation with nonzero coefficients")
    c = kernel[0]
    out = [cfg.lines[0].scale(c[0])] + [cfg.lines[k].scale(-c[k]) for k in range(1, 4)]
    return tuple(out)


def cayley_parametrization(cfg: LineConfig) -> tuple[MultiPoly, ...]:
    """The cubics X_0..X_3 mapping P^2 onto the Cayley cubic."""
    L = normalized_lines(cfg)
    Y = []
    for i in range(4):
        others = [L[j] for j in range(4) if j != i]
        Y.append(others[0] * others[1] * others[2])
    X = []
    for row in SIGNS:
        acc = Y[0].scale(row[0])
        for s, y in zip(row[1:], Y[1:]):
            acc = acc + y.scale(s)
        X.append(acc)
    M = standard_cayley_matrix(cfg.p)
    if not det_matrix(M).substitute(X).is_zero():
        raise DegenerateConfig("parametrization does not land on the Cayley cubic")
    return tuple(X)


def cayley_nodes(p: int) -> list[ProjPoint]:
    """Images of the four contracted lines: the nodes of det M."""
    return sorted(ProjPoint([row[k] for row in SIGNS], p) for k in range(4))


@dataclass(frozen=True)
class CayleyBundle:
    """A = P M P^t for an invertible scalar P; S = P^{-1} satisfies S A S^t = M."""

    A: GradedConicBundle
    P: tuple
    S: tuple

    def to_record(self) -> dict:
        return {"A": self.A.to_record(), "P": [list(r) for r in self.P], "S": [list(r) for r in self.S]}


def scalar_inverse3(P: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    import flint

    M = flint.nmod_mat([list(r) for r in P], p)
    if M.det() == 0:
        raise DegenerateConfig("matrix is singular")
    inv = M.inv()
    return [[int(inv[i, j]) for j in range(3)] for i in range(3)]


def congruent_cayley(p: int, P: Sequence[Sequence[int]]) -> CayleyBundle:
    M = standard_cayley_matrix(p)
    S = scalar_inverse3(P, p)
    A = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            acc = MultiPoly.zero(X_VARS, p)
            for k in range(3):
                for l in range(3):
                    c = P[i][k] * P[j][l] % p
                    if c:
                        acc = acc + M[k][l].scale(c)
            A[i][j] = acc
    bundle = GradedConicBundle(tuple(tuple(r) for r in A))
    return CayleyBundle(bundle, tuple(tuple(r) for r in P), tuple(tuple(r) for r in S))


def random_congruent_cayley(p: int, rng: random.Random) -> CayleyBundle:
    while True:
        P = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        try:
            return congruent_cayley(p, P)
        except DegenerateConfig:
            continue


# -- curve classes ---------------------------------------------------------------

@dataclass(frozen=True)
class PlaneCurveClass:
    """alpha H - sum beta_ij E_ij; betas keyed by base-point pair."""

    alpha: int
    betas: tuple  # in BETA_ORDER

    @classmethod
    def from_type(cls, b: Sequence[int]) -> "PlaneCurveClass":
        b1, b2, b3 = b
        values = {(1, 4): b1, (2, 3): b1, (2, 4): b2, (1, 3): b2, (3, 4): b3, (1, 2): b3}
        return cls(b1 + b2 + b3, tuple(values[k] for k in BETA_ORDER))

    def beta(self, i: int, j: int) -> int:
        return self.betas[BETA_ORDER.index((min(i, j), max(i, j)))]

    def vector(self) -> tuple:
        return (self.alpha,) + tuple(self.betas)


def class_invariants(b: Sequence[int]) -> dict:
    """Degree, arithmetic genus and expected moduli of the image of a type-(b1,b2,b3) curve."""
    if len(b) != 3 or any(x < 0 for x in b) or not any(b):
        raise ValueError("type must be three non-negative integers, not all zero")
    n = sum(b)
    ga = comb(n, 2) - sum(x * x for x in b) + 1
    return {"degree": n, "arithmetic_genus": ga, "expected_moduli": n + ga}


def expected_moduli_by_count(b: Sequence[int]) -> int:
    """Plane-curve count: binom(n+2, 2) - 2 sum binom(b_i+1, 2), each b_i occurring at two points."""
    n = sum(b)
    return comb(n + 2, 2) - 2 * sum(comb(x + 1, 2) for x in b)


def avoids_nodes(c: PlaneCurveClass) -> bool:
    """Strict transform meets none of the contracted lines."""
    v = c.vector()
    return all(sum(a * x for a, x in zip(row, v)) == 0 for row in NODE_MATRIX)


def type_to_linear_conditions(b: Sequence[int], cfg: LineConfig) -> dict:
    """Plane degree and (base point, multiplicity) conditions for type b."""
    conds = []
    for pair in ((1, 4), (2, 3), (2, 4), (1, 3), (3, 4), (1, 2)):
        m = b[TYPE_SLOT[pair]]
        if m:
            conds.append({"name": f"E{pair[0]}{pair[1]}", "point": cfg.base_point(*pair), "multiplicity": m})
    return {"degree": sum(b), "conditions": conds,
            "equations": sum(comb(c["multiplicity"] + 1, 2) for c in conds)}


# -- contact quadrics ---------------------------------------------------------------

def quadric_gram(q: MultiPoly) -> list[list[int]]:
    """Symmetric matrix G with q = x^t G x (needs p odd)."""
    p = q.p
    n = q.nvars
    half = inv_int(2, p)
    G = [[0] * n for _ in range(n)]
    for e, c in q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            G[i][i] = c
        else:
            G[i][j] = G[j][i] = c * half % p
    return G


def contact_line_from_minor(A: GradedConicBundle, cfg: LineConfig, which: int = 0,
                            X: Sequence[MultiPoly] | None = None) -> dict:
    """The diagonal adjugate entry q and the line L_c with q(phi) = kappa L_c^2 L_1 L_2 L_3 L_4."""
    X = X or cayley_parametrization(cfg)
    adj = adjugate(A)
    qbar = adj[which][which]
    pull = qbar.substitute(X)
    prod = cfg.product_of_lines()
    try:
        quot = pull.exact_div(prod)
    except Exception as exc:
        raise NotContact(f"pullback of the minor is not divisible by L1 L2 L3 L4: {exc}") from exc
    if quot.is_zero():
        raise NotContact("the minor vanishes on the image of the parametrization")
    G = quadric_gram(quot)
    row = next((r for r in G if any(r)), None)
    Lc = MultiPoly.linear(row, P2_VARS, cfg.p)
    lead = next(c for c in linear_coeffs(Lc) if c)
    Lc = Lc.scale(inv_int(lead, cfg.p))
    ok, kappa = proportional(quot, Lc * Lc)
    if not ok:
        raise NotContact("quotient of the pulled-back minor is not the square of a line")
    return {"qbar": qbar, "contact": Lc, "kappa": int(kappa), "pullback": pull}


def points_on_line(L: MultiPoly, count: int | None = None):
    """F_p-points of a line, in a fixed order."""
    p = L.p
    c = linear_coeffs(L)
    # two independent points spanning the line
    basis = nullspace([list(c)], 3, p)
    A, B = ProjPoint(basis[0], p), ProjPoint(basis[1], p)
    out = [A]
    for t in range(p):
        out.append(ProjPoint([(t * a + b) % p for a, b in zip(A.coords, B.coords)], p))
        if count is not None and len(out) >= count:
            break
    return out


def line_parameter_points(L: MultiPoly) -> tuple[ProjPoint, ProjPoint]:
    p = L.p
    basis = nullspace([list(linear_coeffs(L))], 3, p)
    return ProjPoint(basis[0], p), ProjPoint(basis[1], p)


def restriction_to(L: MultiPoly, f: MultiPoly) -> MultiPoly:
    A, B = line_parameter_points(L)
    return restrict_to_line(f, A, B)

