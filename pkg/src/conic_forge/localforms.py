"""Local structure of a conic bundle along the intersection of two discriminant components.

Points of D = X' n X'' fall into three cases: D smooth with rank 2, D nodal
with rank 2, D nodal with rank 1.  Local analytic claims are decided through
2-jets (gradients and Hessians) of the polynomial data; blowups are not
executed, only their numerical shadows (Hessian ranks of the normal forms)
are computed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import flint

from . import curves as cv
from .conic import GradedConicBundle, det_matrix, minor, scalar_rank
from .linalg import all_vanish_on, empty_locus_degree, nullspace, vanishes_on
from .poly import MultiPoly, ProjPoint, proportional

CASE1 = "case1_smooth_rank2"
CASE2 = "case2_node_rank2"
CASE3 = "case3_node_rank1"
OFF_TABLE = "off_table"

LOCAL_VARS = ("s", "t", "u", "x", "y", "z")
BASE_VARS = ("s", "t", "u")

BOUNDARY = ("local analytic statements are checked on 2-jets of the polynomial data; "
            "the blowups themselves are not carried out")


class LocalFormError(ValueError):
    pass


class HypothesisViolated(LocalFormError):
    pass


@dataclass
class LocalClass:
    tag: str
    evidence: dict = field(default_factory=dict)
    reason: str = ""


# -- pointwise invariants ------------------------------------------------------------------

def hessian_matrix(F: MultiPoly, P: Sequence[int]) -> list[list[int]]:
    n = F.nvars
    first = [F.diff(i) for i in range(n)]
    return [[first[i].diff(j).eval_int(P) for j in range(n)] for i in range(n)]


def hessian_rank(F: MultiPoly, P: Sequence[int]) -> int:
    """Rank of the matrix of second partials of F at P."""
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    return scalar_rank(hessian_matrix(F, coords), F.p)


def gradient_at(F: MultiPoly, P) -> list[int]:
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    return [g.eval_int(coords) for g in F.gradient()]


def _tangent_basis(grad: Sequence[int], p: int) -> list[list[int]]:
    return nullspace([list(grad)], len(grad), p)


def _restricted_rank(H: Sequence[Sequence[int]], basis: Sequence[Sequence[int]], p: int) -> int:
    """Rank of the bilinear form H on the span of basis."""
    R = [[sum(u[i] * H[i][j] * v[j] for i in range(len(u)) for j in range(len(v))) % p for v in basis]
         for u in basis]
    return scalar_rank(R, p)


def diagonalizing_congruence(a: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Invertible C with C a C^t = diag(lambda, 0, 0) for a rank-1 symmetric matrix a."""
    n = len(a)
    kernel = nullspace([list(r) for r in a], n, p)
    if len(kernel) != n - 1:
        raise HypothesisViolated("matrix does not have rank 1")
    for i in range(n):
        v = [1 if j == i else 0 for j in range(n)]
        if a[i][i] % p:
            return [v] + kernel
    raise HypothesisViolated("rank-1 symmetric matrix with zero diagonal")


def congruent(E: Sequence[Sequence[MultiPoly]], C: Sequence[Sequence[int]]) -> list[list[MultiPoly]]:
    """C E C^t for a matrix of affine polynomials."""
    n = len(E)
    p = E[0][0].p
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = MultiPoly.zero(E[0][0].variables, p, affine=True)
            for k in range(n):
                for l in range(n):
                    c = C[i][k] * C[j][l] % p
                    if c and not E[k][l].is_zero():
                        acc = acc + E[k][l].scale(c)
            out[i][j] = acc
    return out


# -- classification -----------------------------------------------------------------------

def classify_D_point(M: GradedConicBundle, Xp: MultiPoly, Xpp: MultiPoly, P) -> LocalClass:
    """Which row of the normal-form table describes the point P of D = {X' = X'' = 0}.

    M may be a graded bundle or any symmetric matrix of polynomials (affine
    model bundles included).
    """
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    if Xp.eval_int(coords) or Xpp.eval_int(coords):
        raise HypothesisViolated(f"{P} is not on both components")
    E = M.entries if isinstance(M, GradedConicBundle) else [list(r) for r in M]
    p = E[0][0].p
    det = det_matrix(E)
    ok, _ = proportional(det, Xp * Xpp)
    if not ok:
        raise HypothesisViolated("X' X'' is not proportional to det M")
    g1, g2 = gradient_at(Xp, coords), gradient_at(Xpp, coords)
    if not any(g1) or not any(g2):
        raise HypothesisViolated(f"a discriminant component is singular at {P}")
    r = scalar_rank([[e.eval_int(coords) for e in row] for row in E], p)
    if r == 0:
        raise HypothesisViolated(f"rank 0 at {P}")
    evidence = {"rank": r}
    if scalar_rank([g1, g2], p) == 2:
        evidence["D"] = "smooth"
        if r == 2:
            return LocalClass(CASE1, evidence)
        return LocalClass(OFF_TABLE, evidence, "rank 1 at a smooth point of D, but rank 2 is assumed there")
    # tangent planes agree; in an affine chart h = X'' - lam X' has zero gradient at P,
    # and D is nodal iff the Hessian of h is nondegenerate on the tangent plane of X'
    if Xp.affine:
        f1, f2, pt = Xp, Xpp, coords
    else:
        (f1, pt), (f2, _) = _affine_chart(Xp, coords), _affine_chart(Xpp, coords)
    a1, a2 = gradient_at(f1, pt), gradient_at(f2, pt)
    k = next(i for i, x in enumerate(a1) if x)
    lam = a2[k] * pow(a1[k], -1, p) % p
    h = f2 - f1.scale(lam)
    H = hessian_matrix(h, pt)
    rr = _restricted_rank(H, _tangent_basis(a1, p), p)
    evidence["tangent_hessian_rank"] = rr
    if rr < 2:
        raise HypothesisViolated(f"D is not nodal at {P}: restricted Hessian has rank {rr}")
    evidence["D"] = "node"
    return LocalClass(CASE2 if r == 2 else CASE3, evidence)


def _affine_chart(F: MultiPoly, coords: Sequence[int]):
    """F with the first nonzero coordinate of P set to 1, and the affine point."""
    p = F.p
    k = next(i for i, x in enumerate(coords) if x % p)
    inv = pow(coords[k], -1, p)
    pt = tuple(x * inv % p for i, x in enumerate(coords) if i != k)
    names = tuple(v for i, v in enumerate(F.variables) if i != k)
    if F.is_zero():
        return MultiPoly.zero(names, p, affine=True), pt
    images = []
    j = 0
    for i in range(F.nvars):
        if i == k:
            images.append(MultiPoly.constant(1, names, p, affine=True))
        else:
            images.append(MultiPoly.var(names[j], names, p, affine=True))
            j += 1
    return F.substitute(images), pt


def node_smoothness_check(M, P) -> bool:
    """The entries a, b, c of the 2x2 block after a constant congruence have independent differentials at P.

    Works in the affine chart of P, where a graded matrix becomes a matrix of
    ordinary polynomials and constant congruences are allowed.
    """
    E = M.entries if isinstance(M, GradedConicBundle) else [list(r) for r in M]
    p = E[0][0].p
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    a = [[e.eval_int(coords) for e in row] for row in E]
    if scalar_rank(a, p) != 1:
        raise HypothesisViolated(f"rank at {P} is not 1")
    if E[0][0].affine:
        Eaff, pt = E, coords
    else:
        pt = _affine_chart(E[0][0], coords)[1]
        Eaff = [[_affine_chart(e, coords)[0] for e in row] for row in E]
    C = diagonalizing_congruence(a, p)
    F = congruent(Eaff, C)
    block = [F[1][1], F[1][2], F[2][2]]
    J = [gradient_at(f, pt) if not f.is_zero() else [0] * len(pt) for f in block]
    return scalar_rank(J, p) == 3


# -- model bundles ------------------------------------------------------------------------

def _local(p: int, names=LOCAL_VARS):
    return {v: MultiPoly.var(v, names, p, affine=True) for v in names}


def normal_form(case: int, p: int) -> MultiPoly:
    """The three normal forms in the variables (s, t, u, x, y, z)."""
    g = _local(p)
    s, t, u, x, y, z = (g[v] for v in LOCAL_VARS)
    if case == 1:
        return x * x + s * t * y * y - z * z
    if case == 2:
        return x * x + s * (s + t * u) * y * y - z * z
    if case == 3:
        return x * x + (s * y * z).scale(2) + (t * y + u * z) * (t * y + u * z)
    raise ValueError("case must be 1, 2 or 3")


def model_bundle(case: int, p: int) -> list[list[MultiPoly]]:
    """Symmetric matrices over k[s, t, u] whose quadratic forms are the normal forms."""
    g = _local(p, BASE_VARS)
    s, t, u = g["s"], g["t"], g["u"]
    one = MultiPoly.constant(1, BASE_VARS, p, affine=True)
    zero = MultiPoly.zero(BASE_VARS, p, affine=True)
    if case == 1:
        return [[one, zero, zero], [zero, s * t, zero], [zero, zero, -one]]
    if case == 2:
        return [[one, zero, zero], [zero, s * (s + t * u), zero], [zero, zero, -one]]
    if case == 3:
        return [[one, zero, zero], [zero, t * t, s + t * u], [zero, s + t * u, u * u]]
    raise ValueError("case must be 1, 2 or 3")


def model_components(case: int, p: int) -> tuple[MultiPoly, MultiPoly]:
    """X' = {s = 0} and the other factor of the determinant."""
    g = _local(p, BASE_VARS)
    s, t, u = g["s"], g["t"], g["u"]
    if case == 1:
        return s, t
    if case == 2:
        return s, s + t * u
    if case == 3:
        return s, -(s + (t * u).scale(2))
    raise ValueError("case must be 1, 2 or 3")


def quadratic_form_of(Mx: Sequence[Sequence[MultiPoly]], p: int) -> MultiPoly:
    g = _local(p)
    xyz = [g["x"], g["y"], g["z"]]
    emb = [g["s"], g["t"], g["u"]]
    acc = MultiPoly.zero(LOCAL_VARS, p, affine=True)
    for i in range(3):
        for j in range(3):
            if not Mx[i][j].is_zero():
                acc = acc + Mx[i][j].substitute(emb) * xyz[i] * xyz[j]
    return acc


def model_classification(case: int, p: int) -> LocalClass:
    """classify_D_point applied to a model bundle at the origin."""
    Xp, Xpp = model_components(case, p)
    return classify_D_point(model_bundle(case, p), Xp, Xpp, (0, 0, 0))


# -- hypotheses of the CH0 theorem ----------------------------------------------------------

def _bullet(name: str, ok, evidence=None, note: str = "") -> dict:
    status = "pass" if ok is True else ("fail" if ok is False else "inconclusive")
    rec = {"name": name, "status": status, "evidence": evidence or {}}
    if note:
        rec["note"] = note
    return rec


def _independent_points(points: Sequence[ProjPoint], p: int) -> bool:
    if not points:
        return True
    return flint.nmod_mat([list(P.coords) for P in points], p).rank() == len(points)


def point_set_generators(points: Sequence[ProjPoint], p: int) -> list[MultiPoly]:
    """Quadrics cutting out at most four linearly independent points of P^3 exactly.

    With the dual basis l_i (l_i(P_j) = delta_ij, completed to a basis), the
    products l_i l_j (i < j) and the remaining l_k vanish precisely on the points.
    """
    if len(points) > 4 or not _independent_points(points, p):
        raise LocalFormError("point set must consist of at most four independent points")
    n = len(points[0].coords)
    rows = [list(P.coords) for P in points]
    # complete to a basis
    for i in range(n):
        e = [1 if j == i else 0 for j in range(n)]
        if flint.nmod_mat(rows + [e], p).rank() == len(rows) + 1:
            rows.append(e)
        if len(rows) == n:
            break
    inv = flint.nmod_mat(rows, p).inv()
    variables = points[0].coords and ("X0", "X1", "X2", "X3")[:n]
    dual = [MultiPoly.linear([int(inv[k, i]) for k in range(n)], variables, p) for i in range(n)]
    k = len(points)
    gens = [dual[i] * dual[j] for i in range(k) for j in range(i + 1, k)]
    gens += [dual[i] * dual[i] for i in range(k, n)]
    return gens


def _with_vars(fs, variables):
    return [f.with_variables(variables) for f in fs]


def surface_node_certificate(F: MultiPoly, M: GradedConicBundle, node_data: dict, rng: random.Random,
                             max_degree: int = 18) -> dict:
    """Sing(F) is a finite set of ordinary nodes, each of rank 1 for M.

    node_data is {"points": [...]} for at most four independent rational nodes, or
    {"determinantal": (b, c, q)} when F is proportional to b q - c^2 and the
    nodes are the points of V(b, c, q).
    """
    p = F.p
    grad = F.gradient()
    out = {}
    if "points" in node_data:
        pts = list(node_data["points"])
        on = all(F.eval_int(P.coords) == 0 and not any(gradient_at(F, P)) for P in pts)
        hess = [hessian_rank(F, P) for P in pts]
        gens = _with_vars(point_set_generators(pts, p), F.variables)
        D = _first_degree(lambda d: all_vanish_on(gens, [F] + grad, d), max(g.degree for g in gens), max_degree)
        ranks = [scalar_rank(M.evaluate(P), p) for P in pts]
        lemma = [node_smoothness_check(M, P) for P in pts if ranks[pts.index(P)] == 1]
        out = {"count": len(pts), "listed_points_singular": on, "hessian_ranks": hess,
               "singular_locus_within_points_degree": D, "ranks": ranks,
               "nodes": all(h == 3 for h in hess) and on and D is not None,
               "rank_one": all(r == 1 for r in ranks), "lemma_node_smooth": all(lemma)}
        return out
    b, c, q = node_data["determinantal"]
    ok, scal = proportional(F, b * q - c * c)
    J = [b.gradient(), c.gradient(), q.gradient()]
    m3 = [det_matrix([[J[r][k] for k in cols] for r in range(3)])
          for cols in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))]
    reduced = empty_locus_degree([b, c, q] + m3, max_degree)
    D = _first_degree(lambda d: all_vanish_on([b, c, q], [F] + grad, d), max(b.degree, c.degree, q.degree) + 8,
                      max_degree)
    E = M.entries
    mins = [minor(E, r, cc) for r in ((0, 1), (0, 2), (1, 2)) for cc in ((0, 1), (0, 2), (1, 2))]
    in_ideal = all(vanishes_on(m, [b, c, q], 0) for m in mins)
    rank0 = empty_locus_degree([b, c, q] + [e for e in M.upper() if not e.is_zero()], max_degree)
    out = {"count": b.degree * c.degree * q.degree, "form_matches": ok,
           "node_scheme_reduced_degree": reduced, "singular_locus_within_scheme_degree": D,
           "minors_in_ideal": in_ideal, "rank_zero_excluded_degree": rank0,
           "nodes": ok and reduced is not None and D is not None,
           "rank_one": in_ideal and rank0 is not None}
    return out


def _first_degree(test, start: int, stop: int):
    for d in range(start, stop + 1):
        if test(d):
            return d
    return None


def finite_singular_locus(F: MultiPoly, rng: random.Random, max_degree: int = 20) -> dict:
    from .pipeline import finite_locus

    return finite_locus(F.gradient(), rng, max_degree)


def thm_CH0_hypotheses(M: GradedConicBundle, Xp: MultiPoly, Xpp: MultiPoly, data: dict,
                       rng: random.Random | None = None) -> dict:
    """One record per hypothesis of the CH0-triviality theorem.

    data: {"nodes": {"X'": node_data, "X''": node_data} (see surface_node_certificate),
           "components": [{"name", "param": four binary forms, "nodes": [points],
                           "nodes_ordinary": bool, "exempt": [binary forms]}],
           "pairwise": {"ok": bool, ...}}.
    A component's "exempt" forms have as roots the parameters of its nodes and
    of its intersections with the other components.
    """
    rng = rng or random.Random(0)
    p = M.p
    comps = data["components"]
    bullets = []

    smooth = {}
    for name, F in (("X'", Xp), ("X''", Xpp)):
        for comp in comps:
            smooth[f"{name}/{comp['name']}"] = _smooth_along(F, comp["param"])
    bullets.append(_bullet("components_smooth_along_D", all(v["ok"] for v in smooth.values()), smooth))

    certs = {}
    for name, F in (("X'", Xp), ("X''", Xpp)):
        fin = finite_singular_locus(F, rng)
        cert = surface_node_certificate(F, M, data["nodes"][name], rng)
        cert["finite_singular_locus"] = fin["finite"]
        certs[name] = cert
    bullets.append(_bullet("only_isolated_nodes", all(c["finite_singular_locus"] and c["nodes"] for c in certs.values()),
                           certs))
    bullets.append(_bullet("rank_one_at_surface_nodes", all(c["rank_one"] for c in certs.values()),
                           {k: {"rank_one": v["rank_one"]} for k, v in certs.items()}))

    degs = {}
    transversal = {}
    for comp in comps:
        psi = comp["param"]
        ver = cv.verify_parametrization_map(psi, rng)
        degs[comp["name"]] = ver
        transversal[comp["name"]] = _generically_transversal(Xp, Xpp, psi)
    total = sum(v["degree"] for v in degs.values())
    expected = Xp.degree * Xpp.degree
    irr = all(v["ok"] for v in degs.values()) and total == expected and all(transversal.values())
    bullets.append(_bullet("D_components_irreducible_reduced", irr,
                           {"components": degs, "degree_sum": total, "expected_degree": expected,
                            "generically_transversal": transversal}))

    pair = data.get("pairwise", {})
    nodal = bool(pair.get("ok")) and all(c.get("nodes_ordinary", False) for c in comps)
    bullets.append(_bullet("D_only_nodes", nodal, {"pairwise": _plain(pair),
                                                   "component_nodes_ordinary": {c["name"]: c.get("nodes_ordinary")
                                                                                for c in comps}}))

    rank2 = {}
    for comp in comps:
        G = _rank_one_gcd(M, comp["param"])
        rank2[comp["name"]] = {"rank_drop_degree": G.degree,
                               "within_nodes": cv.roots_contained_in(G, comp["exempt"])}
    bullets.append(_bullet("rank_two_along_D_off_nodes", all(v["within_nodes"] for v in rank2.values()), rank2))

    node_ranks = {}
    for comp in comps:
        node_ranks[comp["name"]] = [scalar_rank(M.evaluate(P), p) for P in comp["nodes"]]
    bullets.append(_bullet("rank_one_at_component_nodes", all(r == 1 for v in node_ranks.values() for r in v),
                           node_ranks, note="intersection points of two components are exempt"))
    verdict = "pass" if all(b["status"] == "pass" for b in bullets) else "fail"
    return {"bullets": bullets, "verdict": verdict, "boundary": BOUNDARY}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items() if k != "residual"}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, ProjPoint):
        return list(obj.coords)
    if isinstance(obj, MultiPoly):
        return obj.format()
    return obj


def _smooth_along(F: MultiPoly, psi) -> dict:
    on = F.substitute(list(psi)).is_zero()
    comp = [g.substitute(list(psi)) for g in F.gradient()]
    comp = [g for g in comp if not g.is_zero()]
    g = cv.binary_gcd(comp) if comp else None
    return {"ok": on and g is not None and g.degree == 0, "on_surface": on,
            "gcd_degree": None if g is None else g.degree}


def _generically_transversal(Xp: MultiPoly, Xpp: MultiPoly, psi) -> bool:
    g1 = [g.substitute(list(psi)) for g in Xp.gradient()]
    g2 = [g.substitute(list(psi)) for g in Xpp.gradient()]
    n = len(g1)
    return any(not (g1[i] * g2[j] - g1[j] * g2[i]).is_zero() for i in range(n) for j in range(i + 1, n))


def _rank_one_gcd(M: GradedConicBundle, psi) -> MultiPoly:
    E = [[e.substitute(list(psi)) for e in row] for row in M.entries]
    mins = [minor(E, r, c) for r in ((0, 1), (0, 2), (1, 2)) for c in ((0, 1), (0, 2), (1, 2))]
    return cv.binary_gcd([m for m in mins if not m.is_zero()])
