"""Plane curves over F_p: rational points, parametrizations, intersection census.

Binary forms in (l, m) stand for functions on P^1; a parametrized curve is a
list of binary forms of a common degree.  Certificates here hold over the
algebraic closure: they come from exact gcds and resultants, never from
point counts alone.
"""

from __future__ import annotations

import random
from typing import Iterator, Sequence

import flint

from .linalg import nullspace, multiplicity_rows, form_from_vector
from .poly import (BINARY_VARS, MultiPoly, ProjPoint, binary_to_univariate, monomials, univariate_to_binary)


class CurveError(ValueError):
    pass


# -- binary forms as univariate polynomials ------------------------------------------------

def binary_gcd(forms: Sequence[MultiPoly]) -> MultiPoly:
    """Monic-normalised gcd of binary forms (the root (1:0) included)."""
    forms = [h for h in forms if not h.is_zero()]
    if not forms:
        raise CurveError("gcd of zero forms")
    p = forms[0].p
    g = None
    inf = None
    for h in forms:
        u, k = binary_to_univariate(h)
        g = u if g is None else g.gcd(u)
        inf = k if inf is None else min(inf, k)
    g = g * flint.nmod(int(g.coeffs()[-1]), p) ** -1 if g.degree() >= 0 else g
    deg = g.degree() + inf
    # the degree gap carries the factor m^inf
    return univariate_to_binary(g, deg, p)


def squarefree_part(h: MultiPoly) -> MultiPoly:
    p = h.p
    u, k = binary_to_univariate(h)
    lc, facs = u.factor_squarefree()
    r = flint.nmod_poly([1], p)
    for fac, _ in facs:
        r = r * fac
    # a root at (1:0) shows up as a drop in degree, i.e. a factor m
    return univariate_to_binary(r, r.degree() + (1 if k else 0), p)


def is_squarefree(h: MultiPoly) -> bool:
    u, k = binary_to_univariate(h)
    if k > 1:
        return False
    return u.degree() <= 0 or u.gcd(u.derivative()).degree() == 0


def point_factor(psi: Sequence[MultiPoly], K: Sequence[int]) -> MultiPoly:
    """Binary form whose roots are the parameters mapped to the point K (over the closure)."""
    eqs = []
    n = len(psi)
    for i in range(n):
        for j in range(i + 1, n):
            eqs.append(psi[i].scale(K[j]) - psi[j].scale(K[i]))
    nonzero = [e for e in eqs if not e.is_zero()]
    if not nonzero:
        raise CurveError("parametrization is constant at the given point")
    return binary_gcd(nonzero)


def roots_contained_in(h: MultiPoly, factors: Sequence[MultiPoly]) -> bool:
    """Is every root of h (over the closure) a root of one of the factors?"""
    r = squarefree_part(h)
    for fac in factors:
        if r.degree <= 0:
            break
        g = binary_gcd([r, fac])
        if g.degree > 0:
            r = r.exact_div(g)
    return r.degree <= 0


# -- rational points -------------------------------------------------------------------

def taylor_forms(f: MultiPoly, E: Sequence[int]) -> list[MultiPoly]:
    """g_k with f(x + b E) = sum_k b^k g_k(x)."""
    p = f.p
    n = f.nvars
    names = tuple(f.variables) + ("b__",)
    images = [MultiPoly(names, p, {tuple(1 if j == i else 0 for j in range(n)) + (0,): 1, (0,) * n + (1,): E[i]})
              for i in range(n)]
    full = f.substitute(images)
    out = [dict() for _ in range(f.degree + 1)]
    for e, c in full.terms.items():
        out[e[-1]][e[:-1]] = c
    return [MultiPoly(f.variables, p, t) if t else MultiPoly.zero(f.variables, p) for t in out]


def _complement_basis(E: Sequence[int], p: int):
    """Two points A, B with E, A, B independent."""
    cands = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    for A in cands:
        for B in cands:
            if A < B:
                M = flint.nmod_mat([list(E), list(A), list(B)], p)
                if M.det() != 0:
                    return A, B
    raise CurveError("no complement")


def curve_points(f: MultiPoly, p: int | None = None) -> Iterator[ProjPoint]:
    """All F_p-points of the plane curve f = 0, via the pencil of lines through an exterior point.

    Points are produced line by line.  Lines through E cover the plane
    minus E exactly once and E is off the curve, so no point repeats.
    """
    p = p or f.p
    if f.is_zero():
        raise CurveError("zero polynomial")
    if f.nvars != 3:
        raise CurveError("plane curves only")
    E = None
    for cand in _small_points(p):
        if f.eval_int(cand):
            E = cand
            break
    if E is None:
        # only possible when every point of P^2(F_p) lies on the curve
        from .poly import enumerate_projective

        pts = [P for P in enumerate_projective(2, p) if f.eval_int(P.coords) == 0]
        if len(pts) == p * p + p + 1:
            yield from pts
            return
        raise CurveError("no exterior point found")
    gs = taylor_forms(f, E)
    A, B = _complement_basis(E, p)
    # h_k(t) = g_k(t A + B), and the point at t = infinity is A
    hs = []
    for g in gs:
        if g.is_zero():
            hs.append(flint.nmod_poly([0], p))
            continue
        img = [MultiPoly(("t", "s"), p, {(1, 0): a, (0, 1): b}) for a, b in zip(A, B)]
        h = g.substitute(img)
        u, _ = binary_to_univariate(h)
        hs.append(u)
    for t in [None] + list(range(p)):
        if t is None:
            x = tuple(A)
            cs = [g.eval_int(x) for g in gs]
        else:
            x = tuple((t * a + b) % p for a, b in zip(A, B))
            cs = [int(h(t)) for h in hs]
        # the leading coefficient is f(E) != 0, so u has exact degree n
        u = flint.nmod_poly(cs, p)
        if cs[0] == 0:
            yield ProjPoint(x, p)
        if u.degree() > 0:
            for r, _ in u.roots():
                r = int(r)
                if r == 0 and cs[0] == 0:
                    continue
                yield ProjPoint([(xi + r * ei) % p for xi, ei in zip(x, E)], p)


def _small_points(p):
    from .poly import enumerate_projective

    for P in enumerate_projective(2, p):
        yield P.coords


def curve_points_brute(f: MultiPoly) -> list[ProjPoint]:
    from .poly import enumerate_projective

    return [P for P in enumerate_projective(f.nvars - 1, f.p) if f.eval_int(P.coords) == 0]


def surface_points(F: MultiPoly, rng: random.Random, lines: int) -> Iterator[ProjPoint]:
    """F_p-points of a surface in P^3 on random lines (with repetitions possible)."""
    p = F.p
    for _ in range(lines):
        A = [rng.randrange(p) for _ in range(4)]
        B = [rng.randrange(p) for _ in range(4)]
        if not any(A) or not any(B):
            continue
        try:
            PA, PB = ProjPoint(A, p), ProjPoint(B, p)
        except Exception:
            continue
        if PA == PB:
            continue
        img = [MultiPoly(BINARY_VARS, p, {(1, 0): a, (0, 1): b}) for a, b in zip(A, B)]
        h = F.substitute(img)
        if h.is_zero():
            continue
        u, k = binary_to_univariate(h)
        if k:
            yield ProjPoint(A, p)
        if u.degree() > 0:
            for r, _ in u.roots():
                r = int(r)
                yield ProjPoint([(r * a + b) % p for a, b in zip(A, B)], p)


# -- parametrization of rational plane curves ---------------------------------------------

def parametrize_by_adjoints(f: MultiPoly, singular: Sequence[tuple[ProjPoint, int]], rng: random.Random,
                            samples: int = 48, attempts: int = 8) -> dict:
    """Parametrize a rational plane curve whose singularities are ordinary of the given multiplicities.

    Adjoints of degree n-2 with multiplicity m-1 at each m-fold point, through
    n-3 further simple points, form a pencil (for a conic, the lines through
    one of its points); its free intersection with the
    curve moves along the curve.  Points of the curve are sorted by their
    pencil parameter, and binary forms of degree n interpolating them are
    solved for.  The result is verified symbolically.
    """
    p = f.p
    n = f.degree
    if n == 1:
        c = [f.terms.get(tuple(1 if j == i else 0 for j in range(3)), 0) for i in range(3)]
        A, B = nullspace([c], 3, p)
        l, m = MultiPoly.gens(BINARY_VARS, p)
        param = [l.scale(a) + m.scale(b) for a, b in zip(A, B)]
        return {"param": param, "pencil": [], "extra_points": [], **verify_parametrization(f, param)}
    # a conic is projected from one of its points; otherwise adjoints of degree n - 2
    adj_degree, free = (1, 1) if n == 2 else (n - 2, n - 3)
    base = [(P, m - 1) for P, m in singular if m > 1]
    special = {P for P, _ in singular}
    pts = []
    for P in curve_points(f):
        if P in special:
            continue
        pts.append(P)
        if len(pts) >= samples + 3 * attempts + 20:
            break
    if len(pts) < samples:
        raise CurveError("too few rational points to interpolate a parametrization")
    for _ in range(attempts):
        extra = rng.sample(pts, free)
        conds = base + [(P, 1) for P in extra]
        exps = monomials(3, adj_degree)
        rows = []
        for P, m in conds:
            rows += multiplicity_rows(3, adj_degree, P.coords, m, p, exps)
        pencil = [form_from_vector(v, exps, f.variables, p) for v in nullspace(rows, len(exps), p)]
        if len(pencil) != 2:
            continue
        A1, A2 = pencil
        data = []
        for Q in pts:
            if Q in extra:
                continue
            a1, a2 = A1.eval_int(Q.coords), A2.eval_int(Q.coords)
            if a1 == 0 and a2 == 0:
                continue
            data.append(((a2, (-a1) % p), Q))
            if len(data) >= samples:
                break
        param = _interpolate(data, n, p)
        if param is None:
            continue
        check = verify_parametrization(f, param)
        if check["ok"]:
            return {"param": param, "pencil": [A1, A2], "extra_points": extra, **check}
    raise CurveError("could not find a parametrization")


def _interpolate(data, n, p):
    bexps = monomials(2, n)
    N = len(bexps)
    rows = []
    for (lam, mu), Q in data:
        vals = [pow(lam, e[0], p) * pow(mu, e[1], p) % p for e in bexps]
        q = Q.coords
        for i, j in ((0, 1), (0, 2), (1, 2)):
            row = [0] * (3 * N)
            for k, v in enumerate(vals):
                row[i * N + k] = v * q[j] % p
                row[j * N + k] = (-v * q[i]) % p
            rows.append(row)
    kernel = nullspace(rows, 3 * N, p)
    if len(kernel) != 1:
        return None
    v = kernel[0]
    return [form_from_vector(v[i * N:(i + 1) * N], bexps, BINARY_VARS, p) for i in range(3)]


def verify_parametrization(f: MultiPoly, param: Sequence[MultiPoly], rng: random.Random | None = None) -> dict:
    """f(param) = 0, no base points, and generically injective (fiber over a random value is one point)."""
    p = f.p
    rng = rng or random.Random(0)
    comp = f.substitute(list(param))
    on_curve = comp.is_zero()
    nonzero = [h for h in param if not h.is_zero()]
    base_free = bool(nonzero) and binary_gcd(nonzero).degree == 0
    injective = False
    if on_curve and base_free:
        for _ in range(10):
            t0 = (rng.randrange(p), 1)
            K = [h.eval_int(t0) for h in param]
            if not any(K):
                continue
            injective = point_factor(param, K).degree == 1
            break
    degree = max(h.degree for h in nonzero) if nonzero else -1
    return {"ok": on_curve and base_free and injective, "on_curve": on_curve, "base_point_free": base_free,
            "birational": injective, "degree": degree}


def verify_parametrization_map(psi: Sequence[MultiPoly], rng: random.Random | None = None) -> dict:
    """Base-point free and generically injective; the image then has degree deg psi."""
    p = psi[0].p
    rng = rng or random.Random(0)
    nonzero = [h for h in psi if not h.is_zero()]
    base_free = bool(nonzero) and binary_gcd(nonzero).degree == 0
    injective = False
    if base_free:
        for _ in range(10):
            t0 = (rng.randrange(p), 1)
            K = [h.eval_int(t0) for h in psi]
            if any(K):
                injective = point_factor(psi, K).degree == 1
                break
    degree = max(h.degree for h in nonzero) if nonzero else -1
    return {"ok": base_free and injective, "base_point_free": base_free, "birational": injective, "degree": degree}


# -- intersections -------------------------------------------------------------------------

def _to_flint(f: MultiPoly, ctx):
    return ctx.from_dict(f.terms)


def projected_resultant(f: MultiPoly, g: MultiPoly, center: Sequence[int]) -> tuple[MultiPoly, list]:
    """Resultant of f and g after moving ``center`` to (0:0:1), as a binary form.

    Returns the form and the coordinate change (rows give old coordinates in terms of new).
    """
    p = f.p
    center = list(center)
    k = next(i for i, c in enumerate(center) if c)
    # new coordinates (y0, y1, y2): old = y0 e_a + y1 e_b + y2 center
    others = [i for i in range(3) if i != k]
    cols = []
    for i in others:
        cols.append([1 if j == i else 0 for j in range(3)])
    cols.append(center)
    new_vars = ("y0", "y1", "y2")
    images = []
    for j in range(3):
        images.append(MultiPoly(new_vars, p, {(1, 0, 0): cols[0][j], (0, 1, 0): cols[1][j], (0, 0, 1): cols[2][j]}))
    F, G = f.substitute(images), g.substitute(images)
    ctx = flint.nmod_mpoly_ctx.get(new_vars, ordering="degrevlex", modulus=p)
    R = _to_flint(F, ctx).resultant(_to_flint(G, ctx), "y2")
    terms = {}
    for e, c in R.to_dict().items():
        terms[(int(e[0]), int(e[1]))] = int(c)
    return MultiPoly(BINARY_VARS, p, terms), cols


def project_point(P: ProjPoint, cols) -> tuple[int, int]:
    """Coordinates (y0 : y1) of the projection of P from the center."""
    p = P.p
    M = flint.nmod_mat([[cols[c][j] for c in range(3)] for j in range(3)], p)
    y = M.solve(flint.nmod_mat([[x] for x in P.coords], p))
    return int(y[0, 0]), int(y[1, 0])


def linear_binary(pt: tuple[int, int], p: int) -> MultiPoly:
    a, b = pt
    return MultiPoly(BINARY_VARS, p, {(1, 0): b, (0, 1): (-a) % p})


def intersection_census(f: MultiPoly, g: MultiPoly, known: Sequence[tuple[ProjPoint, int, int]],
                        rng: random.Random, attempts: int = 5, center: Sequence[int] | None = None) -> dict:
    """Intersections of f and g away from known points, with multiplicity bounds at those points.

    ``known`` lists (point, mult_f, mult_g).  The resultant of a generic
    projection is divided by each known projection to the power mult_f mult_g;
    the residual form being squarefree and coprime to those projections shows
    that the known points contribute exactly mult_f mult_g (no common tangents)
    and that all other intersections are transversal, with distinct projections.
    """
    p = f.p
    fixed = center
    for _ in range(attempts):
        center = list(fixed) if fixed is not None else [rng.randrange(p) for _ in range(3)]
        if not any(center) or f.eval_int(center) == 0 or g.eval_int(center) == 0:
            continue
        R, cols = projected_resultant(f, g, center)
        if R.is_zero():
            return {"ok": False, "reason": "common component"}
        projs = [project_point(P, cols) for P, _, _ in known]
        if len(set(ProjPoint(pr, p) for pr in projs)) < len(projs):
            continue
        rest = R
        ok = True
        for (P, mf, mg), pr in zip(known, projs):
            lin = linear_binary(pr, p)
            for _ in range(mf * mg):
                try:
                    rest = rest.exact_div(lin)
                except Exception:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            return {"ok": False, "reason": "known point has lower intersection multiplicity than expected"}
        coprime = all(rest.eval_int(pr) != 0 for pr in projs)
        sqf = is_squarefree(rest)
        if not sqf:
            # repeated root may come from two points sharing a projection; retry another center
            continue
        return {"ok": coprime and sqf, "transversal_points": rest.degree, "residual_coprime_to_known": coprime,
                "center": center, "resultant_degree": R.degree, "residual": rest}
    return {"ok": False, "reason": "residual resultant never squarefree"}
