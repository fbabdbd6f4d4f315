"""Sparse homogeneous polynomials, restriction and binary square roots."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from conic_forge import hpt_fixture as hpt
from conic_forge.conic import discriminant
from conic_forge.poly import (BINARY_VARS, DegeneratePoints, DegreeMismatch, InhomogeneousError, MultiPoly,
                              NotAPerfectSquare, NotDivisible, NotLinear, PolySyntaxError, ProjPoint,
                              VariableMismatch, WildCharacteristic, arith, binary_roots, exact_div,
                              partial_derivative, parse, proportional, random_poly, restrict_to_line,
                              restrict_to_plane, sqrt_binary_form, substitute)

STUV = ("S", "T", "U", "V")
P2 = ("u", "v", "w")
P = 10007


def poly(text, variables=STUV, p=P):
    return parse(text, variables, p)


def test_parse_examples():
    f = poly("S^2 - 2*V^2", p=7)
    assert f.terms == {(2, 0, 0, 0): 1, (0, 0, 0, 2): 5}
    node = parse("X*Y - Z^2", ("X", "Y", "Z"), 7)
    assert node.terms == {(1, 1, 0): 1, (0, 0, 2): 6}
    with pytest.raises(InhomogeneousError):
        poly("S + T^2")
    with pytest.raises(PolySyntaxError):
        poly("S^^2")
    for text in ("S^2 - 2*V^2", "3*S*T*U + V^3 - T^2*U", "X0*X1 - X2^2"):
        variables = ("X0", "X1", "X2", "X3") if "X" in text else STUV
        g = parse(text, variables, P)
        assert parse(g.format(), variables, P) == g


def test_arith_examples():
    x, y, z = MultiPoly.gens(P2, P)
    assert arith(x + y, x - y, "mul") == x * x - y * y
    f = x * x * y + z.scale(3) * y * y
    assert arith(f, arith(f, -1, "scale"), "add").terms == {}
    with pytest.raises(VariableMismatch):
        arith(x, MultiPoly.var("S", STUV, P), "add")


def test_hpt_discriminant_expansion():
    r = hpt.canonical_root2(P)
    Dp, Dm = hpt.discriminant_components(P, r)
    expected = poly("4*V^6 - 4*S^2*V^4 - 4*T^2*V^4 - 4*U^2*V^4 + S^4*V^2 + T^4*V^2 + U^4*V^2"
                    " + 2*S^2*T^2*V^2 + 2*S^2*U^2*V^2 + 2*T^2*U^2*V^2 - 2*S^2*T^2*U^2")
    assert Dp * Dm == expected
    assert exact_div(expected, Dp) == Dm


def test_evaluate_examples():
    r = hpt.canonical_root2(P)
    Dp, _ = hpt.discriminant_components(P, r)
    assert Dp.evaluate(ProjPoint((1, 1, 1, pow(r, -1, P)), P)) == 0
    x, y, z = MultiPoly.gens(P2, P)
    assert (x * x).evaluate(ProjPoint((0, 1, 0), P)) == 0
    S, T, U, V = MultiPoly.gens(STUV, P)
    assert (S * S + T * T).evaluate(ProjPoint((1, 1, 0, 0), P)) == 2


def test_substitute_examples():
    S, T, U, V = MultiPoly.gens(STUV, P)
    X = MultiPoly.gens(("X0", "X1", "X2", "X3"), P)
    cover = hpt.cover_map(P)
    assert (X[0] * X[1]).substitute(cover) == V * V * (U * U - V * V)
    f = S * T * U + V * V * V
    assert f.substitute([S, T, U, V]) == f
    with pytest.raises(DegreeMismatch):
        f.substitute([S, T * T, U, V])
    # the Cayley cubic pulls back to a unit multiple of the HPT sextic
    cubic = discriminant(hpt.linear_cayley(P))
    r = hpt.canonical_root2(P)
    Dp, Dm = hpt.discriminant_components(P, r)
    ok, c = proportional(cubic.substitute(cover), Dp * Dm)
    assert ok and c == -1


def test_partial_derivative_examples():
    x, y, z = MultiPoly.gens(P2, P)
    assert partial_derivative(x * x, "u") == x.scale(2)
    with pytest.raises(VariableMismatch):
        partial_derivative(x, "S")
    rng = random.Random(3)
    f = random_poly(P2, P, 6, rng)
    euler = sum((v * f.diff(i) for i, v in enumerate(MultiPoly.gens(P2, P))), MultiPoly.zero(P2, P))
    assert euler == f.scale(6)


def test_sqrt_derivative_identity():
    # f = g0^2 + f1 s; then f1 + s df1/ds = df/ds - 2 g0 dg0/ds
    rng = random.Random(5)
    s = MultiPoly.var("u", P2, P)
    g0 = random_poly(P2, P, 3, rng)
    f1 = random_poly(P2, P, 5, rng)
    f = g0 * g0 + f1 * s
    assert f1 + s * f1.diff("u") == f.diff("u") - (g0 * g0.diff("u")).scale(2)


def test_exact_div_examples():
    x, y, z = MultiPoly.gens(P2, P)
    assert exact_div(x * x - y * y, x - y) == x + y
    with pytest.raises(NotDivisible) as err:
        exact_div(x * x + y * y, x)
    assert err.value.witness is not None


def test_restrict_to_line_examples():
    x, y, z = MultiPoly.gens(P2, P)
    A, B = ProjPoint((0, 1, 0), P), ProjPoint((0, 0, 1), P)
    assert restrict_to_line(x, A, B).is_zero()
    l, m = MultiPoly.gens(BINARY_VARS, P)
    assert restrict_to_line(x * x - y * z, A, B) == -(l * m)
    with pytest.raises(DegeneratePoints):
        restrict_to_line(x, A, ProjPoint((0, 2, 0), P))


def test_restrict_to_plane_examples():
    inst = hpt.build(P)
    F = inst.cayley_cubic
    G0 = restrict_to_plane(F, inst.planes_G["G0"])
    # G0 meets F in the triangle of lines
    X1, X2, X3 = MultiPoly.gens(G0.variables, P)
    assert proportional(G0, X1 * X2 * X3)[0]
    for i in (1, 2, 3):
        G = inst.planes_G[f"G{i}"]
        M = restrict_to_plane(inst.lines_M[f"M{i}"][1], G)
        L = restrict_to_plane(inst.lines_L[f"L{i}"][1], G)
        assert proportional(restrict_to_plane(F, G), M * M * L)[0]
    assert restrict_to_plane(MultiPoly.zero(F.variables, P), G).is_zero()
    with pytest.raises(NotLinear):
        restrict_to_plane(F, F)


def test_sqrt_binary_form_examples():
    l, m = MultiPoly.gens(BINARY_VARS, P)
    e, c = sqrt_binary_form((l * l - m * m) ** 2)
    assert c == 1 and proportional(e, l * l - m * m)[0]
    e, c = sqrt_binary_form(l ** 4)
    assert c == 1 and proportional(e, l * l)[0]
    l7, m7 = MultiPoly.gens(BINARY_VARS, 7)
    e, c = sqrt_binary_form((l7 * l7 * m7 * m7).scale(3))
    assert c == 3 and e == l7 * m7
    with pytest.raises(NotAPerfectSquare):
        sqrt_binary_form(l * l * l * m)
    with pytest.raises(WildCharacteristic):
        sqrt_binary_form(MultiPoly.gens(BINARY_VARS, 3)[0] ** 4)


small = st.integers(0, P - 1)


def _rand(seed, degree, variables=P2):
    return random_poly(variables, P, degree, random.Random(seed), density=0.6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_ring_axioms(a, b, c):
    f, g, h = _rand(a, 2), _rand(b, 2), _rand(c, 2)
    assert f + g == g + f and f * g == g * f
    assert (f + g) + h == f + (g + h) and (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.tuples(small, small, small).filter(any))
def test_substitute_commutes_with_evaluation(seed, pt):
    rng = random.Random(seed)
    f = random_poly(STUV, P, 3, rng)
    images = [random_poly(P2, P, 2, rng) for _ in range(4)]
    image_pt = [g.eval_int(pt) for g in images]
    assert substitute(f, images).eval_int(pt) == f.eval_int(image_pt)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_exact_div_roundtrip(a, b):
    f, g = _rand(a, 3), _rand(b, 2)
    if not g.is_zero():
        assert exact_div(f * g, g) == f


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 96), min_size=1, max_size=4))
def test_restriction_degree_on_split_fixture(roots):
    # a product of linear forms with rational roots restricts to a fully split binary form
    p = 97
    x, y, z = MultiPoly.gens(P2, p)
    f = MultiPoly.constant(1, P2, p)
    for r in roots:
        f = f * (x - y.scale(r))
    h = restrict_to_line(f, ProjPoint((1, 0, 0), p), ProjPoint((0, 1, 0), p))
    assert h.degree == f.degree
    assert sum(k for _, k in binary_roots(h)) == f.degree


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sqrt_binary_form_of_square(seed):
    e = random_poly(BINARY_VARS, P, 4, random.Random(seed))
    if e.is_zero():
        return
    r, c = sqrt_binary_form(e * e)
    assert r * r * c == e * e
