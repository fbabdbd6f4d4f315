"""Linear systems, combining determinants, square roots modulo the contact line and lifts."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from conic_forge.cayley import cayley_parametrization, line_parameter_points, random_line_config
from conic_forge.conic import det_matrix, discriminant
from conic_forge.construct import (ConstructError, LinearSystem, NotInImage, NotNodalOnContact, base_point_conditions,
                                   combine, determinantal_rep, genericity_check, lift_to_P3, solve_linear_system,
                                   sqrt_mod_contact)
from conic_forge.linalg import multiplicity_at
from conic_forge.pipeline import prepare
from conic_forge.poly import MultiPoly, ProjPoint, binary_roots, proportional, random_poly, restrict_to_line
from support import COMBINE_SHAPES, combine_instance

P = 10007
UVW = ("u", "v", "w")


def test_linear_system_dimensions():
    cfg = random_line_config(P, random.Random(4))
    base = list(cfg.base_points.values())
    assert len(solve_linear_system(LinearSystem(3, [(E, 1) for E in base]), P)) == 4
    A, B = base[:2]
    assert len(solve_linear_system(LinearSystem(1, [(A, 1), (B, 1)]), P)) == 1
    # the c666 count: 28 coefficients, 20 + 6 + 1 conditions
    pts = [ProjPoint((1, k, 3 * k + 2), P) for k in range(1, 4)]
    conds = base_point_conditions(cfg, (1, 2, 3)) + [(pts[0], 2), (pts[1], 2), (pts[2], 1)]
    sys = LinearSystem(6, conds)
    assert sys.equation_count() == 27
    assert len(solve_linear_system(sys, P)) == 1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_dimension_monotone(seed):
    rng = random.Random(seed)
    conds = []
    last = len(solve_linear_system(LinearSystem(4, conds), P))
    for _ in range(6):
        conds.append((ProjPoint([rng.randrange(P) for _ in range(2)] + [1], P), rng.randint(1, 2)))
        dim = len(solve_linear_system(LinearSystem(4, list(conds)), P))
        assert dim <= last
        last = dim


def test_genericity():
    cfg = random_line_config(P, random.Random(9))
    res = genericity_check(cfg, 6)
    assert res["surjective"] and res["rank"] == 6 and res["kernel_witness"] is None


@pytest.mark.parametrize("shape", sorted(COMBINE_SHAPES))
def test_combine_identity(shape):
    rng = random.Random(shape)
    for _ in range(3):
        A, b, c = combine_instance(rng, shape)
        res = combine(A, b, c)
        assert (res["det_N"] + discriminant(A) * det_matrix(res["B"])).is_zero()
    if shape == "cayley":
        assert res["N"].entry_degree_shape() == ((7, 4, 4), (4, 1, 1), (4, 1, 1))
        assert res["N"].dtype == (7, 1, 1)


def test_combine_c_zero():
    rng = random.Random(0)
    A, b, _ = combine_instance(rng, "cayley")
    zero = MultiPoly.zero(A.variables, P)
    res = combine(A, b, zero)
    d = res["B"][1][1]
    assert res["det_N"] == -(b * discriminant(A) * d)


def test_combine_degree_mismatch():
    rng = random.Random(1)
    A, b, c = combine_instance(rng, "cayley")
    with pytest.raises(ConstructError):
        combine(A, b * MultiPoly.var("S", A.variables, P), c)


def _square_instance(seed):
    """f = h^2 for a type-(2,2,2) sextic h with six rational points on the contact line (d = 4)."""
    rng = random.Random(seed)
    while True:
        cfg = random_line_config(P, rng)
        Lc = MultiPoly.linear([rng.randrange(P) for _ in range(3)], UVW, P)
        try:
            cfg = cfg.with_contact(Lc)
        except Exception:
            continue
        A, B = line_parameter_points(Lc)
        pts = [ProjPoint([(a * t + b) % P for a, b in zip(A.coords, B.coords)], P)
               for t in rng.sample(range(P), 5)]
        conds = [(E, 2) for E in cfg.base_points.values()] + [(Q, 1) for Q in pts]
        basis = solve_linear_system(LinearSystem(6, conds), P)
        h = basis[0]
        for extra in basis[1:]:
            h = h + extra.scale(rng.randrange(P))
        rest = restrict_to_line(h, A, B)
        roots = binary_roots(rest)
        if rest.is_zero() or len(roots) != 6 or any(k != 1 for _, k in roots):
            continue
        nodes = [ProjPoint([(t[0] * a + t[1] * b) % P for a, b in zip(A.coords, B.coords)], P) for t, _ in roots]
        if set(nodes) & set(cfg.contact_points().values()):
            continue
        return cfg, h, nodes


def test_sqrt_of_a_square():
    cfg, h, nodes = _square_instance(3)
    s = cfg.contact
    res = sqrt_mod_contact(h * h, cfg, nodes, 4)
    g = res["g"]
    assert (s * s).divides(g - h) or (s * s).divides(g + h)
    assert res["base_multiplicities"] == [2] * 6


def test_sqrt_rejects_non_node():
    cfg, h, nodes = _square_instance(3)
    A, B = line_parameter_points(cfg.contact)
    off = next(Q for Q in (ProjPoint([(a * t + b) % P for a, b in zip(A.coords, B.coords)], P) for t in range(P))
               if h.eval_int(Q.coords))
    with pytest.raises(NotNodalOnContact):
        sqrt_mod_contact(h * h, cfg, nodes[:-1] + [off], 4)


def test_sqrt_contract_on_example(example):
    f, g, s = example.f, example.g, example.setup.cfg.contact
    assert g.degree == 9
    (f - g * g).exact_div(s * s)
    assert example.sqrt_data["base_multiplicities"] == [3] * 6
    for E in example.setup.cfg.base_points.values():
        assert multiplicity_at(g, E.coords) == 3


def test_determinantal_rep(example):
    cfg = example.setup.cfg
    q = cfg.contact * cfg.contact * cfg.product_of_lines()
    res = determinantal_rep(example.f, q, example.g, cfg, 6)
    t = res["t"]
    assert t.degree == 12 and res["base_multiplicities"] == [4] * 6
    assert (q * t - example.g * example.g + example.f).is_zero()
    assert determinantal_rep(example.g * example.g, q, example.g)["t"].is_zero()


def test_lift_to_P3():
    setup = prepare(P, random.Random(11))
    X = setup.X
    X0 = MultiPoly.var("X0", ("X0", "X1", "X2", "X3"), P)
    res = lift_to_P3(X[0], X, 1)
    assert res["G"] == X0 and res["kernel_dimension"] == 0
    Lc = setup.cfg.contact
    res = lift_to_P3(Lc * Lc * setup.cfg.product_of_lines(), X, 2)
    assert proportional(res["G"], setup.qbar)[0]
    res = lift_to_P3(random_poly(("X0", "X1", "X2", "X3"), P, 3, random.Random(2)).substitute(X), X, 3)
    assert res["kernel_dimension"] == 1
    assert res["kernel"][0].substitute(X).is_zero()
    with pytest.raises(NotInImage):
        u = MultiPoly.var("u", UVW, P)
        lift_to_P3(u ** 3, X, 1)


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_lift_then_substitute(seed):
    rng = random.Random(seed)
    cfg = random_line_config(P, rng)
    X = cayley_parametrization(cfg)
    G = random_poly(("X0", "X1", "X2", "X3"), P, 2, rng)
    res = lift_to_P3(G.substitute(X), X, 2)
    assert proportional(res["G"].substitute(X), G.substitute(X))[0] or G.substitute(X).is_zero()
