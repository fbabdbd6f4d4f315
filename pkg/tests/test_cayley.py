"""Cayley cubic parametrization, curve classes and contact quadrics."""

import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conic_forge.cayley import (CayleyError, DegenerateConfig, LineConfig, PlaneCurveClass, avoids_nodes,
                                cayley_nodes, cayley_parametrization, class_invariants, congruent_cayley,
                                contact_line_from_minor, expected_moduli_by_count, random_congruent_cayley,
                                random_line_config, standard_cayley_matrix, type_to_linear_conditions)
from conic_forge.conic import GradedConicBundle, det_matrix, discriminant, rank_locus_scan
from conic_forge.construct import solve_linear_system, LinearSystem
from conic_forge.linalg import multiplicity_at
from conic_forge.poly import MultiPoly, enumerate_projective, proportional

P = 10007
UVW = ("u", "v", "w")

TABLE = {(1, 0, 0): (1, 0), (1, 1, 0): (2, 0), (1, 1, 1): (3, 1), (2, 1, 1): (4, 1), (2, 2, 2): (6, 4),
         (1, 2, 3): (6, 2)}


def reference_config(p=P):
    u, v, w = MultiPoly.gens(UVW, p)
    return LineConfig(p, (u, v, w, u + v + w))


def test_parametrization_lands_on_cubic():
    det = det_matrix(standard_cayley_matrix(P))
    for cfg in (reference_config(), random_line_config(P, random.Random(7))):
        X = cayley_parametrization(cfg)
        assert all(x.degree == 3 for x in X)
        assert det.substitute(X).is_zero()


def test_concurrent_lines_rejected():
    u, v, w = MultiPoly.gens(UVW, P)
    with pytest.raises(DegenerateConfig):
        LineConfig(P, (u, v, u + v, w))
    with pytest.raises(DegenerateConfig):
        LineConfig(P, (u, v, w, u))
    with pytest.raises(DegenerateConfig):
        reference_config().with_contact(u + v)  # through E_12 = (0:0:1)
    assert issubclass(DegenerateConfig, CayleyError)


@pytest.mark.parametrize("b", sorted(TABLE))
def test_class_invariants_table(b):
    inv = class_invariants(b)
    assert (inv["degree"], inv["arithmetic_genus"]) == TABLE[b]
    assert inv["expected_moduli"] == inv["degree"] + inv["arithmetic_genus"]


def _adjunction(c: PlaneCurveClass):
    """Degree and genus on the blow-up from intersection numbers with K = -3H + sum E."""
    self_int = c.alpha ** 2 - sum(x * x for x in c.betas)
    k_dot = -3 * c.alpha + sum(c.betas)
    anticanonical_dot = 3 * c.alpha - sum(c.betas)
    return anticanonical_dot, 1 + (self_int + k_dot) // 2


@given(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)).filter(any))
def test_class_invariants_match_adjunction(b):
    deg, genus = _adjunction(PlaneCurveClass.from_type(b))
    inv = class_invariants(b)
    assert (inv["degree"], inv["arithmetic_genus"]) == (deg, genus)


def test_class_invariants_rejects():
    for bad in ((0, 0, 0), (1, -1, 0), (1, 2)):
        with pytest.raises(ValueError):
            class_invariants(bad)


def test_moduli_count():
    assert class_invariants((1, 2, 3))["expected_moduli"] == 8
    # cubics through the six base points: 10 coefficients, 6 conditions
    assert expected_moduli_by_count((1, 1, 1)) == comb(5, 2) - 6


def test_avoids_nodes():
    assert avoids_nodes(PlaneCurveClass(3, (1, 1, 1, 1, 1, 1)))
    assert not avoids_nodes(PlaneCurveClass(1, (1, 0, 0, 0, 0, 0)))
    for b in TABLE:
        assert avoids_nodes(PlaneCurveClass.from_type(b))


def test_type_to_linear_conditions():
    cfg = reference_config()
    c = type_to_linear_conditions((1, 2, 3), cfg)
    mults = {d["name"]: d["multiplicity"] for d in c["conditions"]}
    assert c["degree"] == 6 and c["equations"] == 20
    assert mults == {"E14": 1, "E23": 1, "E24": 2, "E13": 2, "E34": 3, "E12": 3}
    c = type_to_linear_conditions((1, 1, 1), cfg)
    assert c["degree"] == 3 and len(c["conditions"]) == 6
    c = type_to_linear_conditions((0, 0, 1), cfg)
    assert c["degree"] == 1 and {d["name"] for d in c["conditions"]} == {"E34", "E12"}


@pytest.mark.parametrize("b", [(0, 0, 1), (1, 1, 0), (1, 1, 1), (1, 2, 3)])
def test_type_solutions_have_the_class_degree(b):
    cfg = random_line_config(P, random.Random(sum(b)))
    conds = type_to_linear_conditions(b, cfg)
    sols = solve_linear_system(LinearSystem(conds["degree"], [(d["point"], d["multiplicity"])
                                                              for d in conds["conditions"]], variables=UVW), P)
    assert sols
    f = sols[0]
    assert f.degree == class_invariants(b)["degree"]
    for d in conds["conditions"]:
        assert multiplicity_at(f, d["point"].coords) >= d["multiplicity"]


def test_nodes_are_the_rank_one_locus():
    p = 13
    M = GradedConicBundle(tuple(tuple(r) for r in standard_cayley_matrix(p)))
    assert rank_locus_scan(M, 1, enumerate_projective(3, p)) == cayley_nodes(p)


def test_contact_minor():
    cfg = reference_config()
    A = GradedConicBundle(tuple(tuple(r) for r in standard_cayley_matrix(P)))
    res = contact_line_from_minor(A, cfg)
    X = cayley_parametrization(cfg)
    Lc = res["contact"]
    assert res["pullback"].degree == 6 == 2 + 4
    assert proportional(res["qbar"].substitute(X), Lc * Lc * cfg.product_of_lines())[0]
    assert all(res["qbar"].eval_int(nu.coords) == 0 for nu in cayley_nodes(P))


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_contact_minor_congruent(seed):
    rng = random.Random(seed)
    cfg = random_line_config(P, rng)
    cb = random_congruent_cayley(P, rng)
    assert proportional(discriminant(cb.A), det_matrix(standard_cayley_matrix(P)))[0]
    res = contact_line_from_minor(cb.A, cfg)
    X = cayley_parametrization(cfg)
    Lc = res["contact"]
    assert proportional(res["qbar"].substitute(X), Lc * Lc * cfg.product_of_lines())[0]


def test_congruence_inverse():
    cb = congruent_cayley(P, [[1, 2, 3], [0, 1, 4], [5, 6, 0]])
    prod = [[sum(cb.S[i][k] * cb.P[k][j] for k in range(3)) % P for j in range(3)] for i in range(3)]
    assert prod == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(DegenerateConfig):
        congruent_cayley(P, [[1, 2, 3], [2, 4, 6], [0, 0, 1]])


def test_config_roundtrip():
    cfg = random_line_config(P, random.Random(2))
    again = LineConfig.from_record(cfg.to_record())
    assert again.lines == cfg.lines
    assert comb(4, 2) == len(cfg.base_points)
