"""Construction c666, the assembled example and its certificates."""

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from conic_forge.cayley import line_parameter_points
from conic_forge.conic import diagonal_bundle, discriminant
from conic_forge.construct import LinearSystem, base_point_conditions, combine, solve_linear_system
from conic_forge.curves import curve_points_brute
from conic_forge.linalg import empty_locus_degree
from conic_forge.pipeline import (EXPECTED_TABLE, MANDATORY, TYPES, NonOrdinarySingularity, RetriesExhausted,
                                  WitnessNotFound, build_with_retries, curve_points, finite_locus, prepare,
                                  rationality_certificate, run_c666, split_witnesses, verdict, verify_checklist)
from conic_forge.poly import MultiPoly, ProjPoint, proportional, random_poly, restrict_to_line

UVW = ("u", "v", "w")
P = 10007


def test_curve_points_examples():
    u, v, w = MultiPoly.gens(UVW, 7)
    assert len(list(curve_points(u * v - w * w))) == 8
    assert len(list(curve_points(u))) == 8
    assert list(curve_points(u * u + v * v)) == [ProjPoint((0, 0, 1), 7)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 5))
def test_curve_points_no_duplicates(seed, p, degree):
    f = random_poly(UVW, p, degree, random.Random(seed))
    if f.is_zero():
        return
    pts = list(curve_points(f))
    assert len(pts) == len(set(pts))
    assert sorted(pts) == sorted(curve_points_brute(f))


def test_run_c666_table(example):
    inst = example.instance
    assert inst.q3_equals_q4
    assert {k: v for k, v in inst.contact_table.items() if k != "points"} == EXPECTED_TABLE
    # D . L_c = 6 nodes * 2 + Q1 * 2 + Q2 * 2 + Q3 + Q4 = 18
    assert sum(EXPECTED_TABLE["D"]) == 18
    A, B = line_parameter_points(inst.cfg.contact)
    assert restrict_to_line(inst.D[0], A, B).degree == 6


def test_q3_q4_statistic():
    """Q3 = Q4 is recorded per run and never assumed."""
    seen = []
    for seed in range(4):
        setup = prepare(P, random.Random(seed))
        try:
            inst = run_c666(setup.cfg, seed)
        except Exception:
            continue
        seen.append(inst.q3_equals_q4)
    assert seen and all(isinstance(x, bool) for x in seen)


def test_build_example_shape(example):
    N = example.N
    assert N.entry_degree_shape() == ((7, 4, 4), (4, 1, 1), (4, 1, 1))
    assert discriminant(N).degree == 9
    assert (discriminant(N) + discriminant(example.A) * example.X6).is_zero()
    assert proportional(example.X6.substitute(list(example.setup.X)), example.instance.product)[0]


def test_retries_exhausted():
    log = []
    with pytest.raises(RetriesExhausted) as err:
        build_with_retries(37, 3, 0, log)
    assert len(err.value.log) == 1 and log == err.value.log


def test_rank0_on_hpt(hpt10007):
    assert empty_locus_degree(hpt10007.bundle.upper(), 18) is not None


def test_split_witnesses(hpt41):
    w = split_witnesses(hpt41.bundle, hpt41.Dplus, 41, random.Random(0), 400)
    assert w["split_point"] != w["nonsplit_point"]
    S, T, U, V = MultiPoly.gens(("S", "T", "U", "V"), 101)
    one = MultiPoly.constant(1, ("S", "T", "U", "V"), 101)
    q1, q2 = S * S + T * T - U * U, S * T - V * V
    M = diagonal_bundle([one, -one, q1 * q2])
    with pytest.raises(WitnessNotFound):
        split_witnesses(M, q1, 101, random.Random(0), 100)
    with pytest.raises(WitnessNotFound):
        split_witnesses(hpt41.bundle, hpt41.Dplus, 41, random.Random(0), 0)


def test_split_witnesses_stable_under_scaling(hpt41):
    w = split_witnesses(hpt41.bundle, hpt41.Dplus, 41, random.Random(1), 400)
    from conic_forge.conic import classify_fiber
    for key, tag in (("split_point", "split_pair"), ("nonsplit_point", "nonsplit_pair")):
        P = w[key]
        assert classify_fiber(hpt41.bundle, [3 * c % 41 for c in P.coords]).tag == tag


def test_rationality_examples(example):
    inst = example.instance
    rc = rationality_certificate(inst.D[0], inst.cfg, TYPES[0], inst.nodes[0], random.Random(0))
    assert rc["arithmetic_genus"] == 2 and rc["genus"] == 0 and all(rc["ordinary"])
    # a smooth conic of type (1,1,0)
    cfg = inst.cfg
    conic = solve_linear_system(LinearSystem(2, base_point_conditions(cfg, (1, 1, 0))), P)[0]
    rc = rationality_certificate(conic, cfg, (1, 1, 0), [], random.Random(0))
    assert rc["genus"] == 0 and rc["nodes"] == []


def test_rationality_rejects_triple_point(example):
    cfg = example.instance.cfg
    A, B = line_parameter_points(cfg.contact)
    P1, Q1 = (ProjPoint([(a * t + b) % P for a, b in zip(A.coords, B.coords)], P) for t in (5, 17))
    conds = base_point_conditions(cfg, (1, 2, 3)) + [(P1, 3), (Q1, 1)]
    D = solve_linear_system(LinearSystem(6, conds), P)[0]
    with pytest.raises(NonOrdinarySingularity):
        rationality_certificate(D, cfg, (1, 2, 3), [P1], random.Random(0))


def test_finite_locus():
    S, T, U, V = MultiPoly.gens(("S", "T", "U", "V"), P)
    assert finite_locus([S, T, U], random.Random(0), 6)["finite"]
    assert not finite_locus([S, T], random.Random(0), 6)["finite"]


def test_verdict():
    recs = [{"name": n, "status": "pass"} for n in MANDATORY]
    assert verdict(recs, MANDATORY) == "pass"
    recs[3]["status"] = "inconclusive"
    assert verdict(recs, MANDATORY) != "pass"


def test_sabotaged_singular_locus(example):
    """b = l^2 k and c = l m make X6 = l^2 (k q - m^2): singular along a plane."""
    rng = random.Random(5)
    X4 = ("X0", "X1", "X2", "X3")
    ell = random_poly(X4, P, 1, rng)
    b, c = ell * ell * random_poly(X4, P, 2, rng), ell * random_poly(X4, P, 2, rng)
    bad = replace(example, bbar=b, cbar=c, N=combine(example.A, b, c)["N"])
    rep = verify_checklist(bad, seed=1, ch0=False)
    by = {c["name"]: c for c in rep["checks"]}
    assert rep["verdict"] == "fail"
    assert by["x6_singular_locus_finite"]["status"] == "fail"
    point = by["x6_singular_locus_finite"]["witnesses"]["singular_point"]
    assert point is not None
    assert ell.eval_int(point) == 0 or all(g.eval_int(point) == 0 for g in bad.X6.gradient())
