"""The bidegree (2,2) instance: construction, the checks (a)-(i), sabotage and determinism."""

import json

import pytest

from conic_forge import hpt_fixture as hpt
from conic_forge.conic import rank_at_point
from conic_forge.poly import ProjPoint


def test_build_rejects_primes_without_sqrt2():
    for p in (3, 5, 11, 13, 101):
        with pytest.raises(hpt.NoSqrt2):
            hpt.build(p)
    for p in (41, 10007):
        inst = hpt.build(p)
        assert inst.root2 * inst.root2 % p == 2 and inst.root2 <= p - inst.root2


def test_canonical_root2_values():
    assert hpt.canonical_root2(41) == 17
    assert hpt.canonical_root2(7) == 3
    for p in (7, 17, 23, 31, 41, 47, 71, 73, 79, 89, 97):
        roots = [x for x in range(p) if x * x % p == 2]
        assert hpt.canonical_root2(p) == min(roots)


def _by_name(report):
    return {c["name"]: c for c in report["checks"]}


def test_verify_all_at_41(hpt_report):
    assert hpt_report["verdict"] == "pass"
    checks = _by_name(hpt_report)
    assert list(checks) == list(hpt.CHECKS)
    assert all(c["status"] == "pass" for c in checks.values())
    assert checks["rank_census"]["witnesses"]["count"] == 14
    assert checks["brauer_group"]["witnesses"]["order_of_quotient"] == 2
    assert hpt_report["coordinate_map"]["entrywise"] and hpt_report["coordinate_map"]["expands_to_divisor"]
    assert hpt_report["ch0"]["verdict"] == "pass"


def test_verify_all_at_10007_skips_scan(hpt10007):
    report = hpt.verify_all(hpt10007, ch0=False)
    checks = _by_name(report)
    assert checks["rank_census"]["status"] == "skipped"
    assert all(c["status"] == "pass" for n, c in checks.items() if n != "rank_census")
    assert report["verdict"] == "pass"


def test_local_classes(hpt_report):
    lc = hpt_report["local_classes"]
    assert all(v == "case3_node_rank1" for v in lc["sigma"].values()) and len(lc["sigma"]) == 6
    assert all(lc["node_lemma"].values()) and len(lc["node_lemma"]) == 8
    assert {v["case"] for v in lc["curve_points"].values()} == {"case1_smooth_rank2"}


def test_sabotage_fails_det_factorization(hpt41):
    bad = hpt.sabotaged(hpt41)
    report = hpt.verify_all(bad, exhaustive_bound=0, ch0=False)
    det = _by_name(report)["det_factorization"]
    assert det["status"] == "fail" and det["witnesses"]["residual"]
    assert report["verdict"] == "fail"


def test_report_is_deterministic(hpt41):
    a = json.dumps(hpt.verify_all(hpt41, exhaustive_bound=0), sort_keys=True)
    b = json.dumps(hpt.verify_all(hpt.build(41), exhaustive_bound=0), sort_keys=True)
    assert a == b


def test_sigma_is_pairwise_conic_intersection(hpt10007):
    """Oracle: intersect the conics M_i directly from their equations."""
    p = hpt10007.p
    r = hpt10007.root2
    # M_i n M_j: two coordinates vanish, the remaining one squared is 2 V^2
    expected = {ProjPoint(c, p) for k in range(3) for s in (1, -1)
                for c in [[s * r if i == k else 0 for i in range(3)] + [1]]}
    assert set(hpt10007.sigma) == expected
    conics = [c for c in hpt10007.curves if c.name.startswith("M")]
    for P in hpt10007.sigma:
        on = [all(e.eval_int(P.coords) == 0 for e in c.equations) for c in conics]
        assert sum(on) == 2
        assert rank_at_point(hpt10007.bundle, P) == 1


def test_nodes_have_rank_one(hpt10007):
    for P in hpt10007.nodes_plus:
        assert hpt10007.Dplus.eval_int(P.coords) == 0 and rank_at_point(hpt10007.bundle, P) == 1
    for P in hpt10007.nodes_minus:
        assert hpt10007.Dminus.eval_int(P.coords) == 0 and rank_at_point(hpt10007.bundle, P) == 1


def test_scan_is_nodes_and_sigma(hpt41, scan41):
    assert len(scan41) == 14
    assert set(scan41) == set(hpt41.nodes_plus) | set(hpt41.nodes_minus) | set(hpt41.sigma)
