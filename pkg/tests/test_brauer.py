"""Union-find computation of H and its oracles."""

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conic_forge import hpt_fixture as hpt
from conic_forge.brauer import (Component, Curve, DiscriminantGraph, GraphFormatError, HypothesisViolated,
                                IncompleteWitness, NotGoodDiscriminant, brute_force_H, compute_H, corollary_check,
                                graph_from_witnesses, span_of_basis)
from support import hpt_model_graph, random_graph


def test_examples():
    res = compute_H(hpt_model_graph())
    assert res["order_of_quotient"] == 2 and res["equality_certified"]
    one = compute_H(DiscriminantGraph([Component("S", True)]))
    assert one["basis"] == ["1"] and one["order_H"] == 2 and one["order_of_quotient"] == 1
    forced = DiscriminantGraph([Component("A", True), Component("B", True)], [Curve(0, 1, "C", 1, 1)])
    res = compute_H(forced)
    assert span_of_basis(res["basis"]) == {(0, 0), (1, 1)} and res["order_of_quotient"] == 1


def test_corollary_examples():
    assert corollary_check(hpt_model_graph())
    forced = DiscriminantGraph([Component("A", True), Component("B", True)], [Curve(0, 1, "C", 1, 1)])
    assert not corollary_check(forced)
    chain = DiscriminantGraph([Component(f"S{k}", True) for k in range(3)],
                              [Curve(0, 1, "a", 0, 0, True, True, True), Curve(1, 2, "b", 0, 0, True, True, True)])
    assert corollary_check(chain) and compute_H(chain)["order_of_quotient"] == 4


def test_errors():
    G = hpt_model_graph()
    G.hypotheses["h4_factorial"] = False
    with pytest.raises(HypothesisViolated, match="h4_factorial"):
        compute_H(G)
    with pytest.raises(NotGoodDiscriminant):
        compute_H(DiscriminantGraph([Component("S", False)]))
    with pytest.raises(GraphFormatError):
        DiscriminantGraph([Component("S", True)], [Curve(0, 0, "loop", 0, 0)])
    with pytest.raises(GraphFormatError):
        DiscriminantGraph([Component("S", True)], [Curve(0, 3, "far", 0, 0)])
    with pytest.raises(GraphFormatError):
        DiscriminantGraph.loads('{"components": [{"name": "S", "residue_nontrivial": "yes"}]}')
    with pytest.raises(GraphFormatError):
        DiscriminantGraph.loads("[1, 2]")


def test_uncertified_equality_and_mixed_flag():
    G = DiscriminantGraph([Component("A", True), Component("B", True)],
                          [Curve(0, 1, "C", 0, 0, True, True, False), Curve(0, 1, "E", 1, 0)])
    res = compute_H(G)
    assert not res["equality_certified"] and res["mixed_residue_curves"] == ["E"]
    assert res["order_of_quotient"] == 2


def test_record_roundtrip():
    G = hpt_model_graph()
    again = DiscriminantGraph.loads(json.dumps(G.to_record()))
    assert again == G


def test_graph_from_witnesses(hpt41):
    res = hpt.brauer_graph(hpt41)
    assert res["order_of_quotient"] == 2 and res["equality_certified"]
    G = DiscriminantGraph.from_record(res["graph"])
    assert G.n == 2 and len(G.curves) == 6 and all(c.exempt for c in G.curves)
    comps = [{"name": "D+", "split_point": [1], "nonsplit_point": [2]},
             {"name": "D-", "split_point": [3], "nonsplit_point": [4]}]
    curves = [{"i": 0, "j": 1, "name": "L1", "generic_rank": 2, "cover_reducible": True, "transversal": True}]
    hyps = {h: True for h in ("h1_base_vanishing", "h2_curves_two_surfaces", "h3_points_three_surfaces",
                              "h4_factorial")}
    G = graph_from_witnesses(comps, curves, hyps)
    assert compute_H(G)["order_of_quotient"] == 2
    with pytest.raises(IncompleteWitness):
        graph_from_witnesses(comps, [{"i": 0, "j": 1, "name": "L1", "cover_reducible": True, "transversal": True}],
                             hyps)
    with pytest.raises(IncompleteWitness):
        graph_from_witnesses([{"name": "D+", "split_point": [1]}], [], hyps)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_union_find_matches_enumeration(seed):
    G = random_graph(random.Random(seed))
    res = compute_H(G)
    H = brute_force_H(G)
    assert span_of_basis(res["basis"]) == set(H)
    assert res["order_H"] == len(H)
    assert (1,) * G.n in set(H)
    Hs = set(H)
    assert all(tuple((a + b) % 2 for a, b in zip(x, y)) in Hs for x in H for y in H)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_adding_a_constraint_is_monotone(seed):
    rng = random.Random(seed)
    G = random_graph(rng)
    if G.n < 2:
        return
    before = compute_H(G)["order_H"]
    i, j = rng.sample(range(G.n), 2)
    G.curves.append(Curve(i, j, "extra", 1, 1))
    assert compute_H(G)["order_H"] <= before
