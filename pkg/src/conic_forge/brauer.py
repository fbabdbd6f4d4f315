"""Combinatorics of the unramified Brauer group of a conic bundle.

The discriminant components S_1..S_n and the curves C in S_i n S_j carry
residue flags.  Every constraint on x in (Z/2)^n is an equality x_i = x_j,
so H is computed with a union-find: |H| = 2^(#classes), and the quotient
by the diagonal has order 2^(#classes - 1).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

MAX_COMPONENTS = 64

HYPOTHESES = ("h1_base_vanishing", "h2_curves_two_surfaces", "h3_points_three_surfaces", "h4_factorial")


class BrauerError(ValueError):
    pass


class HypothesisViolated(BrauerError):
    pass


class NotGoodDiscriminant(BrauerError):
    pass


class IncompleteWitness(BrauerError):
    pass


class GraphFormatError(BrauerError):
    pass


@dataclass
class Component:
    name: str
    residue_nontrivial: bool
    provenance: str = ""


@dataclass
class Curve:
    i: int
    j: int
    name: str
    d_i: int
    d_j: int
    restriction_i_square: bool = False
    restriction_j_square: bool = False
    transversal_rank2: bool = False
    provenance: str = ""

    @property
    def exempt(self) -> bool:
        """Both residues vanish and both restrictions are squares: no constraint."""
        return (self.d_i == 0 and self.d_j == 0
                and self.restriction_i_square and self.restriction_j_square)

    @property
    def forces_equality(self) -> bool:
        if self.d_i == 1 and self.d_j == 1:
            return True
        return self.d_i == 0 and self.d_j == 0 and not (self.restriction_i_square and self.restriction_j_square)


@dataclass
class DiscriminantGraph:
    components: list
    curves: list = field(default_factory=list)
    hypotheses: dict = field(default_factory=lambda: {h: True for h in HYPOTHESES})

    def __post_init__(self):
        n = len(self.components)
        if n == 0:
            raise GraphFormatError("a graph needs at least one component")
        if n > MAX_COMPONENTS:
            raise GraphFormatError(f"at most {MAX_COMPONENTS} components are supported")
        for c in self.curves:
            if not (0 <= c.i < n and 0 <= c.j < n):
                raise GraphFormatError(f"curve {c.name!r} has component index out of range")
            if c.i == c.j:
                raise GraphFormatError(f"curve {c.name!r} joins component {c.i} to itself")
            if c.d_i not in (0, 1) or c.d_j not in (0, 1):
                raise GraphFormatError(f"curve {c.name!r} has residue values outside {{0,1}}")

    @property
    def n(self) -> int:
        return len(self.components)

    def to_record(self) -> dict:
        return {
            "components": [{"name": c.name, "residue_nontrivial": c.residue_nontrivial,
                            **({"provenance": c.provenance} if c.provenance else {})}
                           for c in self.components],
            "curves": [{"i": c.i, "j": c.j, "name": c.name, "d_i": c.d_i, "d_j": c.d_j,
                        "restriction_i_square": c.restriction_i_square,
                        "restriction_j_square": c.restriction_j_square,
                        "transversal_rank2": c.transversal_rank2,
                        **({"provenance": c.provenance} if c.provenance else {})}
                       for c in self.curves],
            "hypotheses": dict(self.hypotheses),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "DiscriminantGraph":
        try:
            comps = [Component(str(c["name"]), _as_bool(c["residue_nontrivial"]), str(c.get("provenance", "")))
                     for c in rec["components"]]
            curves = [Curve(int(c["i"]), int(c["j"]), str(c.get("name", f"C{k}")), int(c["d_i"]), int(c["d_j"]),
                            _as_bool(c.get("restriction_i_square", False)),
                            _as_bool(c.get("restriction_j_square", False)),
                            _as_bool(c.get("transversal_rank2", False)), str(c.get("provenance", "")))
                      for k, c in enumerate(rec.get("curves", []))]
            hyps = rec.get("hypotheses", {})
            unknown = set(hyps) - set(HYPOTHESES)
            if unknown:
                raise GraphFormatError(f"unknown hypotheses {sorted(unknown)}")
            hyps = {h: _as_bool(hyps.get(h, False)) for h in HYPOTHESES}
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"malformed graph record: {exc}") from exc
        return cls(comps, curves, hyps)

    @classmethod
    def loads(cls, text: str) -> "DiscriminantGraph":
        try:
            rec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(rec, dict):
            raise GraphFormatError("graph file must hold an object")
        return cls.from_record(rec)


def _as_bool(x) -> bool:
    if isinstance(x, bool):
        return x
    raise GraphFormatError(f"expected a boolean, got {x!r}")


def _check_applicable(G: DiscriminantGraph):
    failing = [h for h in HYPOTHESES if not G.hypotheses.get(h, False)]
    if failing:
        raise HypothesisViolated(f"hypotheses not satisfied: {', '.join(failing)}")
    bad = [c.name for c in G.components if not c.residue_nontrivial]
    if bad:
        raise NotGoodDiscriminant(f"components with trivial residue: {', '.join(bad)}")


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _classes(n: int, curves: Sequence[Curve]) -> list[list[int]]:
    uf = _UnionFind(n)
    for c in curves:
        if c.forces_equality:
            uf.union(c.i, c.j)
    groups: dict = {}
    for k in range(n):
        groups.setdefault(uf.find(k), []).append(k)
    return sorted(groups.values())


def compute_H(G: DiscriminantGraph) -> dict:
    """Basis of H (as 0/1 strings), the order of H/<(1,...,1)>, and the equality flag."""
    _check_applicable(G)
    classes = _classes(G.n, G.curves)
    basis = ["".join("1" if k in cls else "0" for k in range(G.n)) for cls in classes]
    exempt = [c for c in G.curves if c.exempt]
    mixed = [c.name for c in G.curves if c.d_i != c.d_j]
    return {
        "basis": basis,
        "order_H": 2 ** len(classes),
        "order_of_quotient": 2 ** (len(classes) - 1),
        "equality_certified": all(c.transversal_rank2 for c in exempt),
        "mixed_residue_curves": mixed,
    }


def brute_force_H(G: DiscriminantGraph) -> list[tuple[int, ...]]:
    """All x in (Z/2)^n satisfying the constraints, by enumeration (n <= 20)."""
    if G.n > 20:
        raise BrauerError("brute force limited to n <= 20")
    constraints = [(c.i, c.j) for c in G.curves if c.forces_equality]
    return [x for x in itertools.product((0, 1), repeat=G.n) if all(x[i] == x[j] for i, j in constraints)]


def span_of_basis(basis: Sequence[str]) -> set[tuple[int, ...]]:
    vecs = [tuple(int(ch) for ch in b) for b in basis]
    n = len(vecs[0]) if vecs else 0
    out = set()
    for coeffs in itertools.product((0, 1), repeat=len(vecs)):
        x = [0] * n
        for c, v in zip(coeffs, vecs):
            if c:
                x = [(a + b) % 2 for a, b in zip(x, v)]
        out.add(tuple(x))
    return out


def corollary_check(G: DiscriminantGraph) -> bool:
    """n >= 2 and every curve has vanishing residues with reducible double cover."""
    _check_applicable(G)
    return G.n >= 2 and all(c.exempt for c in G.curves)


def graph_from_witnesses(components: Sequence[dict], curves: Sequence[dict], hypotheses: dict) -> DiscriminantGraph:
    """Turn geometric witness records into residue flags.

    components: {name, split_point, nonsplit_point} -- both present means the
    double cover of the component is irreducible (residue nontrivial).
    curves: {i, j, name, generic_rank, cover_reducible, transversal} -- generic
    rank 2 along C means two distinct lines, so both residues along C vanish;
    generic rank 1 means both are nonzero.  A reducible double cover of C means
    both restrictions are squares.
    """
    comps = []
    for rec in components:
        if "split_point" not in rec or "nonsplit_point" not in rec:
            raise IncompleteWitness(f"component {rec.get('name')!r} lacks split/nonsplit witnesses")
        ok = rec["split_point"] is not None and rec["nonsplit_point"] is not None
        comps.append(Component(rec["name"], ok, provenance=(
            f"split fiber at {rec['split_point']}, non-split fiber at {rec['nonsplit_point']}" if ok
            else "missing split or non-split fiber")))
    out = []
    for rec in curves:
        for key in ("i", "j", "name", "generic_rank", "cover_reducible", "transversal"):
            if key not in rec or rec[key] is None:
                raise IncompleteWitness(f"curve {rec.get('name')!r} lacks {key!r}")
        r = rec["generic_rank"]
        if r not in (1, 2):
            raise IncompleteWitness(f"curve {rec['name']!r} has generic rank {r}")
        d = 0 if r == 2 else 1
        sq = bool(rec["cover_reducible"]) and d == 0
        out.append(Curve(rec["i"], rec["j"], rec["name"], d, d, sq, sq,
                         bool(rec["transversal"]) and r == 2,
                         provenance=f"generic rank {r}; double cover {'reducible' if rec['cover_reducible'] else 'irreducible'}"))
    return DiscriminantGraph(comps, out, dict(hypotheses))
