"""Symmetric matrices of forms as conic bundles over P^3 (or P^2).

A bundle is graded-free of type (d_1, ..., d_n) when deg a_ij = (d_i + d_j)/2
for every nonzero entry.  Pointwise questions (rank, split or non-split
fibers) reduce to exact linear algebra over F_p.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import flint

from .gf import FieldElement, is_square_int
from .poly import MultiPoly, ProjPoint, parse


class NotGradedFree(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


SMOOTH_CONIC = "smooth_conic"
SPLIT_PAIR = "split_pair"
NONSPLIT_PAIR = "nonsplit_pair"
DOUBLE_LINE = "double_line"
WHOLE_PLANE = "whole_plane"


@dataclass(frozen=True)
class FiberType:
    tag: str
    rank: int


def validate_graded_type(M: Sequence[Sequence[MultiPoly]]) -> tuple[int, ...]:
    """The degree triple making M graded-free, or raise.

    Diagonal entries fix d_i directly; rows with a zero diagonal are
    determined through their nonzero off-diagonal entries.  If some d_i is
    left free (a zero row), the smallest admissible value is chosen.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise NotGradedFree("matrix is not square")
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j] != M[j][i]:
                raise NotSymmetric(f"entry ({i},{j}) differs from ({j},{i})")
    degs = [[M[i][j].degree if not M[i][j].is_zero() else None for j in range(n)] for i in range(n)]
    bound = 2 * max((d for row in degs for d in row if d is not None), default=0)
    solutions = []
    for cand in itertools.product(range(bound + 1), repeat=n):
        if len({c % 2 for c in cand}) > 1:
            continue
        if all(degs[i][j] is None or 2 * degs[i][j] == cand[i] + cand[j]
               for i in range(n) for j in range(i, n)):
            solutions.append(cand)
    if not solutions:
        shape = "; ".join(",".join("-" if d is None else str(d) for d in row) for row in degs)
        raise NotGradedFree(f"no degree triple fits the entry degrees ({shape})")
    return solutions[0]


@dataclass(frozen=True)
class GradedConicBundle:
    """Symmetric matrix of forms over a common polynomial ring."""

    entries: tuple
    dtype: tuple = field(default=())

    def __post_init__(self):
        entries = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        t = validate_graded_type(entries)
        if self.dtype and tuple(self.dtype) != t:
            # a declared type must match one of the admissible triples exactly
            n = len(entries)
            ok = all(entries[i][j].is_zero() or 2 * entries[i][j].degree == self.dtype[i] + self.dtype[j]
                     for i in range(n) for j in range(n))
            if not ok or len({d % 2 for d in self.dtype}) > 1:
                raise NotGradedFree(f"declared type {tuple(self.dtype)} does not fit; entries give {t}")
            t = tuple(self.dtype)
        object.__setattr__(self, "dtype", t)

    @classmethod
    def from_upper(cls, upper: Sequence[MultiPoly], dtype=()) -> "GradedConicBundle":
        """From the upper triangle a00,a01,a02,a11,a12,a22 (or a00,a01,a11)."""
        n = {3: 2, 6: 3}[len(upper)]
        M = [[None] * n for _ in range(n)]
        k = 0
        for i in range(n):
            for j in range(i, n):
                M[i][j] = M[j][i] = upper[k]
                k += 1
        return cls(tuple(tuple(r) for r in M), tuple(dtype))

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def p(self) -> int:
        return self.entries[0][0].p

    @property
    def variables(self) -> tuple:
        return self.entries[0][0].variables

    @property
    def d(self) -> int:
        return sum(self.dtype)

    def r(self, i: int) -> int:
        return (self.d - self.dtype[i]) // 2

    def s(self, i: int) -> int:
        return (self.d + self.dtype[i]) // 2

    def entry_degree_shape(self) -> tuple:
        return tuple(tuple(e.degree if not e.is_zero() else None for e in row) for row in self.entries)

    def upper(self) -> list[MultiPoly]:
        n = self.size
        return [self.entries[i][j] for i in range(n) for j in range(i, n)]

    def evaluate(self, P) -> list[list[int]]:
        coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
        n = self.size
        vals = {}
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                vals[i, j] = self.entries[i][j].eval_int(coords)
                out[i][j] = out[j][i] = vals[i, j]
        return out

    def substitute(self, images) -> "GradedConicBundle":
        M = [[e.substitute(images) for e in row] for row in self.entries]
        return GradedConicBundle(tuple(tuple(r) for r in M))

    def to_record(self) -> dict:
        rec = {"p": self.p, "variables": list(self.variables), "type": list(self.dtype),
               "entries": [e.format() for e in self.upper()]}
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "GradedConicBundle":
        p = int(rec["p"])
        variables = tuple(rec["variables"])
        upper = [parse(s, variables, p) for s in rec["entries"]]
        upper = [u if not u.is_zero() else MultiPoly.zero(variables, p) for u in upper]
        return cls.from_upper(upper, tuple(rec.get("type") or ()))

    def dumps(self) -> str:
        return json.dumps(self.to_record(), indent=2, sort_keys=True)


def det_matrix(M: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if n == 3:
        return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
                - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
                + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    raise ValueError("only matrices up to 3x3 are supported")


def discriminant(M: GradedConicBundle) -> MultiPoly:
    return det_matrix(M.entries)


def minor(M: Sequence[Sequence[MultiPoly]], rows: Sequence[int], cols: Sequence[int]) -> MultiPoly:
    return det_matrix([[M[i][j] for j in cols] for i in rows])


def adjugate(M: GradedConicBundle) -> list[list[MultiPoly]]:
    """adj(M) with M adj(M) = det(M) I; entry (i,j) is the signed (j,i) cofactor."""
    E = M.entries
    n = M.size
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = [k for k in range(n) if k != j]
            cols = [k for k in range(n) if k != i]
            c = minor(E, rows, cols) if n > 1 else MultiPoly.constant(1, M.variables, M.p)
            out[i][j] = c if (i + j) % 2 == 0 else -c
    return out


def matmul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(1, m)), A[i][0] * B[0][j]) for j in range(k)] for i in range(n)]


def scalar_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    if not rows:
        return 0
    return flint.nmod_mat([list(r) for r in rows], p).rank()


def rank_at_point(M: GradedConicBundle, P) -> int:
    return scalar_rank(M.evaluate(P), M.p)


def _scalar_det3(a, p):
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])) % p


def classify_scalar(a: Sequence[Sequence[int]], p: int) -> FiberType:
    """Fiber type of the conic with symmetric scalar matrix a."""
    r = scalar_rank(a, p)
    if r == len(a):
        return FiberType(SMOOTH_CONIC, r)
    if r == 0:
        return FiberType(WHOLE_PLANE, 0)
    if r == 1:
        return FiberType(DOUBLE_LINE, 1)
    # rank 2: every nonzero principal 2x2 minor equals ab up to squares
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            m = (a[i][i] * a[j][j] - a[i][j] * a[j][i]) % p
            if m:
                return FiberType(SPLIT_PAIR if is_square_int(-m, p) else NONSPLIT_PAIR, 2)
    raise AssertionError("rank-2 symmetric matrix without a nonzero principal minor")


def classify_fiber(M: GradedConicBundle, P) -> FiberType:
    return classify_scalar(M.evaluate(P), M.p)


def rank_locus_scan(M: GradedConicBundle, r: int, domain: Iterable, workers: int = 1) -> list[ProjPoint]:
    """Points of the domain where the rank is at most r, sorted."""
    if r not in (0, 1, 2):
        raise ValueError("r must be 0, 1 or 2")
    p = M.p
    n = M.size
    upper = M.upper()
    det = discriminant(M) if r == n - 1 else None
    out = []
    for P in domain:
        coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
        if det is not None and det.eval_int(coords):
            continue
        vals = [u.eval_int(coords) for u in upper]
        if r == 0:
            if not any(vals):
                out.append(P if isinstance(P, ProjPoint) else ProjPoint(coords, p))
            continue
        a = [[0] * n for _ in range(n)]
        k = 0
        for i in range(n):
            for j in range(i, n):
                a[i][j] = a[j][i] = vals[k]
                k += 1
        if scalar_rank(a, p) <= r:
            out.append(P if isinstance(P, ProjPoint) else ProjPoint(coords, p))
    return sorted(set(out), key=lambda q: q.coords)


def diagonal_bundle(entries: Sequence[MultiPoly]) -> GradedConicBundle:
    n = len(entries)
    zero = MultiPoly.zero(entries[0].variables, entries[0].p)
    M = [[entries[i] if i == j else zero for j in range(n)] for i in range(n)]
    return GradedConicBundle(tuple(tuple(r) for r in M))


def field_value(x: int, p: int) -> FieldElement:
    return FieldElement(x, p)
