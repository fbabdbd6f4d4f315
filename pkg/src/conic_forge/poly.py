"""Sparse multivariate polynomials over F_p.

A :class:`MultiPoly` is a map from exponent tuples to nonzero residues in
``[0, p)``.  Polynomials are homogeneous unless created with
``affine=True`` (local-chart work only).  The canonical term order is
graded reverse lexicographic; it fixes printing and division.

Large products and compositions are delegated to FLINT's ``nmod_mpoly``;
the dictionary representation stays authoritative.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

import flint

from .gf import FieldElement, check_modulus, inv_int, is_square_int, sqrt_int

BINARY_VARS = ("l", "m")
P2_VARS = ("u", "v", "w")
P3_VARS = ("S", "T", "U", "V")
X_VARS = ("X0", "X1", "X2", "X3")

_FLINT_THRESHOLD = 400


class PolyError(ValueError):
    pass


class PolySyntaxError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class InhomogeneousError(PolyError):
    pass


class VariableMismatch(PolyError):
    pass


class DegreeMismatch(PolyError):
    pass


class DimensionMismatch(PolyError):
    pass


class NotDivisible(PolyError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DegeneratePoints(PolyError):
    pass


class NotLinear(PolyError):
    pass


class NotAPerfectSquare(PolyError):
    pass


class WildCharacteristic(PolyError):
    pass


def grevlex_key(exp: tuple) -> tuple:
    return (sum(exp), tuple(-e for e in reversed(exp)))


def monomials(nvars: int, degree: int) -> list[tuple]:
    """All exponent vectors of the given total degree, grevlex descending."""
    out: list[tuple] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    if degree < 0:
        return []
    if nvars == 0:
        return [()] if degree == 0 else []
    rec((), degree, nvars)
    out.sort(key=grevlex_key, reverse=True)
    return out


_CTX_CACHE: dict = {}


def _ctx(nvars: int, p: int):
    key = (nvars, p)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        names = tuple(f"x{i}" for i in range(nvars))
        ctx = flint.nmod_mpoly_ctx.get(names, ordering="degrevlex", modulus=p)
        _CTX_CACHE[key] = ctx
    return ctx


class MultiPoly:
    """Sparse polynomial over F_p in a fixed ordered list of variables."""

    __slots__ = ("variables", "p", "terms", "affine", "_degree")

    def __init__(self, variables: Sequence[str], p: int, terms: Mapping[tuple, int] | None = None,
                 affine: bool = False, _clean: bool = False):
        self.variables = tuple(variables)
        self.p = p
        self.affine = affine
        if _clean:
            self.terms = dict(terms) if terms else {}
        else:
            check_modulus(p)
            n = len(self.variables)
            clean = {}
            for exp, c in (terms or {}).items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n or min(exp, default=0) < 0:
                    raise DimensionMismatch(f"bad exponent {exp} for variables {self.variables}")
                c = int(c) % p
                if c:
                    clean[exp] = (clean.get(exp, 0) + c) % p
                    if not clean[exp]:
                        del clean[exp]
            self.terms = clean
        degs = {sum(e) for e in self.terms}
        if not affine and len(degs) > 1:
            raise InhomogeneousError(f"terms of degrees {sorted(degs)} in a homogeneous polynomial")
        self._degree = max(degs) if degs else -1

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables, p, affine=False):
        return cls(variables, p, {}, affine=affine, _clean=True)

    @classmethod
    def constant(cls, c, variables, p, affine=False):
        return cls(variables, p, {(0,) * len(variables): int(c)}, affine=affine)

    @classmethod
    def var(cls, name, variables, p, affine=False):
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"{name} not in {variables}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, p, {exp: 1}, affine=affine, _clean=True)

    @classmethod
    def gens(cls, variables, p, affine=False):
        return [cls.var(v, variables, p, affine=affine) for v in variables]

    @classmethod
    def linear(cls, coeffs: Sequence[int], variables, p):
        n = len(variables)
        terms = {}
        for i, c in enumerate(coeffs):
            exp = tuple(1 if j == i else 0 for j in range(n))
            terms[exp] = c
        return cls(variables, p, terms)

    def _new(self, terms, affine=None):
        return MultiPoly(self.variables, self.p, terms,
                         affine=self.affine if affine is None else affine, _clean=True)

    # -- basic properties ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return self._degree <= 0

    def coefficient(self, exp) -> FieldElement:
        return FieldElement(self.terms.get(tuple(exp), 0), self.p)

    def sorted_terms(self) -> list[tuple[tuple, int]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple, int]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        exp = max(self.terms, key=grevlex_key)
        return exp, self.terms[exp]

    def leading_coefficient(self) -> int:
        return self.leading_term()[1]

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return self._new({e: c for e, c in self.terms.items() if sum(e) == k})

    def order(self) -> int:
        """Lowest total degree present (for affine local expansions)."""
        return min((sum(e) for e in self.terms), default=-1)

    def _check_compatible(self, other: "MultiPoly"):
        if not isinstance(other, MultiPoly):
            raise TypeError(f"expected MultiPoly, got {type(other).__name__}")
        if other.variables != self.variables or other.p != self.p:
            raise VariableMismatch(f"{self.variables}/F_{self.p} vs {other.variables}/F_{other.p}")

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check_compatible(other)
            return other
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise VariableMismatch("field mismatch")
            other = other.value
        if isinstance(other, int):
            return MultiPoly.constant(other, self.variables, self.p, affine=self.affine)
        return NotImplemented

    def _sum(self, other, sign):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        affine = self.affine or other.affine
        if not affine and self.terms and other.terms and self._degree != other._degree:
            raise DegreeMismatch(f"adding homogeneous forms of degree {self._degree} and {other._degree}")
        p = self.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + sign * c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(self.variables, p, out, affine=affine, _clean=True)

    def __add__(self, other):
        return self._sum(other, 1)

    def __radd__(self, other):
        return self._sum(other, 1)

    def __sub__(self, other):
        return self._sum(other, -1)

    def __rsub__(self, other):
        return (-self)._sum(other, 1)

    def __neg__(self):
        p = self.p
        return self._new({e: (p - c) for e, c in self.terms.items()})

    def scale(self, c) -> "MultiPoly":
        c = int(c) % self.p
        if c == 0:
            return self._new({})
        p = self.p
        return self._new({e: (v * c) % p for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            if isinstance(other, FieldElement):
                if other.p != self.p:
                    raise VariableMismatch("field mismatch")
                other = other.value
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_compatible(other)
        affine = self.affine or other.affine
        if not self.terms or not other.terms:
            return MultiPoly(self.variables, self.p, {}, affine=affine, _clean=True)
        if len(self.terms) * len(other.terms) > _FLINT_THRESHOLD:
            return _from_flint(_to_flint(self) * _to_flint(other), self.variables, affine)
        p = self.p
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return MultiPoly(self.variables, p, {e: c for e, c in out.items() if c},
                         affine=affine, _clean=True)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        if n == 0:
            return MultiPoly.constant(1, self.variables, self.p, affine=self.affine)
        if len(self.terms) > 1 and n > 1:
            return _from_flint(_to_flint(self) ** n, self.variables, self.affine)
        result = MultiPoly.constant(1, self.variables, self.p, affine=self.affine)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return (self.variables == other.variables and self.p == other.p
                    and self.terms == other.terms)
        if isinstance(other, int):
            return self == MultiPoly.constant(other, self.variables, self.p, affine=True)
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, self.p, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- evaluation and composition ------------------------------------------

    def eval_int(self, coords: Sequence[int]) -> int:
        if len(coords) != self.nvars:
            raise DimensionMismatch(f"point of length {len(coords)} for {self.nvars} variables")
        p = self.p
        d = max(self._degree, 0)
        powers = []
        for x in coords:
            x %= p
            pw = [1] * (d + 1)
            for k in range(1, d + 1):
                pw[k] = pw[k - 1] * x % p
            powers.append(pw)
        total = 0
        for exp, c in self.terms.items():
            t = c
            for i, e in enumerate(exp):
                if e:
                    t = t * powers[i][e]
            total += t
        return total % p

    def evaluate(self, point) -> FieldElement:
        """Value at a representative: ProjPoint or coordinate sequence."""
        coords = point.coords if isinstance(point, ProjPoint) else [int(c) for c in point]
        if isinstance(point, ProjPoint) and point.p != self.p:
            raise DimensionMismatch("field mismatch between point and polynomial")
        return FieldElement(self.eval_int(coords), self.p)

    def __call__(self, *coords):
        if len(coords) == 1 and not isinstance(coords[0], int):
            return self.evaluate(coords[0])
        return self.evaluate(coords)

    def substitute(self, images) -> "MultiPoly":
        """Compose with images (sequence aligned to variables, or a var->poly map)."""
        if isinstance(images, Mapping):
            missing = [v for v in self.variables if v not in images]
            if missing:
                raise VariableMismatch(f"no image for {missing}")
            images = [images[v] for v in self.variables]
        images = list(images)
        if len(images) != self.nvars:
            raise DimensionMismatch(f"{len(images)} images for {self.nvars} variables")
        first = images[0]
        for g in images:
            if not isinstance(g, MultiPoly):
                raise TypeError("images must be MultiPoly")
            first._check_compatible(g)
        affine = any(g.affine for g in images)
        nonzero = [g.degree for g in images if g.terms]
        if not affine and len(set(nonzero)) > 1:
            raise DegreeMismatch(f"images of degrees {sorted(set(nonzero))}")
        if not self.terms:
            return MultiPoly(first.variables, first.p, {}, affine=affine, _clean=True)
        if affine or self.affine:
            return _substitute_python(self, images, affine=True)
        ctx = _ctx(first.nvars, first.p)
        f = _to_flint(self, _ctx(self.nvars, self.p))
        gs = [_to_flint(g, ctx) for g in images]
        return _from_flint(f.compose(*gs, ctx=ctx), first.variables, affine)

    def diff(self, var) -> "MultiPoly":
        i = self.variables.index(var) if isinstance(var, str) else int(var)
        p = self.p
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = c * e[i] % p
                if v:
                    ne = list(e)
                    ne[i] -= 1
                    out[tuple(ne)] = v
        return self._new(out)

    def gradient(self) -> list["MultiPoly"]:
        return [self.diff(i) for i in range(self.nvars)]

    # -- division ------------------------------------------------------------

    def divmod(self, g: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Reduction by a single divisor under grevlex."""
        self._check_compatible(g)
        if not g.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.p
        lg, cg = g.leading_term()
        inv = inv_int(cg, p)
        g_rest = [(e, c) for e, c in g.terms.items() if e != lg]
        rem = dict(self.terms)
        quot: dict = {}
        out_rem: dict = {}
        affine = self.affine or g.affine
        while rem:
            e = max(rem, key=grevlex_key)
            c = rem.pop(e)
            if all(a >= b for a, b in zip(e, lg)):
                qe = tuple(a - b for a, b in zip(e, lg))
                qc = c * inv % p
                quot[qe] = (quot.get(qe, 0) + qc) % p
                for e2, c2 in g_rest:
                    ne = tuple(a + b for a, b in zip(qe, e2))
                    v = (rem.get(ne, 0) - qc * c2) % p
                    if v:
                        rem[ne] = v
                    else:
                        rem.pop(ne, None)
            else:
                out_rem[e] = c
        q = MultiPoly(self.variables, p, {e: c for e, c in quot.items() if c}, affine=affine, _clean=True)
        r = MultiPoly(self.variables, p, out_rem, affine=True, _clean=True)
        if not affine and r.is_homogeneous():
            r = MultiPoly(self.variables, p, out_rem, affine=False, _clean=True)
        return q, r

    def exact_div(self, g: "MultiPoly") -> "MultiPoly":
        q, r = self.divmod(g)
        if r.terms:
            lt = r.leading_term()
            raise NotDivisible(f"nonzero remainder with leading term {_format_term(lt[0], lt[1], self.variables)}",
                               witness=lt)
        return q

    def divides(self, f: "MultiPoly") -> bool:
        try:
            f.exact_div(self)
        except NotDivisible:
            return False
        return True

    # -- formatting -----------------------------------------------------------

    def format(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_format_term(e, c, self.variables) for e, c in self.sorted_terms())

    __str__ = format

    def __repr__(self):
        return f"MultiPoly({self.format()!r}, vars={self.variables}, p={self.p})"

    def with_variables(self, variables) -> "MultiPoly":
        """Same exponents, renamed variables."""
        if len(variables) != self.nvars:
            raise DimensionMismatch("renaming must preserve the number of variables")
        return MultiPoly(variables, self.p, self.terms, affine=self.affine, _clean=True)

    def as_affine(self) -> "MultiPoly":
        return self._new(self.terms, affine=True)

    def as_homogeneous(self) -> "MultiPoly":
        return MultiPoly(self.variables, self.p, self.terms)


def _format_term(exp, c, variables) -> str:
    parts = []
    for v, e in zip(variables, exp):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    if not parts:
        return str(c)
    if c == 1:
        return "*".join(parts)
    return f"{c}*" + "*".join(parts)


def _to_flint(f: MultiPoly, ctx=None):
    ctx = ctx or _ctx(f.nvars, f.p)
    return ctx.from_dict(f.terms) if f.terms else ctx.from_dict({})


def _from_flint(g, variables, affine) -> MultiPoly:
    terms = {tuple(int(x) for x in e): int(c) for e, c in g.to_dict().items()}
    p = int(g.context().modulus())
    return MultiPoly(variables, p, terms, affine=affine, _clean=True)


def _substitute_python(f: MultiPoly, images, affine) -> MultiPoly:
    first = images[0]
    one = MultiPoly.constant(1, first.variables, first.p, affine=affine)
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = one if k == 0 else power(i, k - 1) * images[i].as_affine()
        return cache[key]

    total = MultiPoly.zero(first.variables, first.p, affine=True)
    for e, c in f.terms.items():
        t = one.scale(c)
        for i, k in enumerate(e):
            if k:
                t = t * power(i, k)
        total = total + t
    return total if affine else total.as_homogeneous()


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[A-Za-z][0-9]*)|(?P<op>[-+*^]))")


def parse(text: str, variables: Sequence[str], p: int, homogeneous: bool = True) -> MultiPoly:
    """Parse the polynomial grammar into a canonical MultiPoly.

    expr := term (('+'|'-') term)*;  term := coeff ('*' varpow)* | varpow ('*' varpow)*;
    varpow := VAR ('^' UINT)?;  coeff := UINT.  A leading '-' is also accepted.
    """
    check_modulus(p)
    variables = tuple(variables)
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    i = 0

    def peek():
        return tokens[i]

    def take(kind=None, value=None):
        nonlocal i
        tok = tokens[i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise PolySyntaxError(f"expected {want}, found {tok[1] or 'end of input'!r}", tok[2])
        i += 1
        return tok

    n = len(variables)
    terms: dict = {}

    def varpow(exp):
        tok = take("var")
        if tok[1] not in variables:
            raise PolySyntaxError(f"unknown variable {tok[1]!r}", tok[2])
        k = 1
        if peek()[1] == "^":
            take("op", "^")
            k = int(take("num")[1])
        exp[variables.index(tok[1])] += k

    def term(sign):
        exp = [0] * n
        coeff = 1
        if peek()[0] == "num":
            coeff = int(take("num")[1])
            while peek()[1] == "*":
                take("op", "*")
                varpow(exp)
        elif peek()[0] == "var":
            varpow(exp)
            while peek()[1] == "*":
                take("op", "*")
                varpow(exp)
        else:
            tok = peek()
            raise PolySyntaxError(f"expected a term, found {tok[1] or 'end of input'!r}", tok[2])
        key = tuple(exp)
        terms[key] = (terms.get(key, 0) + sign * coeff) % p

    sign = 1
    if peek()[1] == "-":
        take("op", "-")
        sign = -1
    term(sign)
    while peek()[0] != "end":
        tok = take("op")
        if tok[1] not in "+-":
            raise PolySyntaxError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
        term(1 if tok[1] == "+" else -1)
    degs = {sum(e) for e, c in terms.items() if c % p}
    if homogeneous and len(degs) > 1:
        raise InhomogeneousError(f"{text!r} mixes degrees {sorted(degs)}")
    return MultiPoly(variables, p, terms, affine=not homogeneous or len(degs) > 1)


# -- points -------------------------------------------------------------------

class ProjPoint:
    """Point of P^n(F_p), stored with its first nonzero coordinate scaled to 1."""

    __slots__ = ("coords", "p")

    def __init__(self, coords: Iterable, p: int):
        vals = [int(c) % p for c in coords]
        lead = next((c for c in vals if c), 0)
        if lead == 0:
            raise DegeneratePoints("all coordinates are zero")
        inv = inv_int(lead, p)
        self.coords = tuple(c * inv % p for c in vals)
        self.p = p

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.coords == other.coords and self.p == other.p

    def __hash__(self):
        return hash((self.coords, self.p))

    def __lt__(self, other):
        return self.coords < other.coords

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    def to_list(self) -> list[int]:
        return list(self.coords)

    def field_coords(self) -> list[FieldElement]:
        return [FieldElement(c, self.p) for c in self.coords]


def enumerate_projective(n: int, p: int):
    """Canonical points of P^n(F_p) in lexicographic order of representatives."""
    import itertools

    for lead in range(n + 1):
        for rest in itertools.product(range(p), repeat=n - lead):
            yield ProjPoint((0,) * lead + (1,) + rest, p)


# -- restriction ----------------------------------------------------------------

def restrict_to_line(f: MultiPoly, P: ProjPoint, Q: ProjPoint) -> MultiPoly:
    """f(l*P + m*Q) as a binary form in (l, m)."""
    if len(P) != f.nvars or len(Q) != f.nvars:
        raise DimensionMismatch("points do not match the ambient space of f")
    if P == Q:
        raise DegeneratePoints("restriction needs two distinct points")
    p = f.p
    images = [MultiPoly(BINARY_VARS, p, {(1, 0): a, (0, 1): b}) for a, b in zip(P.coords, Q.coords)]
    if f.is_zero():
        return MultiPoly.zero(BINARY_VARS, p)
    return f.substitute(images)


def plane_elimination(plane: MultiPoly) -> tuple[int, list[MultiPoly]]:
    """Coordinates on {plane = 0}: eliminate the first variable with nonzero coefficient.

    Returns the eliminated index and the images of all ambient variables as
    linear forms in the remaining variables.
    """
    if plane.is_zero() or plane.degree != 1:
        raise NotLinear("plane must be a nonzero linear form")
    n, p = plane.nvars, plane.p
    coeffs = [plane.terms.get(tuple(1 if j == i else 0 for j in range(n)), 0) for i in range(n)]
    k = next(i for i, c in enumerate(coeffs) if c)
    rest = tuple(v for i, v in enumerate(plane.variables) if i != k)
    inv = inv_int(coeffs[k], p)
    images = []
    for i in range(n):
        if i == k:
            terms = {}
            for j, c in enumerate(coeffs):
                if j != k and c:
                    jj = j if j < k else j - 1
                    terms[tuple(1 if t == jj else 0 for t in range(n - 1))] = (-c * inv) % p
            images.append(MultiPoly(rest, p, terms))
        else:
            ii = i if i < k else i - 1
            images.append(MultiPoly(rest, p, {tuple(1 if t == ii else 0 for t in range(n - 1)): 1}))
    return k, images


def restrict_to_plane(f: MultiPoly, plane: MultiPoly) -> MultiPoly:
    """f on the plane, in the ambient coordinates minus the eliminated one."""
    plane._check_compatible(f)
    k, images = plane_elimination(plane)
    if f.is_zero():
        return MultiPoly.zero(images[0].variables, f.p)
    return f.substitute(images)


# -- univariate / binary helpers ---------------------------------------------------

def nmod_from_coeffs(coeffs: Sequence[int], p: int):
    return flint.nmod_poly([int(c) for c in coeffs], p)


def binary_to_univariate(h: MultiPoly):
    """Dehomogenise at m = 1: returns (nmod_poly in l, multiplicity of the root (1:0))."""
    if h.nvars != 2:
        raise DimensionMismatch("binary form expected")
    n = h.degree
    coeffs = [0] * (n + 1)
    for (a, b), c in h.terms.items():
        coeffs[a] = c
    u = nmod_from_coeffs(coeffs, h.p)
    return u, n - u.degree()


def univariate_to_binary(u, degree: int, p: int, variables=BINARY_VARS) -> MultiPoly:
    coeffs = [int(c) for c in u.coeffs()]
    terms = {(i, degree - i): c for i, c in enumerate(coeffs) if c}
    return MultiPoly(variables, p, terms)


def binary_roots(h: MultiPoly) -> list[tuple[ProjPoint, int]]:
    """F_p-rational roots (l:m) of a nonzero binary form with multiplicities."""
    if h.is_zero():
        raise PolyError("zero form has every point as a root")
    u, inf_mult = binary_to_univariate(h)
    out = []
    if u.degree() > 0:
        for r, mult in u.roots():
            out.append((ProjPoint((int(r), 1), h.p), int(mult)))
    if inf_mult:
        out.append((ProjPoint((1, 0), h.p), inf_mult))
    out.sort(key=lambda t: t[0].coords)
    return out


def sqrt_binary_form(h: MultiPoly) -> tuple[MultiPoly, FieldElement]:
    """Write h = c * e^2 with e a binary form; absorb c into e when it is a square."""
    if h.nvars != 2:
        raise DimensionMismatch("binary form expected")
    if h.is_zero():
        raise NotAPerfectSquare("zero form")
    n = h.degree
    if n % 2:
        raise NotAPerfectSquare(f"odd degree {n}")
    if h.p <= n:
        raise WildCharacteristic(f"p = {h.p} <= degree {n}")
    u, k = binary_to_univariate(h)
    if k % 2:
        raise NotAPerfectSquare(f"root (1:0) of odd multiplicity {k}")
    lc, factors = u.factor_squarefree()
    e = nmod_from_coeffs([1], h.p)
    for fac, mult in factors:
        if mult % 2:
            raise NotAPerfectSquare(f"factor of odd multiplicity {mult}")
        e = e * fac ** (mult // 2)
    c = int(lc)
    e_form = univariate_to_binary(e, n // 2, h.p)
    if is_square_int(c, h.p):
        e_form = e_form.scale(sqrt_int(c, h.p))
        c = 1
    if e_form * e_form * c != h:
        raise NotAPerfectSquare("verification of c*e^2 failed")
    return e_form, FieldElement(c, h.p)


def proportional(f: MultiPoly, g: MultiPoly) -> tuple[bool, FieldElement | None]:
    """Is f = c*g for a nonzero scalar c?  Returns (flag, c)."""
    f._check_compatible(g)
    if f.is_zero() or g.is_zero():
        ok = f.is_zero() and g.is_zero()
        return ok, (FieldElement(1, f.p) if ok else None)
    if set(f.terms) != set(g.terms):
        return False, None
    e, cg = g.leading_term()
    c = f.terms[e] * inv_int(cg, f.p) % f.p
    if g.scale(c) == f:
        return True, FieldElement(c, f.p)
    return False, None


def random_poly(variables, p, degree, rng, density: float = 1.0) -> MultiPoly:
    terms = {}
    for e in monomials(len(variables), degree):
        if density >= 1.0 or rng.random() < density:
            terms[e] = rng.randrange(p)
    return MultiPoly(variables, p, terms)


def arith(f: MultiPoly, g, op: str) -> MultiPoly:
    """Dispatch form: add, sub, mul, scale (g an integer for scale)."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(int(g))
    raise ValueError(f"unknown operation {op!r}")


def evaluate(f: MultiPoly, P) -> FieldElement:
    return f.evaluate(P)


def substitute(f: MultiPoly, images) -> MultiPoly:
    return f.substitute(images)


def partial_derivative(f: MultiPoly, var) -> MultiPoly:
    if isinstance(var, str) and var not in f.variables:
        raise VariableMismatch(f"{var} not in {f.variables}")
    return f.diff(var)


def exact_div(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return f.exact_div(g)
