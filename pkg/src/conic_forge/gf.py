"""Arithmetic in prime fields F_p (p odd).

Elements carry their modulus; mixing moduli raises instead of coercing.
Internally the rest of the package works with plain ``int`` residues for
speed and uses the ``*_int`` helpers below; :class:`FieldElement` is the
public value type.
"""

from __future__ import annotations

from functools import lru_cache

import flint

MAX_MODULUS = 1 << 61


class FieldError(ArithmeticError):
    pass


class BadModulus(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


class NotASquare(FieldError):
    pass


class ModulusMismatch(FieldError):
    pass


@lru_cache(maxsize=None)
def check_modulus(p: int) -> int:
    """Return ``p`` if it is an admissible modulus, else raise BadModulus."""
    if not isinstance(p, int) or p < 3 or p % 2 == 0:
        raise BadModulus(f"modulus must be an odd prime, got {p!r}")
    if p >= MAX_MODULUS:
        raise BadModulus(f"modulus {p} exceeds 2^61")
    if not flint.fmpz(p).is_prime():
        raise BadModulus(f"modulus {p} is not prime")
    return p


def inv_int(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise DivisionByZero(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def is_square_int(a: int, p: int) -> bool:
    """Euler's criterion; 0 counts as a square."""
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


def sqrt_int(a: int, p: int) -> int:
    """Tonelli-Shanks square root, normalised to the representative in [0, p/2]."""
    a %= p
    if a == 0:
        return 0
    if not is_square_int(a, p):
        raise NotASquare(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while is_square_int(z, p):
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


class FieldElement:
    """An element of F_p.  Immutable."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        check_modulus(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "value", int(value) % p)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ModulusMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value + b, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value - b, self.p)

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(b - self.value, self.p)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * inv_int(b, self.p), self.p)

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(b * inv_int(self.value, self.p), self.p)

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, n: int):
        if n < 0:
            return FieldElement(pow(inv_int(self.value, self.p), -n, self.p), self.p)
        return FieldElement(pow(self.value, n, self.p), self.p)

    def inv(self) -> "FieldElement":
        return FieldElement(inv_int(self.value, self.p), self.p)

    def is_square(self) -> bool:
        return is_square_int(self.value, self.p)

    def sqrt(self) -> "FieldElement":
        return FieldElement(sqrt_int(self.value, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


class GF:
    """Factory for elements of F_p."""

    def __init__(self, p: int):
        self.p = check_modulus(p)

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value, self.p)

    def elements(self):
        return [FieldElement(a, self.p) for a in range(self.p)]

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch form of the field operations (add, sub, mul, div, neg, inv)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown field operation {op!r}")
