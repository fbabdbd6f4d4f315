"""Prime field arithmetic."""

import pytest
from hypothesis import given, strategies as st

from conic_forge.gf import (GF, BadModulus, DivisionByZero, FieldElement, ModulusMismatch, NotASquare,
                            field_arith, is_square_int, sqrt_int)


def test_spec_examples():
    F7 = GF(7)
    assert field_arith(F7(3), None, "inv") == 5
    assert field_arith(F7(0), None, "neg") == 0
    assert field_arith(F7(5), F7(5), "mul") == 4
    assert F7(2).is_square() and not F7(3).is_square()
    assert GF(10007)(2).is_square()
    assert F7(2).sqrt() == 3
    assert F7(0).sqrt() == 0 and F7(1).sqrt() == 1


def test_errors():
    with pytest.raises(DivisionByZero):
        field_arith(GF(7)(1), GF(7)(0), "div")
    with pytest.raises(DivisionByZero):
        GF(7)(0).inv()
    for bad in (2, 9, 1, 15, 0):
        with pytest.raises(BadModulus):
            GF(bad)
    with pytest.raises(NotASquare):
        GF(7)(3).sqrt()
    with pytest.raises(ModulusMismatch):
        GF(7)(1) + GF(11)(1)
    with pytest.raises(ValueError):
        field_arith(GF(7)(1), GF(7)(1), "pow")


def test_square_count_small_primes():
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        squares = {a * a % p for a in range(p)}
        assert sum(is_square_int(a, p) for a in range(p)) == (p + 1) // 2
        assert {a for a in range(p) if is_square_int(a, p)} == squares


@pytest.mark.parametrize("p", [13, 17, 41, 73, 97, 10009, 65537])
def test_tonelli_shanks_p_1_mod_4(p):
    # p = 1 mod 4 takes the general branch
    for a in range(1, min(p, 400)):
        x = a * a % p
        r = sqrt_int(x, p)
        assert r * r % p == x and r <= p // 2


@given(st.integers(0, 10**6), st.sampled_from([10007, 10009, 1000003]))
def test_square_roots_random(a, p):
    x = FieldElement(a, p)
    assert (x * x).is_square()
    assert (x * x).sqrt() in (x, -x)


@given(st.integers(1, 10**9), st.sampled_from([10007, 1000003, (1 << 61) - 1]))
def test_inverse_random(a, p):
    x = FieldElement(a, p)
    if x:
        assert x * x.inv() == 1
        assert x / x == 1
