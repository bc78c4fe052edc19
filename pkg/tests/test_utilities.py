from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from mtlab.utilities import (
    crt,
    divisors,
    euler_phi,
    fraction_text,
    gcdex,
    primes_up_to,
    primitive_root,
    rational_gcd,
    valuation,
)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_gcdex_bezout(a, b):
    x, y, g = gcdex(a, b)
    assert g == gcd(a, b)
    assert a * x + b * y == g
    assert all(type(v) is int for v in (x, y, g))


def test_prime_and_divisor_helpers():
    assert primes_up_to(1) == []
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert divisors(36) == [1, 2, 3, 4, 6, 9, 12, 18, 36]
    assert [euler_phi(n) for n in (1, 9, 11, 12, 37)] == [1, 6, 10, 4, 36]


@pytest.mark.parametrize("modulus, root", [(2, 1), (4, 3), (5, 2), (7, 3), (9, 2), (11, 2), (25, 2), (37, 2), (41, 6)])
def test_least_primitive_root(modulus, root):
    assert primitive_root(modulus) == root


@pytest.mark.parametrize("modulus", [8, 12, 15])
def test_primitive_root_rejects_non_cyclic_moduli(modulus):
    with pytest.raises(ValueError):
        primitive_root(modulus)


def test_crt():
    assert crt([2, 3, 2], [3, 5, 7]) == 23
    assert crt([4], [9]) == 4
    with pytest.raises(ValueError):
        crt([1, 2], [4, 6])


def test_valuation_of_rationals():
    assert valuation(Fraction(50, 3), 5) == 2
    assert valuation(Fraction(-7, 125), 5) == -3
    assert valuation(12, 7) == 0
    assert valuation(0, 3) > 10**6


def test_rational_helpers():
    assert rational_gcd([Fraction(1, 2), Fraction(1, 3)]) == Fraction(1, 6)
    assert rational_gcd([0, 0]) == 0
    assert fraction_text(Fraction(-3, 5)) == "-3/5"
    assert fraction_text(Fraction(4)) == "4"
