from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from soergelcalc.linalg import (
    CoefRing,
    frac_inverse,
    int_matmul,
    is_prime,
    rational_kernel,
    rational_rank,
    ratrecon,
    saturate,
    valuation,
)

from conftest import frac_rank

small_int_mats = arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 7)), elements=st.integers(-9, 9))


@settings(max_examples=60, deadline=None)
@given(small_int_mats)
def test_rational_kernel_is_exact_and_full(a):
    k = rational_kernel(a)
    n = a.shape[1]
    r = frac_rank(a.tolist())
    assert k.shape == (n, n - r)
    if k.shape[1]:
        assert np.all(int_matmul(a.astype(object), k) == 0)
        assert frac_rank(k.T.tolist()) == n - r


@settings(max_examples=40, deadline=None)
@given(small_int_mats)
def test_rational_rank(a):
    assert rational_rank(a) == frac_rank(a.tolist())


def test_kernel_with_large_entries():
    # entries beyond one 31-bit prime force CRT over several primes
    big = 10**12 + 39
    a = np.array([[big, 1, 0], [0, big, 1]], dtype=object)
    k = rational_kernel(a)
    assert k.shape == (3, 1)
    assert np.all(int_matmul(a, k) == 0)


def test_ratrecon():
    m = 2147483629 * 2147483587
    for f in (Fraction(3, 7), Fraction(-22, 5), Fraction(0), Fraction(123456, 1)):
        a = f.numerator * pow(f.denominator, -1, m) % m
        assert ratrecon(a, m) == f


def test_valuation():
    assert valuation(Fraction(18, 5), 3) == 2
    assert valuation(Fraction(5, 9), 3) == -2
    assert valuation(0, 3) == float("inf")


def test_saturate_divides_out_l():
    k = np.array([[3], [6]], dtype=object)
    s = saturate(k, 3)
    assert [Fraction(x) for x in s[:, 0]] == [1, 2]


def test_saturate_repairs_dependent_residues():
    # span{(1,0), (1,3)} over Z_(3) has saturation all of Z_(3)^2
    k = np.array([[1, 1], [0, 3]], dtype=object)
    s = saturate(k, 3)
    O = CoefRing.local_integers(3)
    assert O.residue_rank(s) == 2


def test_frac_inverse():
    a = np.array([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]], dtype=object)
    inv = frac_inverse(a)
    assert np.all(a.dot(inv) == np.eye(2, dtype=object))
    with pytest.raises(ZeroDivisionError):
        frac_inverse(np.array([[1, 2], [2, 4]], dtype=object))


def test_ring_parsing_and_units():
    assert CoefRing.parse("K").kind == "Q"
    O = CoefRing.local_integers(5)
    assert O.is_unit(Fraction(3, 2)) and not O.is_unit(Fraction(10, 3))
    F = CoefRing.prime_field(5)
    assert F.is_unit(3) and not F.is_unit(10)
    with pytest.raises(ValueError):
        CoefRing.prime_field(6)


def test_local_inverse_requires_unit_determinant():
    O = CoefRing.local_integers(3)
    good = O.matrix([[1, 1], [1, 2]])
    assert np.all(O.matmul(good, O.inverse(good)) == O.eye(2))
    with pytest.raises(ArithmeticError):
        O.inverse(O.matrix([[3, 0], [0, 1]]))


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
