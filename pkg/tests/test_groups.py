from fractions import Fraction
from math import factorial, prod

import pytest
from hypothesis import given, settings, strategies as st

from symtate.errors import DensityUnverified
from symtate.groups import (GaElement, IntSequence, as_colimit, divisible, factorize, ga_add,
                            ga_canonical, ga_equal, ga_neg, ga_push, iso_h, phi_Q, phi_check,
                            phi_inverse, prime_expand)

SUCC = IntSequence.successor()


def test_sequences():
    assert SUCC.take(4) == [2, 3, 4, 5]
    assert IntSequence.periodic((2, 3)).take(5) == [2, 3, 2, 3, 2]
    assert IntSequence.repeated(2).take(6) == [2, 2, 3, 3, 4, 4]
    assert IntSequence((4, 1, 6)).take(5) == [4, 1, 6, 1, 1]
    assert SUCC.product(1, 4) == 24
    with pytest.raises(IndexError):
        SUCC[0]
    with pytest.raises(ValueError):
        IntSequence((2, 0))


@given(st.integers(1, 10 ** 6))
def test_factorize(n):
    f = factorize(n)
    assert prod(f) == n and f == sorted(f)
    assert all(factorize(p) == [p] for p in f)


def test_prime_expand():
    assert prime_expand(IntSequence((4, 1, 6)), 4).primes == [2, 2, 2, 3]
    assert prime_expand(IntSequence(), 5).primes == []
    e = prime_expand(SUCC, 7)
    assert e.primes == [2, 3, 2, 2, 5, 2, 3]
    assert e.verified
    # x_k relabels to x'_start[k]: a_3 = 4 starts at position 3
    assert e.start[3] == 3 and e.start[4] == 5


def test_element_arithmetic():
    a = IntSequence.periodic((2,))
    assert ga_equal(GaElement(1, 1), GaElement(2, 2), a)
    assert ga_add(GaElement(1, 2), GaElement(1, 2), a) == GaElement(1, 1)
    assert ga_canonical(GaElement(12, 3), a) == GaElement(3, 1)
    assert ga_canonical(GaElement(0, 5), a) == GaElement(0, 1)
    assert ga_push(GaElement(3, 1), 3, a) == GaElement(12, 3)
    assert ga_add(GaElement(5, 2), ga_neg(GaElement(5, 2)), a) == GaElement(0, 1)
    with pytest.raises(ValueError):
        ga_push(GaElement(1, 3), 2, a)


@given(st.integers(-50, 50), st.integers(1, 6), st.integers(-50, 50), st.integers(1, 6))
def test_canonical_forms_are_unique(c1, k1, c2, k2):
    u, v = GaElement(c1, k1), GaElement(c2, k2)
    assert ga_equal(u, v, SUCC) == (ga_canonical(u, SUCC) == ga_canonical(v, SUCC))
    # the value in Q is c / (k!) under x_k -> 1/k!
    assert ga_equal(u, v, SUCC) == (Fraction(c1, factorial(k1)) == Fraction(c2, factorial(k2)))


def test_divisible():
    assert divisible(GaElement(1, 1), 97, SUCC, probeDepth=96) is None
    assert divisible(GaElement(1, 1), 97, SUCC, probeDepth=97) is True
    assert divisible(GaElement(1, 1), 3, IntSequence.periodic((2,)), 50) is None
    with pytest.raises(ValueError):
        divisible(GaElement(1, 1), 0, SUCC)


def test_colimit_of_successor_is_q():
    col = as_colimit(SUCC)
    assert col.q_criterion(97, 120)["holds"]
    assert not as_colimit(IntSequence.periodic((2,))).q_criterion(5, 30)["holds"]


def test_iso_h_small():
    a, b = IntSequence.periodic((2, 3)), IntSequence.periodic((3, 2))
    d = iso_h(a, b, K=20)
    assert d.verified
    # h respects the relation a_k x_(k+1) = x_k
    for k in range(1, 15):
        assert ga_equal(d.h(GaElement(a[k], k + 1)), d.h(GaElement(1, k)), b)
    assert set(d.report()) == {"m", "c", "relations", "injective", "surjective"}


def test_iso_h_needs_density():
    with pytest.raises(DensityUnverified):
        iso_h(IntSequence.periodic((3,)), IntSequence.periodic((2,)), K=3, probeDepth=50)


def test_phi():
    assert phi_Q(1, 1) == GaElement(1, 1)
    assert phi_Q(1, 2) == GaElement(1, 2)
    assert phi_Q(1, 6) == GaElement(1, 3)
    assert phi_Q(3, 4, level=4) == phi_Q(3, 4)
    assert phi_inverse(GaElement(1, 3)) == Fraction(1, 6)
    with pytest.raises(ValueError):
        phi_Q(1, 0)
    with pytest.raises(ValueError):
        phi_Q(1, 7, level=3)
    assert all(phi_check(6).values())


@given(st.integers(-100, 100), st.integers(1, 30), st.integers(-100, 100), st.integers(1, 30))
@settings(max_examples=200)
def test_phi_is_additive_and_inverted(p, q, r, s):
    x = Fraction(p, q) + Fraction(r, s)
    assert ga_equal(ga_add(phi_Q(p, q), phi_Q(r, s), SUCC), phi_Q(x.numerator, x.denominator),
                    SUCC)
    assert phi_inverse(phi_Q(p, q)) == Fraction(p, q)
