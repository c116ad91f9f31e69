import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_heights.errors import NonSquareError, PadicDomainError
from padic_heights.padic import (BranchSpec, Padic, QuotientRing, Qp, format_padic, log,
                                 parse_padic, power_sums, ring_inverse, ring_log, ring_sqrt,
                                 ring_trace, sqrt, teichmuller)

K13 = Qp(13, 12)
K11 = Qp(11, 12)


def log_series_oracle(a: int, p: int, digits: int) -> Padic:
    """log(a) = log(a^(p-1)) / (p-1), the series summed over exact rationals."""
    z = a ** (p - 1) - 1
    total = sum((Fraction((-1) ** (k + 1) * z ** k, k) for k in range(1, 4 * digits + 8)),
                Fraction(0))
    return Padic.from_rational(p, total / (p - 1), 2 * digits).add_bigoh(digits)


def teichmuller_oracle(a: int, p: int, digits: int) -> int:
    """Lift a digit at a time, keeping y^(p-1) = 1 mod p^k."""
    y = a % p
    for k in range(2, digits + 1):
        y = next(c for c in (y + d * p ** (k - 1) for d in range(p))
                 if pow(c, p - 1, p ** k) == 1)
    return y


units = st.integers(min_value=1, max_value=10 ** 9).filter(lambda n: n % 13)


def test_log_of_one_and_teichmuller_are_zero():
    assert log(K13(1)).is_zero()
    for c in range(1, 13):
        assert log(teichmuller(K13(c))).is_zero()


def test_log3_against_series_oracle():
    L3 = log(Qp(13, 5)(3))
    assert L3.identical(log_series_oracle(3, 13, 5))
    assert format_padic(L3) == "5*13 + 12*13^2 + 10*13^3 + 8*13^4 + O(13^5)"


@settings(max_examples=40, deadline=None)
@given(units, units)
def test_log_is_a_homomorphism(a, b):
    x, y = K13(a), K13(b)
    assert (log(x * y) - log(x) - log(y)).is_zero()


def test_log_branch_controls_log_p():
    lp = K13(7 * 13)
    br = BranchSpec(lp)
    assert (log(K13(13), br) - lp).is_zero()
    assert (log(K13(Fraction(26, 3)), br) - lp - log(K13(2)) + log(K13(3))).is_zero()
    assert log(K13(13)).is_zero()


def test_log_of_zero_raises():
    with pytest.raises(PadicDomainError):
        log(Padic.zero(13, 5))


def test_teichmuller():
    assert teichmuller(K11(1)).identical(K11(1))
    t2 = teichmuller(Qp(11, 3)(2))
    assert t2.unit == teichmuller_oracle(2, 11, 3) == 596
    rng = random.Random(3)
    for _ in range(10):
        t = teichmuller(K11(rng.randrange(1, 10 ** 6) * 11 + rng.randrange(1, 11)))
        assert (t ** 11 - t).is_zero()
    with pytest.raises(PadicDomainError):
        teichmuller(K11(11))


def test_sqrt():
    assert sqrt(K13(4), sign_digit=2).identical(K13(2))
    rng = random.Random(5)
    for _ in range(20):
        a = K13(rng.randrange(1, 10 ** 8) * 13 ** rng.choice([0, 2]) or 1)
        a = a * a
        r = sqrt(a)
        assert (r * r - a).is_zero()
        assert 1 <= r.unit % 13 <= 6
    # y-coordinate of (5, 10) on y^2 = x^3 - 5x
    r = sqrt(K13(5 ** 3 - 25), sign_digit=10)
    assert r.identical(K13(10))
    with pytest.raises(NonSquareError):
        sqrt(K13(2))
    with pytest.raises(NonSquareError):
        sqrt(K13(13))


def test_precision_bookkeeping():
    a = Padic.from_rational(11, 3, 4)
    b = Padic.from_rational(11, 121, 6)
    assert (a * b).prec == 4
    assert (a + b).absprec == 4
    assert (a + Padic.zero(11, 2)).absprec == 2
    z = a - a
    assert z.is_zero() and z.absprec == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6),
       st.integers(-10 ** 6, 10 ** 6).filter(bool))
def test_field_axioms(a, b, c):
    x, y, z = K11(a), K11(b), K11(Fraction(c, 11))
    assert ((x + y) * z - (x * z + y * z)).is_zero()
    assert ((x * y) * z - x * (y * z)).is_zero()
    assert (z / z - 1).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10 ** 8), st.integers(0, 7), st.integers(-3, 3))
def test_precision_soundness(a, b, v):
    lo = Qp(13, 6)
    hi = Qp(13, 12)
    q = Fraction(a, 13 ** 2 + b) * Fraction(13) ** v
    for f in (lambda x: x * x + 3, lambda x: log(x) if x.val == 0 else x ** 3, lambda x: 1 / x):
        small, big = f(lo(q)), f(hi(q))
        assert big.add_bigoh(small.absprec).identical(small)


def test_format_round_trip():
    rng = random.Random(11)
    for _ in range(50):
        x = Padic.make(11, rng.randrange(-3, 4), rng.randrange(0, 11 ** 8), rng.randrange(0, 8))
        assert parse_padic(format_padic(x)).identical(x)
    assert format_padic(parse_padic("6*11^-1 + 10 + 7*11 + O(11^5)")) == "6*11^-1 + 10 + 7*11 + O(11^5)"


def _ring(coeffs, p, prec=12):
    return QuotientRing([Qp(p, prec)(c) for c in coeffs])


def test_ring_trace():
    R2 = _ring([-5, 0, 1], 13)
    assert (ring_trace(R2.element([1, 0])) - 2).is_zero()
    assert ring_trace(R2.element([0, 1])).is_zero()
    R11 = _ring([4] + [0] * 10 + [1], 11)
    e = R11.element([7, 2, 0, 1] + [0] * 7)
    assert (ring_trace(e) - 77).is_zero()


def test_ring_trace_split_modulus_matches_root_sum():
    # m = (u - 2)(u - 3)(u - 15) over Q_13
    K = Qp(13, 10)
    R = _ring([-90, 81, -20, 1], 13, 10)
    coeffs = [K(4), K(Fraction(1, 3)), K(6)]
    e = R.element(coeffs)
    expected = sum((coeffs[0] + coeffs[1] * r + coeffs[2] * r * r for r in (K(2), K(3), K(15))),
                   K(0))
    assert (ring_trace(e) - expected).is_zero()
    # linearity
    f = R.element([K(1), K(5), K(0)])
    assert (ring_trace(e * 3 + f) - 3 * ring_trace(e) - ring_trace(f)).is_zero()


def test_power_sums_newton():
    K = Qp(13, 10)
    roots = [K(2), K(3), K(15)]
    sums = power_sums([K(-90), K(81), K(-20), K(1)], 7)
    for k, s in enumerate(sums):
        assert (s - sum((r ** k for r in roots), K(0))).is_zero()


def test_ring_sqrt_and_inverse():
    R = _ring([-5, 0, 1], 13)
    # 4 + u has norm 16 - 5 = 11, a non-residue mod 13, so it has no square root
    assert pow(11, 6, 13) == 12
    with pytest.raises(NonSquareError):
        ring_sqrt(R.element([4, 1]))
    for base in ([4, 1], [1, 3], [2, 13]):
        e = R.element(base) * R.element(base)
        r = ring_sqrt(e)
        assert (r * r - e).is_zero()
    assert (ring_inverse(R.element([1, 0])) - R.element([1, 0])).is_zero()
    R11 = _ring([4] + [0] * 10 + [1], 11)
    rng = random.Random(2)
    for _ in range(3):
        e = R11.element([rng.randrange(1, 11)] + [rng.randrange(0, 11 ** 6) for _ in range(10)])
        assert (ring_inverse(e) * e - 1).is_zero()


def test_ring_log_is_additive():
    R = _ring([-5, 0, 1], 13)
    a = R.element([3, 13])
    b = R.element([2, 1])
    assert (ring_log(a * b) - ring_log(a) - ring_log(b)).is_zero()
