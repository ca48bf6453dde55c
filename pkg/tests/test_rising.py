"""Rising factorial paths cross-checked against each other and exact values."""

import math
import random
from fractions import Fraction

import pytest
from gmpy2 import mpq

from gammaball.balls import (cb, cb_contains_q, cb_from_int, contains,
                             overlaps, rb_from_q, rb_from_str, c_exp, c_mul,
                             c_add_i)
from gammaball.rising import (RisingEnvelopeError, RisingSpec, log_rising,
                              log_rising_termwise, rising_bs, rising_jet,
                              rising_rs)
from gammaball.series import jet_mul, jet_x

rng = random.Random(7)


def test_bs_exact_small():
    assert rising_bs(1, 5) == 120
    assert rising_bs(mpq(7, 2), 0) == 1
    assert rising_bs(Fraction(1, 3), 4) == mpq(280, 81)


def test_bs_factorials():
    acc = 1
    for n in range(1, 30):
        acc *= n
        assert rising_bs(1, n) == acc


def test_bs_rational_denominator_divides():
    for q in (3, 5, 12):
        for n in (1, 4, 9, 17):
            v = rising_bs(mpq(1, q), n)
            assert (mpq(q) ** n * v).denominator == 1


def test_rs_direct_product():
    z = cb(rb_from_str('2.5', 64), 0)
    out = rising_rs(z, 3, 64)
    assert cb_contains_q(out, mpq(315, 8))  # 2.5 * 3.5 * 4.5


def test_rs_matches_bs_random():
    for _ in range(10**3):
        re = Fraction(rng.randrange(-400, 400), 16)
        im = Fraction(rng.randrange(-400, 400), 16)
        n = rng.randrange(0, 201)
        z = cb(rb_from_q(mpq(re.numerator, re.denominator), 128),
               rb_from_q(mpq(im.numerator, im.denominator), 128))
        a = rising_bs(z, n, 64)
        b = rising_rs(z, n, 64, RisingSpec(n=n, m=rng.choice([0, 1, 3, 7])))
        assert overlaps(a, b), (re, im, n)


def test_rs_20_factorial_block4():
    out = rising_rs(cb_from_int(1), 20, 256, RisingSpec(n=20, m=4))
    assert cb_contains_q(out, math.factorial(20))


def test_jet_basics():
    out = rising_jet(cb_from_int(1), 2, 2, 64)
    assert cb_contains_q(out[0], 2)
    assert cb_contains_q(out[1], 3)  # (1+x)(2+x) = 2 + 3x + x^2


def test_jet_harmonic_ratio():
    from gammaball.balls import c_div
    out = rising_jet(cb_from_int(1), 3, 2, 96)
    ratio = c_div(out[1], out[0], 96)
    assert cb_contains_q(ratio, mpq(11, 6))


def test_jet_matches_termwise_product():
    z = cb(rb_from_str('0.75', 96), rb_from_str('0.5', 96))
    n, order = 6, 4
    direct = rising_jet(z, n, order, 96)
    acc = jet_x(z, order)
    for k in range(1, n):
        acc = jet_mul(acc, jet_x(c_add_i(z, k, 96), order), 96)
    for k in range(order):
        assert overlaps(direct[k], acc[k])


def test_split_property():
    for _ in range(60):
        a = rng.randrange(0, 101)
        b = rng.randrange(0, 101)
        re = Fraction(rng.randrange(-100, 100), 8)
        im = Fraction(rng.randrange(1, 100), 8)
        z = cb(rb_from_q(mpq(re.numerator, re.denominator), 128),
               rb_from_q(mpq(im.numerator, im.denominator), 128))
        whole = rising_bs(z, a + b, 96)
        lhs = c_mul(rising_bs(z, a, 96), rising_bs(c_add_i(z, a, 96), b, 96), 96)
        assert overlaps(whole, lhs)


def test_log_rising_n1():
    from gammaball.balls import c_log
    z = cb(rb_from_str('0.5', 96), rb_from_str('2.0', 96))
    assert overlaps(log_rising(z, 1, 96), c_log(z, 96))


def test_log_rising_i():
    z = cb(0, 1)
    out = log_rising(z, 2, 128)
    # log(i) + log(1+i) = log(2)/2 + 3 pi i / 4
    assert abs(float(out.re.mid) - 0.34657359) < 1e-7
    assert abs(float(out.im.mid) - 2.35619449) < 1e-7


def test_log_rising_matches_termwise():
    z = cb(rb_from_str('-3', 128), rb_from_str('0.1', 128))
    a = log_rising(z, 4, 128)
    b = log_rising_termwise(z, 4, 128)
    assert overlaps(a, b)


def test_log_rising_exp_overlap_and_im_range():
    pi = math.pi
    for _ in range(10**3):
        re = Fraction(rng.randrange(-800, 800), 16)
        im = Fraction(rng.randrange(1, 800), 16)
        n = rng.randrange(1, 40)
        z = cb(rb_from_q(mpq(re.numerator, re.denominator), 192),
               rb_from_q(mpq(im.numerator, im.denominator), 192))
        lr = log_rising(z, n, 160)
        direct = rising_bs(z, n, 192)
        assert overlaps(c_exp(lr, 160), direct), (re, im, n)
        # each term's argument lies in (0, pi)
        assert 0.0 < float(lr.im.mid) < n * pi + 1e-9


def test_log_rising_envelope_refusal():
    z = cb(rb_from_str('2.0', 96), 0)  # on the real axis
    with pytest.raises(RisingEnvelopeError):
        log_rising(z, 3, 96)
