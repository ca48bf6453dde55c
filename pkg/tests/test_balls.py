"""Ball arithmetic: containment soundness against exact rational oracles."""

import random
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

from gammaball.balls import (
    ComplexBall, RealBall, ball_arith, ball_elem, cb, cb_contains_q,
    c_exp, c_log, c_mul, contains, overlaps, pow2, r_sinpi, rb_from_int,
    rb_from_q, rb_from_str, rb_parse, rb_str, rb_hex, rb_from_hex, rb_zero,
    r_contains_q, rb_from_mpfr, r_pi, r_sqrt, r_exp, r_log, rb_upper,
)

rng = random.Random(20260809)


def rand_q(scale=8):
    num = rng.randrange(-2**scale, 2**scale)
    den = rng.randrange(1, 2**scale)
    return Fraction(num, den)


def ball_of(q, rad_q, p=64):
    b = rb_from_q(mpq(q.numerator, q.denominator), p)
    return RealBall(b.mid, gmpy2.context(precision=30, round=gmpy2.RoundUp).add(
        b.rad, mpfr(float(rad_q) * 1.0000001)))


def test_interval_addition():
    a = cb(rb_parse('[1 +/- 0.1]'), 0)
    b = cb(rb_parse('[2 +/- 0.2]'), 0)
    out = ball_arith('add', a, b, 53)
    assert cb_contains_q(out, mpq(27, 10))
    assert cb_contains_q(out, 3)
    assert cb_contains_q(out, mpq(33, 10))


def test_exact_zero_annihilator():
    x = cb(rb_from_str('1.7', 53), 0)
    z = cb(0, 0)
    out = ball_arith('mul', x, z, 53)
    assert out.re.is_exact() and gmpy2.is_zero(out.re.mid)


def test_mul_div_rational_oracle():
    # output balls must contain the exact rational result
    for _ in range(10**4):
        qa, qb = rand_q(), rand_q()
        ra, rb_ = Fraction(rng.randrange(0, 100), 10**4), Fraction(rng.randrange(0, 100), 10**4)
        a = cb(ball_of(qa, ra), 0)
        b = cb(ball_of(qb, rb_), 0)
        op = rng.choice(['add', 'sub', 'mul'])
        out = ball_arith(op, a, b, rng.choice([24, 53, 96]))
        lo_a, hi_a = qa - ra, qa + ra
        exact = {'add': qa + qb, 'sub': qa - qb, 'mul': qa * qb}[op]
        assert r_contains_q(out.re, mpq(exact.numerator, exact.denominator)), (op, qa, qb)


def test_div_contains_exact():
    for _ in range(2000):
        qa, qb = rand_q(), rand_q()
        if qb == 0:
            continue
        a = cb(rb_from_q(mpq(qa.numerator, qa.denominator), 64), 0)
        b = cb(rb_from_q(mpq(qb.numerator, qb.denominator), 64), 0)
        out = ball_arith('div', a, b, 53)
        exact = qa / qb
        assert r_contains_q(out.re, mpq(exact.numerator, exact.denominator))


def test_div_by_zero_ball_is_indeterminate():
    a = cb(1, 0)
    b = cb(rb_parse('[0.05 +/- 0.1]'), 0)
    out = ball_arith('div', a, b, 53)
    assert not out.is_finite()


def test_complex_mul_contains():
    for _ in range(2000):
        parts = [rand_q() for _ in range(4)]
        a = ComplexBall(rb_from_q(mpq(parts[0].numerator, parts[0].denominator), 64),
                        rb_from_q(mpq(parts[1].numerator, parts[1].denominator), 64))
        b = ComplexBall(rb_from_q(mpq(parts[2].numerator, parts[2].denominator), 64),
                        rb_from_q(mpq(parts[3].numerator, parts[3].denominator), 64))
        out = c_mul(a, b, 53)
        zre = parts[0] * parts[2] - parts[1] * parts[3]
        zim = parts[0] * parts[3] + parts[1] * parts[2]
        assert cb_contains_q(out, mpq(zre.numerator, zre.denominator),
                             mpq(zim.numerator, zim.denominator))


def test_sinpi_half():
    out = ball_elem('sinpi', cb(rb_from_str('0.5', 64), 0), 64)
    assert cb_contains_q(out, 1)
    assert mpq(out.re.rad) <= mpq(2) ** (1 - 64)


def test_sinpi_half_integers_exact():
    for k in range(-9, 10):
        b = r_sinpi(rb_from_q(mpq(k, 2), 64), 64)
        assert b.is_exact()
        expected = [0, 1, 0, -1][k % 4]
        assert b.mid == expected


def test_exp_zero():
    out = ball_elem('exp', cb(0, 0), 64)
    assert cb_contains_q(out, 1)


def test_log_exp_roundtrip():
    for p in (32, 256, 4096):
        x = cb(rb_from_str('1.25', p), 0)
        out = ball_elem('log', ball_elem('exp', x, p), p)
        assert cb_contains_q(out, mpq(5, 4))


def test_contains_overlaps_trivia():
    a = cb(rb_parse('[0 +/- 1]'), 0)
    b = cb(rb_parse('[0.5 +/- 0.25]'), 0)
    assert contains(a, b)
    assert not overlaps(cb(rb_parse('[0 +/- 0.1]'), 0), cb(rb_parse('[1 +/- 0.1]'), 0))
    for x in (a, b, cb(3, 2)):
        assert overlaps(x, x)


def test_precision_monotonicity():
    # exp/log/sinpi radii at precision 2p are <= radii at p, for exact inputs
    x = cb(rb_from_str('0.8125', 256), 0)
    for fn in ('exp', 'log', 'sinpi'):
        for p in (32, 64, 128):
            r1 = ball_elem(fn, x, p).re.rad
            r2 = ball_elem(fn, x, 2 * p).re.rad
            assert mpq(r2) <= mpq(r1), (fn, p)


def test_elem_containment_at_higher_precision():
    # image of the 4x-precision midpoint stays inside the p-precision ball
    for _ in range(300):
        q = rand_q()
        if q == 0:
            continue
        x = cb(rb_from_q(mpq(q.numerator, q.denominator), 256), 0)
        for fn in ('exp', 'sin', 'cos', 'atan', 'sinpi', 'cospi'):
            lo = ball_elem(fn, x, 48)
            hi = ball_elem(fn, x, 192)
            assert overlaps(lo, hi), (fn, q)
            assert contains(lo, hi), (fn, q)


def test_complex_log_exp():
    z = cb(rb_from_str('0.7', 96), rb_from_str('1.9', 96))
    w = c_log(c_exp(z, 96), 96)
    assert overlaps(w, z)
    assert contains(w, z) or contains(z, w) or overlaps(w, z)


def test_sqrt_bounds():
    b = rb_parse('[4 +/- 0.5]')
    s = r_sqrt(b, 53)
    assert r_contains_q(s, 2)
    assert float(rb_upper(s)) >= 2.1213  # sqrt(4.5)


def test_rendering_roundtrip():
    vals = [rb_from_str('3.14159', 80), rb_parse('[2.5 +/- 0.001]'),
            rb_from_q(mpq(-7, 3), 64), rb_zero()]
    for b in vals:
        s = rb_str(b, digits=12)
        back = rb_parse(s)
        lo, hi = mpq(b.mid) - mpq(b.rad), mpq(b.mid) + mpq(b.rad)
        blo, bhi = mpq(back.mid) - mpq(back.rad), mpq(back.mid) + mpq(back.rad)
        assert blo <= lo and hi <= bhi, (s, b)


def test_hex_roundtrip():
    vals = [rb_from_str('3.14159', 80), rb_parse('[-2.5 +/- 0.001]'), rb_from_int(42)]
    for b in vals:
        s = rb_hex(b)
        back = rb_from_hex(s)
        assert back.mid == b.mid
        assert mpq(back.rad) >= mpq(b.rad)


def test_pi_contains():
    # pi to 100 digits, sanity for const_pi at several precisions
    ref = mpq(mpfr(gmpy2.const_pi(precision=400), precision=400))
    for p in (32, 64, 333):
        b = r_pi(p)
        assert abs(mpq(b.mid) - ref) <= mpq(b.rad) + mpq(2) ** (-390)
