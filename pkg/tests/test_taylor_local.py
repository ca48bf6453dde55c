"""Reciprocal-gamma Taylor machinery and the shipped coefficient table."""

import math
import random

import gmpy2
import pytest
from gmpy2 import mpfr, mpq

from gammaball import balls as B
from gammaball.balls import (cb, cb_contains_q, cb_from_int, overlaps,
                             rb_from_q, rb_from_str)
from gammaball.kinds import FunctionKind as FK
from gammaball.stirling import lgamma_stirling
from gammaball.taylor_local import (TaylorUnavailable, build_taylor_table,
                                    coeff_bound, default_table, eval_taylor,
                                    taylor_tail_bound)

rng = random.Random(5150)
TAB = default_table()


def test_table_header_values():
    assert TAB.N == 537
    assert TAB.prec_bits == 3456
    assert TAB.coeffs[0].re.mid == 1
    euler = gmpy2.const_euler(precision=3600)
    assert abs(mpq(TAB.coeffs[1].re.mid) - mpq(euler)) <= mpq(TAB.coeffs[1].re.rad) + mpq(2) ** -3590


def test_table_a3_value():
    # a_3 = gamma^2/2 - pi^2/12 sits in coeffs[2]
    ctx = gmpy2.context(precision=3600)
    g = ctx.const_euler()
    ref = ctx.sub(ctx.div_2exp(ctx.square(g), 1),
                  ctx.div(ctx.square(ctx.const_pi()), mpfr(12)))
    assert abs(mpq(TAB.coeffs[2].re.mid) - mpq(ref)) <= mpq(TAB.coeffs[2].re.rad) + mpq(2) ** -3590


def test_table_matches_printed_digits():
    # a_10 = -2.1524e-4 and a_100 = +6.6158e-106 to all printed digits
    a10 = TAB.coeffs[9].re
    assert abs(mpq(a10.mid) - mpq(-21524, 10**8)) <= mpq(1, 10**8) / 2 + mpq(a10.rad)
    a100 = TAB.coeffs[99].re
    assert abs(mpq(a100.mid) - mpq(66158, 10) ** 1 * mpq(10) ** -109) <= mpq(5, 10**110) + mpq(a100.rad)
    assert f"{float(a10.mid):.4e}" == "-2.1524e-04"


def test_table_agrees_with_fresh_build():
    small = build_taylor_table(24, 192)
    for n in range(24):
        assert overlaps(small.coeffs[n], TAB.coeffs[n]), n


def test_coeff_bound_reference_values():
    b10 = float(coeff_bound(10))
    assert abs(b10 - 8.13e-2) <= 0.01 * 8.13e-2
    b100 = float(coeff_bound(100, 'n8'))
    assert abs(b100 - 1.25e-87) <= 0.01 * 1.25e-87


def test_coeff_bound_dominates_table():
    for n in range(1, 537):
        an = abs(mpq(TAB.coeffs[n - 1].re.mid)) - mpq(TAB.coeffs[n - 1].re.rad)
        for form in ('optimal', 'n8'):
            assert mpq(coeff_bound(n, form)) >= an, (n, form)


def test_tail_bound_values():
    assert taylor_tail_bound(TAB, mpfr(0), 10) == 0
    t = taylor_tail_bound(TAB, mpfr('0.5'), 536)
    assert gmpy2.get_exp(t) <= -3456  # matches the shipped-table sizing
    with pytest.raises(TaylorUnavailable):
        taylor_tail_bound(TAB, mpfr(30), 100)


def test_tail_bound_dominates_true_tail():
    # against a high-N summation oracle
    for _ in range(200):
        umag = rng.uniform(0.01, 2.0)
        N = rng.randrange(40, 400)
        tail = taylor_tail_bound(TAB, mpfr(repr(umag)), N)
        true = mpfr(0)
        ctx = gmpy2.context(precision=128)
        for n in range(N, 520):
            true = ctx.add(true, ctx.mul(abs(TAB.coeffs[n].re.mid),
                                         ctx.pow(mpfr(repr(umag)), n)))
        assert mpq(true) <= mpq(tail), (umag, N)


def test_eval_simple_values():
    one = eval_taylor(FK.RGAMMA, cb_from_int(1), 128)
    assert cb_contains_q(one, 1)
    zero = eval_taylor(FK.RGAMMA, cb_from_int(0), 128)
    assert cb_contains_q(zero, 0)
    g13 = eval_taylor(FK.GAMMA, cb(rb_from_str('1.3', 400), 0), 333)
    ref = lgamma_stirling(cb(rb_from_str('1.3', 400), 0), 333, FK.GAMMA)
    assert overlaps(g13, ref)
    assert float(g13.re.rad) < 2.0 ** -330


def test_rgamma_zero_at_negative_integers():
    for k in range(6):
        v = eval_taylor(FK.RGAMMA, cb_from_int(-k), 96)
        assert cb_contains_q(v, 0), k


def test_cross_algorithm_random():
    for _ in range(60):
        x = rng.uniform(-25, 25)
        y = rng.uniform(-8, 8)
        z = cb(rb_from_str(repr(x), 256), rb_from_str(repr(y), 256))
        try:
            gt = eval_taylor(FK.GAMMA, z, 128)
        except TaylorUnavailable:
            continue
        gs = lgamma_stirling(z, 128, FK.GAMMA)
        if gt.is_finite() and gs.is_finite():
            assert overlaps(gt, gs), (x, y)


def test_lgamma_taylor_branch():
    for x, y in ((3.7, 2.1), (-4.3, 1.7), (5.2, -3.3), (-6.1, -0.7)):
        z = cb(rb_from_str(repr(x), 256), rb_from_str(repr(y), 256))
        try:
            lt = eval_taylor(FK.LGAMMA, z, 128)
        except TaylorUnavailable:
            continue
        ls = lgamma_stirling(z, 128, FK.LGAMMA)
        assert overlaps(lt, ls), (x, y)


def test_global_inequality_sample():
    # |1/Gamma(z)| <= e^(pi R/2) R^(1/2+R), R = |z|
    for _ in range(100):
        x = rng.uniform(-20, 20)
        y = rng.uniform(-9, 9)
        z = cb(rb_from_str(repr(x), 200), rb_from_str(repr(y), 200))
        try:
            v = eval_taylor(FK.RGAMMA, z, 96)
        except TaylorUnavailable:
            continue
        Rv = math.hypot(x, y)
        if Rv < 1e-9:
            continue
        bound = (math.pi * Rv / 2) / math.log(2) + (0.5 + Rv) * math.log2(Rv)
        got = float(B.cb_abs_hi(v))
        assert got <= 2.0 ** bound * 1.0001 + 1e-30, (x, y)


def test_imaginary_budget_refusal():
    z = cb(rb_from_str('1.2', 128), rb_from_str('11', 128))
    with pytest.raises(TaylorUnavailable):
        eval_taylor(FK.GAMMA, z, 64)
    zbig = cb(rb_from_str('1.2', 128), 0)
    with pytest.raises(TaylorUnavailable):
        eval_taylor(FK.GAMMA, zbig, 5000)  # beyond the table precision
