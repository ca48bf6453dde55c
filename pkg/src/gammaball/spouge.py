"""
Spouge's approximation with its proven relative error bound.

    Gamma(w+1) ~ (w+r)^(w+1/2) e^(-w-r) [ sqrt(2 pi) + sum_{n=1}^{N} c_n/(w+n) ],
    N = ceil(r) - 1,  c_n = (-1)^(n+1) e^(r-n) (r-n)^(n-1/2) / (n-1)!

with |relative error| <= sqrt(r) (2 pi)^(-r-1/2) / Re(w+r) for r >= 3.

Slower than the Stirling series but trivially simple, which makes it the
independent oracle for cross-validating every other algorithm here.  The
alternating coefficient sum cancels down from terms of size ~ e^r, so the
working precision carries about 1.45 r extra bits (measured; see ledger).
"""

import math
import threading
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq

from . import balls as B
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_from_q, rb_zero)

LOG2_2PI = math.log2(2 * math.pi)


@dataclass(frozen=True)
class SpougeCoeffs:
    r: int
    N: int
    c: tuple          # RealBall coefficients c_1..c_N
    prec: int


_cache = {}
_cache_lock = threading.Lock()


def spouge_coeffs(r, prec):
    """Certified balls for c_1..c_N at the given working precision."""
    r = int(r)
    if r < 3:
        raise ValueError("Spouge parameter r must be >= 3")
    key = (r, prec)
    with _cache_lock:
        got = _cache.get(key)
    if got is not None:
        return got
    N = math.ceil(r) - 1
    cs = []
    fact = 1  # (n-1)!
    for n in range(1, N + 1):
        if n > 1:
            fact *= (n - 1)
        e = B.r_exp(rb_from_int(r - n, prec), prec)
        base = rb_from_int(r - n, prec)
        # (r-n)^(n-1/2) = exp((n-1/2) log(r-n))
        lg = B.r_log(base, prec)
        pw = B.r_exp(B.r_mul_2exp(B.r_mul_i(lg, 2 * n - 1, prec), -1), prec)
        v = B.r_div_i(B.r_mul(e, pw, prec), fact, prec)
        if n % 2 == 0:
            v = B.r_neg(v)
        cs.append(v)
    out = SpougeCoeffs(r=r, N=N, c=tuple(cs), prec=prec)
    with _cache_lock:
        _cache[key] = out
    return out


def spouge_error_bound(r, z):
    """Rigorous relative error magnitude sqrt(r) (2 pi)^(-r-1/2) / Re(z-1+r).

    z is the Gamma argument; the formula itself approximates Gamma(w+1)
    with w = z-1, and the bound divides by Re(w+r).
    """
    up, dn = B._rup(), B._rdn()
    denom = dn.sub(dn.add(B.rb_lower(z.re), mpfr(r)), mpfr(1))
    if not denom > 0:
        return mpfr('inf')
    two_pi_dn = dn.mul_2exp(dn.const_pi(), 1)
    num = up.div(up.sqrt(mpfr(r)), dn.exp2(dn.mul(mpfr(r) + mpfr(0.5), dn.log2(two_pi_dn))))
    return up.div(num, denom)


def choose_r(p):
    """Smallest integer r whose uniform bound undercuts 2^-(p+3)."""
    r = max(3.0, p * math.log(2) / math.log(2 * math.pi))
    for _ in range(8):
        r = ((p + 3) * math.log(2) + 0.5 * math.log(max(r, 3))
             - 0.5 * math.log(2 * math.pi)) / math.log(2 * math.pi)
    return max(3, math.ceil(r))


def spouge_eval(z, prec, r=None):
    """Gamma(z) through Spouge's formula, relative error folded into the ball.

    The error theorem needs Re(w) >= 0 for the formula variable w = z - 1
    (the weaker Re(w+r) > 0 is not enough in the pole region; measured), so
    arguments left of 1 are first shifted right and divided back out.
    """
    if not z.is_finite():
        return cb_indeterminate()
    if r is None:
        r = choose_r(prec)
    r = int(r)
    if not z.is_exact():
        # the alternating terms amplify the input radius by ~ max|c_n|, so
        # evaluate at the midpoint and propagate through |Gamma'| instead
        mid = ComplexBall(RealBall(z.re.mid), RealBall(z.im.mid))
        base = spouge_eval(mid, prec, r=r)
        from .kinds import FunctionKind
        from .stirling import _eval_core
        psi = _eval_core(z, 53, FunctionKind.DIGAMMA, None, None)
        gam = _eval_core(z, 53, FunctionKind.GAMMA, None, None)
        der = B.c_mul(gam, psi, 53) if psi.is_finite() and gam.is_finite() else None
        if der is None or not der.is_finite():
            return cb_indeterminate()
        up = B._rup()
        prop = up.mul(B.cb_abs_hi(der), up.hypot(z.re.rad, z.im.rad))
        return B.c_add_error(base, prop)
    shift = max(0, math.ceil(1.0 - _f(z.re.mid)))
    if shift:
        from . import rising as RS
        wp_s = prec + 16 + shift.bit_length()
        num = spouge_eval(B.c_add_i(z, shift, wp_s), prec + 8, r=r)
        den = RS.rising_rs(z, shift, wp_s)
        if den.contains_zero():
            return cb_indeterminate()
        return B.c_add(B.c_div(num, den, wp_s), cb_from_int(0), prec)
    guard = max(0, math.ceil(1.45 * r - max(0.0, math.log2(max(1.0, abs(_f(z.re.mid))))))) + 16
    wp = prec + guard
    w = B.c_add_i(z, -1, wp)
    bound = spouge_error_bound(r, z)
    if not gmpy2.is_finite(bound):
        raise ValueError("Spouge bound unavailable: Re(z-1+r) <= 0")
    co = spouge_coeffs(r, wp)
    s = ComplexBall(_sqrt_2pi(wp), rb_zero())
    for n in range(1, co.N + 1):
        cn = ComplexBall(co.c[n - 1], rb_zero())
        s = B.c_add(s, B.c_div(cn, B.c_add_i(w, n, wp), wp), wp)
    # (w+r)^(w+1/2) e^(-w-r) = exp((w+1/2) log(w+r) - w - r)
    wr = B.c_add_i(w, r, wp)
    half = rb_from_q(mpq(1, 2), wp)
    expo = B.c_mul(ComplexBall(B.r_add(w.re, half, wp), w.im),
                   B.c_log(wr, wp), wp)
    expo = B.c_sub(expo, wr, wp)
    val = B.c_mul(B.c_exp(expo, wp), s, wp)
    # fold the proven relative bound into the radius
    up = B._rup()
    err = up.mul(B.cb_abs_hi(val), bound)
    val = B.c_add_error(val, err)
    return B.c_add(val, cb_from_int(0), prec)


def _sqrt_2pi(prec):
    return B.r_sqrt(B.r_mul_2exp(B.r_pi(prec + 4), 1), prec)


def _f(x):
    try:
        return float(x)
    except (OverflowError, ValueError):
        return math.inf
