"""
Branch-correct reflection machinery.

log_sin_pi implements the analytic continuation of log sin(pi z) that makes
log Gamma(z) = log(pi) - log sin(pi z) - log Gamma(1-z) hold with principal
branches: holomorphic off the real axis, coinciding with log(sin(pi z)) on
the strip -1/2 < Re(z) < 3/2, with cuts on (k, k+1) for integer k outside
[0, 1].  safe_trig provides 1/sin(pi z) and cot(pi z) in exponential forms
away from the real line, avoiding enclosure blowup.  branch_correction
recovers the principal log Gamma from log(Gamma(z)) plus an integer multiple
of 2 pi i estimated from the leading Stirling term and verified at low
precision.
"""

import math
from dataclasses import dataclass

from gmpy2 import mpfr, mpq

from . import balls as B
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_zero)
from .kinds import FunctionKind


@dataclass(frozen=True)
class BranchedLog:
    """A logarithm plus the exact multiple of i*pi that was added to it."""
    value: ComplexBall
    n_correction: int


class BranchCorrectionError(Exception):
    """Low-precision verification of the branch estimate failed."""


def _floor_of_mid(x):
    q = mpq(x)
    return int(q.numerator // q.denominator)


def _contains_integer(z):
    if not z.is_finite():
        return True
    if not z.im.contains_zero():
        return False
    lo = mpq(z.re.mid) - mpq(z.re.rad)
    hi = mpq(z.re.mid) + mpq(z.re.rad)
    import math as _m
    return _m.floor(hi) >= _m.ceil(lo)


def _log_sin_pi_mid(z, prec):
    # z is an exact complex ball, off the integers
    n = _floor_of_mid(z.re.mid)
    w = ComplexBall(B.r_sub(z.re, rb_from_int(n), prec + 8), z.im)
    ym = float(w.im.mid)
    if ym > 1:
        # log(1/2 (1 - e^{2 i pi w})) - i pi (w - 1/2)
        q = B.c_exp(_mul_i_pi(w, 2, prec), prec)
        t = B.c_log(B.c_mul_2exp(B.c_sub(cb_from_int(1), q, prec), -1), prec)
        corr = _mul_pi(B.c_sub(w, _half_ball(prec), prec), prec)
        base = B.c_sub(t, ComplexBall(B.r_neg(corr.im), corr.re), prec)
    elif ym < -1:
        q = B.c_exp(_mul_i_pi(w, -2, prec), prec)
        t = B.c_log(B.c_mul_2exp(B.c_sub(cb_from_int(1), q, prec), -1), prec)
        corr = _mul_pi(B.c_sub(w, _half_ball(prec), prec), prec)
        base = B.c_add(t, ComplexBall(B.r_neg(corr.im), corr.re), prec)
    else:
        base = B.c_log(B.c_sinpi(w, prec), prec)
    if n == 0:
        return base
    # +/- n pi i: negative sign for 0 < arg(z) <= pi
    xm, ymid = float(z.re.mid), float(z.im.mid)
    minus = ymid > 0 or (ymid == 0 and xm < 0)
    npi = B.r_mul_i(B.r_pi(prec + 4), n if not minus else -n, prec)
    return ComplexBall(base.re, B.r_add(base.im, npi, prec))


def _mul_pi(z, prec):
    pi = B.r_pi(prec + 4)
    return ComplexBall(B.r_mul(z.re, pi, prec), B.r_mul(z.im, pi, prec))


def _mul_i_pi(z, k, prec):
    # k * i * pi * z for small integer k
    t = _mul_pi(z, prec)
    t = ComplexBall(B.r_neg(t.im), t.re)
    return B.c_mul_i(t, k, prec)


def _half_ball(prec):
    return ComplexBall(B.rb_from_q(mpq(1, 2), prec), rb_zero())


def log_sin_pi(z, prec):
    """Analytic continuation of log sin(pi z); cuts on real (k, k+1) intervals."""
    if not z.is_finite():
        return cb_indeterminate()
    if _contains_integer(z):
        return cb_indeterminate()
    if z.is_exact():
        return _log_sin_pi_mid(z, prec)
    mid = ComplexBall(RealBall(z.re.mid), RealBall(z.im.mid))
    straddles_axis = z.im.contains_zero() and not z.im.is_exact()
    lo_f = _floor_of_mid(B.rb_lower(z.re))
    hi_f = _floor_of_mid(B.rb_upper(z.re))
    if straddles_axis and (lo_f != hi_f or not (-1 < lo_f < 1)):
        # straddling a branch cut: union of the images on both sides
        upper = ComplexBall(z.re, _half_interval(z.im, +1))
        lower = ComplexBall(z.re, _half_interval(z.im, -1))
        return B.c_union(log_sin_pi(upper, prec), log_sin_pi(lower, prec))
    base = _log_sin_pi_mid(mid, prec)
    # propagate the input radius via the derivative pi cot(pi z)
    der = B.c_cotpi(z, 53)
    if not der.is_finite():
        return cb_indeterminate()
    up = B._rup()
    dmag = up.mul(up.mul(B.cb_abs_hi(der), B.rb_upper(B.r_pi(53))),
                  up.hypot(z.re.rad, z.im.rad))
    return B.c_add_error(base, dmag)


def _half_interval(b, side):
    # upper (side=+1) or lower (side=-1) half of a real ball containing 0
    hi = B.rb_upper(b) if side > 0 else B.rb_lower(b)
    half = B._rup().div_2exp(B._rup().abs(hi), 1)
    mid = mpfr(half) if side > 0 else mpfr(-half)
    return RealBall(mid, half)


def safe_trig(kind, z, prec):
    """1/sin(pi z) or cot(pi z); exponential forms when |Im z| > 1."""
    if not z.is_finite():
        return cb_indeterminate()
    one = cb_from_int(1)
    ylo, yhi = B.rb_lower(z.im), B.rb_upper(z.im)
    if ylo > 1 or yhi < -1:
        sgn = 1 if ylo > 1 else -1
        q = B.c_exp(_mul_i_pi(z, 2 * sgn, prec), prec)
        den = B.c_sub(q, one, prec)
        if kind == 'inv_sin_pi':
            # 2 i e^{i pi z} / (e^{2 i pi z} - 1), conjugated form below the axis
            e1 = B.c_exp(_mul_i_pi(z, sgn, prec), prec)
            t = B.c_div(B.c_mul_2exp(e1, 1), den, prec)
            t = ComplexBall(B.r_neg(t.im), t.re)  # * i
            return t if sgn > 0 else B.c_neg(t)
        if kind == 'cot_pi':
            t = B.c_sub(B.c_div(B.c_mul_2exp(q, 1), den, prec), one, prec)
            t = ComplexBall(B.r_neg(t.im), t.re)
            return t if sgn > 0 else B.c_neg(t)
        raise ValueError(f"unknown safe_trig kind {kind!r}")
    if kind == 'inv_sin_pi':
        return B.c_inv(B.c_sinpi(z, prec), prec)
    if kind == 'cot_pi':
        return B.c_cotpi(z, prec)
    raise ValueError(f"unknown safe_trig kind {kind!r}")


def reflect_eval(fn, z, value_at_1mz, prec):
    """Combine an evaluation at 1-z into the value at z via reflection."""
    if isinstance(value_at_1mz, BranchedLog):
        value_at_1mz = value_at_1mz.value
    v = value_at_1mz
    if fn == FunctionKind.GAMMA:
        pi = ComplexBall(B.r_pi(prec + 4), rb_zero())
        return B.c_div(B.c_mul(pi, safe_trig('inv_sin_pi', z, prec), prec), v, prec)
    if fn == FunctionKind.RGAMMA:
        # division-free: (1/pi) sin(pi z) Gamma(1-z)
        invpi = B.c_inv(ComplexBall(B.r_pi(prec + 4), rb_zero()), prec)
        return B.c_mul(invpi, B.c_mul(B.c_sinpi(z, prec), v, prec), prec)
    if fn == FunctionKind.LGAMMA:
        logpi = B.c_log(ComplexBall(B.r_pi(prec + 8), rb_zero()), prec)
        return B.c_sub(B.c_sub(logpi, log_sin_pi(z, prec), prec), v, prec)
    if fn == FunctionKind.DIGAMMA:
        pc = _mul_pi(safe_trig('cot_pi', z, prec), prec)
        return B.c_sub(v, pc, prec)
    raise ValueError(f"unknown function kind {fn!r}")


def _stirling_phase_estimate(z):
    # Im log Gamma(z) ~ (x - 1/2) arg(z) + y (log|z| - 1), machine precision
    x, y = float(z.re.mid), float(z.im.mid)
    return (x - 0.5) * math.atan2(y, x) + y * (math.log(math.hypot(x, y)) - 1.0)


def branch_correction(z, log_of_gamma, prec):
    """Principal log Gamma(z) from a principal log(Gamma(z)) enclosure.

    Returns a BranchedLog whose n_correction k satisfies
    log Gamma(z) = log(Gamma(z)) + 2 pi i k.  The leading-Stirling estimate
    picks k; a low-precision Stirling evaluation verifies it, raising
    BranchCorrectionError on mismatch so the caller can fall back to the
    full Stirling log Gamma path.
    """
    if not (z.is_finite() and log_of_gamma.is_finite()):
        return BranchedLog(cb_indeterminate(), 0)
    est = _stirling_phase_estimate(z)
    t = est / (2 * math.pi)
    # alternate between the two ceiling forms to dodge the discontinuities
    frac = t - 0.5 - math.floor(t - 0.5)
    use_second = min(frac, 1 - frac) < 0.25
    if not use_second:
        k = math.ceil(t - 0.5)
        value = _shift_im(log_of_gamma, 2 * k, prec)
    else:
        # log Gamma(z) = log(-Gamma(z)) + pi i (2 ceil(t) - 1); reuse the
        # given enclosure: log(-Gamma) = log(Gamma) -/+ pi i
        k2 = math.ceil(t)
        im_mid = float(log_of_gamma.im.mid)
        if im_mid >= 0:
            # log(-G) = log(G) - pi i, so log Gamma = log(G) + pi i (2 k2 - 2)
            k = k2 - 1
        else:
            k = k2
        value = _shift_im(log_of_gamma, 2 * k, prec)
    from . import stirling
    ref = stirling.lgamma_stirling(
        ComplexBall(RealBall(z.re.mid), RealBall(z.im.mid)), 64,
        FunctionKind.LGAMMA)
    if ref.is_finite():
        dre = abs(float(value.re.mid) - float(ref.re.mid))
        dim = abs(float(value.im.mid) - float(ref.im.mid))
        tol = math.pi / 2 + float(value.im.rad) + float(ref.im.rad) + 1e-4 * (
            1 + abs(float(ref.re.mid)) + abs(float(ref.im.mid)))
        if dre > tol or dim > tol:
            raise BranchCorrectionError(
                f"branch estimate k={k} disagrees with low-precision log Gamma")
    return BranchedLog(value, k)


def _shift_im(w, two_k, prec):
    if two_k == 0:
        return w
    npi = B.r_mul_i(B.r_pi(prec + 4), two_k, prec)
    return ComplexBall(w.re, B.r_add(w.im, npi, prec))
