"""
Public evaluation API: pick an algorithm, evaluate, return a containing ball.

The automatic selection follows measured cutoffs: the Taylor series wins in a
window around small real arguments that widens with precision (and only while
the shipped coefficient table can certify the target), rational arguments
switch to binary splitting at very high precision, and the Stirling series is
the universal fallback.  Forced algorithms outside their domain raise
AlgorithmUnavailable.
"""

import logging
import math
import os
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import balls as B
from . import hypergeom as H
from . import spouge as SP
from . import stirling as ST
from . import taylor_local as TL
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_from_q, rb_zero)
from .kinds import AlgoKind, FunctionKind

log = logging.getLogger('gammaball')

RATIONAL_BS_MIN_BITS = 6000     # placeholder threshold, see ledger
RATIONAL_BS_MAX_DEN_BITS = 64


class AlgorithmUnavailable(Exception):
    """A forced algorithm cannot handle this argument or precision."""


def _env_float(name, default):
    v = os.environ.get(name)
    if v is None:
        return default
    return float(v)


def _is_exact_rational(z):
    return isinstance(z, (int, mpz, mpq, Fraction))


def _to_ball(z, p):
    if isinstance(z, (ComplexBall,)):
        return z
    if isinstance(z, RealBall):
        return ComplexBall(z, rb_zero())
    if isinstance(z, (int, mpz)):
        return cb_from_int(int(z))
    if isinstance(z, Fraction):
        z = mpq(z.numerator, z.denominator)
    if isinstance(z, mpq):
        return ComplexBall(rb_from_q(z, p + 32), rb_zero())
    if isinstance(z, float):
        return ComplexBall(B.rb_from_mpfr(mpfr(z, precision=53)), rb_zero())
    if isinstance(z, complex):
        return ComplexBall(B.rb_from_mpfr(mpfr(z.real, precision=53)),
                           B.rb_from_mpfr(mpfr(z.imag, precision=53)))
    raise TypeError(f"cannot interpret {type(z)} as an argument")


def select_algorithm(fn, z, p):
    """Resolve AUTO to a concrete algorithm for this argument/precision."""
    if fn == FunctionKind.DIGAMMA:
        return AlgoKind.STIRLING
    if _is_exact_rational(z):
        q = mpq(z) if not isinstance(z, Fraction) else mpq(z.numerator, z.denominator)
        if (p >= RATIONAL_BS_MIN_BITS
                and q.denominator.bit_length() <= RATIONAL_BS_MAX_DEN_BITS
                and abs(q) < 2**20 and fn in (FunctionKind.GAMMA, FunctionKind.RGAMMA)):
            return AlgoKind.HYPER_RATIONAL_BS
        zb = _to_ball(z, p)
    else:
        zb = _to_ball(z, p)
    window = _env_float('GAMMABALL_TAYLOR_WINDOW', 1.0)
    use_taylor = False
    if zb.is_real():
        x = ST._f(zb.re.mid)
        if math.isfinite(x):
            r = math.floor(x + 0.5)
            if p < 40 or ST._f(zb.re.rad) > 2.0 ** -16:
                use_taylor = abs(r) < 160 * window
            else:
                use_taylor = (-40 - (p - 40) / 4) * window < r < (70 + (p - 40) / 8) * window
    else:
        x = abs(ST._f(zb.re.mid))
        y = abs(ST._f(zb.im.mid))
        capped = ((p < 128 and y > 4) or (p < 256 and y > 5)
                  or (p < 512 and y > 8) or (p < 1024 and y > 9) or y > 10)
        if not capped and math.isfinite(x):
            use_taylor = x * (1.0 + 0.75 * y) < (8 + 0.15 * p) * window
    if use_taylor and fn in (FunctionKind.GAMMA, FunctionKind.RGAMMA,
                             FunctionKind.LGAMMA):
        try:
            TL.taylor_plan(fn, zb, p, TL.default_table())
            return AlgoKind.TAYLOR
        except TL.TaylorUnavailable:
            pass
    return AlgoKind.STIRLING


def evaluate(fn, z, p, algo=AlgoKind.AUTO):
    """Evaluate Gamma/1/Gamma/log Gamma/psi; the result ball contains the truth."""
    p = int(p)
    if p < 2:
        raise ValueError("precision must be >= 2 bits")
    beta = _env_float('GAMMABALL_BETA', ST.DEFAULT_BETA)
    alpha = _env_float('GAMMABALL_ALPHA', H.ALPHA_DEFAULT)
    if algo == AlgoKind.AUTO:
        algo = select_algorithm(fn, z, p)
        log.debug("auto selection: %s for %s at %d bits", algo.value, fn.value, p)
    if _is_exact_rational(z):
        q = mpq(z) if not isinstance(z, Fraction) else mpq(z.numerator, z.denominator)
        if q.denominator == 1:
            exact = _integer_special_case(fn, int(q), p)
            if exact is not None:
                return exact
        if algo == AlgoKind.HYPER_RATIONAL_BS:
            return _rational_bs(fn, q, p)
        z = _to_ball(q, p)
    else:
        z = _to_ball(z, p)
    if fn != FunctionKind.RGAMMA and ST._contains_nonpos_int(z):
        log.info("argument ball contains a pole of %s; result is indeterminate",
                 fn.value)
        return cb_indeterminate()
    if algo == AlgoKind.STIRLING:
        return ST.lgamma_stirling(z, p, fn, beta=beta)
    if algo == AlgoKind.TAYLOR:
        try:
            return TL.eval_taylor(fn, z, p)
        except TL.TaylorUnavailable as e:
            raise AlgorithmUnavailable(str(e)) from None
    if algo == AlgoKind.SPOUGE:
        return _via_gamma(fn, z, p, lambda w, q: SP.spouge_eval(w, q))
    if algo == AlgoKind.HYPER:
        try:
            return _via_gamma(fn, z, p, lambda w, q: H.gamma_hyper(w, q, alpha=alpha))
        except H.HyperUnavailable as e:
            raise AlgorithmUnavailable(str(e)) from None
    if algo == AlgoKind.HYPER_RATIONAL_BS:
        raise AlgorithmUnavailable("binary splitting needs an exact rational argument")
    raise ValueError(f"unknown algorithm {algo!r}")


def _via_gamma(fn, z, p, gamma_fn):
    """Route RGAMMA/LGAMMA through a Gamma-only algorithm."""
    if fn == FunctionKind.GAMMA:
        return gamma_fn(z, p)
    if fn == FunctionKind.RGAMMA:
        g = gamma_fn(z, p + 8)
        if not g.is_finite() or g.contains_zero():
            # fall back for poles: 1/Gamma is finite there
            return ST.lgamma_stirling(z, p, FunctionKind.RGAMMA)
        return B.c_add(B.c_inv(g, p + 8), cb_from_int(0), p)
    if fn == FunctionKind.LGAMMA:
        from .reflection import BranchCorrectionError, branch_correction
        g = gamma_fn(z, p + 8)
        if not g.is_finite() or g.contains_zero():
            return cb_indeterminate()
        if z.is_real() and B.rb_lower(z.re) > 0:
            return ComplexBall(B.r_log(g.re, p), rb_zero())
        try:
            return B.c_add(branch_correction(z, B.c_log(g, p + 8), p + 8).value,
                           cb_from_int(0), p)
        except BranchCorrectionError:
            return ST.lgamma_stirling(z, p, FunctionKind.LGAMMA)
    raise AlgorithmUnavailable(f"{fn.value} not supported on this algorithm")


def _integer_special_case(fn, n, p):
    if fn == FunctionKind.GAMMA:
        if n <= 0:
            log.info("Gamma pole at %d; result is indeterminate", n)
            return cb_indeterminate()
        return ComplexBall(rb_from_int(gmpy2.fac(n - 1)), rb_zero())
    if fn == FunctionKind.RGAMMA and n <= 0:
        return cb_from_int(0)
    return None


def _rational_bs(fn, q, p):
    if fn not in (FunctionKind.GAMMA, FunctionKind.RGAMMA):
        raise AlgorithmUnavailable("binary splitting covers Gamma and 1/Gamma only")
    try:
        if q > 0:
            g = ComplexBall(H.gamma_rational_bs(q, p + 8), rb_zero())
        else:
            # reflection: Gamma(q) = pi / (sin(pi q) Gamma(1 - q))
            wp = p + 24
            g1 = H.gamma_rational_bs(1 - q, wp)
            s = B.r_sinpi(rb_from_q(q, wp), wp)
            den = B.r_mul(s, g1, wp)
            if den.contains_zero():
                return cb_indeterminate() if fn == FunctionKind.GAMMA else cb_from_int(0)
            g = ComplexBall(B.r_div(B.r_pi(wp), den, wp), rb_zero())
    except H.HyperUnavailable as e:
        raise AlgorithmUnavailable(str(e)) from None
    if fn == FunctionKind.RGAMMA:
        return B.c_add(B.c_inv(g, p + 8), cb_from_int(0), p)
    return B.c_add(g, cb_from_int(0), p)
