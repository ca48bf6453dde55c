"""
Rising factorials (z)_n = z (z+1) ... (z+n-1).

The argument-reduction workhorse for the gamma functions: binary splitting
for exact rationals and for balls, rectangular splitting for high-precision
balls (few full multiplications, many cheap integer-scalar ones), derivative
jets, and a branch-correct logarithmic rising factorial that tracks the phase
with a machine-precision scan of the partial products.
"""

import math

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

from . import balls as B
from .balls import ComplexBall, cb_from_int
from . import series as S


@dataclass(frozen=True)
class RisingSpec:
    """Tuning knobs for rectangular splitting."""
    n: int
    m: int = 0          # 0 means: use the default block table
    basecase_cutoff: int = 10

    def block(self):
        if self.m:
            return max(1, min(self.m, max(self.n, 1)))
        return _default_block(self.n)


def _default_block(n):
    # single tuning table; roughly sqrt(n) capped, with small-n overrides
    if n <= 12:
        return 2
    if n <= 32:
        return 4
    if n <= 64:
        return 6
    return min(gmpy2.isqrt(n), 60)


class RisingEnvelopeError(Exception):
    """log_rising input outside its validity envelope; sum log(z+k) termwise."""


def _is_exact_scalar(z):
    return isinstance(z, (int, mpz, mpq, Fraction))


def _rising_int_prod(a, b, lo, hi):
    # product of (a + k b) for lo <= k < hi, by binary splitting
    if hi - lo <= 8:
        acc = mpz(1)
        for k in range(lo, hi):
            acc *= a + k * b
        return acc
    mid = (lo + hi) // 2
    return _rising_int_prod(a, b, lo, mid) * _rising_int_prod(a, b, mid, hi)


def rising_bs(z, n, prec=0):
    """(z)_n by binary splitting; exact mpq for rational z, ball otherwise."""
    n = int(n)
    if n < 0:
        raise ValueError("rising factorial needs n >= 0")
    if _is_exact_scalar(z):
        if isinstance(z, Fraction):
            z = mpq(z.numerator, z.denominator)
        z = mpq(z)
        if n == 0:
            return mpq(1)
        # keep numerator and denominator unreduced; canonicalize once at the end
        num = _rising_int_prod(z.numerator, z.denominator, 0, n)
        return mpq(num, z.denominator ** n)
    if n == 0:
        return cb_from_int(1)
    return _rising_bs_ball(z, 0, n, prec)


def _rising_bs_ball(z, lo, hi, prec, cutoff=10):
    if hi - lo <= cutoff:
        acc = B.c_add_i(z, lo, prec)
        for k in range(lo + 1, hi):
            acc = B.c_mul(acc, B.c_add_i(z, k, prec), prec)
        return acc
    mid = (lo + hi) // 2
    left = _rising_bs_ball(z, lo, mid, prec, cutoff)
    right = _rising_bs_ball(z, mid, hi, prec, cutoff)
    return B.c_mul(left, right, prec)


def _block_poly(k, ell):
    # coefficients of (X+k)(X+k+1)...(X+k+ell-1), triangular scheme, exact ints
    f = [mpz(k), mpz(1)]
    for j in range(1, ell):
        c = k + j
        g = [f[0] * c]
        for i in range(1, j + 1):
            g.append(f[i - 1] + f[i] * c)
        g.append(mpz(1))
        f = g
    return f


def rising_rs(z, n, prec, spec=None):
    """(z)_n by rectangular splitting: m + ceil(n/m) full multiplications.

    The block dot products cancel badly while k ~< |z| unless z is real and
    positive (positive coefficients against a rotating z^i), so that zone is
    multiplied out directly and only the stable range is block-evaluated.
    """
    n = int(n)
    if n < 0:
        raise ValueError("rising factorial needs n >= 0")
    if n == 0:
        return cb_from_int(1)
    if spec is None:
        spec = RisingSpec(n=n)
    if n <= spec.basecase_cutoff:
        return _rising_bs_ball(z, 0, n, prec, spec.basecase_cutoff)
    if not (z.is_real() and B.rb_lower(z.re) >= 0):
        az = abs(_mid_complex(z)) if z.is_finite() else 0.0
        k0 = min(n, int(math.ceil(4 * az)) + 8)
        if k0:
            head = _rising_bs_ball(z, 0, k0, prec)
            if k0 == n:
                return head
            tail = rising_rs(B.c_add_i(z, k0, prec), n - k0, prec, spec)
            return B.c_mul(head, tail, prec)
    m = spec.block()
    powers = [None, z]
    for i in range(2, m + 1):
        powers.append(B.c_mul(powers[-1], z, prec))
    result = None
    k = 0
    while k < n:
        ell = min(m, n - k)
        f = _block_poly(k, ell)
        # dot product f(z) using the precomputed powers; scalar ops only
        t = B.cb_from_int(f[0]) if f[0] else None
        for i in range(1, ell + 1):
            term = powers[i] if f[i] == 1 else B.c_mul_i(powers[i], f[i], prec)
            t = term if t is None else B.c_add(t, term, prec)
        result = t if result is None else B.c_mul(result, t, prec)
        k += ell
    return result


def rising_jet(z, n, order, prec):
    """Jet of (z + x)_n to the requested order (>= 1)."""
    n = int(n)
    order = int(order)
    if order < 1:
        raise ValueError("jet order must be >= 1")
    if n < 0:
        raise ValueError("rising factorial needs n >= 0")
    if n == 0:
        return S.jet_const(cb_from_int(1), order)
    acc = S.jet_x(z, order)
    for k in range(1, n):
        acc = S.jet_mul_linear(acc, B.c_add_i(z, k, prec), prec)
    return acc


def _mid_complex(z):
    return complex(float(z.re.mid), float(z.im.mid))


def _check_envelope(z, n):
    zm = _mid_complex(z)
    if n > 10**6 or abs(zm) >= 10**6 or abs(zm.imag) <= 1e-6:
        raise RisingEnvelopeError(
            "log_rising outside validity envelope; sum log(z+k) termwise")
    scale = max(abs(zm.real), abs(zm.imag))
    if float(z.re.rad) > 2.0**-30 * scale or float(z.im.rad) > 2.0**-30 * abs(zm.imag):
        raise RisingEnvelopeError(
            "log_rising needs the input accurate to >= 30 bits")


def log_rising(z, n, prec):
    """sum_{k<n} log(z+k) with the correct branch, for Im(z) != 0.

    The magnitude comes from the high-precision rising factorial; the phase
    integer is tracked by a machine-precision scan of the partial products,
    counting sign changes of the imaginary part from nonnegative to negative.
    """
    n = int(n)
    if n < 0:
        raise ValueError("log_rising needs n >= 0")
    if n == 0:
        return cb_from_int(0)
    if float(z.im.mid) < 0:
        return B.c_conj(log_rising(B.c_conj(z), n, prec))
    _check_envelope(z, n)
    f = rising_rs(z, n, prec + 8)
    if n == 1:
        return B.c_log(f, prec)
    s = _mid_complex(z)
    s /= abs(s)
    m = 0
    zm = _mid_complex(z)
    for k in range(1, n):
        t = s * (zm + k)
        if s.imag >= 0 and t.imag < 0:
            m += 2
        s = t / abs(t)  # renormalize to avoid overflow
    pi = B.r_pi(prec + 8)
    if s.real < 0:
        m += 1 if s.imag >= 0 else -1
        lg = B.c_log(B.c_neg(f), prec)
    else:
        lg = B.c_log(f, prec)
    return ComplexBall(lg.re, B.r_add(lg.im, B.r_mul_i(pi, m, prec + 8), prec))


def log_rising_real_positive(z, n, prec):
    """sum log(z+k) for a real ball with z > 0: plain real logarithm."""
    f = rising_rs(z, n, prec + 8)
    return B.c_log(f, prec)


def log_rising_termwise(z, n, prec):
    """Fallback: direct termwise sum of principal logarithms."""
    acc = cb_from_int(0)
    for k in range(n):
        acc = B.c_add(acc, B.c_log(B.c_add_i(z, k, prec), prec), prec)
    return acc
