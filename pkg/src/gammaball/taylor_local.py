"""
Local evaluation of Gamma, 1/Gamma and log Gamma by the Taylor series of the
reciprocal gamma function at 1:

    1/Gamma(1+u) = sum_n b_n u^n = 1 + gamma u + ...,   b_n = a_{n+1},

valid after shifting Re(z) into [0.5, 1.5] with rising factorials.  Since
1/Gamma is entire, O(p / log p) terms suffice, making this the fastest
method for small arguments once the coefficients exist.

Coefficients are expensive to produce, so a static table (N = 537
coefficients certified at 3456 bits) ships with the package and is never
rebuilt at runtime.  build_taylor_table regenerates it: it exponentiates the
negated log-gamma jet at the exact point 1 and cross-checks the leading
coefficients against the zeta recurrence

    (n-1) a_n = gamma a_{n-1} - zeta(2) a_{n-2} + ... + (-1)^n zeta(n-1) a_1

with zeta(2k) taken from Bernoulli numbers and odd zeta values from
Euler-Maclaurin summation.

Tail bounds: |1/Gamma(1+u) - sum_{n<N} b_n u^n| <= 8 max(1/2, |u|) |b_N| |u|^N
for |u| <= 20 and N <= 1000 (the excluded larger indices are out of reach
here since the table stops at 537).
"""

import math
import os
import threading

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import balls as B
from . import bernoulli as BN
from . import rising as RS
from . import series as S
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_from_q, rb_zero)
from .kinds import FunctionKind

TABLE_FILE = os.path.join(os.path.dirname(__file__), 'data', 'rgamma_taylor.txt')
IM_LIMIT = 10.0           # refuse |Im z| beyond this
EXCLUDED_N = {1443, 2005, 9891}


class TaylorUnavailable(Exception):
    """Argument or precision outside what the coefficient table supports."""


class TaylorTable:
    """Certified balls b_0..b_{N-1} for 1/Gamma(1+u), plus float magnitudes."""

    def __init__(self, coeffs, prec_bits):
        self.coeffs = tuple(coeffs)
        self.prec_bits = prec_bits
        self.N = len(self.coeffs)
        self.log2_abs = tuple(_log2_abs(c) for c in self.coeffs)

    def __len__(self):
        return self.N


def _log2_abs(b):
    m = b.re.mid
    if gmpy2.is_zero(m):
        return -1e9
    return gmpy2.get_exp(m) * 1.0


# ---------------------------------------------------------------------------
# Coefficient bounds
# ---------------------------------------------------------------------------

def _lambert_w0(x):
    # Newton iteration; only used to pick a good contour radius
    w = math.log(x) - math.log(max(math.log(x), 1.0)) if x > math.e else x / math.e
    w = max(w, 0.1)
    for _ in range(60):
        ew = math.exp(w)
        w -= (w * ew - x) / (ew * (w + 1))
    return w


def coeff_bound(n, r_choice='optimal'):
    """Upper bound e^(pi R/2) R^(1/2+R-n) on |a_n|, as an upward magnitude.

    Any R > 0 makes the formula rigorous; 'optimal' picks the minimizing R
    via the Lambert W function, 'n8' uses the easy-to-compute R = n/8.
    """
    if n < 0:
        raise ValueError("coeff_bound needs n >= 0")
    if n == 0:
        return mpfr(1)
    if r_choice == 'optimal':
        R = (n - 0.5) / _lambert_w0((n + 0.5) * math.exp(math.pi / 2 + 1))
    elif r_choice == 'n8':
        R = max(n / 8.0, 1e-6)
    else:
        raise ValueError(f"unknown r_choice {r_choice!r}")
    lg2 = (math.pi * R / 2) / math.log(2) + (0.5 + R - n) * math.log2(R)
    return B._rup().exp2(mpfr(lg2 + 1e-6 * abs(lg2) + 0.01, precision=53))


def taylor_tail_bound(table, z_mag, N):
    """8 max(1/2, |u|) |b_N| |u|^N, on the theorem's verified domain."""
    if not (N >= 1 and N < table.N):
        raise TaylorUnavailable("truncation order beyond the table")
    if N in EXCLUDED_N:
        raise TaylorUnavailable(f"truncation order {N} is excluded")
    up = B._rup()
    zm = up.plus(mpfr(z_mag, precision=53)) if not isinstance(z_mag, mpfr) else up.plus(z_mag)
    if not zm <= 20:
        raise TaylorUnavailable("argument magnitude beyond the tail theorem")
    if gmpy2.is_zero(zm):
        return B._MPFR_ZERO
    bn = B.rb_abs_hi(table.coeffs[N].re)
    t = up.mul(up.mul(mpfr(8), up.maxnum(mpfr(0.5), zm)), bn)
    t = up.mul(t, up.pow(zm, N))
    if not t < 2.0 ** -8:
        raise TaylorUnavailable("tail bound too large; reduce the argument")
    return t


# ---------------------------------------------------------------------------
# Table construction, serialization
# ---------------------------------------------------------------------------

class TaylorBuildError(Exception):
    """Cross-check between the jet route and the zeta recurrence failed."""


def _zeta_even(k, prec):
    # zeta(2k) = (-1)^(k+1) B_{2k} (2 pi)^(2k) / (2 (2k)!)
    b = BN.bern(k)
    two_pi = B.r_mul_2exp(B.r_pi(prec + 8), 1)
    v = B.r_pow_int(two_pi, 2 * k, prec)
    v = B.r_mul(v, rb_from_q(abs(b), prec), prec)
    return B.r_div_i(v, 2 * gmpy2.fac(2 * k), prec)


def _zeta_em(s, prec):
    # Euler-Maclaurin for integer s >= 2: K direct terms, J Bernoulli terms;
    # x^-s is completely monotone, so the error is below the first omitted term
    K = max(8, prec // 4)
    J = max(4, prec // (2 * max(1, int(math.log2(K)))))
    wp = prec + 32
    BN.bern(J + 2)
    acc = rb_zero()
    for k in range(1, K):
        acc = B.r_add(acc, B.r_inv(rb_from_int(mpz(k) ** s, wp), wp), wp)
    Kq = mpz(K)
    acc = B.r_add(acc, rb_from_q(mpq(1, (s - 1) * Kq ** (s - 1)), wp), wp)
    acc = B.r_add(acc, rb_from_q(mpq(1, 2 * Kq ** s), wp), wp)
    rising = mpz(s)
    fac2j = mpz(2)
    term_q = None
    for j in range(1, J + 1):
        # B_{2j}/(2j)! * (s)_{2j-1} / K^{s+2j-1}
        term_q = BN.bern(j) / fac2j * rising / Kq ** (s + 2 * j - 1)
        acc = B.r_add(acc, rb_from_q(term_q, wp), wp)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fac2j *= (2 * j + 1) * (2 * j + 2)
    nxt = abs(BN.bern(J + 1) / fac2j * rising / Kq ** (s + 2 * J + 1))
    return B.r_add_error(acc, B._mag_q_up(nxt))


def build_taylor_table(N, prec):
    """Certified b_0..b_{N-1} via the log-gamma jet at 1, cross-checked."""
    if N < 2:
        raise ValueError("need N >= 2 coefficients")
    from .stirling import lgamma_jet_stirling, digamma_stirling
    wp = prec + max(64, N + 64)   # jet chains lose O(N) bits to cancellation
    jet = lgamma_jet_stirling(cb_from_int(1), wp, N)
    inv = S.jet_exp(S.jet_neg(jet), wp)
    coeffs = [ComplexBall(c.re, c.im) for c in inv.coeffs]
    # cross-check against the zeta recurrence for n <= 32
    crosscheck = min(N, 32)
    gam = B.r_neg(digamma_stirling(cb_from_int(1), wp).re)
    zetas = {}
    for k in range(2, crosscheck):
        zetas[k] = _zeta_even(k // 2, wp) if k % 2 == 0 else _zeta_em(k, wp)
    a = [rb_zero(), rb_from_int(1)]  # a_1 = 1
    for n in range(2, crosscheck + 1):
        acc = B.r_mul(gam, a[n - 1], wp)
        sign = -1
        for k in range(2, n):
            t = B.r_mul(zetas[k], a[n - k], wp)
            acc = B.r_add(acc, t if sign > 0 else B.r_neg(t), wp)
            sign = -sign
        a.append(B.r_div_i(acc, n - 1, wp))
        if not B.r_overlaps(a[n], coeffs[n - 1].re):
            raise TaylorBuildError(f"coefficient a_{n} fails the recurrence check")
    # round the certified balls down to the declared precision
    out = []
    for c in coeffs:
        m = mpfr(c.re.mid, precision=prec)
        rad = c.re.rad
        if m != c.re.mid:
            rad = B._rup().add(rad, B._half_ulp(m, prec))
        out.append(ComplexBall(RealBall(m, rad), rb_zero()))
    return TaylorTable(out, prec)


def save_table(table, path):
    with open(path, 'w') as f:
        f.write("rgamma-taylor-v1\n")
        f.write(f"N={table.N}\n")
        f.write(f"prec={table.prec_bits}\n")
        for c in table.coeffs:
            f.write(B.rb_hex(c.re) + "\n")


def load_table(path):
    with open(path) as f:
        magic = f.readline().strip()
        if magic != "rgamma-taylor-v1":
            raise ValueError(f"unrecognized table header {magic!r}")
        n = int(f.readline().strip().split('=')[1])
        prec = int(f.readline().strip().split('=')[1])
        coeffs = []
        for _ in range(n):
            coeffs.append(ComplexBall(B.rb_from_hex(f.readline().strip()), rb_zero()))
    return TaylorTable(coeffs, prec)


_default_table = None
_table_lock = threading.Lock()


def default_table():
    global _default_table
    if _default_table is None:
        with _table_lock:
            if _default_table is None:
                _default_table = load_table(TABLE_FILE)
    return _default_table


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _f(x):
    try:
        return float(x)
    except (OverflowError, ValueError):
        return math.inf


def taylor_plan(fn, z, p, table):
    """Working precision, shift and term count, or raise TaylorUnavailable."""
    xm, ym = _f(z.re.mid), _f(z.im.mid)
    if not (math.isfinite(xm) and math.isfinite(ym)):
        raise TaylorUnavailable("nonfinite argument")
    if abs(ym) > IM_LIMIT:
        raise TaylorUnavailable("imaginary part beyond the cancellation budget")
    s = round(xm - 1.0)
    u_abs = math.hypot(xm - 1.0 - s, ym)
    pad = 24 + max(0, int(abs(s)).bit_length() * 2)
    if ym:
        pad += math.ceil(math.pi * abs(ym) / (2 * math.log(2)))
        pad += max(0, math.ceil(math.lgamma(abs(ym) + 2) / math.log(2)))
    wp = p + pad
    if wp > table.prec_bits:
        raise TaylorUnavailable("table precision too low for this target")
    # smallest usable truncation via the float magnitudes, checked rigorously
    lu = math.log2(max(u_abs, 2.0 ** -p / 4))
    n_t = None
    for n in range(2, table.N):
        if table.log2_abs[n] + n * lu + 4 < -(wp + 2):
            n_t = n
            break
    if n_t is None:
        raise TaylorUnavailable("table too short for this argument/precision")
    return wp, s, n_t


def eval_taylor(fn, z, p, table=None):
    """Gamma, 1/Gamma or log Gamma via the reciprocal-gamma Taylor series."""
    if table is None:
        table = default_table()
    if not z.is_finite():
        return cb_indeterminate()
    wp, s, n_t = taylor_plan(fn, z, p, table)
    z_red = B.c_add_i(z, -s, wp)
    u = B.c_add_i(z_red, -1, wp)
    u_hi = B.cb_abs_hi(u)
    tail = taylor_tail_bound(table, u_hi, n_t)
    # rectangular splitting with per-term precision
    m = max(1, int(gmpy2.isqrt(n_t)))
    u_pow = [cb_from_int(1)]
    for _ in range(m):
        u_pow.append(B.c_mul(u_pow[-1], u, wp))
    lu = _f(gmpy2.log2(u_hi)) if u_hi > 0 else -1e9
    g = cb_from_int(0)
    q_count = (n_t + m - 1) // m
    for qi in range(q_count - 1, -1, -1):
        base = qi * m
        pn = max(16, min(wp, wp + int(table.log2_abs[base] + base * lu) + 16))
        blk = cb_from_int(0)
        for j in range(min(m, n_t - base) - 1, -1, -1):
            t = B.c_mul(u_pow[j], table.coeffs[base + j], pn)
            blk = B.c_add(blk, t, pn)
        g = B.c_add(B.c_mul(g, u_pow[m], pn), blk, pn)
    g = B.c_add_error(g, tail)
    # undo the argument reduction; g contains 1/Gamma(z_red)
    if fn == FunctionKind.RGAMMA:
        if s >= 0:
            out = B.c_div(g, RS.rising_rs(z_red, s, wp), wp) if s else g
        else:
            out = B.c_mul(g, RS.rising_rs(z, -s, wp), wp)
        return B.c_add(out, cb_from_int(0), p)
    if fn == FunctionKind.GAMMA:
        if s >= 0:
            num = RS.rising_rs(z_red, s, wp) if s else cb_from_int(1)
            out = B.c_div(num, g, wp)
        else:
            out = B.c_inv(B.c_mul(g, RS.rising_rs(z, -s, wp), wp), wp)
        return B.c_add(out, cb_from_int(0), p)
    if fn == FunctionKind.LGAMMA:
        return _lgamma_via_taylor(fn, z, z_red, g, s, wp, p)
    raise TaylorUnavailable(f"no Taylor path for {fn}")


def _lgamma_via_taylor(fn, z, z_red, g, s, wp, p):
    from .reflection import BranchCorrectionError, branch_correction
    if s >= 0:
        num = RS.rising_rs(z_red, s, wp) if s else cb_from_int(1)
        gam = B.c_div(num, g, wp)
    else:
        gam = B.c_inv(B.c_mul(g, RS.rising_rs(z, -s, wp), wp), wp)
    if not gam.is_finite():
        return cb_indeterminate()
    if z.is_real() and B.rb_lower(z.re) > 0:
        return ComplexBall(B.r_log(gam.re, p), rb_zero())
    lg = B.c_log(gam, wp)
    try:
        bl = branch_correction(z, lg, wp)
    except BranchCorrectionError as e:
        raise TaylorUnavailable(str(e)) from None
    return B.c_add(bl.value, cb_from_int(0), p)
