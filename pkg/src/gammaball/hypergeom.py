"""
Gamma via incomplete gamma functions: Gamma(z) = gamma(z,N) + Gamma(z,N).

The lower part is the convergent series

    gamma(z,N) = N^z e^-N / z * sum_{k>=0} N^k / (z+1)_k,

whose tail is controlled by comparison with a geometric series once the term
ratio N/(Re(z)+1+k) drops below 1.  The upper part uses the asymptotic
series sum_k (1-z)_k / (-N)^k, certified by its first omitted term for real
z in (0, 1]; for other arguments we instead enlarge N until the whole upper
part fits below the target (the L = 0 strategy).

For exact rational z the lower series is summed by binary splitting of the
partial-sum matrix product with exact integer term recursion, giving the
quasilinear-bit-cost path used at very high precision.
"""

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import balls as B
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_from_q, rb_zero)

ALPHA_DEFAULT = 0.53
ALPHA_MAX = 0.5469


class HyperUnavailable(Exception):
    """Series/tail certification impossible with the given parameters."""


@dataclass(frozen=True)
class HyperPlan:
    alpha: float
    N_split: int
    K: int
    L: int


def _f(x):
    try:
        return float(x)
    except (OverflowError, ValueError):
        return math.inf


def _log2_lower_tail(N, K, xr):
    # log2 of t_K / (1 - rho), the geometric tail of the 1F1 sum
    rho = N / (xr + 1 + K)
    if rho >= 1:
        return math.inf
    lt = K * math.log2(N) - (math.lgamma(K + 1 + xr)
                             - math.lgamma(1 + xr)) / math.log(2)
    return lt - math.log2(1 - rho)


def plan_hyper(z, p, alpha=None):
    """Split point and series lengths for Re(z) in (0, 1] after reduction.

    Error budgets fold in the prefactors: the lower sum bulges to ~ e^N
    before its N^z e^-N / z prefactor, while the upper series rides on
    e^-N N^(z-1), so its terms only need to reach 2^(alpha-1)p.
    """
    x = _f(z.re.mid)
    real_path = z.is_real()
    if alpha is None:
        alpha = ALPHA_DEFAULT if real_path else 1.0
    if not 0.5 < alpha <= max(ALPHA_MAX, 1.0):
        raise ValueError("alpha must lie in (0.5, 0.5469] (or 1 for L = 0)")
    N = max(2, math.ceil(alpha * math.log(2) * (p + 10)))
    xr = x if 0 < x <= 1 else min(max(x - round(x - 1.0), 0.05), 1.0)
    l2e = 1.0 / math.log(2)
    # lower tail target: prefactor magnitude is x log2 N - N log2 e - log2 x
    target_k = -(p + 8.0) - (xr * math.log2(N) - N * l2e - math.log2(xr))
    K = max(8, int(1.1 * N))
    while _log2_lower_tail(N, K, xr) > target_k:
        K += max(1, K // 64)
        if K > 10**8:
            raise HyperUnavailable("lower series does not certify")
    while K > 8 and _log2_lower_tail(N, K - 1, xr) <= target_k:
        K -= 1
    # upper-series length (real path only; complex uses L = 0)
    L = 0
    if real_path and alpha < 1.0 and xr < 1:
        target_l = -(p + 8.0) + N * l2e - (xr - 1) * math.log2(N)
        L = 1
        while True:
            lu = (math.lgamma(L + 1 - xr) - math.lgamma(1 - xr)) / math.log(2) \
                - L * math.log2(N)
            if lu <= target_l:
                break
            L += 1
            if L > N + 1:  # series diverges before certifying
                raise HyperUnavailable("upper series cannot reach the target")
    return HyperPlan(alpha=alpha, N_split=N, K=K, L=L)


def lower_gamma_series(z, N, K, prec):
    """gamma(z, N) as a ball: prefactor times the 1F1 sum plus geometric tail."""
    if not z.is_finite():
        return cb_indeterminate()
    x_lo = B.rb_lower(z.re)
    if not x_lo > 0:
        return cb_indeterminate()
    rho_den = B._rdn().add(B._rdn().add(x_lo, mpfr(1)), mpfr(K))
    rho = B._rup().div(mpfr(N), rho_den)
    if not rho < 1:
        raise HyperUnavailable("term ratio still >= 1 at K; increase K")
    # working precision carries the e^N bulge of the positive sum
    wp = prec + int(1.45 * N) + 32
    s = cb_from_int(1)
    t = cb_from_int(1)
    for k in range(1, K):
        t = B.c_mul_i(t, N, wp)
        t = B.c_div(t, B.c_add_i(z, k, wp), wp)
        s = B.c_add(s, t, wp)
    t = B.c_mul_i(t, N, wp)
    t = B.c_div(t, B.c_add_i(z, K, wp), wp)
    up = B._rup()
    tail = up.div(B.cb_abs_hi(t), up.sub(mpfr(1), rho))
    s = B.c_add_error(s, tail)
    pref = _lower_prefactor(z, N, wp)
    return B.c_add(B.c_mul(pref, s, wp), cb_from_int(0), prec)


def _lower_prefactor(z, N, wp):
    # N^z e^-N / z = exp(z log N - N) / z
    logn = B.r_log(rb_from_int(N, wp), wp)
    e = ComplexBall(B.r_sub(B.r_mul(z.re, logn, wp), rb_from_int(N), wp),
                    B.r_mul(z.im, logn, wp))
    return B.c_div(B.c_exp(e, wp), z, wp)


def upper_gamma_asymp(z, N, L, prec):
    """Gamma(z, N) by the asymptotic series with a first-omitted-term bound.

    Certified for real z in (0, 1]; with L = 0 the bound e^-N N^(Re z - 1)
    also covers complex z with Re(z) in (0, 1].
    """
    if not z.is_finite():
        return cb_indeterminate()
    x_lo, x_hi = B.rb_lower(z.re), B.rb_upper(z.re)
    if not (x_lo > 0 and x_hi <= 1):
        raise HyperUnavailable("upper series certified only for Re(z) in (0, 1]")
    wp = prec + 16
    up = B._rup()
    if L == 0:
        bound = up.mul(up.exp(mpfr(-N)), up.exp2(up.mul(
            up.sub(up.plus(mpfr(x_hi)), mpfr(1)), B._rdn().log2(mpfr(N)))))
        out = ComplexBall(RealBall(B._MPFR_ZERO, bound),
                          RealBall(B._MPFR_ZERO, bound) if not z.is_real() else rb_zero())
        return out
    if not z.is_real():
        raise HyperUnavailable("nonzero L needs real z in (0, 1]")
    s = cb_from_int(1)
    t = cb_from_int(1)
    prev_mag = B.cb_abs_hi(t)
    for k in range(1, L + 1):
        # t_k = t_{k-1} * (k - z) / N  (note (1-z)_k / (-N)^k with signs folded)
        t = B.c_mul(t, B.c_sub(cb_from_int(k), z, wp), wp)
        t = B.c_div_i(t, -N, wp)
        mag = B.cb_abs_hi(t)
        if not mag <= prev_mag:
            raise HyperUnavailable("asymptotic terms not decreasing at this L")
        prev_mag = mag
        if k < L:
            s = B.c_add(s, t, wp)
    s = B.c_add_error(s, B.cb_abs_hi(t))  # first omitted term
    pref = _upper_prefactor(z, N, wp)
    return B.c_add(B.c_mul(pref, s, wp), cb_from_int(0), prec)


def _upper_prefactor(z, N, wp):
    logn = B.r_log(rb_from_int(N, wp), wp)
    e = ComplexBall(B.r_sub(B.r_mul(B.r_sub(z.re, rb_from_int(1), wp), logn, wp),
                            rb_from_int(N), wp),
                    B.r_mul(z.im, logn, wp))
    return B.c_exp(e, wp)


def gamma_hyper(z, p, plan=None, alpha=None):
    """Gamma(z) = gamma(z,N) + Gamma(z,N) after reduction into Re in (0, 1]."""
    if not z.is_finite():
        return cb_indeterminate()
    from . import rising as RS
    xm = _f(z.re.mid)
    s = math.ceil(xm) - 1
    wp = p + 16 + max(0, s).bit_length() * 2
    z_red = B.c_add_i(z, -s, wp)
    if not B.rb_lower(z_red.re) > 0:
        return cb_indeterminate()
    if plan is None:
        plan = plan_hyper(z_red, p, alpha)
    lo = lower_gamma_series(z_red, plan.N_split, plan.K, wp)
    hi = upper_gamma_asymp(z_red, plan.N_split, plan.L, wp)
    g = B.c_add(lo, hi, wp)
    if s > 0:
        g = B.c_mul(g, RS.rising_rs(z_red, s, wp), wp)
    elif s < 0:
        g = B.c_div(g, RS.rising_rs(z, -s, wp), wp)
    return B.c_add(g, cb_from_int(0), p)


# ---------------------------------------------------------------------------
# Exact rational path: binary splitting
# ---------------------------------------------------------------------------

def _bs_sum(a, q, N, lo, hi):
    # matrix-product binary splitting over term ratios r_j = N q / (a + q j),
    # j in [lo, hi); returns (P, Q, T) with T/Q = sum of partial products
    if hi - lo == 1:
        pj = N * q
        qj = a + q * lo
        return (pj, qj, pj)
    mid = (lo + hi) // 2
    P1, Q1, T1 = _bs_sum(a, q, N, lo, mid)
    P2, Q2, T2 = _bs_sum(a, q, N, mid, hi)
    return (P1 * P2, Q1 * Q2, T1 * Q2 + P1 * T2)


def gamma_rational_bs(z, p):
    """Gamma(a/q) for exact rational a/q > 0 by binary splitting; RealBall."""
    z = mpq(z)
    if z <= 0:
        raise ValueError("gamma_rational_bs needs z > 0; reflect first")
    if z.denominator == 1:
        return RealBall(B._wctx(max(2, int(gmpy2.fac(int(z) - 1)).bit_length() + 2 if z > 1 else 2))
                        .plus(mpfr(gmpy2.fac(int(z) - 1))), B._MPFR_ZERO)
    s = math.ceil(z) - 1
    z_red = z - s                      # in (0, 1)
    shift = RS_rising_exact(z_red, s)  # (z_red)_s as exact mpq
    a, q = int(z_red.numerator), int(z_red.denominator)
    wp = p + 24
    N = math.ceil((p + 12) * math.log(2))
    xr = float(z_red)
    target = -(p + 10.0) - (xr * math.log2(N) - N / math.log(2) - math.log2(xr))
    K = max(8, int(1.1 * N))
    while _log2_lower_tail(N, K, xr) > target:
        K += max(1, K // 64)
    while K > 8 and _log2_lower_tail(N, K - 1, xr) <= target:
        K -= 1
    P, Q, T = _bs_sum(mpz(a), mpz(q), mpz(N), 1, K)
    ssum = B.r_add(rb_from_int(1),
                   B.r_div(rb_from_int(T, wp), rb_from_int(Q, wp), wp), wp)
    # geometric tail from the exact last partial product P/Q
    up = B._rup()
    tK = up.div(B._mag_int_up(P), B._mag_int_dn(Q))
    rho_up = up.div(up.mul(mpfr(N), B._mag_int_up(q)),
                    B._mag_int_dn(a + q * K))
    if not rho_up < 1:
        raise HyperUnavailable("rational tail ratio >= 1")
    ssum = B.r_add_error(ssum, up.div(up.mul(tK, rho_up), up.sub(mpfr(1), rho_up)))
    # prefactor N^z e^-N / z
    logn = B.r_log(rb_from_int(N, wp), wp)
    expo = B.r_sub(B.r_mul(rb_from_q(z_red, wp), logn, wp), rb_from_int(N), wp)
    pref = B.r_div(B.r_exp(expo, wp), rb_from_q(z_red, wp), wp)
    g = B.r_mul(pref, ssum, wp)
    # upper part bound with L = 0: |Gamma(z,N)| <= e^-N N^(z-1) <= e^-N
    g = B.r_add_error(g, up.exp(mpfr(-N)))
    if s:
        g = B.r_mul(g, rb_from_q(shift, wp), wp)
    return B.r_add(g, rb_zero(), p)


def RS_rising_exact(z, n):
    from .rising import rising_bs
    return rising_bs(z, n)
