"""
The Stirling-series engine.

Evaluates Gamma, 1/Gamma, log Gamma and psi (plus jets for derivatives)
through the logarithmic Stirling expansion

    log Gamma(z) = (z - 1/2) log z - z + log(2 pi)/2
                   + sum_{n=1}^{N-1} B_{2n} / (2n(2n-1) z^{2n-1}) + R_N(z).

Pipeline per evaluation: pick (reflect, shift r, term count N) with machine
arithmetic from rigorous remainder bounds; evaluate the main sum either by
Horner's rule with per-term precision or by the re-expanded two-part sum
(leading Bernoulli part by rectangular splitting, trailing part as purely
hypergeometric subsums, cutting the Bernoulli requirement from N to M);
add the remainder bound to the radius; recombine through rising factorials
and, when reflecting, the branch-correct log-sine machinery.

Remainder bounds: first-omitted-term on the positive real axis, the
Stieltjes phi-factor bound off the cut, Brent's bound in the right
half-plane, Hare's bound (in |Im z|) elsewhere; the minimum applicable
bound is used.
"""

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import balls as B
from . import bernoulli as BN
from . import reflection as R
from . import rising as RS
from . import series as S
from .balls import (ComplexBall, RealBall, cb_from_int, cb_indeterminate,
                    rb_from_int, rb_from_q, rb_indeterminate, rb_zero)
from .kinds import FunctionKind

_INF = mpfr('inf')

WIDE_RADIUS = 2.0 ** -16      # midpoint-evaluation threshold
DEFAULT_BETA = 0.2            # shift tuning; term-count optimum is 0.155665
BETA_MIN = math.log(2) / (2 * math.pi)


class StirlingUnavailable(Exception):
    """Target accuracy cannot be certified for this input."""


@dataclass(frozen=True)
class StirlingPlan:
    reflect: bool
    r: int
    N: int
    err: float          # log2 of the estimated remainder bound
    p_sum: int          # precision for the main sum
    p_outer: int        # precision for the leading terms


@dataclass(frozen=True)
class SumSchedule:
    K: int
    M_seq: tuple
    M: int
    m1: int
    m2: int
    eps: object         # rigorous magnitude bound (mpfr, rounded up)
    N: int
    p: int
    b: tuple            # nonincreasing float bounds for log2 |T_n(z)|


def _f(x):
    try:
        return float(x)
    except (OverflowError, ValueError):
        return math.inf


# ---------------------------------------------------------------------------
# Remainder bounds
# ---------------------------------------------------------------------------

def phi(z, prec=64):
    """1/cos(arg(z)/2) as a real ball, trig-free: sqrt(1 + u^2)."""
    if not z.is_finite():
        return rb_indeterminate()
    x, y = z.re, z.im
    azsq = B.r_add(B.r_mul(x, x, prec + 8), B.r_mul(y, y, prec + 8), prec + 8)
    az = B.r_sqrt(azsq, prec)
    if _f(x.mid) >= 0:
        u = B.r_div(y, B.r_add(az, x, prec), prec)
    else:
        u = B.r_div(B.r_sub(az, x, prec), y, prec)
    if not u.is_finite():
        return rb_indeterminate()
    one = rb_from_int(1)
    return B.r_sqrt(B.r_add(one, B.r_mul(u, u, prec), prec), prec)


def _rising_log2(a, m):
    return sum(math.log2(a + j) for j in range(m))


def _log2_term(N, m, log2t):
    # log2 |T_N^(m)| at an argument of magnitude 2^log2t
    v = BN.bern_mag_bound(N) - math.log2(2 * N) - math.log2(2 * N - 1)
    v += _rising_log2(2 * N - 1, m)
    v -= (2 * N + m - 1) * log2t
    return v


def log2_remainder_estimate(x, y, N, m=0):
    """Machine-float log2 of the best applicable remainder bound."""
    az = math.hypot(x, y)
    if az == 0 or not math.isfinite(az):
        return math.inf if az == 0 else -math.inf
    l2az = math.log2(az)
    if y == 0 and x > 0:
        return _log2_term(N, m, l2az)
    best = math.inf
    if x >= 0:
        u = y / (az + x)
    elif y != 0:
        u = (az - x) / y
    else:
        u = math.inf
    if math.isfinite(u):
        lphi = 0.5 * math.log2(1.0 + u * u)
        best = min(best, (2 * N + m) * lphi + _log2_term(N, m, l2az))
    if x >= 0:
        best = min(best, math.log2(1.0 + math.sqrt(math.pi * (N + 0.5 * m)))
                   + _log2_term(N, m, l2az))
    if y != 0:
        best = min(best, math.log2(4.0 * math.sqrt(math.pi * (N + 0.5 * m)))
                   + _log2_term(N, m, math.log2(abs(y))))
    return best


def remainder_bound(z, N, m=0):
    """Rigorous magnitude bound for |R_N^(m)(z)| (+inf when none applies)."""
    if not z.is_finite():
        return _INF
    up, dn = B._rup(), B._rdn()
    az_lo = B.cb_abs_lo(z)
    if not az_lo > 0:
        return _INF

    cache = BN.default_cache()
    if N <= 1024:
        cache.ensure(N + 1)
    use_exact = N < len(cache)

    def tmag(tlo):
        if use_exact:
            num = B._mag_q_up(cache.fraction(N))
        else:
            num = up.exp2(mpfr(BN.bern_mag_bound(N) + 0.01, precision=53))
        for j in range(m):
            num = up.mul(num, B._mag_int_up(2 * N - 1 + j))
        den = dn.mul(dn.pow(tlo, 2 * N + m - 1),
                     B._mag_int_dn(2 * N * (2 * N - 1)))
        return up.div(num, den)

    base = tmag(az_lo)
    cands = []
    x_lo = B.rb_lower(z.re)
    if z.is_real() and x_lo > 0:
        cands.append(base)  # 0 < C_{N,m} < 1 on the positive real axis
    ph_hi = B.rb_upper(phi(z, 48))
    if gmpy2.is_finite(ph_hi):
        cands.append(up.mul(up.pow(ph_hi, 2 * N + m), base))
    sq = up.sqrt(up.mul(up.const_pi(), up.div(B._mag_int_up(2 * N + m), mpfr(2))))
    if x_lo >= 0:
        cands.append(up.mul(up.add(mpfr(1), sq), base))
    y_lo = B.rb_abs_lo(z.im)
    if y_lo > 0:
        cands.append(up.mul(up.mul(mpfr(4), sq), tmag(y_lo)))
    if not cands:
        return _INF
    return min(cands)


def hurwitz_upper(s, a):
    """Upper bound for the Hurwitz zeta zeta(s, a): a^-s + ((s-1) a^(s-1))^-1."""
    if not (s > 1 and a > 0):
        raise ValueError("hurwitz_upper needs s > 1, a > 0")
    up, dn = B._rup(), B._rdn()
    a_dn = dn.plus(mpfr(a, precision=53))
    s_dn = dn.plus(mpfr(s, precision=53))
    t1 = up.div(mpfr(1), dn.pow(a_dn, s_dn))
    t2 = up.div(mpfr(1), dn.mul(dn.sub(s_dn, mpfr(1)), dn.pow(a_dn, dn.sub(s_dn, mpfr(1)))))
    return up.add(t1, t2)


# ---------------------------------------------------------------------------
# Parameter selection (Part 1: machine precision)
# ---------------------------------------------------------------------------

def select_params(z, p, fn=FunctionKind.GAMMA, beta=None, allow_reflect=True):
    """Choose (reflect, shift r, term count N) and working precisions."""
    if beta is None:
        beta = DEFAULT_BETA
    if beta <= BETA_MIN:
        raise ValueError(f"beta must exceed log(2)/(2 pi) ~ {BETA_MIN:.6f}")
    p = int(p)
    m = 1 if fn == FunctionKind.DIGAMMA else 0
    x, y = _f(z.re.mid), _f(z.im.mid)
    reflect = allow_reflect and (x < -5) and (abs(y) < beta * p)
    x1, y1 = (1.0 - x, -y) if reflect else (x, y)
    r = 0
    if abs(y) < beta * p:
        while (x1 + r < 0) or math.hypot(x1 + r, y1) < beta * p:
            r += 1
    target = -(p + 2.0)
    restarts = 0
    best_overall = math.inf
    while True:
        N = 1
        prev = math.inf
        best, best_n = math.inf, 1
        ok = False
        while N < 10**7:
            bnd = log2_remainder_estimate(x1 + r, y1, N, m)
            if bnd < best:
                best, best_n = bnd, N
            if bnd <= target:
                ok = True
                break
            if N > 2 and bnd >= prev:
                break  # bound stopped decreasing
            prev = bnd
            N += 1
        if ok or restarts >= 48:
            break
        restarts += 1
        r = max(2 * r, 4)
        best_overall = min(best_overall, best)
    if not ok:
        N, bnd = best_n, best
    pp = p + 5
    Yv = math.hypot(x1, y1) + r
    Xv = r if fn == FunctionKind.LGAMMA else Yv
    extra = int(math.floor(math.log2(max(1.0, Xv * math.log(max(1.0, Yv))))))
    return StirlingPlan(reflect=reflect, r=r, N=N, err=bnd,
                        p_sum=pp, p_outer=pp + extra)


# ---------------------------------------------------------------------------
# Main sum (Horner baseline and the re-expanded fast sum)
# ---------------------------------------------------------------------------

def _term_log2_bounds(z, N):
    """Nonincreasing upper bounds b_n >= log2 |T_n(z)|, n = 1..N (floats)."""
    az_lo = _f(B.cb_abs_lo(z)) * (1 - 1e-12)
    if not az_lo > 0:
        raise StirlingUnavailable("argument ball touches the origin")
    l2 = math.log2(az_lo)
    b = [0.0] * (N + 1)
    for n in range(1, N + 1):
        b[n] = (BN.bern_mag_bound(n) - math.log2(2 * n) - math.log2(2 * n - 1)
                - (2 * n - 1) * l2 + 0.05)
    for n in range(N - 1, 0, -1):
        b[n] = max(b[n], b[n + 1])
    return b


def _pn(prec, bn):
    return max(12, min(prec + 8, prec + int(math.ceil(bn)) + 16))


def main_sum_horner(z, N, prec, cache=None, b=None):
    """sum_{n=1}^{N-1} T_n(z) by Horner in 1/z^2, per-term precision."""
    cache = cache or BN.default_cache()
    if N <= 1:
        return cb_from_int(0)
    cache.ensure(N)
    if b is None:
        b = _term_log2_bounds(z, N)
    w = B.c_inv(B.c_sqr(z, prec + 8), prec + 8)
    s = cb_from_int(0)
    for n in range(N - 1, 0, -1):
        pn = _pn(prec, b[n])
        s = B.c_mul(s, w, pn)
        coeff = cache.fraction(n) / (2 * n * (2 * n - 1))
        s = ComplexBall(B.r_add(s.re, rb_from_q(coeff, pn), pn), s.im)
    return B.c_div(s, z, prec)


def schedule_sum(z, N, p):
    """Pick (K, {M_k}, M, m1, m2, eps) for the re-expanded main sum."""
    if N <= 2:
        return SumSchedule(K=1, M_seq=(N,), M=N, m1=1, m2=1,
                           eps=B._MPFR_ZERO, N=N, p=p, b=tuple(_term_log2_bounds(z, max(N, 1))))
    b = _term_log2_bounds(z, N)
    K = 2 if p <= 1024 else min(4 + int(0.1 * math.sqrt(max(p - 4096, 0))), 100)
    M_seq = [N]
    for k in range(2, K + 1):
        Mk = N
        while Mk > 2 and (b[Mk - 1] - 2 * (Mk - 1) * math.log2(k)
                          + math.log2(N - (Mk - 1)) < -p):
            Mk -= 1
        M_seq.append(Mk)
    for i in range(1, len(M_seq)):
        M_seq[i] = min(M_seq[i], M_seq[i - 1])
    while len(M_seq) >= 2 and M_seq[-1] == M_seq[-2]:
        M_seq.pop()
    K = len(M_seq)
    M = M_seq[-1]
    up = B._rup()
    eps = up.mul(up.mul(hurwitz_upper(2 * M, K), B._mag_int_up(N - M)),
                 up.exp2(mpfr(b[M], precision=53))) if N > M else B._MPFR_ZERO
    for k in range(1, K):
        Mk = M_seq[k - 1]
        if N - Mk <= 0:
            continue
        t = up.mul(B._mag_int_up(N - Mk), up.exp2(mpfr(b[Mk], precision=53)))
        t = up.div(t, B._mag_int_dn(mpz(k) ** (2 * Mk)))
        eps = up.add(eps, t)
    m1 = max(1, int(gmpy2.isqrt(max(N - M, 1))))
    m2 = max(1, int(gmpy2.isqrt(M)))
    return SumSchedule(K=K, M_seq=tuple(M_seq), M=M, m1=m1, m2=m2,
                       eps=eps, N=N, p=p, b=tuple(b))


def _fast_real_trailing(z, sched, prec):
    """Fused scalar loop for the trailing sum when z is real: raw (mid, rad)
    pairs, fma steps, and per-term precision lowered by each subsum's k^-2M
    weight.  Returns a RealBall."""
    N, M, K, m1 = sched.N, sched.M, sched.K, sched.m1
    b = sched.b
    up = B._rup()
    p2 = _pn(prec, b[M])
    u = B.c_neg(B.c_inv(B.c_sqr(_scale_2pi(z, p2 + 8), p2 + 8), p2)).re
    u_pow = [rb_from_int(1)]
    for _ in range(m1):
        u_pow.append(B.r_mul(u_pow[-1], u, p2))
    pn_base = [0] * N
    cints = [0] * N
    cmags = [None] * N
    for n in range(M, N):
        pn_base[n] = prec + int(math.ceil(b[n])) + 16
        cints[n] = 2 * n * (2 * n - 1)
        cmags[n] = B._mag_int_up(cints[n])
    acc = rb_from_int(0)
    k_odd = 1
    while k_odd < K:
        v_base = None
        k = k_odd
        doublings = 0
        while k < K:
            Ik = _mk_for(sched, k) - M
            if Ik > 0:
                if v_base is None:
                    v_base = [u_pow[j] if k_odd == 1 else
                              B.r_div_i(u_pow[j], mpz(k_odd) ** (2 * j), p2)
                              for j in range(m1 + 1)]
                if doublings == 0:
                    v = v_base
                else:
                    v = [B.r_mul_2exp(v_base[j], -2 * j * doublings)
                         for j in range(m1 + 1)]
                padj = 2 * M * int(math.log2(k)) if k > 1 else 0
                smid, srad = B._MPFR_ZERO, B._MPFR_ZERO
                for n in range(_mk_for(sched, k) - 1, M - 1, -1):
                    pn = pn_base[n] + padj
                    pn = 12 if pn < 12 else (p2 if pn > p2 else pn)
                    ctx = B._wctx(pn)
                    i = n - M
                    j = i % m1 if m1 else 0
                    vb = v[j]
                    ctx.clear_flags()
                    smid = ctx.fma(smid, cints[n], vb.mid)
                    srad = up.add(up.mul(srad, cmags[n]), vb.rad)
                    if ctx.inexact:
                        srad = up.add(srad, B._half_ulp(smid, pn))
                    if i != 0 and m1 and j == 0:
                        wb = v[m1]
                        ctx.clear_flags()
                        nmid = ctx.mul(smid, wb.mid)
                        srad = up.add(up.add(up.mul(up.abs(smid), wb.rad),
                                             up.mul(up.abs(wb.mid), srad)),
                                      up.mul(srad, wb.rad))
                        if ctx.inexact:
                            srad = up.add(srad, B._half_ulp(nmid, pn))
                        smid = nmid
                acc = B.r_add(acc, B.r_div_i(RealBall(smid, srad),
                                             mpz(k) ** (2 * M), p2), p2)
            k *= 2
            doublings += 1
        k_odd += 2
    acc = B.r_mul(acc, B.r_pow_int(u, M, p2), p2)
    acc = B.r_mul(acc, z.re, p2)
    return B.r_mul_i(acc, -2 * gmpy2.fac(2 * M - 2), p2)


def main_sum_fast(z, sched, prec, cache=None):
    """Re-expanded main sum: leading Bernoulli part (rectangular splitting in
    1/z^2) plus purely hypergeometric trailing subsums; only M Bernoulli
    numbers are needed instead of N."""
    cache = cache or BN.default_cache()
    N, M, K, m1, m2 = sched.N, sched.M, sched.K, sched.m1, sched.m2
    b = sched.b
    if N <= 1:
        return cb_from_int(0)
    is_real = z.is_real()
    if is_real and M < N:
        s3r = _fast_real_trailing(z, sched, prec)
        if gmpy2.is_finite(sched.eps) and not gmpy2.is_zero(sched.eps):
            s3r = B.r_add_error(s3r, sched.eps)
        s2 = _leading_sum(z, sched, prec, cache)
        return B.c_add(s2, ComplexBall(s3r, B.rb_zero()), prec)

    # Part 2: trailing sum, precision p' = p + b_M
    s3 = cb_from_int(0)
    if M < N:
        p2 = _pn(prec, b[M])
        u = B.c_neg(B.c_inv(B.c_sqr(_scale_2pi(z, p2 + 8), p2 + 8), p2))
        u_pow = [cb_from_int(1)]
        for _ in range(m1):
            u_pow.append(B.c_mul(u_pow[-1], u, p2))
        k_odd = 1
        while k_odd < K:
            v_base = None
            k = k_odd
            doublings = 0
            while k < K:
                Ik = _mk_for(sched, k) - M
                if Ik > 0:
                    jmax = min(Ik - 1, m1)
                    if v_base is None:
                        v_base = [u_pow[j] if k_odd == 1 else
                                  B.c_div_i(u_pow[j], mpz(k_odd) ** (2 * j), p2)
                                  for j in range(m1 + 1)]
                    if doublings == 0:
                        v = v_base
                    else:
                        v = [B.c_mul_2exp(v_base[j], -2 * j * doublings)
                             for j in range(m1 + 1)]
                    s4 = cb_from_int(0)
                    for n in range(_mk_for(sched, k) - 1, M - 1, -1):
                        pn = _pn(prec, b[n])
                        i = n - M
                        s4 = B.c_add(B.c_mul_i(s4, 2 * n * (2 * n - 1), pn),
                                     v[i % m1 if m1 else 0], pn)
                        if i != 0 and m1 and i % m1 == 0:
                            s4 = B.c_mul(s4, v[m1], pn)
                    s3 = B.c_add(s3, B.c_div_i(s4, mpz(k) ** (2 * M), p2), p2)
                k *= 2
                doublings += 1
            k_odd += 2
        s3 = B.c_mul(s3, B.c_pow_int(u, M, p2), p2)
        s3 = B.c_mul(s3, z, p2)
        s3 = B.c_mul_i(s3, -2 * gmpy2.fac(2 * M - 2), p2)
    if gmpy2.is_finite(sched.eps) and not gmpy2.is_zero(sched.eps):
        s3 = B.c_add_error(s3, sched.eps)
    return B.c_add(_leading_sum(z, sched, prec, cache), s3, prec)


def _leading_sum(z, sched, prec, cache):
    # Part 3: leading sum at precision p, rectangular splitting in w = 1/z^2
    M, m2, b = sched.M, sched.m2, sched.b
    cache.ensure(M)
    w = B.c_inv(B.c_sqr(z, prec + 8), prec + 8)
    w_pow = [cb_from_int(1)]
    for _ in range(m2):
        w_pow.append(B.c_mul(w_pow[-1], w, prec))
    s2 = cb_from_int(0)
    for n in range(M - 1, 0, -1):
        pn = _pn(prec, b[n])
        frac = cache.fraction(n)
        t = B.c_mul_i(w_pow[(n - 1) % m2], frac.numerator, pn)
        t = B.c_div_i(t, frac.denominator * (2 * n) * (2 * n - 1), pn)
        s2 = B.c_add(s2, t, pn)
        if n - 1 != 0 and (n - 1) % m2 == 0:
            s2 = B.c_mul(s2, w_pow[m2], pn)
    return B.c_div(s2, z, prec)


def _mk_for(sched, k):
    return sched.M_seq[k - 1] if k - 1 < len(sched.M_seq) else sched.M


def _scale_2pi(z, prec):
    pi = B.r_pi(prec)
    two_pi = B.r_mul_2exp(pi, 1)
    return ComplexBall(B.r_mul(z.re, two_pi, prec), B.r_mul(z.im, two_pi, prec))


# ---------------------------------------------------------------------------
# Full evaluation
# ---------------------------------------------------------------------------

def _contains_nonpos_int(z):
    if not z.is_finite():
        return True
    if not z.im.contains_zero():
        return False
    lo = mpq(z.re.mid) - mpq(z.re.rad)
    hi = mpq(z.re.mid) + mpq(z.re.rad)
    if hi > 0:
        hi = mpq(0)
    if lo > hi:
        return False
    return math.floor(hi) >= math.ceil(lo)


def _is_wide(z):
    return _f(z.re.rad) > WIDE_RADIUS or _f(z.im.rad) > WIDE_RADIUS


def _leading_terms(Z, prec):
    # (Z - 1/2) log Z - Z + log(2 pi)/2
    lg = B.c_log(Z, prec)
    half = rb_from_q(mpq(1, 2), prec)
    zmh = ComplexBall(B.r_sub(Z.re, half, prec), Z.im)
    t = B.c_mul(zmh, lg, prec)
    t = B.c_sub(t, Z, prec)
    l2pi = B.r_mul_2exp(B.r_log2pi(prec + 4), -1)
    return ComplexBall(B.r_add(t.re, l2pi, prec), t.im)


def _stirling_t(z, p, fn, beta, cache):
    """Plan and evaluate t ~ log Gamma(z'+r) (or the psi analogue)."""
    plan = select_params(z, p, fn, beta)
    zp = B.c_sub(cb_from_int(1), z, plan.p_outer) if plan.reflect else z
    Z = B.c_add_i(zp, plan.r, plan.p_outer)
    cache = cache or BN.default_cache()
    try:
        if fn == FunctionKind.DIGAMMA:
            t = _digamma_series(Z, plan, cache)
        else:
            sched = schedule_sum(Z, plan.N, plan.p_sum)
            s = main_sum_fast(Z, sched, plan.p_sum, cache)
            t = B.c_add(_leading_terms(Z, plan.p_outer), s, plan.p_outer)
            eps = remainder_bound(Z, plan.N, 0)
            if not gmpy2.is_finite(eps):
                return None, plan, zp
            t = _add_err(t, eps)
    except StirlingUnavailable:
        return None, plan, zp
    return t, plan, zp


def _add_err(t, eps):
    if t.is_real():
        return ComplexBall(B.r_add_error(t.re, eps), t.im)
    return B.c_add_error(t, eps)


def _digamma_series(Z, plan, cache):
    # psi(Z) = log Z - 1/(2Z) - sum B_{2n}/(2n Z^{2n}),  m = 1 remainder
    p = plan.p_outer
    N = plan.N
    cache.ensure(max(N, 2))
    lg = B.c_log(Z, p)
    inv2z = B.c_inv(B.c_mul_2exp(Z, 1), p)
    t = B.c_sub(lg, inv2z, p)
    if N > 1:
        az_lo = _f(B.cb_abs_lo(Z)) * (1 - 1e-12)
        l2 = math.log2(az_lo)
        w = B.c_inv(B.c_sqr(Z, p + 8), p + 8)
        s = cb_from_int(0)
        for n in range(N - 1, 0, -1):
            bn = BN.bern_mag_bound(n) - math.log2(2 * n) - 2 * n * l2 + 0.05
            pn = _pn(plan.p_sum, bn)
            s = B.c_mul(s, w, pn)
            coeff = cache.fraction(n) / (2 * n)
            s = ComplexBall(B.r_add(s.re, rb_from_q(coeff, pn), pn), s.im)
        s = B.c_mul(s, w, plan.p_sum)
        t = B.c_sub(t, s, p)
    eps = remainder_bound(Z, N, 1)
    if not gmpy2.is_finite(eps):
        return None
    return _add_err(t, eps)


def _log_rising_branch(zp, r, prec):
    """log (zp)_r with correct branches, choosing the cheapest valid path."""
    if r == 0:
        return cb_from_int(0)
    if zp.is_real() and B.rb_lower(zp.re) > 0:
        return RS.log_rising_real_positive(zp, r, prec)
    if zp.is_real():
        # real nonpositive: principal logs, continuity from above
        acc = cb_from_int(0)
        for k in range(r):
            acc = B.c_add(acc, B.c_log(B.c_add_i(zp, k, prec), prec), prec)
        return acc
    try:
        return RS.log_rising(zp, r, prec)
    except RS.RisingEnvelopeError:
        return RS.log_rising_termwise(zp, r, prec)


def _recip_sum(zp, r, prec):
    # sum_{k<r} 1/(zp+k) via the derivative jet of the rising factorial
    if r == 0:
        return cb_from_int(0)
    jet = RS.rising_jet(zp, r, 2, prec)
    return B.c_div(jet[1], jet[0], prec)


def lgamma_stirling(z, p, fn=FunctionKind.LGAMMA, beta=None, cache=None):
    """Full Stirling pipeline for Gamma, 1/Gamma, log Gamma or psi."""
    p = int(p)
    if not z.is_finite():
        return cb_indeterminate()
    if fn != FunctionKind.RGAMMA and _contains_nonpos_int(z):
        return cb_indeterminate()
    if _is_wide(z) and fn != FunctionKind.DIGAMMA:
        return _wide_eval(z, p, fn, beta, cache)
    if fn == FunctionKind.LGAMMA:
        esc = _near_one_two(z, p)
        if esc is not None:
            kind, e = esc
            if kind == 'taylor':
                return _lgamma_near_taylor(z, p, cache)
            p = p + e
    return _eval_core(z, p, fn, beta, cache)


def digamma_stirling(z, p, beta=None, cache=None):
    return lgamma_stirling(z, p, FunctionKind.DIGAMMA, beta, cache)


def _near_one_two(z, p):
    if not (z.im.contains_zero() or abs(_f(z.im.mid)) < 0.25):
        return None
    d1 = math.hypot(_f(z.re.mid) - 1.0, _f(z.im.mid))
    d2 = math.hypot(_f(z.re.mid) - 2.0, _f(z.im.mid))
    d = min(d1, d2)
    if d == 0 or d >= 0.5:
        return None
    e = int(math.floor(max(0.0, -math.log2(d))))
    if e <= 0:
        return None
    if e > p / 2:
        return ('taylor', e)
    return ('escalate', e)


def _lgamma_near_taylor(z, p, cache):
    # log Gamma(z0 + u) by a short Taylor series from the jet at z0 in {1, 2}
    d1 = math.hypot(_f(z.re.mid) - 1.0, _f(z.im.mid))
    d2 = math.hypot(_f(z.re.mid) - 2.0, _f(z.im.mid))
    z0 = 1 if d1 <= d2 else 2
    u = B.c_add_i(z, -z0, p + 16)
    umag = B.cb_abs_hi(u)
    if not umag < 0.5:
        return _eval_core(z, p, FunctionKind.LGAMMA, None, cache)
    d = min(d1, d2)
    order = max(3, int(math.ceil((p + 8) / max(1.0, -math.log2(max(d, 1e-300))))) + 2)
    jet = lgamma_jet_stirling(cb_from_int(z0), p + 16, order, cache=cache)
    acc = cb_from_int(0)
    for k in range(order - 1, 0, -1):
        acc = B.c_mul(acc, u, p + 16)
        acc = B.c_add(acc, jet[k], p + 16)
    acc = B.c_mul(acc, u, p + 16)
    acc = B.c_add(acc, jet[0], p + 16)  # log Gamma(z0) = 0, but keep its radius
    # |c_k| <= 2 for the expansions at 1 and 2, so the tail is geometric
    up = B._rup()
    tail = up.div(up.mul(mpfr(2), up.pow(umag, order)),
                  up.sub(mpfr(1), umag))
    return B.c_add_error(acc, tail)


def _eval_core(z, p, fn, beta, cache):
    t, plan, zp = _stirling_t(z, p, fn, beta, cache)
    if t is None or not t.is_finite():
        return cb_indeterminate()
    po = plan.p_outer
    r = plan.r
    if fn == FunctionKind.DIGAMMA:
        val = B.c_sub(t, _recip_sum(zp, r, po), po)
        if plan.reflect:
            return R.reflect_eval(fn, z, val, p)
        return val
    if plan.reflect:
        rf = RS.rising_rs(zp, r, po)
        if fn == FunctionKind.GAMMA:
            pi = ComplexBall(B.r_pi(po), rb_zero())
            out = B.c_mul(B.c_mul(pi, B.c_exp(B.c_neg(t), po), po), rf, po)
            return B.c_mul(out, R.safe_trig('inv_sin_pi', z, po), p)
        if fn == FunctionKind.RGAMMA:
            out = B.c_mul(B.c_exp(t, po), B.c_sinpi(z, po), po)
            out = B.c_div(out, rf, po)
            return B.c_div(out, ComplexBall(B.r_pi(po), rb_zero()), p)
        # log Gamma: log (z')_r - t - log sin(pi z) + log(pi)
        lr = _log_rising_branch(zp, r, po)
        out = B.c_sub(lr, t, po)
        out = B.c_sub(out, R.log_sin_pi(z, po), po)
        logpi = B.c_log(ComplexBall(B.r_pi(po + 8), rb_zero()), po)
        return B.c_add(out, logpi, p)
    if fn == FunctionKind.GAMMA:
        num = B.c_exp(t, po)
        if r == 0:
            return B.c_add(num, cb_from_int(0), p)
        return B.c_div(num, RS.rising_rs(zp, r, po), p)
    if fn == FunctionKind.RGAMMA:
        out = B.c_exp(B.c_neg(t), po)
        if r:
            out = B.c_mul(out, RS.rising_rs(zp, r, po), po)
        return B.c_add(out, cb_from_int(0), p)
    lr = _log_rising_branch(zp, r, po)
    return B.c_sub(t, lr, p)


def _wide_eval(z, p, fn, beta, cache):
    mid = ComplexBall(RealBall(z.re.mid), RealBall(z.im.mid))
    base = lgamma_stirling(mid, p, fn, beta, cache)
    if not base.is_finite():
        return cb_indeterminate()
    psi = _eval_core(z, 53, FunctionKind.DIGAMMA, beta, cache)
    if fn == FunctionKind.LGAMMA:
        der = psi
    elif fn == FunctionKind.GAMMA:
        der = B.c_mul(_eval_core(z, 53, FunctionKind.GAMMA, beta, cache), psi, 53)
    else:
        der = B.c_mul(_eval_core(z, 53, FunctionKind.RGAMMA, beta, cache), psi, 53)
    if not der.is_finite():
        return _eval_core(z, p, fn, beta, cache)
    up = B._rup()
    prop = up.mul(B.cb_abs_hi(der), up.hypot(z.re.rad, z.im.rad))
    return B.c_add_error(base, prop)


# ---------------------------------------------------------------------------
# Jets: log Gamma and derivatives as a power series
# ---------------------------------------------------------------------------

def lgamma_jet_stirling(z, p, order, beta=None, cache=None):
    """Jet of log Gamma at z to `order` coefficients (no reflection path)."""
    order = int(order)
    if order < 1:
        raise ValueError("jet order must be >= 1")
    if order == 1:
        return S.SeriesJet([lgamma_stirling(z, p, FunctionKind.LGAMMA, beta, cache)])
    if not z.is_finite() or _contains_nonpos_int(z):
        return S.jet_indeterminate(order)
    cache = cache or BN.default_cache()
    plan = select_params(z, p + 6, FunctionKind.LGAMMA, beta, allow_reflect=False)
    N, r = plan.N, plan.r
    # make sure the bound still holds for the highest derivative order
    x1, y1 = _f(z.re.mid) + r, _f(z.im.mid)
    while (log2_remainder_estimate(x1, y1, N, order - 1)
           - math.lgamma(order) / math.log(2) > -(p + 6)) and N < 10**6:
        N += max(1, N // 16)
    po = plan.p_outer
    Z = B.c_add_i(z, r, po)
    cache.ensure(max(N, 2))
    zinv = B.c_inv(Z, po)
    zinv2 = B.c_mul(zinv, zinv, po)
    coeffs = [cb_from_int(0) for _ in range(order)]
    zpow = None
    for n in range(1, N):
        zpow = zinv if n == 1 else B.c_mul(zpow, zinv2, po)
        c = cache.fraction(n) / (2 * n * (2 * n - 1))
        term = B.c_mul_i(zpow, c.numerator, po)
        term = B.c_div_i(term, c.denominator, po)
        coeffs[0] = B.c_add(coeffs[0], term, po)
        d = term
        for mm in range(1, order):
            d = B.c_mul(d, zinv, po)
            d = B.c_mul_i(d, -(2 * n - 2 + mm), po)
            d = B.c_div_i(d, mm, po)
            coeffs[mm] = B.c_add(coeffs[mm], d, po)
    # leading terms (Z - 1/2 + x) log(Z + x) - (Z + x) + log(2 pi)/2 as a jet
    loga = [B.c_log(Z, po)]
    t = zinv
    for j in range(1, order):
        cj = B.c_div_i(t, j if j % 2 else -j, po)
        loga.append(cj)
        t = B.c_mul(t, zinv, po)
    half = rb_from_q(mpq(1, 2), po)
    A = ComplexBall(B.r_sub(Z.re, half, po), Z.im)
    lead = []
    for j in range(order):
        v = B.c_mul(A, loga[j], po)
        if j >= 1:
            v = B.c_add(v, loga[j - 1], po)
        lead.append(v)
    lead[0] = B.c_sub(lead[0], Z, po)
    l2pi = B.r_mul_2exp(B.r_log2pi(po + 4), -1)
    lead[0] = ComplexBall(B.r_add(lead[0].re, l2pi, po), lead[0].im)
    if order >= 2:
        lead[1] = B.c_sub(lead[1], cb_from_int(1), po)
    total = [B.c_add(lead[j], coeffs[j], po) for j in range(order)]
    # remainder bound per derivative order
    up = B._rup()
    for mm in range(order):
        em = remainder_bound(Z, N, mm)
        if not gmpy2.is_finite(em):
            return S.jet_indeterminate(order)
        em = up.div(em, B._mag_int_dn(gmpy2.fac(mm)))
        total[mm] = B.c_add_error(total[mm], em)
    jet = S.SeriesJet(total)
    if r:
        jet = S.jet_sub(jet, _log_rising_jet(z, r, order, po), po)
    return jet


def _log_rising_jet(z, r, order, prec):
    """Jet of log (z+x)_r: the constant term is the branch-correct log of the
    rising factorial; coefficient j >= 1 is (-1)^(j+1)/j sum_k (z+k)^-j,
    which is cancellation-free (unlike taking jet_log of the product)."""
    c0 = _log_rising_branch(z, r, prec)
    sums = [None] * order
    for k in range(r):
        inv = B.c_inv(B.c_add_i(z, k, prec), prec)
        t = inv
        for j in range(1, order):
            sums[j] = t if sums[j] is None else B.c_add(sums[j], t, prec)
            if j + 1 < order:
                t = B.c_mul(t, inv, prec)
    out = [c0]
    for j in range(1, order):
        cj = B.c_div_i(sums[j], j if j % 2 else -j, prec)
        out.append(cj)
    return S.SeriesJet(out)


def digamma_jet_stirling(z, p, order, beta=None, cache=None):
    """Jet of psi at z: derivative of the log Gamma jet."""
    lg = lgamma_jet_stirling(z, p, order + 1, beta, cache)
    return S.jet_derivative(lg, p)
