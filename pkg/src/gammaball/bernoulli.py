"""
Exact Bernoulli numbers via the zeta-function multi-evaluation algorithm.

The idea: approximate |B_n| = 2 (n!) zeta(n) / (2 pi)^n just accurately
enough, then snap to the exact fraction using the von Staudt-Clausen theorem
(B_n plus the sum of 1/q over primes q with (q-1) | n is an integer, and the
product of those q is the exact denominator).

Generating B_n, B_{n-2}, ..., B_2 in one sweep lets the Dirichlet series
terms be recycled: each step multiplies the fixed-point term for k by k^2,
a cheap exact integer operation.  Working precision and the series cutoff
are refreshed every 64 steps as n shrinks.

The floating-point part runs in ball arithmetic so the integer recovery is
certified at runtime: if the ball around B_n + a/b fails to bracket a unique
integer, we raise instead of returning a silently wrong fraction.

A process-wide cache grows in batches and serves the Stirling machinery.
"""

import math
import threading

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import balls as B
from .balls import RealBall, rb_from_int, r_add, r_div, r_div_i, \
    r_mul, r_mul_2exp, r_pi, r_pow_int, pow2

LOG2_2PIE = math.log2(2 * math.pi * math.e)

# log2 |B_{2n}| upper bounds for n = 1..32 (2n <= 64), verified against the
# exact fractions; beyond this the asymptotic formula is a rigorous bound.
_MAG_TABLE = (
    -2.5849625, -4.906890595, -5.392317422, -4.906890595,
    -3.722466024, -1.982143335, 0.222392422, 2.826224446,
    5.78060349, 9.047462708, 12.596218458, 16.401750398,
    20.443053983, 24.702304132, 29.16418346, 33.81538751,
    38.644252211, 43.640467971, 48.794856591, 54.099194646,
    59.546071814, 65.128775929, 70.841198722, 76.677757816,
    82.63333159, 88.703204392, 94.883020089, 101.168742466,
    107.556621216, 114.043162602, 120.625103991, 127.299391656,
)


class BernoulliCertificationError(Exception):
    """The ball around B_n + a/b did not bracket a unique integer."""


def bern_mag_bound(n):
    """Rigorous upper bound on log2 |B_{2n}|, as a machine float."""
    if n < 1:
        raise ValueError("bern_mag_bound needs n >= 1")
    if n <= 32:
        return _MAG_TABLE[n - 1]
    m = 2 * n
    return (m + 1) * math.log2(m) - m * LOG2_2PIE


def _tail_log2(n, r):
    # log2 of (r+2)^-n + ((n-1)(r+2))^(1-n), the Dirichlet truncation bound
    t1 = -n * math.log2(r + 2)
    t2 = (1 - n) * math.log2((n - 1) * (r + 2))
    hi, lo = max(t1, t2), min(t1, t2)
    return hi + math.log2(1.0 + 2.0 ** max(lo - hi, -60.0))


def dirichlet_params(n):
    """Working precision p and odd cutoff r for the sweep starting at n."""
    ln2n = math.log2(n)
    p = int(math.ceil((n + 1) * ln2n - n * LOG2_2PIE + 10 + 3 * ln2n))
    p = max(p, 10)
    r = int(math.ceil(n / (2 * math.pi * math.e)))
    if r % 2 == 0:
        r += 1
    while _tail_log2(n, r) >= -p:
        r += 2
    return p, r


def _divisor_primes(n):
    # primes q with (q-1) | n, i.e. q = d+1 over divisors d of n
    divs = [1]
    m = n
    f = 2
    fact = []
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            fact.append((f, e))
        f += 1 if f == 2 else 2
    if m > 1:
        fact.append((m, 1))
    for prime, e in fact:
        divs = [d * prime**k for d in divs for k in range(e + 1)]
    qs = sorted(d + 1 for d in divs if gmpy2.is_prime(d + 1))
    return qs


def _staudt_clausen_fraction(n):
    s = mpq(0)
    for q in _divisor_primes(n):
        s += mpq(1, q)
    return s


def _round_ball(b, p):
    m = mpfr(b.mid, precision=p)
    rad = b.rad
    if m != b.mid:
        rad = B._rup().add(rad, B._half_ulp(m, p))
    return RealBall(m, rad)


def bernoulli_batch(n_max):
    """Yield exact fractions B_{n_max}, B_{n_max-2}, ..., B_2.

    n_max must be even and >= 2.  Callers may stop the generator early;
    the precision/cutoff refresh happens every 64 steps.
    """
    n = int(n_max)
    if n < 2 or n % 2:
        raise ValueError("bernoulli_batch needs an even n_max >= 2")
    p, r = dirichlet_params(n)
    two_pi = r_mul_2exp(r_pi(p + 8), 1)
    u = r_pow_int(two_pi, 2, p)
    v = r_div(r_mul_2exp(rb_from_int(gmpy2.fac(n), p), 1), r_pow_int(two_pi, n, p), p)
    scale = mpz(1) << p
    t = {k: scale // mpz(k) ** n for k in range(3, r + 1, 2)}
    err = {k: mpz(1) for k in t}
    half = mpq(1, 2)
    while n >= 2:
        s = mpz(0)
        for k in range(r, 2, -2):
            tk = t.get(k)
            if tk is not None:
                s += tk
        m_s = mpfr(s, precision=p)
        up = B._rup()
        rad_s = up.add(B._half_ulp(m_s, p),
                       up.mul(mpfr(sum(err.values()) + 1, precision=30), pow2(-p)))
        rad_s = up.add(rad_s, up.exp2(mpfr(_tail_log2(n, r) + 0.01, precision=53)))
        s_ball = r_mul_2exp(RealBall(m_s, rad_s), -p)
        one_plus = r_add(rb_from_int(1), s_ball, p)
        denom = rb_from_int((mpz(1) << n) - 1, p)
        zeta_ball = r_add(one_plus, r_div(one_plus, denom, p), p)
        bb = r_mul(v, zeta_ball, p)  # ball around |B_n|
        vsc = _staudt_clausen_fraction(n)
        sign = 1 if (n // 2 + 1) % 2 == 0 else -1
        # D = (-1)^(n/2+1) |B_n| + a/b should be within 1/2 of an integer
        d_mid = (mpq(bb.mid) if sign > 0 else -mpq(bb.mid)) + vsc
        nint = (2 * d_mid.numerator + d_mid.denominator) // (2 * d_mid.denominator)
        if abs(d_mid - nint) + mpq(bb.rad) >= half:
            raise BernoulliCertificationError(
                f"B_{n}: enclosure too wide to certify the integer part")
        yield mpq(nint) - vsc
        n -= 2
        if n < 2:
            break
        v = r_div_i(r_mul(u, v, p), (n + 1) * (n + 2), p)
        for k in t:
            k2 = k * k
            t[k] *= k2
            err[k] *= k2
        if n % 64 == 0:
            p2, r2 = dirichlet_params(n)
            shift = p - p2
            t = {k: tk >> shift for k, tk in t.items() if k <= r2}
            err = {k: (err[k] >> shift) + 2 for k in t}
            u = _round_ball(u, p2)
            v = _round_ball(v, p2)
            p, r = p2, r2


class BernoulliCache:
    """Growing table of exact fractions B_0, B_2, ..., B_{2c-2}.

    Concurrent readers are safe; extensions are serialized by a lock and
    append only, so readers never observe partially written entries.
    """

    def __init__(self, batch=128):
        self._fracs = [mpq(1)]
        self._lock = threading.Lock()
        self.batch = batch

    def __len__(self):
        return len(self._fracs)

    def ensure(self, count):
        """Grow the cache to hold at least `count` entries (B_0..B_{2count-2})."""
        if count <= len(self._fracs):
            return
        with self._lock:
            while len(self._fracs) < count:
                have = len(self._fracs)
                new_count = have + self.batch
                n_max = 2 * new_count - 2
                fresh = []
                gen = bernoulli_batch(n_max)
                for _ in range(new_count - have):
                    fresh.append(next(gen))
                gen.close()  # early termination
                fresh.reverse()
                self._fracs.extend(fresh)

    def fraction(self, n):
        """B_{2n} as an exact mpq (the cache must already hold it)."""
        return self._fracs[n]

    def __getitem__(self, n):
        return self._fracs[n]


_default_cache = BernoulliCache()


def default_cache():
    return _default_cache


def cache_ensure(cache, count):
    cache.ensure(count)


def bern(n):
    """B_{2n} from the shared cache, extending it if needed."""
    _default_cache.ensure(n + 1)
    return _default_cache.fraction(n)
