"""
Midpoint-radius ("ball") arithmetic over arbitrary-precision floats.

A real ball [m +/- r] stores an MPFR midpoint at the working precision and a
nonnegative low-precision radius, always rounded upward, so every operation
returns a ball that rigorously contains the image of its input sets.  Complex
balls are rectangles: a pair of real balls for the real and imaginary parts.

Raw significand arithmetic is delegated to gmpy2/MPFR; this module owns the
error accounting: half-ulp rounding bounds read off the MPFR inexact flag,
plus interval propagation terms per operation.

Special states: a radius of +inf marks an indeterminate ball (the result of
dividing by a ball containing zero, log of a ball containing the origin, and
so on).  Indeterminate balls propagate through all operations.

All operations are pure; balls are immutable.  Contexts are cached per
thread, so concurrent callers are safe.
"""

import threading

import gmpy2
from gmpy2 import mpfr, mpq, mpz

EMIN = gmpy2.get_emin_min()
EMAX = gmpy2.get_emax_max()

# Radius precision: >= 30 significant bits, rounded upward.
RAD_PREC = 30

_tls = threading.local()


def _wctx(p):
    """Working context at p bits, round-to-nearest, unbounded-in-practice exponents."""
    try:
        cache = _tls.wctx
    except AttributeError:
        cache = _tls.wctx = {}
    ctx = cache.get(p)
    if ctx is None:
        ctx = gmpy2.context(precision=p, emin=EMIN, emax=EMAX,
                            round=gmpy2.RoundToNearest)
        cache[p] = ctx
    return ctx


def _rup():
    try:
        return _tls.rup
    except AttributeError:
        _tls.rup = gmpy2.context(precision=RAD_PREC, emin=EMIN, emax=EMAX,
                                 round=gmpy2.RoundUp)
        return _tls.rup


def _rdn():
    try:
        return _tls.rdn
    except AttributeError:
        _tls.rdn = gmpy2.context(precision=RAD_PREC, emin=EMIN, emax=EMAX,
                                 round=gmpy2.RoundDown)
        return _tls.rdn


_MPFR_ZERO = mpfr(0)
_MPFR_ONE = mpfr(1)
_MPFR_INF = mpfr('inf')


def pow2(e):
    """2^e as an exact mpfr, for any integer e in the MPFR exponent range."""
    return _rup().mul_2exp(_MPFR_ONE, e)


def _half_ulp(x, p):
    # |x| < 2^get_exp(x) and x carries p significant bits, so a
    # round-to-nearest error is at most 2^(exp - p - 1).
    if gmpy2.is_zero(x):
        return _MPFR_ZERO
    if not gmpy2.is_finite(x):
        return _MPFR_INF
    return pow2(gmpy2.get_exp(x) - p - 1)


def _mag_int_up(n):
    """|n| as a RAD_PREC magnitude rounded upward."""
    a = abs(n)
    m = _rup().abs(mpfr(a, precision=RAD_PREC))
    if m < a:
        m = gmpy2.next_above(m)
    return m


def _mag_int_dn(n):
    a = abs(n)
    m = _rdn().abs(mpfr(a, precision=RAD_PREC))
    if m > a:
        m = gmpy2.next_below(m)
    return m


def _mag_q_up(q):
    """|q| as a RAD_PREC magnitude rounded upward, for exact rational q."""
    a = abs(mpq(q))
    m = _rup().abs(mpfr(a, precision=RAD_PREC))
    if mpq(m) < a:
        m = gmpy2.next_above(m)
    return m


class Precision:
    """Significand bit count for midpoint arithmetic; must be >= 2."""

    __slots__ = ('bits',)

    def __init__(self, bits):
        bits = int(bits)
        if bits < 2:
            raise ValueError(f"precision must be >= 2 bits, got {bits}")
        self.bits = bits

    def __index__(self):
        return self.bits

    def __repr__(self):
        return f"Precision({self.bits})"


def _as_bits(prec):
    p = int(prec)
    if p < 2:
        raise ValueError(f"precision must be >= 2 bits, got {p}")
    return p


class RealBall:
    """A set [mid - rad, mid + rad]; rad = +inf means "any real number"."""

    __slots__ = ('mid', 'rad')

    def __init__(self, mid, rad=_MPFR_ZERO):
        self.mid = mid
        self.rad = rad

    def is_finite(self):
        return gmpy2.is_finite(self.mid) and gmpy2.is_finite(self.rad)

    def is_exact(self):
        return gmpy2.is_zero(self.rad) and gmpy2.is_finite(self.mid)

    def contains_zero(self):
        if not self.is_finite():
            return True
        return abs(self.mid) <= self.rad

    def __repr__(self):
        return f"[{self.mid} +/- {self.rad}]"


def rb_indeterminate():
    return RealBall(mpfr('nan'), _MPFR_INF)


def rb_zero():
    return RealBall(_MPFR_ZERO, _MPFR_ZERO)


def rb_from_int(n, p=None):
    if p is None:
        # exact: size the significand to the integer
        bits = max(2, mpz(n).bit_length())
        return RealBall(mpfr(n, precision=bits), _MPFR_ZERO)
    p = _as_bits(p)
    m = mpfr(n, precision=p)
    return RealBall(m, _half_ulp(m, p) if mpz(n).bit_length() > p else _MPFR_ZERO)


def rb_from_q(q, p):
    """Ball containing the exact rational q, midpoint rounded to p bits."""
    p = _as_bits(p)
    q = mpq(q)
    m = mpfr(q, precision=p)
    if mpq(m) == q:
        return RealBall(m, _MPFR_ZERO)
    return RealBall(m, _half_ulp(m, p))


def rb_from_str(s, p):
    p = _as_bits(p)
    try:
        from fractions import Fraction
        q = Fraction(s)
    except ValueError:
        m = mpfr(s, precision=p)  # correctly rounded
        return RealBall(m, _half_ulp(m, p))
    return rb_from_q(mpq(q.numerator, q.denominator), p)


def rb_from_mpfr(x):
    if not gmpy2.is_finite(x):
        return rb_indeterminate()
    return RealBall(x, _MPFR_ZERO)


def _mag_abs_up(x):
    return _rup().abs(x)


def _mag_abs_dn(x):
    return _rdn().abs(x)


def rb_abs_hi(a):
    """Upper bound for |x| over the ball, as a RAD_PREC magnitude."""
    if not a.is_finite():
        return _MPFR_INF
    up = _rup()
    return up.add(up.abs(a.mid), a.rad)


def rb_abs_lo(a):
    """Lower bound for |x| over the ball (0 if the ball straddles 0)."""
    if not a.is_finite():
        return _MPFR_ZERO
    dn = _rdn()
    v = dn.sub(dn.abs(a.mid), a.rad)
    return v if v > 0 else _MPFR_ZERO


def rb_lower(a):
    """Rigorous lower bound of the ball (rounded down)."""
    if not a.is_finite():
        return -_MPFR_INF
    return _rdn().sub(a.mid, a.rad)


def rb_upper(a):
    if not a.is_finite():
        return _MPFR_INF
    return _rup().add(a.mid, a.rad)


def _neg_exact(x):
    # bare "-x" would round through the default 53-bit context
    return _wctx(max(2, x.precision)).minus(x)


def _abs_exact(x):
    return _wctx(max(2, x.precision)).abs(x)


def r_neg(a):
    return RealBall(_neg_exact(a.mid), a.rad)


def r_abs(a):
    if not a.is_finite():
        return rb_indeterminate()
    if a.contains_zero():
        # image is [0, |mid|+rad]; keep it as a ball around half the upper end
        hi = rb_abs_hi(a)
        half = _rup().div_2exp(hi, 1)
        return RealBall(mpfr(half), half)
    return RealBall(_abs_exact(a.mid), a.rad)


def r_add(a, b, p):
    if not (a.is_finite() and b.is_finite()):
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.add(a.mid, b.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    up = _rup()
    return RealBall(m, up.add(up.add(a.rad, b.rad), err))


def r_sub(a, b, p):
    if not (a.is_finite() and b.is_finite()):
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.sub(a.mid, b.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    up = _rup()
    return RealBall(m, up.add(up.add(a.rad, b.rad), err))


def r_mul(a, b, p):
    if not (a.is_finite() and b.is_finite()):
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.mul(a.mid, b.mid)
    up = _rup()
    # |x y - m| <= |a.mid| br + |b.mid| ar + ar br + rounding
    r = up.add(up.mul(up.abs(a.mid), b.rad),
               up.mul(up.abs(b.mid), a.rad))
    if a.rad and b.rad:
        r = up.add(r, up.mul(a.rad, b.rad))
    if ctx.inexact:
        r = up.add(r, _half_ulp(m, p))
    return RealBall(m, r)


def r_mul_i(a, n, p):
    """Ball times an exact integer (mpz or int) scalar."""
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.mul(a.mid, n)
    up = _rup()
    r = up.mul(a.rad, _mag_int_up(n)) if a.rad else a.rad
    if ctx.inexact:
        r = up.add(r, _half_ulp(m, p))
    return RealBall(m, r)


def r_div_i(a, n, p):
    """Ball divided by an exact nonzero integer scalar."""
    if n == 0:
        return rb_indeterminate()
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.div(a.mid, n)
    up = _rup()
    r = up.div(a.rad, _mag_int_dn(n)) if a.rad else a.rad
    if ctx.inexact:
        r = up.add(r, _half_ulp(m, p))
    return RealBall(m, r)


def r_mul_2exp(a, e):
    """Exact scaling by 2^e."""
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(max(2, a.mid.precision))
    return RealBall(ctx.mul_2exp(a.mid, e), _rup().mul_2exp(a.rad, e))


def r_div(a, b, p):
    if not (a.is_finite() and b.is_finite()):
        return rb_indeterminate()
    dlo = rb_abs_lo(b)
    if not dlo > 0:
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.div(a.mid, b.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    up = _rup()
    qhi = up.add(up.abs(m), err)
    r = up.div(up.add(a.rad, up.mul(qhi, b.rad)), dlo)
    return RealBall(m, up.add(r, err))


def r_inv(a, p):
    return r_div(RealBall(_MPFR_ONE), a, p)


def r_sqrt(a, p):
    if not a.is_finite():
        return rb_indeterminate()
    lo = rb_lower(a)
    if lo < 0:
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.sqrt(a.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    if gmpy2.is_zero(a.rad):
        return RealBall(m, err)
    up, dn = _rup(), _rdn()
    if lo > 0:
        # |sqrt(x) - sqrt(xm)| <= xr / (2 sqrt(lo))
        prop = up.div(a.rad, dn.mul_2exp(dn.sqrt(lo), 1))
        return RealBall(m, up.add(prop, err))
    # ball touches zero: radius is comparable to the value, endpoints suffice
    shi = up.sqrt(rb_upper(a))
    slo = dn.sqrt(lo)
    r = up.maxnum(up.sub(shi, dn.plus(m)), up.sub(up.plus(m), slo))
    return RealBall(m, up.add(r, err))


def r_exp(a, p):
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.exp(a.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    if gmpy2.is_zero(a.rad):
        return RealBall(m, err)
    up = _rup()
    dhi = up.exp(up.add(up.plus(a.mid), a.rad))
    if not gmpy2.is_finite(dhi):
        return rb_indeterminate()
    return RealBall(m, up.add(up.mul(dhi, a.rad), err))


def r_log(a, p):
    if not a.is_finite():
        return rb_indeterminate()
    lo = rb_lower(a)
    if not lo > 0:
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = ctx.log(a.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    if gmpy2.is_zero(a.rad):
        return RealBall(m, err)
    up = _rup()
    return RealBall(m, up.add(up.div(a.rad, lo), err))


def _r_elem_lipschitz1(fname, a, p, rad_cap=None):
    # for sin, cos, atan: |f'| <= 1 everywhere
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = getattr(ctx, fname)(a.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    up = _rup()
    r = up.add(a.rad, err)
    if rad_cap is not None and r > rad_cap:
        r = mpfr(rad_cap)
    return RealBall(m, r)


def r_sin(a, p):
    return _r_elem_lipschitz1('sin', a, p, rad_cap=2)


def r_cos(a, p):
    return _r_elem_lipschitz1('cos', a, p, rad_cap=2)


def r_atan(a, p):
    return _r_elem_lipschitz1('atan', a, p, rad_cap=4)


def _r_hyp(fname, a, p):
    # sinh/cosh; |f'| <= cosh on [mid-rad, mid+rad]
    if not a.is_finite():
        return rb_indeterminate()
    ctx = _wctx(p)
    ctx.clear_flags()
    m = getattr(ctx, fname)(a.mid)
    err = _half_ulp(m, p) if ctx.inexact else _MPFR_ZERO
    if gmpy2.is_zero(a.rad):
        return RealBall(m, err)
    up = _rup()
    dhi = up.cosh(up.add(up.abs(a.mid), a.rad))
    if not gmpy2.is_finite(dhi):
        return rb_indeterminate()
    return RealBall(m, up.add(up.mul(dhi, a.rad), err))


def r_sinh(a, p):
    return _r_hyp('sinh', a, p)


def r_cosh(a, p):
    return _r_hyp('cosh', a, p)


def r_pi(p):
    ctx = _wctx(p)
    m = ctx.const_pi()
    return RealBall(m, _half_ulp(m, p))


def r_log2pi(p):
    # log(2 pi), used by the Stirling prefactor
    ctx = _wctx(p + 8)
    m = ctx.log(ctx.mul_2exp(ctx.const_pi(), 1))
    b = RealBall(m, _half_ulp(m, p + 8))
    return r_add(b, rb_zero(), p)


def _mod2_exact(x):
    """Reduce an exact mpfr modulo 2 into [0, 2), exactly."""
    e = gmpy2.get_exp(x)
    if gmpy2.is_zero(x):
        return _MPFR_ZERO
    if e <= 0:
        # |x| < 1
        if gmpy2.is_signed(x):
            man, ex = x.as_mantissa_exp()
            bits = max(2, int(-ex) + 2)
            ctx = _wctx(bits)
            ctx.clear_flags()
            w = ctx.add(x, 2)
            assert not ctx.inexact
            return w
        return x
    man, ex = x.as_mantissa_exp()
    ex = int(ex)
    if ex >= 1:
        return _MPFR_ZERO  # even integer
    # x = man * 2^ex with -prec < ex <= 0; w = x - 2*floor(x/2)
    f = man >> (1 - ex)
    wman = man - (f << (1 - ex))
    if wman == 0:
        return _MPFR_ZERO
    bits = max(2, int(wman).bit_length() if not isinstance(wman, mpz) else wman.bit_length())
    return _wctx(bits).mul_2exp(mpfr(wman, precision=bits), ex)


def r_sinpi(a, p):
    """sin(pi x): the midpoint is reduced mod 2 exactly before scaling by pi."""
    if not a.is_finite():
        return rb_indeterminate()
    w = _mod2_exact(a.mid)
    if gmpy2.is_zero(a.rad):
        tw = _wctx(max(2, w.precision) + 2).mul_2exp(w, 1)
        if gmpy2.is_integer(tw):
            k = int(tw)  # sin(pi k/2) for k = 0..3
            return rb_from_int((0, 1, 0, -1)[k % 4])
    wb = RealBall(w, a.rad)
    t = r_mul(wb, r_pi(p + 4), p + 4)
    return r_sin(t, p)


def r_cospi(a, p):
    if not a.is_finite():
        return rb_indeterminate()
    w = _mod2_exact(a.mid)
    if gmpy2.is_zero(a.rad):
        tw = _wctx(max(2, w.precision) + 2).mul_2exp(w, 1)
        if gmpy2.is_integer(tw):
            k = int(tw)
            return rb_from_int((1, 0, -1, 0)[k % 4])
    wb = RealBall(w, a.rad)
    t = r_mul(wb, r_pi(p + 4), p + 4)
    return r_cos(t, p)


def r_pow_int(a, k, p):
    k = int(k)
    if k == 0:
        return RealBall(_MPFR_ONE)
    if k < 0:
        return r_inv(r_pow_int(a, -k, p), p)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else r_mul(result, base, p)
        k >>= 1
        if k:
            base = r_mul(base, base, p)
    return result


def r_union(a, b):
    """Smallest ball (up to radius rounding) containing both input balls."""
    if not (a.is_finite() and b.is_finite()):
        return rb_indeterminate()
    lo = min(rb_lower(a), rb_lower(b))
    hi = max(rb_upper(a), rb_upper(b))
    p = max(a.mid.precision, b.mid.precision, 53)
    ctx = _wctx(p)
    m = ctx.div_2exp(ctx.add(mpfr(lo), mpfr(hi)), 1)
    up = _rup()
    r = up.maxnum(up.sub(hi, _rdn().plus(m)), up.sub(up.plus(m), lo))
    return RealBall(m, r)


def r_add_error(a, err_mag):
    """Widen the ball by a magnitude bound (an upper-rounded mpfr)."""
    if not a.is_finite() or not gmpy2.is_finite(err_mag):
        return rb_indeterminate()
    return RealBall(a.mid, _rup().add(a.rad, err_mag))


# ---------------------------------------------------------------------------
# Complex balls (rectangles)
# ---------------------------------------------------------------------------

class ComplexBall:
    __slots__ = ('re', 'im')

    def __init__(self, re, im=None):
        self.re = re
        self.im = im if im is not None else rb_zero()

    def is_finite(self):
        return self.re.is_finite() and self.im.is_finite()

    def is_exact(self):
        return self.re.is_exact() and self.im.is_exact()

    def is_real(self):
        """Purely real: imaginary part is an exact zero."""
        return self.im.is_exact() and gmpy2.is_zero(self.im.mid)

    def contains_zero(self):
        return self.re.contains_zero() and self.im.contains_zero()

    def __repr__(self):
        if self.is_real():
            return repr(self.re)
        return f"({self.re!r} + {self.im!r}*I)"


def cb_indeterminate():
    return ComplexBall(rb_indeterminate(), rb_indeterminate())


def cb(re, im=None):
    """Build a complex ball from RealBalls, ints, strings or rationals (exact where possible)."""
    def conv(v):
        if isinstance(v, RealBall):
            return v
        if isinstance(v, (int, mpz)):
            return rb_from_int(v)
        if isinstance(v, (mpq,)):
            raise TypeError("rational component needs a precision; use rb_from_q")
        if isinstance(v, float):
            return rb_from_mpfr(mpfr(v, precision=53))
        if isinstance(v, mpfr):
            return rb_from_mpfr(v)
        raise TypeError(f"cannot convert {type(v)} to RealBall")
    return ComplexBall(conv(re), conv(im) if im is not None else rb_zero())


def cb_from_int(n):
    return ComplexBall(rb_from_int(n), rb_zero())


def cb_abs_hi(z):
    up = _rup()
    return up.hypot(rb_abs_hi(z.re), rb_abs_hi(z.im))


def cb_abs_lo(z):
    dn = _rdn()
    return dn.hypot(rb_abs_lo(z.re), rb_abs_lo(z.im))


def c_neg(a):
    return ComplexBall(r_neg(a.re), r_neg(a.im))


def c_conj(a):
    return ComplexBall(a.re, r_neg(a.im))


def c_add(a, b, p):
    return ComplexBall(r_add(a.re, b.re, p), r_add(a.im, b.im, p))


def c_sub(a, b, p):
    return ComplexBall(r_sub(a.re, b.re, p), r_sub(a.im, b.im, p))


def c_add_i(a, n, p):
    return ComplexBall(r_add(a.re, rb_from_int(n), p), a.im)


def c_mul(a, b, p):
    if a.is_real() and b.is_real():
        return ComplexBall(r_mul(a.re, b.re, p), rb_zero())
    re = r_sub(r_mul(a.re, b.re, p), r_mul(a.im, b.im, p), p)
    im = r_add(r_mul(a.re, b.im, p), r_mul(a.im, b.re, p), p)
    return ComplexBall(re, im)


def c_mul_i(a, n, p):
    return ComplexBall(r_mul_i(a.re, n, p), r_mul_i(a.im, n, p))


def c_div_i(a, n, p):
    return ComplexBall(r_div_i(a.re, n, p), r_div_i(a.im, n, p))


def c_mul_2exp(a, e):
    return ComplexBall(r_mul_2exp(a.re, e), r_mul_2exp(a.im, e))


def c_sqr(a, p):
    return c_mul(a, a, p)


def c_div(a, b, p):
    if a.is_real() and b.is_real():
        return ComplexBall(r_div(a.re, b.re, p), rb_zero())
    den = r_add(r_mul(b.re, b.re, p), r_mul(b.im, b.im, p), p)
    if den.contains_zero():
        return cb_indeterminate()
    re = r_div(r_add(r_mul(a.re, b.re, p), r_mul(a.im, b.im, p), p), den, p)
    im = r_div(r_sub(r_mul(a.im, b.re, p), r_mul(a.re, b.im, p), p), den, p)
    return ComplexBall(re, im)


def c_inv(a, p):
    return c_div(ComplexBall(RealBall(_MPFR_ONE)), a, p)


def c_pow_int(a, k, p):
    k = int(k)
    if k == 0:
        return cb_from_int(1)
    if k < 0:
        return c_inv(c_pow_int(a, -k, p), p)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else c_mul(result, base, p)
        k >>= 1
        if k:
            base = c_mul(base, base, p)
    return result


def c_exp(a, p):
    er = r_exp(a.re, p)
    if a.is_real():
        return ComplexBall(er, rb_zero())
    return ComplexBall(r_mul(er, r_cos(a.im, p), p), r_mul(er, r_sin(a.im, p), p))


def _r_atan2(y, x, p):
    """Ball atan2 with principal-branch semantics; widens over the cut."""
    if not (y.is_finite() and x.is_finite()):
        return rb_indeterminate()
    if y.is_exact() and gmpy2.is_zero(y.mid):
        if rb_lower(x) > 0:
            return rb_zero()
        if rb_upper(x) < 0:
            return r_pi(p)  # continuity from above on the cut
    if rb_lower(x) > 0:
        return r_atan(r_div(y, x, p), p)
    if rb_lower(y) > 0:
        half_pi = r_mul_2exp(r_pi(p + 2), -1)
        return r_sub(half_pi, r_atan(r_div(x, y, p), p), p)
    if rb_upper(y) < 0:
        half_pi = r_mul_2exp(r_pi(p + 2), -1)
        return r_sub(r_neg(half_pi), r_atan(r_div(x, y, p), p), p)
    if rb_upper(x) < 0:
        # left half-plane with y straddling 0: hull of both branch sides
        pi_hi = rb_upper(r_pi(p))
        return RealBall(_MPFR_ZERO, mpfr(pi_hi))
    # rectangle touches the origin
    return rb_indeterminate()


def c_log(a, p):
    if not a.is_finite():
        return cb_indeterminate()
    if a.is_real() and rb_lower(a.re) > 0:
        return ComplexBall(r_log(a.re, p), rb_zero())
    h = r_add(r_mul(a.re, a.re, p + 8), r_mul(a.im, a.im, p + 8), p + 8)
    if h.contains_zero():
        return cb_indeterminate()
    re = r_mul_2exp(r_log(h, p), -1)
    im = _r_atan2(a.im, a.re, p)
    return ComplexBall(re, im)


def c_sqrt(a, p):
    if not a.is_finite():
        return cb_indeterminate()
    if a.is_real() and rb_lower(a.re) >= 0:
        return ComplexBall(r_sqrt(a.re, p), rb_zero())
    lg = c_log(a, p + 4)
    if not lg.is_finite():
        return cb_indeterminate()
    return c_exp(c_mul_2exp(lg, -1), p)


def c_sin(a, p):
    if a.is_real():
        return ComplexBall(r_sin(a.re, p), rb_zero())
    return ComplexBall(r_mul(r_sin(a.re, p), r_cosh(a.im, p), p),
                       r_mul(r_cos(a.re, p), r_sinh(a.im, p), p))


def c_cos(a, p):
    if a.is_real():
        return ComplexBall(r_cos(a.re, p), rb_zero())
    return ComplexBall(r_mul(r_cos(a.re, p), r_cosh(a.im, p), p),
                       r_neg(r_mul(r_sin(a.re, p), r_sinh(a.im, p), p)))


def c_sinpi(a, p):
    if a.is_real():
        return ComplexBall(r_sinpi(a.re, p), rb_zero())
    piy = r_mul(a.im, r_pi(p + 4), p + 4)
    return ComplexBall(r_mul(r_sinpi(a.re, p), r_cosh(piy, p), p),
                       r_mul(r_cospi(a.re, p), r_sinh(piy, p), p))


def c_cospi(a, p):
    if a.is_real():
        return ComplexBall(r_cospi(a.re, p), rb_zero())
    piy = r_mul(a.im, r_pi(p + 4), p + 4)
    return ComplexBall(r_mul(r_cospi(a.re, p), r_cosh(piy, p), p),
                       r_neg(r_mul(r_sinpi(a.re, p), r_sinh(piy, p), p)))


def c_cotpi(a, p):
    return c_div(c_cospi(a, p), c_sinpi(a, p), p)


def c_atan(a, p):
    if a.is_real():
        return ComplexBall(r_atan(a.re, p), rb_zero())
    # atan(z) = (i/2) [log(1 - iz) - log(1 + iz)]
    iz = ComplexBall(r_neg(a.im), a.re)
    one = cb_from_int(1)
    d = c_sub(c_log(c_sub(one, iz, p), p), c_log(c_add(one, iz, p), p), p)
    return c_mul_2exp(ComplexBall(r_neg(d.im), d.re), -1)


def c_union(a, b):
    return ComplexBall(r_union(a.re, b.re), r_union(a.im, b.im))


def c_add_error(a, err_mag):
    """Widen by a magnitude bound; purely real balls stay purely real."""
    if a.is_real():
        return ComplexBall(r_add_error(a.re, err_mag), a.im)
    return ComplexBall(r_add_error(a.re, err_mag), r_add_error(a.im, err_mag))


# ---------------------------------------------------------------------------
# Set predicates
# ---------------------------------------------------------------------------

def _r_bounds_q(a):
    m = mpq(a.mid)
    r = mpq(a.rad)
    return m - r, m + r


def r_contains(a, b):
    """True if the set of a contains the set of b (exact endpoint comparison)."""
    if not a.is_finite():
        return True
    if not b.is_finite():
        return False
    alo, ahi = _r_bounds_q(a)
    blo, bhi = _r_bounds_q(b)
    return alo <= blo and bhi <= ahi


def r_contains_q(a, q):
    if not a.is_finite():
        return True
    alo, ahi = _r_bounds_q(a)
    q = mpq(q)
    return alo <= q <= ahi


def r_overlaps(a, b):
    if not a.is_finite() or not b.is_finite():
        return True
    alo, ahi = _r_bounds_q(a)
    blo, bhi = _r_bounds_q(b)
    return alo <= bhi and blo <= ahi


def contains(a, b):
    """Rectangle containment for complex balls."""
    return r_contains(a.re, b.re) and r_contains(a.im, b.im)


def overlaps(a, b):
    return r_overlaps(a.re, b.re) and r_overlaps(a.im, b.im)


def cb_contains_q(a, re_q, im_q=0):
    return r_contains_q(a.re, re_q) and r_contains_q(a.im, im_q)


# ---------------------------------------------------------------------------
# Operation dispatchers
# ---------------------------------------------------------------------------

_ARITH = {
    'add': c_add,
    'sub': c_sub,
    'mul': c_mul,
    'div': c_div,
}


def ball_arith(op, a, b, prec):
    """Dispatch {add,sub,mul,div,sqrt,neg,pow_int} over complex balls."""
    p = _as_bits(prec)
    if op in _ARITH:
        return _ARITH[op](a, b, p)
    if op == 'sqrt':
        return c_sqrt(a, p)
    if op == 'neg':
        return c_neg(a)
    if op == 'pow_int':
        return c_pow_int(a, int(b), p)
    raise ValueError(f"unknown arithmetic op {op!r}")


_ELEM = {
    'exp': c_exp,
    'log': c_log,
    'sin': c_sin,
    'cos': c_cos,
    'sinpi': c_sinpi,
    'cospi': c_cospi,
    'cotpi': c_cotpi,
    'atan': c_atan,
}


def ball_elem(fn, a, prec):
    """Dispatch elementary functions over complex balls."""
    p = _as_bits(prec)
    if fn == 'const_pi':
        return ComplexBall(r_pi(p), rb_zero())
    if fn in _ELEM:
        return _ELEM[fn](a, p)
    raise ValueError(f"unknown elementary function {fn!r}")


# ---------------------------------------------------------------------------
# Rendering and parsing
# ---------------------------------------------------------------------------

def _mpfr_to_decimal(x, digits):
    if gmpy2.is_zero(x):
        return '0'
    s, e, _ = x.digits(10, digits)
    sign = '-' if s.startswith('-') else ''
    d = s.lstrip('-')
    return f"{sign}{d[0]}.{d[1:]}e{e - 1:+d}"


def rb_str(a, digits=10, radius_digits=2):
    """Decimal "[m +/- r]" rendering; the printed ball contains the input."""
    if not a.is_finite():
        return '[nan +/- inf]'
    ms = _mpfr_to_decimal(a.mid, digits)
    # account for the decimal rounding of the midpoint in the printed radius
    reparsed = mpfr(ms, precision=max(a.mid.precision, 64) + 16)
    up = _rup()
    ctx = _wctx(max(a.mid.precision, 64) + 32)
    ctx.clear_flags()
    diff = ctx.sub(a.mid, reparsed)
    slack = up.abs(diff)
    if ctx.inexact:
        slack = up.add(slack, _half_ulp(diff, ctx.precision))
    r = up.add(a.rad, slack)
    if gmpy2.is_zero(r):
        return f"[{ms} +/- 0]"
    # round the printed radius upward so the printed ball still contains a
    k = max(1, min(int(radius_digits), 8))
    rs, re_, _ = r.digits(10, k)
    rint = int(rs)
    if mpq(rint) * mpq(10) ** (re_ - k) < mpq(r):
        rint += 1
        if rint == 10 ** k:
            rint, re_ = 10 ** (k - 1), re_ + 1
    digits_s = str(rint)
    rstr = f"{digits_s[0]}.{digits_s[1:].ljust(1, '0')}e{re_ - 1:+d}" if k > 1 \
        else f"{digits_s}e{re_ - 1:+d}"
    return f"[{ms} +/- {rstr}]"


def cb_str(z, digits=10, radius_digits=2):
    if z.is_real():
        return rb_str(z.re, digits, radius_digits)
    return (f"{rb_str(z.re, digits, radius_digits)} + "
            f"{rb_str(z.im, digits, radius_digits)}*I")


def rb_parse(s, p=256):
    """Parse "[m +/- r]" (or a bare decimal) into a containing ball."""
    s = s.strip()
    if s.startswith('['):
        body = s[1:-1]
        parts = body.split('+/-')
        ms, rs = parts[0].strip(), parts[1].strip()
    else:
        ms, rs = s, '0'
    p = max(p, 64)
    mid = mpfr(ms, precision=p)
    up = _rup()
    rad = up.abs(mpfr(rs, precision=RAD_PREC))
    rad = up.add(rad, up.mul_2exp(up.abs(mid), -p + 1))  # conversion slack
    return RealBall(mid, rad)


def rb_hex(a):
    """Exact "mantissa_hex p exponent : radius" rendering for test fixtures."""
    if not a.is_finite():
        return 'indet'
    man, e = a.mid.as_mantissa_exp()
    man = int(man)
    mid = f"{'-' if man < 0 else ''}0x{abs(man):x}p{int(e)}"
    if gmpy2.is_zero(a.rad):
        return f"{mid}:0"
    rman, rexp = a.rad.as_mantissa_exp()
    return f"{mid}:0x{int(rman):x}p{int(rexp)}"


def rb_from_hex(s):
    s = s.strip()
    if s == 'indet':
        return rb_indeterminate()
    mid_s, rad_s = s.split(':')
    def parse_part(t):
        sign = -1 if t.startswith('-') else 1
        t = t.lstrip('-')
        mh, e = t.split('p')
        man = sign * int(mh, 16)
        bits = max(2, abs(man).bit_length())
        return _wctx(bits).mul_2exp(mpfr(man, precision=bits), int(e))
    mid = parse_part(mid_s)
    rad = _MPFR_ZERO if rad_s == '0' else _rup().plus(parse_part(rad_s))
    return RealBall(mid, rad)
