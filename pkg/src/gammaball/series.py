"""
Truncated power series ("jets") over complex balls.

A jet of length n represents c0 + c1 x + ... + c_{n-1} x^{n-1} modulo x^n.
Running the scalar gamma algorithms on jets yields all derivatives up to the
truncation order in one pass, which is how psi, psi^(m) and Gamma^(m) are
obtained.  Multiplication is plain O(n^2) coefficient convolution; the
elementary functions use the standard power-series recurrences.
"""

from . import balls as B
from .balls import cb_from_int, cb_indeterminate


class SeriesJet:
    """Immutable truncated power series; coeffs is a tuple of ComplexBall."""

    __slots__ = ('coeffs',)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @property
    def n(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def is_finite(self):
        return all(c.is_finite() for c in self.coeffs)

    def __repr__(self):
        return "Jet(" + ", ".join(repr(c) for c in self.coeffs) + ")"


def jet_const(c, n):
    z = cb_from_int(0)
    return SeriesJet([c] + [z] * (n - 1))


def jet_x(c, n):
    """The jet c + x (the usual seed for derivative towers)."""
    if n == 1:
        return SeriesJet([c])
    z = cb_from_int(0)
    return SeriesJet([c, cb_from_int(1)] + [z] * (n - 2))


def jet_indeterminate(n):
    return SeriesJet([cb_indeterminate()] * n)


def jet_add(a, b, prec):
    n = min(a.n, b.n)
    return SeriesJet([B.c_add(a[k], b[k], prec) for k in range(n)])


def jet_sub(a, b, prec):
    n = min(a.n, b.n)
    return SeriesJet([B.c_sub(a[k], b[k], prec) for k in range(n)])


def jet_neg(a):
    return SeriesJet([B.c_neg(c) for c in a.coeffs])


def jet_scalar_mul(a, s, prec):
    return SeriesJet([B.c_mul(c, s, prec) for c in a.coeffs])


def jet_mul(a, b, prec):
    """Coefficientwise-contained product modulo x^min(na, nb)."""
    n = min(a.n, b.n)
    out = []
    for k in range(n):
        acc = None
        for i in range(k + 1):
            t = B.c_mul(a[i], b[k - i], prec)
            acc = t if acc is None else B.c_add(acc, t, prec)
        out.append(acc)
    return SeriesJet(out)


def jet_mul_linear(a, c0, prec):
    """Multiply by the linear jet (c0 + x) in O(n) operations."""
    n = a.n
    out = [B.c_mul(a[0], c0, prec)]
    for k in range(1, n):
        out.append(B.c_add(B.c_mul(a[k], c0, prec), a[k - 1], prec))
    return SeriesJet(out)


def jet_derivative(a, prec):
    if a.n == 1:
        return SeriesJet([cb_from_int(0)])
    return SeriesJet([B.c_mul_i(a[k], k, prec) for k in range(1, a.n)])


def jet_integral(a, prec, constant=None):
    c0 = constant if constant is not None else cb_from_int(0)
    out = [c0]
    for k in range(a.n):
        out.append(B.c_div_i(a[k], k + 1, prec))
    return SeriesJet(out[:a.n + 1])


def jet_inv(a, prec):
    if a[0].contains_zero():
        return jet_indeterminate(a.n)
    g0 = B.c_inv(a[0], prec)
    out = [g0]
    for k in range(1, a.n):
        acc = None
        for j in range(1, k + 1):
            t = B.c_mul(a[j], out[k - j], prec)
            acc = t if acc is None else B.c_add(acc, t, prec)
        out.append(B.c_neg(B.c_mul(g0, acc, prec)))
    return SeriesJet(out)


def jet_div(a, b, prec):
    return jet_mul(a, jet_inv(b, prec), prec)


def jet_exp(a, prec):
    if not a[0].is_finite():
        return jet_indeterminate(a.n)
    g0 = B.c_exp(a[0], prec)
    out = [g0]
    for k in range(1, a.n):
        # k g_k = sum_{j=1}^{k} j f_j g_{k-j}
        acc = None
        for j in range(1, k + 1):
            t = B.c_mul(B.c_mul_i(a[j], j, prec), out[k - j], prec)
            acc = t if acc is None else B.c_add(acc, t, prec)
        out.append(B.c_div_i(acc, k, prec))
    return SeriesJet(out)


def jet_log(a, prec):
    if a[0].contains_zero():
        return jet_indeterminate(a.n)
    out = [B.c_log(a[0], prec)]
    inv0 = B.c_inv(a[0], prec)
    for k in range(1, a.n):
        # k f_k = sum_{j=1}^{k} j L_j f_{k-j}  =>  solve for L_k
        acc = B.c_mul_i(a[k], k, prec)
        for j in range(1, k):
            t = B.c_mul(B.c_mul_i(out[j], j, prec), a[k - j], prec)
            acc = B.c_sub(acc, t, prec)
        out.append(B.c_mul(B.c_div_i(acc, k, prec), inv0, prec))
    return SeriesJet(out)


def jet_sqrt(a, prec):
    if a[0].contains_zero():
        return jet_indeterminate(a.n)
    g0 = B.c_sqrt(a[0], prec)
    if not g0.is_finite():
        return jet_indeterminate(a.n)
    out = [g0]
    inv2g0 = B.c_inv(B.c_mul_2exp(g0, 1), prec)
    for k in range(1, a.n):
        acc = a[k]
        for j in range(1, k):
            acc = B.c_sub(acc, B.c_mul(out[j], out[k - j], prec), prec)
        out.append(B.c_mul(acc, inv2g0, prec))
    return SeriesJet(out)


_ELEM = {'inv': jet_inv, 'log': jet_log, 'exp': jet_exp, 'sqrt': jet_sqrt}


def jet_elem(fn, a, prec):
    """Dispatch {inv, log, exp, sqrt} composed with a jet."""
    try:
        f = _ELEM[fn]
    except KeyError:
        raise ValueError(f"unknown jet elementary function {fn!r}") from None
    return f(a, prec)
