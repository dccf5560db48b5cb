"""Vectorised double-double arithmetic on complex numbers.

A complex double-double is a 4-tuple of float arrays (re_hi, re_lo, im_hi,
im_lo).  Only the handful of operations needed to generate binomial-series
terms without losing the leading digits to cancellation are provided.
"""
from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _add(ah, al, bh, bl):
    s1, s2 = _two_sum(ah, bh)
    t1, t2 = _two_sum(al, bl)
    s2 = s2 + t1
    s1, s2 = _quick_two_sum(s1, s2)
    s2 = s2 + t2
    return _quick_two_sum(s1, s2)


def _mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return _quick_two_sum(p, e)


def _mul_d(ah, al, b):
    p, e = _two_prod(ah, b)
    e = e + al * b
    return _quick_two_sum(p, e)


def _div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = _mul_d(bh, bl, q1)
    rh, rl = _add(ah, al, -ph, -pl)
    q2 = rh / bh
    ph, pl = _mul_d(bh, bl, q2)
    rh, rl = _add(rh, rl, -ph, -pl)
    q3 = rh / bh
    q1, q2 = _quick_two_sum(q1, q2)
    return _add(q1, q2, q3, np.zeros_like(q3))


def from_complex(z):
    z = np.asarray(z, dtype=np.complex128)
    zero = np.zeros(z.shape)
    return (z.real.copy(), zero, z.imag.copy(), zero.copy())


def sub_real(x, a):
    """x - a for a float array ``a`` (exact in the leading part)."""
    rh, rl = _add(x[0], x[1], -a, np.zeros_like(a))
    return (rh, rl, x[2], x[3])


def mul(x, y):
    ac = _mul(x[0], x[1], y[0], y[1])
    bd = _mul(x[2], x[3], y[2], y[3])
    ad = _mul(x[0], x[1], y[2], y[3])
    bc = _mul(x[2], x[3], y[0], y[1])
    re = _add(ac[0], ac[1], -bd[0], -bd[1])
    im = _add(ad[0], ad[1], bc[0], bc[1])
    return (re[0], re[1], im[0], im[1])


def div_real(x, d):
    """x / d for a float array ``d``."""
    zero = np.zeros_like(d)
    re = _div(x[0], x[1], d, zero)
    im = _div(x[2], x[3], d, zero)
    return (re[0], re[1], im[0], im[1])


def reciprocal(x):
    rr = _mul(x[0], x[1], x[0], x[1])
    ii = _mul(x[2], x[3], x[2], x[3])
    nh, nl = _add(rr[0], rr[1], ii[0], ii[1])
    re = _div(x[0], x[1], nh, nl)
    im = _div(-x[2], -x[3], nh, nl)
    return (re[0], re[1], im[0], im[1])


def scale_sign(x, s):
    return (x[0] * s, x[1] * s, x[2] * s, x[3] * s)


def prefix_product(x):
    """Inclusive running product along the array (Hillis-Steele scan)."""
    out = tuple(a.copy() for a in x)
    n = out[0].shape[0]
    off = 1
    while off < n:
        head = tuple(a[off:] for a in out)
        prev = tuple(a[:-off] for a in out)
        prod = mul(head, prev)
        out = tuple(np.concatenate([a[:off], p]) for a, p in zip(out, prod))
        off *= 2
    return out


def hi_lo(x):
    """Split into (hi, lo) complex arrays with value = hi + lo."""
    return x[0] + 1j * x[2], x[1] + 1j * x[3]
