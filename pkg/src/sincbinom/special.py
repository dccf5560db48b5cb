"""Complex gamma family, beta, sinc, Si and rect.

All functions accept a Python scalar or an array_like.  Scalar input gives a
Python ``complex`` (``float`` for :func:`rect`), array input gives a complex
``ndarray`` of the same shape.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError, PoleError
from .options import EvalOptions, Evaluation

EULER_GAMMA = 0.57721566490153286061
HALF_LOG_2PI = 0.91893853320467274178
LOG_PI = 1.14472988584940017414
SQRT_2PI = 2.50662827463100050242

POLE_TOL = 1e-14

# Lanczos approximation, g = 607/128, 15 terms (Godfrey).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])

# B_{2n} / (2n (2n-1)) for the Stirling series of log Gamma.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN_RE = 15.0
_REFLECT_BELOW = -20.0


def _as_complex(z):
    arr = np.asarray(z, dtype=np.complex128)
    # canonicalise -0.0 imaginary parts so principal logs see the upper side
    return arr + 0.0j, arr.ndim == 0


def _out(arr, scalar):
    if scalar:
        return complex(arr)
    return arr


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite")


def _nonpositive_integer(z, tol=POLE_TOL):
    re = z.real
    return (np.abs(z.imag) <= tol) & (re < 0.5) & (np.abs(re - np.round(re)) <= tol)


# -- trigonometric helpers with exact integer zeros -------------------------

def _sinpi_real(x):
    r = x - 2.0 * np.round(0.5 * x)  # r in [-1, 1], exact
    r = np.where(r > 0.5, 1.0 - r, r)
    r = np.where(r < -0.5, -1.0 - r, r)
    return np.sin(np.pi * r)


def _cospi_real(x):
    r = np.abs(x - 2.0 * np.round(0.5 * x))  # r in [0, 1]
    return _sinpi_real(0.5 - r)


def sinpi(z):
    """sin(pi z), exactly zero at the integers."""
    z, scalar = _as_complex(z)
    x, y = z.real, z.imag
    with np.errstate(over="ignore"):
        out = _sinpi_real(x) * np.cosh(np.pi * y) + 1j * _cospi_real(x) * np.sinh(np.pi * y)
    return _out(out, scalar)


def cospi(z):
    """cos(pi z), exactly zero at the half-integers."""
    z, scalar = _as_complex(z)
    x, y = z.real, z.imag
    with np.errstate(over="ignore"):
        out = _cospi_real(x) * np.cosh(np.pi * y) - 1j * _sinpi_real(x) * np.sinh(np.pi * y)
    return _out(out, scalar)


def _log_sinpi(z):
    """log(sin(pi z)) modulo 2 pi i, safe for large imaginary parts."""
    out = np.empty_like(z)
    small = np.abs(z.imag) <= 30.0
    if np.any(small):
        out[small] = np.log(sinpi(z[small]))
    up = ~small & (z.imag > 0)
    if np.any(up):
        zu = z[up]
        out[up] = -1j * np.pi * zu + np.log1p(-np.exp(2j * np.pi * zu)) + np.log(0.5j)
    down = ~small & (z.imag < 0)
    if np.any(down):
        zd = z[down]
        out[down] = 1j * np.pi * zd + np.log1p(-np.exp(-2j * np.pi * zd)) + np.log(-0.5j)
    return out


# -- gamma family -----------------------------------------------------------

def _lanczos_log_gamma(z):
    """log Gamma(z) modulo 2 pi i for Re z >= 0.5 (Lanczos)."""
    zm = z - 1.0
    acc = np.full_like(zm, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def gamma(z):
    """Gamma function for complex arguments.

    Lanczos approximation on Re z >= 1/2, reflection formula elsewhere.

    Raises
    ------
    PoleError
        If ``z`` is a nonpositive integer.
    OverflowError
        If ``|Gamma(z)|`` exceeds the double range.
    """
    z, scalar = _as_complex(z)
    _check_finite(z, "gamma argument")
    if np.any(_nonpositive_integer(z)):
        raise PoleError("gamma has a pole at nonpositive integers")
    right = z.real >= 0.5
    out = np.empty_like(z)
    with np.errstate(over="ignore", invalid="ignore"):
        if np.any(right):
            out[right] = np.exp(_lanczos_log_gamma(z[right]))
        left = ~right
        if np.any(left):
            zl = z[left]
            g1 = np.exp(_lanczos_log_gamma(1.0 - zl))
            out[left] = np.pi / (sinpi(zl) * g1)
    bad = ~np.isfinite(out)
    if np.any(bad):
        # intermediate overflow in sin or Gamma(1 - z); retry in log space
        with np.errstate(over="ignore"):
            out[bad] = np.exp(_log_gamma_array(z[bad]))
        if not np.all(np.isfinite(out)):
            raise OverflowError("|gamma(z)| exceeds the double range; use log_gamma")
    return _out(out, scalar)


def _stirling(z):
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series * inv


def _log_gamma_right(z):
    """Principal log Gamma by upward recurrence then Stirling (Re z >= -20)."""
    shift = np.maximum(0, np.ceil(_STIRLING_MIN_RE - z.real)).astype(int)
    nmax = int(shift.max()) if shift.size else 0
    acc = np.zeros_like(z)
    for k in range(nmax):
        active = shift > k
        acc = acc + np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)
    return _stirling(z + shift) - acc


def _log_gamma_array(z):
    out = np.empty_like(z)
    right = z.real >= _REFLECT_BELOW
    if np.any(right):
        out[right] = _log_gamma_right(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        raw = LOG_PI - _log_sinpi(zl) - _log_gamma_right(1.0 - zl)
        # the leading Stirling terms fix the branch: on this half plane the
        # exact value differs from them by -log(1 - exp(+-2 pi i z)), whose
        # imaginary part stays inside (-pi/2, pi/2)
        approx = (zl - 0.5) * np.log(zl) - zl + HALF_LOG_2PI
        turns = np.round((approx.imag - raw.imag) / (2.0 * np.pi))
        out[left] = raw + 2j * np.pi * turns
    return out


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Continuous off the negative real axis, real on (0, inf); on the negative
    real axis the value is the limit from the upper half plane.
    """
    z, scalar = _as_complex(z)
    _check_finite(z, "log_gamma argument")
    if np.any(_nonpositive_integer(z)):
        raise PoleError("log_gamma has a logarithmic pole at nonpositive integers")
    return _out(_log_gamma_array(z), scalar)


def rgamma(z):
    """1/Gamma(z), entire; exactly zero at the nonpositive integers."""
    z, scalar = _as_complex(z)
    _check_finite(z, "rgamma argument")
    poles = _nonpositive_integer(z)
    out = np.zeros_like(z)
    ok = ~poles
    if np.any(ok):
        with np.errstate(over="ignore", under="ignore"):
            out[ok] = np.exp(-_log_gamma_array(z[ok]))
    return _out(out, scalar)


def reciprocal_gamma_weierstrass(z, n_factors: int):
    """Partial Weierstrass product z e^{gamma z} prod_{k<=n} (1+z/k) e^{-z/k}.

    Converges (slowly, error ~ |z|^2 / n) to 1/Gamma(z) for every complex z.
    Kept as an independent check on :func:`gamma`, not for production use.
    """
    if n_factors < 1:
        raise DomainError("n_factors must be at least 1")
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError("argument must be finite")
    prod = z * cmath.exp(EULER_GAMMA * z)
    chunk = 1 << 16
    for start in range(1, n_factors + 1, chunk):
        k = np.arange(start, min(start + chunk, n_factors + 1), dtype=float)
        u = z / k
        prod *= complex(np.prod((1.0 + u) * np.exp(-u)))
        if prod == 0:
            break
    return prod


def beta_gamma(p, q):
    """Beta function Gamma(p) Gamma(q) / Gamma(p + q), via log_gamma."""
    p, q = complex(p), complex(q)
    for name, v in (("p", p), ("q", q)):
        if not cmath.isfinite(v):
            raise DomainError(f"{name} must be finite")
        if _nonpositive_integer(np.asarray(v)):
            raise PoleError(f"beta_gamma: {name} is a nonpositive integer")
    if _nonpositive_integer(np.asarray(p + q)):
        return 0j
    lg = log_gamma(np.array([p, q, p + q]))
    return complex(np.exp(lg[0] + lg[1] - lg[2]))


def beta_series(p, q, tol: float = 1e-10, max_terms: int = 10**6) -> Evaluation:
    """Beta function as sum_k binom(p-1, k) (-1)^k / (q + k), Re p > 0.

    The terms decay like k^(-p-1); the sum is truncated with the power-law
    tail bound and, when that is too slow, Richardson-extrapolated in the
    number of terms.
    """
    from .series import BinomialStream, sum_power_series

    p, q = complex(p), complex(q)
    if not p.real > 0:
        raise DomainError("beta_series needs Re(p) > 0")
    if _nonpositive_integer(np.asarray(q)):
        raise DomainError("beta_series needs q not a nonpositive integer")
    upper = p - 1.0
    stream = BinomialStream(upper)

    def block(k0, k1):
        k = np.arange(k0, k1, dtype=float)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        return stream.take(k1 - k0) * sign / (q + k)

    opts = EvalOptions(abs_tol=tol, rel_tol=tol, max_terms=max_terms)
    ev, _ = sum_power_series(block, lead=p, opts=opts, finite_terms=_finite_terms(upper))
    return ev


def _finite_terms(upper: complex):
    """Number of nonzero binom(upper, k) when upper is a nonnegative integer."""
    if upper.imag == 0 and upper.real >= 0 and upper.real == math.floor(upper.real):
        return int(upper.real) + 1
    return None


# -- sinc, Si, rect -----------------------------------------------------------

def sinc(z):
    """Normalised sinc: sin(pi z)/(pi z), with sinc(0) = 1."""
    z, scalar = _as_complex(z)
    small = np.abs(z) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = np.array(sinpi(z) / (np.pi * z), dtype=np.complex128)
    if np.any(small):
        u2 = (np.pi * z[small]) ** 2
        out[small] = 1.0 - u2 / 6.0 + u2 * u2 / 120.0
    return _out(out, scalar)


def rect(x):
    """Indicator of the open interval (-1/2, 1/2)."""
    xa = np.asarray(x, dtype=float)
    _check_finite(xa, "rect argument")
    out = np.where(np.abs(xa) < 0.5, 1.0, 0.0)
    if xa.ndim == 0:
        return float(out)
    return out


def _si_series(z):
    """Maclaurin series of Si; used where cancellation is mild."""
    z2 = z * z
    term = z.copy()  # z^(2n+1)/(2n+1)!
    total = term.copy()
    n = 0
    while True:
        n += 1
        term = -term * z2 / ((2 * n) * (2 * n + 1))
        contrib = term / (2 * n + 1)
        total = total + contrib
        if np.all(np.abs(contrib) <= 1e-17 * np.maximum(np.abs(total), 1e-300)) or n > 600:
            return total


def _e1_cf(u):
    """Exponential integral E1(u) by its continued fraction (|arg u| < pi)."""
    tiny = 1e-300
    b = u + 1.0
    c = np.full_like(u, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(u.shape, dtype=bool)
    for i in range(1, 2000):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < 1e-16
        if np.all(done):
            break
    return h * np.exp(-u)


def _si_tail(z):
    """T(z) = Si(z) - pi/2 for Re z > 0, from E1 at +-iz."""
    return (_e1_cf(1j * z) - _e1_cf(-1j * z)) / 2j


def _use_series(z):
    return (np.abs(z) - np.abs(z.imag) <= 7.0) | (np.abs(z) <= 4.0)


def si(z):
    """Sine integral Si(z) = int_0^z sin(t)/t dt for complex z.

    Maclaurin series near the origin and near the imaginary axis, otherwise
    the exponential-integral continued fraction (oddness covers Re z < 0).
    """
    z, scalar = _as_complex(z)
    _check_finite(z, "si argument")
    out = np.empty_like(z)
    ser = _use_series(z)
    if np.any(ser):
        out[ser] = _si_series(z[ser])
    far = ~ser
    if np.any(far):
        zf = z[far]
        sgn = np.where(zf.real >= 0, 1.0, -1.0)
        out[far] = sgn * (0.5 * np.pi + _si_tail(sgn * zf))
    return _out(out, scalar)


def si_plus_half_pi(z):
    """Si(z) + pi/2 without cancellation for z deep in the left half plane."""
    z, scalar = _as_complex(z)
    out = np.empty_like(z)
    direct = _use_series(z) | (z.real >= 0)
    if np.any(direct):
        out[direct] = si(z[direct]) + 0.5 * np.pi
    far = ~direct
    if np.any(far):
        out[far] = -_si_tail(-z[far])
    return _out(out, scalar)
