"""Generalised binomial coefficient C(w, z) for complex arguments.

Three independent routes:

* :func:`binom_gamma` -- Gamma(w+1) / (Gamma(z+1) Gamma(w-z+1)) in log space;
* :func:`binom_sinc_finite` -- sum_{k<=m} C(m,k) sinc(z-k) for integer m >= 0;
* :func:`binom_sinc_series` -- sum_{k>=0} C(w,k) sinc(z-k) for Re w > -1.

plus the binomial theorem partial sums, the closed-form Fourier transform of
x -> C(w, x) and an empirical Raabe-ratio diagnostic.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _dd
from .errors import DomainError, NoConvergence
from .options import EvalOptions, Evaluation, Method
from .series import EPS, BinomialStream, SeriesDiagnostics, csum, sum_power_series
from .special import _as_complex, _log_gamma_array, _out, rect, sinc, sinpi

ZERO_BY_POLE_TOL = 1e-12
LATTICE_TOL = 1e-14


@dataclass(frozen=True)
class BinomialArgs:
    w: complex
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "z", complex(self.z))
        if not (cmath.isfinite(self.w) and cmath.isfinite(self.z)):
            raise DomainError("binomial arguments must be finite")


def _is_neg_int(v, tol=ZERO_BY_POLE_TOL):
    v = np.asarray(v)
    re = v.real
    return (np.abs(v.imag) <= tol) & (re < 0.5) & (np.abs(re - np.round(re)) <= tol)


def _as_nonneg_int(v: complex, tol: float = LATTICE_TOL):
    """``int(v)`` if v is a nonnegative integer (to ``tol``), else None."""
    if abs(v.imag) > tol:
        return None
    r = round(v.real)
    if r >= 0 and abs(v.real - r) <= tol:
        return int(r)
    return None


def binom_int_k(w, k: int) -> complex:
    """C(w, k) for integer k via the falling factorial w(w-1)...(w-k+1)/k!."""
    w = complex(w)
    k = int(k)
    if k < 0:
        return 0j
    value = 1.0 + 0.0j
    for j in range(k):
        value *= (w - j) / (j + 1)
        if not cmath.isfinite(value):
            raise OverflowError("binomial coefficient overflowed")
    return value


def binom_gamma(w, z):
    """C(w, z) = Gamma(w+1) / (Gamma(z+1) Gamma(w-z+1)).

    Broadcasts over array arguments.  When a denominator Gamma sits on a pole
    (z+1 or w-z+1 a nonpositive integer) the value is exactly 0.

    Raises
    ------
    DomainError
        If w is a negative integer.
    """
    w_arr, w_scalar = _as_complex(w)
    z_arr, z_scalar = _as_complex(z)
    w_arr, z_arr = np.broadcast_arrays(w_arr, z_arr)
    if np.any(_is_neg_int(w_arr + 1.0)):
        raise DomainError("binom_gamma: w must not be a negative integer")
    a = z_arr + 1.0
    b = w_arr - z_arr + 1.0
    zero = _is_neg_int(a) | _is_neg_int(b)
    out = np.zeros(w_arr.shape, dtype=np.complex128)
    ok = ~zero
    if np.any(ok):
        lg = (
            _log_gamma_array(w_arr[ok] + 1.0)
            - _log_gamma_array(a[ok])
            - _log_gamma_array(b[ok])
        )
        with np.errstate(over="ignore", under="ignore"):
            vals = np.exp(lg)
        if not np.all(np.isfinite(vals)):
            raise OverflowError("binomial coefficient exceeds the double range")
        out[ok] = vals
    return _out(out, w_scalar and z_scalar)


def _gamma_error(w: complex, z: complex, value: complex) -> float:
    scale = 1.0 + abs(w) + abs(z) + abs(w - z)
    return 64 * EPS * scale * max(1.0, math.log1p(scale)) * abs(value)


def binom_sinc_finite(m: int, z):
    """Finite sinc sum: C(m, z) = sum_{k=0}^m C(m, k) sinc(z - k), m >= 0.

    Written as sin(pi z)/pi * sum C(m,k) (-1)^k / (z-k) and summed in
    double-double: for |z| >> m the terms cancel by up to ~1e10.
    """
    if int(m) != m or m < 0:
        raise DomainError("binom_sinc_finite needs a nonnegative integer m")
    m = int(m)
    z_arr, scalar = _as_complex(z)
    out = _finite_vector(m, z_arr.ravel())
    if scalar:
        return complex(out[0])
    return out.reshape(z_arr.shape)


def _finite_vector(m: int, z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.shape, dtype=np.complex128)
    k = np.arange(m + 1, dtype=float)
    lattice = (z.imag == 0) & (z.real == np.round(z.real))
    for i in np.flatnonzero(lattice):
        n = int(z[i].real)
        out[i] = binom_int_k(m, n) if 0 <= n <= m else 0j
    near = ~lattice & (np.min(np.abs(z[:, None] - k), axis=1) < 1e-3)
    if near.any():
        # next to a lattice point the direct sum is well conditioned
        coeff = np.array([binom_int_k(m, j) for j in range(m + 1)])
        for i in np.flatnonzero(near):
            out[i] = csum(coeff * sinc(z[i] - k))
    rest = np.flatnonzero(~lattice & ~near)
    if rest.size == 0:
        return out
    # signed binomials carried as hi + lo, exact while C(m, k) < 2^106
    exact = [(-1) ** j * math.comb(m, j) for j in range(m + 1)]
    c_hi = np.array([float(c) for c in exact])
    c_lo = np.array([float(c - int(h)) for c, h in zip(exact, c_hi)])
    zr = z[rest]
    grid = np.broadcast_to(k, (zr.size, m + 1))
    inv = _dd.reciprocal(_dd.sub_real(_dd.from_complex(np.repeat(zr[:, None], m + 1, axis=1)), grid))
    zero = np.zeros_like(grid)
    hi, lo = _dd.hi_lo(_dd.mul(inv, (grid * 0 + c_hi, grid * 0 + c_lo, zero, zero)))
    scale = sinpi(zr) / np.pi
    for j, i in enumerate(rest):
        out[i] = complex(scale[j]) * csum(np.concatenate([hi[j], lo[j]]))
    return out


def _raabe_ratio(w: complex, z: complex, k: int) -> float:
    """k (a_k / a_{k+1} - 1) with a_k = |C(w,k) sinc(z-k)|, from the term ratio.

    |sin(pi(z-k))| does not depend on k, so the sinc ratio reduces to
    |z-k-1| / |z-k|.  Using the ratio keeps the statistic defined for
    nonnegative integer w, where the terms themselves vanish.
    """
    if w == k or z == k:
        return math.nan
    ratio = abs((k + 1) / (w - k)) * abs(z - k - 1) / abs(z - k)
    return k * (ratio - 1.0)


def binom_sinc_series(args: BinomialArgs, opts: EvalOptions = EvalOptions()):
    """Infinite sinc series sum_k C(w,k) sinc(z-k), valid for Re w > -1.

    Returns ``(Evaluation, SeriesDiagnostics)``.  The terms are summed in the
    equivalent form sin(pi z)/pi * sum_k C(w,k) (-1)^k/(z-k), which avoids
    argument reduction of sin(pi(z-k)) at large k.  The remainder decays like
    K^-(w+1); see :mod:`sincbinom.series` for the stopping rules.

    Raises
    ------
    DomainError
        If Re w <= -1.
    NoConvergence
        If ``opts.max_terms`` is exhausted.
    """
    w, z = args.w, args.z
    if not w.real > -1:
        raise DomainError("the sinc series needs Re(w) > -1")
    n = _as_nonneg_int(z)
    if n is not None:
        # sinc sifts the integer lattice: only the k = n term survives
        value = binom_int_k(w, n)
        ev = Evaluation(value, 4 * EPS * abs(value) * (n + 1), n + 1, True, Method.INFINITE_SINC_SERIES.value)
        raabe = _raabe_ratio(w, z, max(n + 2, 64))
        return ev, SeriesDiagnostics(n + 1, abs(value), 0.0, raabe)

    m = _as_nonneg_int(w, tol=0.0)
    finite = m + 1 if m is not None else None
    block = _DDSincTerms(w, z)
    ev, diag = sum_power_series(
        block, lead=w + 1.0, opts=opts, finite_terms=finite,
        scale=sinpi(z) / math.pi, method=Method.INFINITE_SINC_SERIES.value,
    )
    if diag.terms_used >= 64 and m is None:
        diag.empirical_raabe_limit = _raabe_ratio(w, z, diag.terms_used)
    return ev, diag


class _DDSincTerms:
    """Blocks of C(w,k) (-1)^k / (z-k) carried in double-double.

    The sinc series can cancel by many orders of magnitude when Im z or Im w
    is large, and a plain running product drifts by ~k eps relative; both
    would otherwise dominate the error of the sum.
    """

    def __init__(self, w: complex, z: complex):
        self.w, self.z = w, z
        self.current = _dd.from_complex(np.ones(1))  # C(w, k) at the block start

    def __call__(self, k0: int, k1: int):
        n = k1 - k0
        j = np.arange(k0, k1, dtype=float)
        wj = _dd.sub_real(_dd.from_complex(np.full(n, self.w)), j)
        ratios = _dd.div_real(wj, j + 1.0)  # C(w,j+1)/C(w,j)
        running = _dd.mul(_dd.prefix_product(ratios), self.current)
        binoms = tuple(np.concatenate([c, r[:-1]]) for c, r in zip(self.current, running))
        self.current = tuple(r[-1:] for r in running)
        sign = np.where(j % 2 == 0, 1.0, -1.0)
        inv = _dd.reciprocal(_dd.sub_real(_dd.from_complex(np.full(n, self.z)), j))
        return _dd.hi_lo(_dd.scale_sign(_dd.mul(binoms, inv), sign))


def binom_eval(args: BinomialArgs, opts: EvalOptions = EvalOptions()) -> Evaluation:
    """Dispatch to one of the evaluation routes.

    ``Method.AUTO`` uses the gamma ratio whenever w is not a negative
    integer and falls back to the sinc series otherwise.
    """
    method = opts.method
    w, z = args.w, args.z
    if method is Method.AUTO:
        method = Method.GAMMA_RATIO if not _is_neg_int(w + 1.0) else Method.INFINITE_SINC_SERIES
    if method is Method.GAMMA_RATIO:
        value = binom_gamma(w, z)
        return Evaluation(value, _gamma_error(w, z, value), 1, True, method.value)
    if method is Method.FINITE_SINC_SUM:
        m = _as_nonneg_int(w, tol=0.0)
        if m is None:
            raise DomainError("the finite sinc sum needs w to be a nonnegative integer")
        value = binom_sinc_finite(m, z)
        err = 8 * EPS * (m + 1) * max(1.0, abs(value)) * max(1.0, abs(sinpi(z)))
        return Evaluation(value, err, m + 1, True, method.value)
    ev, _ = binom_sinc_series(args, opts)
    return ev


def binom_theorem_sum(w, z, opts: EvalOptions = EvalOptions()) -> Evaluation:
    """Partial sums of sum_k C(w,k) z^k in the four regions where it converges.

    The limit is (1+z)^w on the principal branch, or 0 when z = -1.

    Raises
    ------
    DomainError
        Outside the convergence regions.
    NoConvergence
        If the term budget runs out (likely near |z| = 1 with small Re w).
    """
    w, z = complex(w), complex(z)
    r = abs(z)
    m = _as_nonneg_int(w, tol=0.0)
    method = "binomial-theorem"
    stream = BinomialStream(w)

    def powers(k0, k1):
        k = np.arange(k0, k1, dtype=float)
        if z == 0:
            return np.where(k == 0, 1.0, 0.0).astype(np.complex128)
        return np.exp(k * cmath.log(z))

    def block(k0, k1):
        return stream.take(k1 - k0) * powers(k0, k1)

    if m is not None:
        ev, _ = sum_power_series(block, None, opts, finite_terms=m + 1, method=method)
        return ev
    unit = abs(r - 1.0) <= 1e-14
    if r < 1.0 and not unit:
        def tail(k, terms):
            growth = r * (1.0 + (abs(w) + 1.0) / k)
            if growth >= 1.0:
                return math.inf
            return float(np.max(np.abs(terms[-8:]))) * growth / (1.0 - growth)

        ev, _ = sum_power_series(block, None, opts, tail_bound=tail, method=method)
        return ev
    if not unit:
        raise DomainError("|z| > 1 needs w to be a nonnegative integer")
    if abs(z + 1.0) <= 1e-14:
        if not w.real > 0:
            raise DomainError("z = -1 needs Re(w) > 0")
        ev, _ = sum_power_series(block, lead=w, opts=opts, method=method)
        return ev
    if not w.real > -1:
        raise DomainError("|z| = 1 needs Re(w) > -1")
    return _unit_circle_sum(w, z, opts, method)


def _unit_circle_sum(w: complex, z: complex, opts: EvalOptions, method: str) -> Evaluation:
    """sum C(w,k) z^k on |z| = 1, z != -1, with an exact summation-by-parts tail.

    With x = -z and a_k = C(w,k)(-1)^k, repeated summation by parts gives
    sum_{k>=K} a_k x^k = x^K/(1-x) sum_j (x/(1-x))^j D^j a_K, where the
    forward differences are D^j a_K = a_K prod_{i=1..j} (-w-i)/(K+i).
    The result is checked by doubling K.
    """
    x = -z
    q = x / (1.0 - x)
    stream = BinomialStream(w)
    head = []
    prev = None
    K = 0
    for K_next in (256 * 2**i for i in range(40)):
        if K_next > opts.max_terms:
            break
        k = np.arange(K, K_next, dtype=float)
        head.append(stream.take(K_next - K) * np.exp(1j * k * cmath.phase(z)))
        K = K_next
        a_K = complex(stream.current) * (-1.0) ** K
        term = cmath.exp(1j * K * cmath.phase(x)) / (1.0 - x) * a_K
        tail = [term]
        for j in range(1, 200):
            term *= q * (-w - j) / (K + j)
            tail.append(term)
            if abs(term) <= 1e-17 * abs(a_K) or abs(term) < 1e-300:
                break
        value = csum(np.concatenate(head)) + csum(np.array(tail))
        if prev is not None:
            err = abs(value - prev)
            if err <= opts.tolerance(value):
                return Evaluation(value, err, K, True, method)
        prev = value
    best = Evaluation(prev if prev is not None else 0j, math.inf, K, False, method)
    raise NoConvergence("unit-circle binomial sum did not settle", best)


def binom_fourier_transform(w, xi: float) -> complex:
    """(1 + e^{-2 pi i xi})^w rect(xi), principal branch; Re w > 0 or w = 0.

    On |xi| < 1/2 this is evaluated as 2^w cos^w(pi xi) e^{-i pi xi w}.
    """
    w = complex(w)
    if not (w.real > 0 or w == 0):
        raise DomainError("closed-form transform needs Re(w) > 0 or w = 0")
    xi = float(xi)
    if rect(xi) == 0.0:
        return 0j
    if w == 0:
        return 1 + 0j
    log_base = math.log(2.0 * math.cos(math.pi * xi)) - 1j * math.pi * xi
    return cmath.exp(w * log_base)


def raabe_rate(w, z, k_max: int) -> float:
    """Empirical Raabe statistic k (a_k/a_{k+1} - 1) at k = k_max.

    a_k = |C(w,k) sinc(z-k)|; the statistic tends to 2 + Re(w).
    """
    w, z = complex(w), complex(z)
    if not w.real > -1:
        raise DomainError("raabe_rate needs Re(w) > -1")
    if k_max < 64:
        raise DomainError("raabe_rate needs k_max >= 64")
    n = _as_nonneg_int(z)
    if n is not None and n <= k_max + 1:
        raise DomainError("z must not be a nonnegative integer <= k_max + 1")
    if w == k_max:
        raise DomainError("w must not equal k_max")
    return _raabe_ratio(w, z, k_max)
