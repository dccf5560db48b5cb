"""Quadrature on finite intervals and on the real line, and lattice sums.

The quadrature side is an independent oracle for the series side: integrals
of C(w, x) f(x) over the real line are computed directly and compared with
sum_k C(w, k) c_k, where c_k are the Fourier coefficients of f^ on
[-1/2, 1/2].

Line integrals come in two flavours.  If a decay exponent ``s`` is declared
(the remainder beyond radius R behaves like sum_j a_j R^-(s+j), with the
oscillating phase frozen by taking R on multiples of the oscillation period)
the partial integrals over [-R, R], R = R0 2^i, are Richardson-extrapolated.
Otherwise the range is truncated and the tail is estimated from how fast the
mass of |f| falls off across successive annuli.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .binomial import _as_nonneg_int, binom_gamma
from .errors import DivergentTail, DomainError, NoConvergence
from .kernels import Kernel
from .options import EvalOptions, Evaluation
from .series import EPS, BinomialStream, Richardson, csum, sum_power_series
from .special import sinc

# QUADPACK qk15 abscissae (descending) and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 nodes on [-1, 1]; Kronrod and embedded Gauss weights aligned with them
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GW = np.zeros(15)
_GW[1::2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the quadrature routines.

    Parameters
    ----------
    panel_tol : float
        Absolute tolerance for every finite-interval integration.
    max_panels : int
        Panel budget per call.
    truncation_radius : float, optional
        Truncated mode: the cut-off radius (chosen adaptively when None).
        Accelerated mode: the first checkpoint radius.
    oscillation_period : float, optional
        Period of the integrand's oscillation.  Finite integrals start from
        panels of half this length; line-integral checkpoints are multiples
        of it.
    decay_exponent : complex, optional
        Leading exponent of the line-integral remainder.  Selects the
        accelerated mode.
    tol : float
        Target absolute error of a line integral.
    """

    panel_tol: float = 1e-10
    max_panels: int = 2 ** 16
    truncation_radius: Optional[float] = None
    oscillation_period: Optional[float] = None
    decay_exponent: Optional[complex] = None
    tol: float = 1e-8

    def __post_init__(self):
        if not self.panel_tol > 0:
            raise DomainError("panel_tol must be positive")
        if int(self.max_panels) != self.max_panels or self.max_panels < 1:
            raise DomainError("max_panels must be a positive integer")
        if self.truncation_radius is not None and not self.truncation_radius > 0:
            raise DomainError("truncation_radius must be positive")
        if self.oscillation_period is not None and not self.oscillation_period > 0:
            raise DomainError("oscillation_period must be positive")
        if not self.tol > 0:
            raise DomainError("tol must be positive")

    def with_(self, **changes) -> "QuadratureSpec":
        return replace(self, **changes)


def _gk15(f: Integrand, a: np.ndarray, b: np.ndarray):
    """Kronrod value, |Kronrod - Gauss| and the |f| mass on each panel."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=np.complex128).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand returned a non-finite value")
    kron = half * (fx @ _KW)
    gauss = half * (fx @ _GW)
    mass = np.abs(half) * (np.abs(fx) @ _KW)
    return kron, np.abs(kron - gauss), mass


@dataclass
class _Panels:
    value: complex
    error: float
    mass: float
    count: int
    converged: bool


def _adaptive(f: Integrand, edges: np.ndarray, tol: float, max_panels: int) -> _Panels:
    """Adaptive GK15 over consecutive panels given by ``edges``.

    Bisects the panels carrying the most error until the summed estimate is
    below ``tol``.  Panels whose estimate is already at the rounding level
    are not split.  Sums are taken in order of position so the result does
    not depend on the refinement history.
    """
    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    if len(a) > max_panels:
        raise NoConvergence(f"{len(a)} initial panels exceed the budget of {max_panels}")
    kron, err, mass = _gk15(f, a, b)
    count = len(a)
    while True:
        floor = 50 * EPS * mass
        total = float(np.sum(np.maximum(err, floor)))
        if total <= tol:
            break
        splittable = np.flatnonzero(err > floor)
        if splittable.size == 0:
            break
        # split the worst panels until what remains would meet the tolerance
        order = splittable[np.argsort(-err[splittable], kind="stable")]
        remaining = total - np.cumsum(err[order] - floor[order])
        n_split = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        pick = np.sort(order[:n_split])
        if count + len(pick) > max_panels:
            value = csum(kron[np.argsort(a, kind="stable")])
            ev = Evaluation(value, total, count, False, "quadrature")
            raise NoConvergence(f"panel budget {max_panels} exhausted (error {total:.3g})", ev)
        mid = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        k2, e2, m2 = _gk15(f, na, nb)
        keep = np.ones(len(a), dtype=bool)
        keep[pick] = False
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        kron = np.concatenate([kron[keep], k2])
        err = np.concatenate([err[keep], e2])
        mass = np.concatenate([mass[keep], m2])
        count += len(pick)
    order = np.argsort(a, kind="stable")
    floor = 50 * EPS * mass
    total = float(np.sum(np.maximum(err, floor)))
    return _Panels(csum(kron[order]), total, float(np.sum(mass)), count, total <= tol)


def _initial_edges(a: float, b: float, width: Optional[float]) -> np.ndarray:
    if width is None:
        return np.array([a, b])
    n = max(1, int(math.ceil((b - a) / width)))
    return np.linspace(a, b, n + 1)


def _unit_edges(lo: float, hi: float) -> np.ndarray:
    """Edges at the integers inside (lo, hi) plus the endpoints."""
    inner = np.arange(math.floor(lo) + 1, math.ceil(hi), dtype=float)
    inner = inner[(inner > lo) & (inner < hi)]
    return np.concatenate([[lo], inner, [hi]])


def integrate_finite(f: Integrand, a: float, b: float, spec: QuadratureSpec = QuadratureSpec()) -> Evaluation:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over [a, b].

    ``f`` takes a real numpy array and returns real or complex values.  When
    ``spec.oscillation_period`` is set the interval is first cut into
    half-period panels.

    Raises
    ------
    NoConvergence
        If ``spec.max_panels`` panels do not reach ``spec.panel_tol``.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError("integrate_finite needs a < b")
    width = None if spec.oscillation_period is None else 0.5 * spec.oscillation_period
    res = _adaptive(f, _initial_edges(a, b, width), spec.panel_tol, spec.max_panels)
    return Evaluation(res.value, res.error, res.count, res.converged, "quadrature")


def _annulus(f, r0: float, r1: float, tol: float, budget: int) -> _Panels:
    """Integral over [-r1, -r0] and [r0, r1] on unit panels."""
    right = _unit_edges(r0, r1)
    left = -right[::-1]
    pos = _adaptive(f, right, 0.5 * tol, budget)
    neg = _adaptive(f, left, 0.5 * tol, budget - pos.count)
    return _Panels(
        neg.value + pos.value,
        neg.error + pos.error,
        neg.mass + pos.mass,
        neg.count + pos.count,
        neg.converged and pos.converged,
    )


def _line_accelerated(f: Integrand, spec: QuadratureSpec) -> Evaluation:
    lead = complex(spec.decay_exponent)
    if not lead.real > 0:
        raise DomainError("decay exponent must have positive real part")
    period = spec.oscillation_period or 1.0
    r = spec.truncation_radius or 16.0
    r = period * math.ceil(r / period)
    piece_tol = min(spec.panel_tol, 0.1 * spec.tol)
    core = _adaptive(f, _unit_edges(-r, r), piece_tol, spec.max_panels)
    value, qerr, count = core.value, core.error, core.count
    rich = Richardson(lead)
    rich.push(value)
    best = Evaluation(value, math.inf, count, False, "quadrature-accelerated")
    masses = [core.mass]
    while True:
        budget = spec.max_panels - count
        needed = 2 * int(math.ceil(r)) + 2
        if needed > budget:
            raise NoConvergence(
                f"line integral did not reach {spec.tol:.3g} within {spec.max_panels} panels "
                f"(error estimate {best.abs_error_estimate:.3g})",
                best,
            )
        ring = _annulus(f, r, 2 * r, piece_tol, budget)
        r *= 2
        value += ring.value
        qerr += ring.error
        count += ring.count
        masses.append(ring.mass)
        if len(masses) >= 4 and masses[-1] > 2 * masses[-2] > 4 * masses[-3]:
            raise DivergentTail("integrand mass grows with the radius; declared decay does not hold")
        rich.push(value)
        val, est = rich.best()
        noise = 8 * EPS * sum(masses)
        err = est + (qerr + noise) * rich.amplification
        if err < best.abs_error_estimate:
            best = Evaluation(val, err, count, err <= spec.tol, "quadrature-accelerated")
        if best.converged:
            return best


def _line_truncated(f: Integrand, spec: QuadratureSpec) -> Evaluation:
    fixed = spec.truncation_radius
    r_final = fixed if fixed is not None else math.inf
    # annuli at R/4, R/2, R give the decay ratio used for the tail estimate
    r = max(1.0, r_final / 4) if fixed is not None else 8.0
    piece_tol = min(spec.panel_tol, 0.1 * spec.tol)
    core = _adaptive(f, _unit_edges(-r, r), piece_tol, spec.max_panels)
    value, qerr, count = core.value, core.error, core.count
    masses = [core.mass]
    while True:
        tail = math.inf
        if len(masses) >= 3:
            m1, m2 = masses[-2], masses[-1]
            if m2 == 0.0:
                tail = 0.0
            else:
                ratio = m2 / m1 if m1 > 0 else math.inf
                if ratio >= 1.0:
                    raise DivergentTail(
                        f"|f| mass does not decay with the radius (ratio {ratio:.3g}); "
                        "declare a decay exponent to use the accelerated route"
                    )
                tail = m2 * ratio / (1.0 - ratio)
        err = tail + qerr + 8 * EPS * sum(masses)
        done = r >= r_final if fixed is not None else err <= spec.tol
        if done:
            return Evaluation(value, err, count, err <= spec.tol, "quadrature-truncated")
        nxt = min(2 * r, r_final)
        budget = spec.max_panels - count
        if 2 * int(math.ceil(nxt - r)) + 2 > budget:
            ev = Evaluation(value, err, count, False, "quadrature-truncated")
            raise NoConvergence(f"line integral did not reach {spec.tol:.3g} within {spec.max_panels} panels", ev)
        ring = _annulus(f, r, nxt, piece_tol, budget)
        value += ring.value
        qerr += ring.error
        count += ring.count
        masses.append(ring.mass)
        r = nxt


def integrate_line(f: Integrand, spec: QuadratureSpec = QuadratureSpec()) -> Evaluation:
    """Integral of ``f`` over the real line.

    With ``spec.decay_exponent`` set, partial integrals over [-R, R] on
    unit panels are Richardson-extrapolated in R (the oscillatory
    integrands met here decay only algebraically).  Without it the range is
    truncated and a geometric tail estimate from the |f| mass of the outer
    annuli is added to the error.

    Raises
    ------
    NoConvergence
        Panel budget exhausted; the best estimate is attached.
    DivergentTail
        The |f| mass does not fall off with the radius.
    """
    if spec.decay_exponent is not None:
        return _line_accelerated(f, spec)
    return _line_truncated(f, spec)


# -- Fourier side ---------------------------------------------------------

def _frequency_period(xi: float, max_den: int = 64) -> int:
    """Smallest even P with P*xi an integer (so e^{-2 pi i xi x} repeats)."""
    frac = Fraction(xi).limit_denominator(max_den)
    if abs(float(frac) - xi) > 1e-12:
        raise DomainError(f"xi = {xi} is not a rational with denominator <= {max_den}")
    return 2 * frac.denominator


def fourier_pair_quadrature(w, xi: float, spec: QuadratureSpec = QuadratureSpec()) -> Evaluation:
    """int C(w, x) e^{-2 pi i xi x} dx by accelerated quadrature.

    Requires Re(w) > -1 and ``xi`` rational with a small denominator, so
    that checkpoint radii can be chosen on a common period.
    """
    w = complex(w)
    xi = float(xi)
    if not w.real > -1:
        raise DomainError("the Fourier integral needs Re(w) > -1")
    lead = w if abs(abs(xi) - 0.5) < 1e-15 else w + 1.0
    period = _frequency_period(xi)
    radius = spec.truncation_radius or max(16.0, 4 * abs(w) ** 2)

    def integrand(x):
        return binom_gamma(w, x) * np.exp(-2j * np.pi * xi * x)

    return integrate_line(
        integrand,
        spec.with_(decay_exponent=lead, oscillation_period=period, truncation_radius=radius),
    )


def fourier_coefficient(fhat, k: int, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """int_{-1/2}^{1/2} fhat(xi) e^{2 pi i xi k} dxi by adaptive quadrature.

    ``fhat`` is a callable or a :class:`Kernel` (its ``spectral`` method is
    used).  Panels are a fraction of the oscillation period 1/|k|.
    """
    g = fhat.spectral if isinstance(fhat, Kernel) else fhat
    k = int(k)

    def integrand(xi):
        return np.asarray(g(xi), dtype=np.complex128) * np.exp(2j * np.pi * k * xi)

    period = 1.0 / abs(k) if k else None
    # split at 0 so a kink or jump there (rational kernels) is a panel edge
    s = spec.with_(oscillation_period=period)
    left = integrate_finite(integrand, -0.5, 0.0, s)
    right = integrate_finite(integrand, 0.0, 0.5, s)
    if not (left.converged and right.converged):
        raise NoConvergence("Fourier coefficient quadrature did not converge")
    return complex(left.value + right.value)


@dataclass(frozen=True)
class Projection:
    """Both sides of int f(x) sinc(x - a) dx = int_{-1/2}^{1/2} f^ e^{2 pi i xi a}."""

    value: complex
    spectral: Evaluation
    spatial: Optional[Evaluation]
    residual: float


def _product_lead(kernel: Kernel, other_decay: complex, other_resonant: bool = True) -> Optional[complex]:
    """Remainder exponent for int kernel(x) g(x) with |g| ~ |x|^-other_decay oscillating."""
    if kernel.exponential:
        return None
    beat = kernel.resonant and other_resonant
    return other_decay + kernel.decay - (1.0 if beat else 0.0)


def sinc_project(kernel: Kernel, a: float, spec: QuadratureSpec = QuadratureSpec(), both: bool = True) -> Projection:
    """Spectral side of the Plancherel bridge, with the spatial side as a check."""
    a = float(a)

    def spectral_integrand(xi):
        return kernel.spectral(xi) * np.exp(2j * np.pi * xi * a)

    s = spec.with_(oscillation_period=1.0 / max(abs(a), 1.0))
    left = integrate_finite(spectral_integrand, -0.5, 0.0, s)
    right = integrate_finite(spectral_integrand, 0.0, 0.5, s)
    spectral = Evaluation(
        left.value + right.value,
        left.abs_error_estimate + right.abs_error_estimate,
        left.terms_used + right.terms_used,
        left.converged and right.converged,
        "quadrature",
    )
    spatial = None
    residual = math.nan
    if both:
        lead = _product_lead(kernel, 1.0)
        line_spec = spec.with_(decay_exponent=lead, oscillation_period=2.0 if lead is not None else None)

        def spatial_integrand(x):
            return kernel.spatial(x) * sinc(x - a)

        spatial = integrate_line(spatial_integrand, line_spec)
        residual = abs(spatial.value - spectral.value)
    return Projection(spectral.value, spectral, spatial, residual)


# -- series side ----------------------------------------------------------

def _check_w(w: complex) -> complex:
    w = complex(w)
    if not w.real > -1:
        raise DomainError("the lattice series needs Re(w) > -1")
    return w


def _binomial_lattice_sum(w: complex, values: Callable[[np.ndarray], np.ndarray], lead: complex,
                          opts: EvalOptions, method: str) -> Evaluation:
    stream = BinomialStream(w)

    def block(k0, k1):
        k = np.arange(k0, k1)
        return stream.take(k1 - k0) * values(k)

    m = _as_nonneg_int(w, tol=0.0)
    finite = m + 1 if m is not None else None
    ev, _ = sum_power_series(block, lead, opts, finite_terms=finite, period=2, method=method)
    return ev


def theorem3_evaluate(w, kernel: Kernel, opts: EvalOptions = EvalOptions(),
                      spec: QuadratureSpec = QuadratureSpec()) -> Evaluation:
    """int C(w, x) f(x) dx as the lattice sum sum_k C(w, k) c_k.

    ``c_k`` are the Fourier coefficients of the kernel's transform on
    [-1/2, 1/2].  The sum uses the same stopping rules as the sinc series.
    ``spec`` is accepted for symmetry with the quadrature routes.
    """
    w = _check_w(w)
    lead = w + kernel.coefficient_order
    return _binomial_lattice_sum(w, kernel.coefficients, lead, opts, "lattice-sum")


def corollary_sum(w, g: Callable[[np.ndarray], np.ndarray], opts: EvalOptions = EvalOptions(),
                  lead: Optional[complex] = None) -> Evaluation:
    """sum_k C(w, k) g(k) for g bandlimited to [-1/2, 1/2].

    This equals int C(w, x) g(x) dx.  ``g`` receives an integer array.  The
    remainder is assumed to decay like K^-(w+1) unless ``lead`` says otherwise.
    """
    w = _check_w(w)
    if lead is None:
        lead = w + 1.0

    def values(k):
        return np.asarray(g(k.astype(float)), dtype=np.complex128)

    return _binomial_lattice_sum(w, values, complex(lead), opts, "lattice-sum")


def theorem3_quadrature(w, kernel: Kernel, spec: QuadratureSpec = QuadratureSpec()) -> Evaluation:
    """The integral side of :func:`theorem3_evaluate`, by line quadrature."""
    w = complex(w)
    lead = _product_lead(kernel, w + 1.0)
    line_spec = spec
    if lead is not None:
        radius = spec.truncation_radius or max(16.0, 4 * abs(w) ** 2)
        line_spec = spec.with_(decay_exponent=lead, oscillation_period=2.0, truncation_radius=radius)

    def integrand(x):
        return binom_gamma(w, x) * kernel.spatial(x)

    return integrate_line(integrand, line_spec)
