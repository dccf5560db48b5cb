"""Executable checks of integral and series identities for C(w, x).

Each ``verify_*`` function computes both sides of one identity by
independent routes and returns an :class:`IdentityReport`.  Secondary
comparisons (a second route for the same side) are recorded as cross-checks
and spelled out in the report's diagnostics text.
"""
from __future__ import annotations

import cmath
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .binomial import _as_nonneg_int, _is_neg_int, binom_gamma
from .errors import DomainError, NoConvergence
from .kernels import Kernel
from .options import EvalOptions, Evaluation
from .quadrature import (
    QuadratureSpec,
    corollary_sum,
    theorem3_evaluate,
    theorem3_quadrature,
)
from .series import BinomialStream, sum_power_series
from .special import beta_gamma, cospi, log_gamma, si_plus_half_pi, sinc, sinpi

TOL_SERIES = 1e-6
TOL_QUADRATURE = 1e-4
FD_STEP = 1e-5


class IdentityId(str, enum.Enum):
    ANTIDERIVATIVE = "antiderivative"
    COT = "cot"
    TRIPLE_PRODUCT = "triple-product"
    RATIONAL_SIMPLE = "rational-simple"
    RATIONAL_SQUARE = "rational-square"
    SECH = "sech"
    SINC_REPRESENTATION = "sinc-representation"

    @classmethod
    def parse(cls, text: str) -> "IdentityId":
        key = text.strip().lower().replace("_", "-")
        aliases = {"cot-identity": cls.COT, "triple": cls.TRIPLE_PRODUCT, "sech-integral": cls.SECH,
                   "sinc": cls.SINC_REPRESENTATION}
        for m in cls:
            if m.value == key:
                return m
        if key in aliases:
            return aliases[key]
        raise DomainError(f"unknown identity {text!r}; choose from {', '.join(m.value for m in cls)}")


def _cjson(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class IdentityReport:
    identity_id: IdentityId
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    tolerance: float
    passed: bool
    diagnostics: str = ""
    cross_checks: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, identity_id, lhs, rhs, tolerance, notes=(), cross_checks=()):
        lhs, rhs = complex(lhs), complex(rhs)
        abs_res = abs(lhs - rhs)
        if rhs != 0:
            rel_res = abs_res / abs(rhs)
        else:
            rel_res = 0.0 if abs_res == 0 else math.inf
        passed = abs_res <= tolerance or rel_res <= tolerance
        parts = list(notes)
        for name, res, tol in cross_checks:
            flag = "ok" if res <= tol else "FAIL"
            parts.append(f"{name}: residual {res:.3e} (tol {tol:.0e}) {flag}")
        return cls(identity_id, lhs, rhs, abs_res, rel_res, tolerance, passed, "; ".join(parts),
                   tuple(cross_checks))

    @property
    def cross_checks_pass(self) -> bool:
        return all(res <= tol for _, res, tol in self.cross_checks)

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id.value,
            "lhs": _cjson(self.lhs),
            "rhs": _cjson(self.rhs),
            "abs_residual": _finite_or_none(self.abs_residual),
            "rel_residual": _finite_or_none(self.rel_residual),
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "diagnostics": self.diagnostics,
        }


def _check_w(w) -> complex:
    w = complex(w)
    if not w.real > -1:
        raise DomainError("identities need Re(w) > -1")
    return w


def _lattice(w: complex, values: Callable[[np.ndarray], np.ndarray], lead: complex,
             opts: EvalOptions, method: str, scale: complex = 1.0) -> Evaluation:
    """sum_k C(w,k) values(k), finite when w is a nonnegative integer."""
    stream = BinomialStream(w)

    def block(k0, k1):
        return stream.take(k1 - k0) * values(np.arange(k0, k1, dtype=float))

    m = _as_nonneg_int(w, tol=0.0)
    finite = m + 1 if m is not None else None
    ev, _ = sum_power_series(block, lead, opts, finite_terms=finite, period=2, scale=scale, method=method)
    return ev


# -- antiderivative -------------------------------------------------------

def binom_antiderivative(w, z, opts: EvalOptions = EvalOptions()) -> Evaluation:
    """F(z) = (1/pi) sum_k C(w,k) Si(pi z - pi k), an antiderivative of C(w, z).

    Summed in the recentred form (1/pi) sum_k C(w,k) [Si(pi(z-k)) + pi/2]
    - 2^(w-1); the bracket decays like 1/k so the remainder behaves like the
    sinc series.  F(0) = (1/pi) sum_k C(w,k) Si(-pi k).
    """
    w = _check_w(w)
    z = complex(z)

    def values(k):
        return si_plus_half_pi(np.pi * (z - k))

    ev = _lattice(w, values, w + 1.0, opts, "antiderivative", scale=1.0 / math.pi)
    shift = cmath.exp((w - 1.0) * math.log(2.0))
    return Evaluation(ev.value - shift, ev.abs_error_estimate, ev.terms_used, ev.converged, ev.method)


def verify_antiderivative(w, z, opts: EvalOptions = EvalOptions(), h: float = FD_STEP,
                          tol: float = TOL_SERIES) -> IdentityReport:
    """Central difference of :func:`binom_antiderivative` against C(w, z)."""
    w = _check_w(w)
    z = complex(z)
    # F is needed to ~tol*h so its rounding does not swamp the difference
    inner = EvalOptions(opts.method, abs_tol=min(opts.abs_tol, 0.1 * tol * h), rel_tol=1e-15,
                        max_terms=opts.max_terms)
    fp = binom_antiderivative(w, z + h, inner)
    fm = binom_antiderivative(w, z - h, inner)
    lhs = (fp.value - fm.value) / (2 * h)
    rhs = binom_gamma(w, z)
    notes = [f"h={h:g}", f"F terms={max(fp.terms_used, fm.terms_used)}"]
    if z.imag != 0:
        notes.append("complex z: experimental")
    return IdentityReport.build(IdentityId.ANTIDERIVATIVE, lhs, rhs, tol, notes)


# -- series identities ----------------------------------------------------

def _not_integer(z: complex) -> bool:
    return not (abs(z.imag) < 1e-12 and abs(z.real - round(z.real)) < 1e-12)


def verify_cot_identity(w, z, opts: EvalOptions = EvalOptions(), tol: float = TOL_SERIES) -> IdentityReport:
    """sum_k C(w,k) cos(pi z - pi k)/(pi z - pi k) = C(w,z) cot(pi z)."""
    w = _check_w(w)
    z = complex(z)
    if not _not_integer(z):
        raise DomainError("the cot identity needs z outside the integers")

    def values(k):
        return cospi(z - k) / (np.pi * (z - k))

    lhs_ev = _lattice(w, values, w + 1.0, opts, "cot-series")
    rhs = binom_gamma(w, z) * cospi(z) / sinpi(z)
    notes = [f"lhs terms={lhs_ev.terms_used}", f"lhs error estimate={lhs_ev.abs_error_estimate:.2e}"]
    if rhs == 0:
        notes.append("cot(pi z) = 0: absolute comparison")
    return IdentityReport.build(IdentityId.COT, lhs_ev.value, rhs, tol, notes)


def verify_triple_product(w, z, opts: EvalOptions = EvalOptions(), tol: float = TOL_SERIES) -> IdentityReport:
    """sum_k C(w,k) C(k,z) C(z,k) = C(w,z), with C(k,z) C(z,k) from gamma ratios."""
    w = _check_w(w)
    z = complex(z)
    if _is_neg_int(z):
        raise DomainError("the triple product needs z not a negative integer")

    def values(k):
        return binom_gamma(k, z) * binom_gamma(z, k)

    lhs_ev = _lattice(w, values, w + 1.0, opts, "triple-product")
    rhs = binom_gamma(w, z)
    notes = [f"lhs terms={lhs_ev.terms_used}", f"lhs error estimate={lhs_ev.abs_error_estimate:.2e}"]
    return IdentityReport.build(IdentityId.TRIPLE_PRODUCT, lhs_ev.value, rhs, tol, notes)


# -- integral identities --------------------------------------------------

def _quadrature(w, kernel, spec):
    ev = theorem3_quadrature(w, kernel, spec)
    return ev, [f"quadrature panels={ev.terms_used}", f"quadrature error estimate={ev.abs_error_estimate:.2e}"]


def verify_rational_simple(w, alpha, opts: EvalOptions = EvalOptions(), spec: QuadratureSpec = QuadratureSpec(),
                           tol: float = TOL_QUADRATURE) -> IdentityReport:
    """int C(w,x)/(x+alpha) dx = sum_k C(w,k)/(k+alpha) - e^{i pi alpha} B(w+1, alpha)."""
    w = _check_w(w)
    kernel = Kernel.rational_simple(alpha)
    alpha = kernel.param
    lhs_ev, notes = _quadrature(w, kernel, spec)
    series = corollary_sum(w, lambda k: 1.0 / (k + alpha), opts)
    rhs = series.value - cmath.exp(1j * math.pi * alpha) * beta_gamma(w + 1.0, alpha)
    lattice = theorem3_evaluate(w, kernel, opts, spec)
    checks = [("lattice sum vs closed form", abs(lattice.value - rhs), TOL_SERIES)]
    return IdentityReport.build(IdentityId.RATIONAL_SIMPLE, lhs_ev.value, rhs, tol, notes, checks)


def verify_rational_square(w, alpha, opts: EvalOptions = EvalOptions(), spec: QuadratureSpec = QuadratureSpec(),
                           tol: float = TOL_QUADRATURE) -> IdentityReport:
    """int C(w,x)/(x^2+alpha^2) dx
    = sum_k C(w,k)/(k^2+alpha^2) - pi/(alpha(e^{2 pi alpha}-1)) [C(w, i alpha) + C(w, -i alpha)].
    """
    w = _check_w(w)
    kernel = Kernel.rational_square(alpha)
    alpha = kernel.param
    lhs_ev, notes = _quadrature(w, kernel, spec)
    series = corollary_sum(w, lambda k: 1.0 / (k * k + alpha * alpha), opts)
    q = cmath.exp(-2 * math.pi * alpha)
    correction = math.pi * q / (alpha * (1.0 - q))
    rhs = series.value - correction * (binom_gamma(w, 1j * alpha) + binom_gamma(w, -1j * alpha))
    # intermediate form sum_k C(w,k) (1 - e^{-pi alpha}(-1)^k)/(k^2+alpha^2)
    inter = theorem3_evaluate(w, kernel, opts, spec)
    checks = [
        ("intermediate vs closed form", abs(inter.value - rhs), TOL_SERIES),
        ("intermediate vs quadrature", abs(inter.value - lhs_ev.value), TOL_QUADRATURE),
    ]
    return IdentityReport.build(IdentityId.RATIONAL_SQUARE, lhs_ev.value, rhs, tol, notes, checks)


def sech_closed_form(alpha) -> complex:
    """alpha 2^{i alpha} Gamma(i alpha/2 + 1/2) / (sqrt(pi) Gamma(i alpha/2 + 1))."""
    alpha = complex(alpha)
    u = 0.5j * alpha
    log_value = 1j * alpha * math.log(2.0) + log_gamma(u + 0.5) - log_gamma(u + 1.0) - 0.5 * math.log(math.pi)
    return alpha * cmath.exp(log_value)


def verify_sech_integral(alpha, opts: EvalOptions = EvalOptions(), spec: QuadratureSpec = QuadratureSpec(),
                         tol: float = TOL_QUADRATURE) -> IdentityReport:
    """int C(i alpha, x) sech(pi x / alpha) dx = alpha 2^{i alpha} Gamma(i alpha/2+1/2)/(sqrt(pi) Gamma(i alpha/2+1)).

    The lattice sum needs Re(i alpha) > -1, i.e. Im(alpha) < 1; otherwise
    (or if the sum runs out of terms) the left side comes from quadrature
    alone.
    """
    kernel = Kernel.sech(alpha)
    alpha = kernel.param
    w = 1j * alpha
    rhs = sech_closed_form(alpha)
    quad_ev, notes = _quadrature(w, kernel, spec)
    lhs = quad_ev.value
    checks = []
    if w.real > -1:
        try:
            lattice = theorem3_evaluate(w, kernel, opts, spec)
        except NoConvergence as exc:
            notes.append(f"lattice sum did not converge ({exc}); quadrature only")
        else:
            lhs = lattice.value
            notes.insert(0, f"lhs from lattice sum, terms={lattice.terms_used}")
            checks.append(("lattice sum vs quadrature", abs(lattice.value - quad_ev.value), TOL_QUADRATURE))
    else:
        notes.append("Im(alpha) >= 1: outside the lattice-sum domain, quadrature only")
    return IdentityReport.build(IdentityId.SECH, lhs, rhs, tol, notes, checks)


def verify_sinc_representation(w, z, opts: EvalOptions = EvalOptions(), spec: QuadratureSpec = QuadratureSpec(),
                               tol: float = TOL_SERIES) -> IdentityReport:
    """int C(w,x) sinc(x-z) dx = C(w,z): lattice sum and quadrature against the gamma ratio."""
    w = _check_w(w)
    z = complex(z)
    series = corollary_sum(w, lambda k: sinc(k - z), opts)
    rhs = binom_gamma(w, z)
    quad_ev, notes = _quadrature(w, Kernel.sinc_shift(z), spec)
    notes.insert(0, f"lhs from lattice sum, terms={series.terms_used}")
    checks = [("quadrature vs gamma ratio", abs(quad_ev.value - rhs), TOL_QUADRATURE)]
    return IdentityReport.build(IdentityId.SINC_REPRESENTATION, series.value, rhs, tol, notes, checks)


# -- battery --------------------------------------------------------------

def _cplx(rng, re_lo, re_hi, im_lo, im_hi) -> complex:
    return complex(rng.uniform(re_lo, re_hi), rng.uniform(im_lo, im_hi))


def _off_lattice(rng, lo, hi, gap=0.05) -> float:
    while True:
        x = rng.uniform(lo, hi)
        if abs(x - round(x)) >= gap:
            return x


def _sample(identity: IdentityId, rng: np.random.Generator):
    """Arguments drawn from the identity's domain (kept away from its edges)."""
    if identity is IdentityId.ANTIDERIVATIVE:
        return (_cplx(rng, 0.0, 4.0, -1.0, 1.0), rng.uniform(-3.0, 6.0))
    if identity is IdentityId.COT:
        z = complex(_off_lattice(rng, -3.0, 6.0), rng.uniform(-0.5, 0.5))
        return (_cplx(rng, -0.5, 4.0, -2.0, 2.0), z)
    if identity is IdentityId.TRIPLE_PRODUCT:
        z = complex(_off_lattice(rng, -3.0, 6.0), rng.uniform(-0.5, 0.5))
        return (_cplx(rng, -0.5, 4.0, -2.0, 2.0), z)
    if identity is IdentityId.RATIONAL_SIMPLE:
        w = _cplx(rng, -0.5, 3.0, -1.0, 1.0)
        if rng.uniform() < 0.25:
            return (w, complex(int(rng.integers(1, 5))))
        return (w, _cplx(rng, -2.0, 2.0, 0.2, 3.0))
    if identity is IdentityId.RATIONAL_SQUARE:
        return (_cplx(rng, -0.5, 3.0, -1.0, 1.0), _cplx(rng, 0.2, 3.0, -1.0, 1.0))
    if identity is IdentityId.SECH:
        return (_cplx(rng, 0.3, 3.0, -0.9, 0.9),)
    return (_cplx(rng, -0.5, 4.0, -2.0, 2.0), _cplx(rng, -6.0, 6.0, -1.0, 1.0))


_VERIFIERS = {
    IdentityId.ANTIDERIVATIVE: lambda a, o, s: verify_antiderivative(*a, opts=o),
    IdentityId.COT: lambda a, o, s: verify_cot_identity(*a, opts=o),
    IdentityId.TRIPLE_PRODUCT: lambda a, o, s: verify_triple_product(*a, opts=o),
    IdentityId.RATIONAL_SIMPLE: lambda a, o, s: verify_rational_simple(*a, opts=o, spec=s),
    IdentityId.RATIONAL_SQUARE: lambda a, o, s: verify_rational_square(*a, opts=o, spec=s),
    IdentityId.SECH: lambda a, o, s: verify_sech_integral(*a, opts=o, spec=s),
    IdentityId.SINC_REPRESENTATION: lambda a, o, s: verify_sinc_representation(*a, opts=o, spec=s),
}

_ORDER = list(IdentityId)


def _run_one(index: int, seed: int, opts: EvalOptions, spec: QuadratureSpec):
    identity = _ORDER[index % len(_ORDER)]
    rng = np.random.default_rng([seed, index])
    args = _sample(identity, rng)
    try:
        report = _VERIFIERS[identity](args, opts, spec)
    except (NoConvergence, DomainError, OverflowError, ArithmeticError) as exc:
        report = IdentityReport(identity, complex("nan"), complex("nan"), math.inf, math.inf, math.nan, False,
                                f"{type(exc).__name__}: {exc}")
    args_txt = ", ".join(repr(complex(a)) for a in args)
    report = IdentityReport(report.identity_id, report.lhs, report.rhs, report.abs_residual, report.rel_residual,
                            report.tolerance, report.passed,
                            f"sample {index} args=({args_txt}); {report.diagnostics}", report.cross_checks)
    return identity, index, report


def run_identity_battery(sample_count: int, seed: int = 0, opts: EvalOptions = EvalOptions(),
                         spec: QuadratureSpec = QuadratureSpec(), threads: int = 1) -> list[IdentityReport]:
    """Seeded sweep over all verifiers.

    Sample ``i`` goes to verifier ``i mod 7`` with arguments drawn from a
    generator seeded by ``(seed, i)``, so the reports do not depend on the
    number of worker threads.  Reports are ordered by identity, then sample
    index.  A verifier that raises yields a failing report rather than an
    exception.
    """
    if int(sample_count) != sample_count or sample_count < 1:
        raise DomainError("sample_count must be a positive integer")
    if threads < 1:
        raise DomainError("threads must be at least 1")
    indices = range(int(sample_count))
    if threads == 1:
        results = [_run_one(i, seed, opts, spec) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _run_one(i, seed, opts, spec), indices))
    results.sort(key=lambda t: (_ORDER.index(t[0]), t[1]))
    return [r for _, _, r in results]
