"""Integration kernels f with their Fourier transforms on [-1/2, 1/2].

Transform convention: f^(xi) = int f(x) exp(-2 pi i xi x) dx.  Each kernel
provides

* ``spatial(x)``      -- f(x) on the real line,
* ``spectral(xi)``    -- f^(xi) for |xi| <= 1/2,
* ``coefficients(k)`` -- c_k = int_{-1/2}^{1/2} f^(xi) exp(2 pi i xi k) dxi.

The coefficients are what multiply C(w, k) when an integral of C(w, x) f(x)
is turned into a lattice sum.
"""
from __future__ import annotations

import cmath
import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError
from .special import _as_complex, _out, sinc

MIN_TABLE_POINTS = 64

# Gauss-Legendre rule reused by the low-order coefficient quadrature
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


class KernelKind(str, enum.Enum):
    RATIONAL_SIMPLE = "rational-simple"
    RATIONAL_SQUARE = "rational-square"
    SECH = "sech"
    SINC_SHIFT = "sinc-shift"
    TABULATED = "tabulated"


def _sech(u):
    """sech(u) for complex arrays without overflow."""
    s = np.where(u.real >= 0, 1.0, -1.0)
    e = np.exp(-2.0 * s * u)
    return 2.0 * np.exp(-s * u) / (1.0 + e)


def _panel_nodes(lo: float, hi: float, panels: int):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    wts = (half[:, None] * _GL_W[None, :]).ravel()
    return x, wts


def _gl_coefficients(g, k: np.ndarray) -> np.ndarray:
    """c_k by composite Gauss-Legendre; panels resolve the largest k."""
    kmax = float(np.max(np.abs(k))) if k.size else 0.0
    panels = max(16, int(math.ceil(kmax)) + 1)
    xi, wts = _panel_nodes(-0.5, 0.5, panels)
    gv = g(xi) * wts
    out = np.empty(k.shape, dtype=np.complex128)
    for i, kk in enumerate(k.ravel()):
        out.flat[i] = np.sum(gv * np.exp(2j * np.pi * kk * xi))
    return out


def _taylor_at(g, x0: float, radius: float, n: int, points: int = 64):
    """Taylor coefficients a_0..a_{n-1} of an analytic g about x0 (Cauchy/FFT)."""
    theta = 2 * np.pi * np.arange(points) / points
    vals = g(x0 + radius * np.exp(1j * theta))
    a = np.fft.fft(vals) / points
    return a[:n] / radius ** np.arange(n)


def _asymptotic_coefficients(g, k: np.ndarray, radius: float, terms: int = 24):
    """c_k for |k| large by repeated integration by parts.

    int_{-1/2}^{1/2} g e^{i w xi} = (-1)^k sum_n (-1)^n [g^(n)]_{-1/2}^{1/2} / (i w)^(n+1)
    with w = 2 pi k.  Derivatives come from Cauchy integrals on circles of
    the given radius, which must stay inside the region of analyticity.
    """
    ap = _taylor_at(g, 0.5, radius, terms)
    am = _taylor_at(g, -0.5, radius, terms)
    fact = np.array([math.factorial(n) for n in range(terms)], dtype=float)
    jumps = (ap - am) * fact * (-1.0) ** np.arange(terms)
    iw = 2j * np.pi * k.astype(float)
    total = np.zeros(k.shape, dtype=np.complex128)
    power = 1.0 / iw
    for n in range(terms):
        total += jumps[n] * power
        power = power / iw
    return np.where(k % 2 == 0, 1.0, -1.0) * total


@dataclass(frozen=True)
class Kernel:
    """One of the built-in kernels, or a tabulated transform.

    Build instances with the class methods (``Kernel.sech(1)``...); the
    parameter conditions are checked there.
    """

    kind: KernelKind
    param: complex = 0j
    table_xi: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    table_val: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational_simple(cls, alpha) -> "Kernel":
        """f(x) = 1/(x + alpha); Im(alpha) > 0 or alpha a positive integer."""
        alpha = complex(alpha)
        is_pos_int = alpha.imag == 0 and alpha.real >= 1 and alpha.real == round(alpha.real)
        if not (alpha.imag > 0 or is_pos_int):
            raise DomainError("rational-simple kernel needs Im(alpha) > 0 or alpha in {1, 2, ...}")
        return cls(KernelKind.RATIONAL_SIMPLE, alpha)

    @classmethod
    def rational_square(cls, alpha) -> "Kernel":
        """f(x) = 1/(x^2 + alpha^2); Re(alpha) > 0."""
        alpha = complex(alpha)
        if not alpha.real > 0:
            raise DomainError("rational-square kernel needs Re(alpha) > 0")
        return cls(KernelKind.RATIONAL_SQUARE, alpha)

    @classmethod
    def sech(cls, alpha) -> "Kernel":
        """f(x) = sech(pi x / alpha); Re(alpha) > 0."""
        alpha = complex(alpha)
        if not alpha.real > 0:
            raise DomainError("sech kernel needs Re(alpha) > 0")
        return cls(KernelKind.SECH, alpha)

    @classmethod
    def sinc_shift(cls, a) -> "Kernel":
        """f(x) = sinc(x - a)."""
        a = complex(a)
        if not cmath.isfinite(a):
            raise DomainError("shift must be finite")
        return cls(KernelKind.SINC_SHIFT, a)

    @classmethod
    def tabulated(cls, xi, values) -> "Kernel":
        """Bandlimited f given by samples of f^ on [-1/2, 1/2].

        The samples are interpolated by a cubic spline; the grid must be
        strictly increasing, cover both endpoints and have at least
        ``MIN_TABLE_POINTS`` points.
        """
        xi = np.asarray(xi, dtype=float)
        values = np.asarray(values, dtype=np.complex128)
        if xi.ndim != 1 or xi.shape != values.shape:
            raise DomainError("table needs matching one-dimensional xi and values")
        if xi.size < MIN_TABLE_POINTS:
            raise DomainError(f"table needs at least {MIN_TABLE_POINTS} points")
        if np.any(np.diff(xi) <= 0):
            raise DomainError("table xi must be strictly increasing")
        if abs(xi[0] + 0.5) > 1e-12 or abs(xi[-1] - 0.5) > 1e-12:
            raise DomainError("table xi must run from -0.5 to 0.5")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(values))):
            raise DomainError("table entries must be finite")
        return cls(KernelKind.TABULATED, 0j, xi, values)

    @classmethod
    def from_csv(cls, path) -> "Kernel":
        """Read a tabulated transform from a CSV file with header ``xi,re,im``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            if header != ["xi", "re", "im"]:
                raise DomainError(f"expected CSV header xi,re,im, got {','.join(header)}")
            rows = [r for r in reader if r and any(c.strip() for c in r)]
        try:
            data = np.array([[float(c) for c in r] for r in rows], dtype=float)
        except ValueError as exc:
            raise DomainError(f"bad number in {path}: {exc}") from None
        if data.ndim != 2 or data.shape[1] != 3:
            raise DomainError("each CSV row needs three fields")
        return cls.tabulated(data[:, 0], data[:, 1] + 1j * data[:, 2])

    # -- properties used by the summation / quadrature policies -----------
    @property
    def exponential(self) -> bool:
        """True when |f(x)| decays exponentially."""
        return self.kind is KernelKind.SECH

    @property
    def decay(self) -> int:
        """Algebraic decay order d in |f(x)| ~ |x|^-d (0 for exponential kernels)."""
        return {KernelKind.RATIONAL_SQUARE: 2}.get(self.kind, 0 if self.exponential else 1)

    @property
    def resonant(self) -> bool:
        """f oscillates like e^{+-i pi x}, beating against C(w, x)."""
        return self.kind in (KernelKind.SINC_SHIFT, KernelKind.TABULATED)

    @property
    def coefficient_order(self) -> int:
        """|c_k| = O(k^-order)."""
        return 2 if self.kind in (KernelKind.RATIONAL_SQUARE, KernelKind.SECH) else 1

    # -- evaluations ------------------------------------------------------
    def spatial(self, x):
        """f(x)."""
        arr, scalar = _as_complex(x)
        a = self.param
        if self.kind is KernelKind.RATIONAL_SIMPLE:
            out = 1.0 / (arr + a)
        elif self.kind is KernelKind.RATIONAL_SQUARE:
            out = 1.0 / (arr * arr + a * a)
        elif self.kind is KernelKind.SECH:
            out = _sech(np.pi * arr / a)
        elif self.kind is KernelKind.SINC_SHIFT:
            out = sinc(arr - a)
        else:
            if np.any(arr.imag != 0):
                raise DomainError("tabulated kernels are evaluated on the real line only")
            out = self._spline_transform(arr.real)
        return _out(np.asarray(out, dtype=np.complex128), scalar)

    def spectral(self, xi):
        """f^(xi) on [-1/2, 1/2] (zero outside for the tabulated kernel)."""
        xi = np.asarray(xi, dtype=float)
        a = self.param
        if self.kind is KernelKind.RATIONAL_SIMPLE:
            return np.where(xi > 0, -2j * np.pi * np.exp(2j * np.pi * a * xi), 0j)
        if self.kind is KernelKind.RATIONAL_SQUARE:
            return (np.pi / a) * np.exp(-2 * np.pi * a * np.abs(xi))
        if self.kind is KernelKind.SECH:
            return a * _sech(np.pi * a * xi + 0j)
        if self.kind is KernelKind.SINC_SHIFT:
            return np.exp(-2j * np.pi * a * xi) * (np.abs(xi) < 0.5)
        inside = np.abs(xi) <= 0.5
        return np.where(inside, self._spline()(np.clip(xi, -0.5, 0.5)), 0j)

    def coefficients(self, k) -> np.ndarray:
        """c_k for an integer array k (closed forms where known)."""
        k = np.asarray(k)
        kf = k.astype(float)
        a = self.param
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        if self.kind is KernelKind.RATIONAL_SIMPLE:
            return (1.0 - sign * cmath.exp(1j * math.pi * a)) / (kf + a)
        if self.kind is KernelKind.RATIONAL_SQUARE:
            return (1.0 - cmath.exp(-math.pi * a) * sign) / (kf * kf + a * a)
        if self.kind is KernelKind.SINC_SHIFT:
            return np.asarray(sinc(kf - a), dtype=np.complex128)
        if self.kind is KernelKind.TABULATED:
            return self._spline_transform(kf)
        return self._sech_coefficients(k)

    # -- helpers ----------------------------------------------------------
    def _sech_coefficients(self, k: np.ndarray) -> np.ndarray:
        out = np.empty(k.shape, dtype=np.complex128)
        small = np.abs(k) < 64
        if np.any(small):
            out[small] = _gl_coefficients(self.spectral, k[small])
        if np.any(~small):
            # poles of sech(pi alpha xi) sit at xi = i (m + 1/2) / alpha
            m = np.arange(-8, 8) + 0.5
            poles = 1j * m / self.param
            dist = min(np.min(np.abs(poles - 0.5)), np.min(np.abs(poles + 0.5)))
            radius = min(0.5 * dist, 0.5)
            out[~small] = _asymptotic_coefficients(
                lambda z: self.param * _sech(np.pi * self.param * z), k[~small], radius
            )
        return out

    def _spline(self) -> CubicSpline:
        cached = self.__dict__.get("_spline_cache")
        if cached is None:
            cached = CubicSpline(self.table_xi, self.table_val)
            object.__setattr__(self, "_spline_cache", cached)
        return cached

    def _spline_transform(self, x: np.ndarray) -> np.ndarray:
        """int_{-1/2}^{1/2} s(xi) e^{2 pi i xi x} dxi for the interpolating spline s."""
        s = self._spline()
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=np.complex128)
        near = np.abs(x) < 4.0
        if np.any(near):
            # direct Gauss-Legendre on each spline interval
            knots = self.table_xi
            h = 0.5 * np.diff(knots)
            mid = 0.5 * (knots[1:] + knots[:-1])
            xi = (mid[:, None] + h[:, None] * _GL_X[None, :]).ravel()
            wts = (h[:, None] * _GL_W[None, :]).ravel()
            sv = s(xi) * wts
            xs = x[near]
            out[near] = np.exp(2j * np.pi * np.outer(xs, xi)) @ sv
        far = ~near
        if np.any(far):
            # three integrations by parts; s''' is piecewise constant
            xs = x[far]
            iw = 2j * np.pi * xs
            ep, em = np.exp(iw * 0.5), np.exp(-iw * 0.5)
            total = np.zeros(xs.shape, dtype=np.complex128)
            for n in range(3):
                dn = s.derivative(n) if n else s
                jump = dn(0.5) * ep - dn(-0.5) * em
                total += (-1) ** n * jump / iw ** (n + 1)
            d3 = s.c[0] * 6.0  # third derivative on each interval
            e = np.exp(np.outer(iw, self.table_xi))
            total -= (e[:, 1:] - e[:, :-1]) @ d3 / iw ** 4
            out[far] = total
        return out
