"""Summation machinery for slowly convergent series with power-law tails.

Every series in the package has terms whose remainder after ``K`` terms
behaves like ``sum_j c_j K^-(lead + j)`` for a known complex ``lead``.  Two
stopping rules are tried at each doubling checkpoint ``K = K0 * 2^i``:

* a plain tail bound ``2 C K^-s / s`` with ``s = Re(lead)`` and ``C`` the
  largest ``|t_k| k^(s+1)`` seen in the last half block;
* Richardson extrapolation of the checkpoint partial sums, eliminating the
  exponents ``lead, lead + 1, ...`` in turn.  Its error estimate is the
  distance between successive extrapolated values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NoConvergence
from .options import EvalOptions, Evaluation

EPS = np.finfo(float).eps
MAX_RICHARDSON_DEPTH = 8


def csum(values) -> complex:
    """Correctly rounded sum of a complex array (fsum on each part)."""
    v = np.asarray(values, dtype=np.complex128).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


class BinomialStream:
    """Yields binom(w, k) for k = 0, 1, 2, ... in blocks.

    Uses binom(w, k+1) = binom(w, k) (w - k)/(k + 1); the running value is
    carried between blocks so any number of terms can be drawn.
    """

    def __init__(self, w: complex):
        self.w = complex(w)
        self.k = 0
        self.current = 1.0 + 0.0j

    def take(self, n: int) -> np.ndarray:
        if n <= 0:
            return np.empty(0, dtype=np.complex128)
        j = np.arange(self.k, self.k + n, dtype=float)
        ratios = (self.w - j) / (j + 1.0)
        factors = np.empty(n, dtype=np.complex128)
        factors[0] = 1.0
        factors[1:] = ratios[:-1]
        vals = self.current * np.cumprod(factors)
        if not np.all(np.isfinite(vals)):
            raise OverflowError("binomial coefficient overflowed")
        self.current = vals[-1] * ratios[-1]
        self.k += n
        return vals


class Richardson:
    """Richardson table for S(K) = S + sum_j c_j K^-(lead+j), K doubling."""

    def __init__(self, lead: complex, depth: int = MAX_RICHARDSON_DEPTH):
        self.factors = [2.0 ** (complex(lead) + j) - 1.0 for j in range(depth)]
        self.depth = depth
        self.rows: list[list[complex]] = []
        self.amplification = 1.0

    def push(self, value: complex) -> None:
        row = [complex(value)]
        if self.rows:
            prev = self.rows[-1]
            for j in range(min(len(prev), self.depth)):
                row.append(row[j] + (row[j] - prev[j]) / self.factors[j])
        self.rows.append(row)
        m = len(row) - 1
        amp = 1.0
        for j in range(m):
            r = abs(self.factors[j] + 1.0)
            amp *= (r + 1.0) / max(r - 1.0, 1e-3)
        self.amplification = amp

    def best(self) -> tuple[complex, float]:
        """Deepest extrapolant and its error estimate (inf if too short)."""
        if len(self.rows) < 3:
            return self.rows[-1][-1], math.inf
        cur, prev = self.rows[-1], self.rows[-2]
        est = abs(cur[-1] - prev[-1])
        if len(cur) >= 2:
            est = max(est, abs(cur[-1] - cur[-2]) * 0.5)
        return cur[-1], est


def _unpack(result):
    """(hi, lo, rounding-relevant magnitude) from a block result."""
    if isinstance(result, tuple):
        hi, lo = result
        hi = np.asarray(hi, dtype=np.complex128)
        lo = np.asarray(lo, dtype=np.complex128)
        # double-double terms carry ~32 digits; their rounding is negligible
        return hi, lo, float(np.sum(np.abs(hi))) * EPS
    terms = np.asarray(result, dtype=np.complex128)
    return terms, np.zeros(0, dtype=np.complex128), float(np.sum(np.abs(terms)))


@dataclass
class SeriesDiagnostics:
    terms_used: int
    last_term_modulus: float
    tail_estimate: float
    empirical_raabe_limit: float
    accelerated: bool = False

    def __post_init__(self):
        self.terms_used = int(self.terms_used)
        self.last_term_modulus = float(self.last_term_modulus)
        self.tail_estimate = float(self.tail_estimate)
        self.empirical_raabe_limit = float(self.empirical_raabe_limit)
        self.accelerated = bool(self.accelerated)


def sum_power_series(
    block: Callable[[int, int], np.ndarray],
    lead: Optional[complex],
    opts: EvalOptions,
    *,
    finite_terms: Optional[int] = None,
    k0: int = 64,
    period: int = 1,
    tail_bound: Optional[Callable[[int, np.ndarray], float]] = None,
    accelerate: bool = True,
    scale: complex = 1.0,
    method: str = "series",
) -> tuple[Evaluation, SeriesDiagnostics]:
    """Sum ``sum_{k>=0} t_k`` to ``opts`` tolerance.

    ``block(k0, k1)`` returns the terms ``t_k0 .. t_{k1-1}``; it is called
    with consecutive ranges only.  ``lead`` is the leading exponent of the
    remainder (``None`` disables both power-law rules; then ``tail_bound``
    must be given).  Checkpoints are multiples of ``period``, which lets a
    remainder with a periodic phase (e.g. e^{i K phi}) look like a pure
    power family.

    A block may also return a pair ``(hi, lo)`` of arrays holding terms in
    double-double form; both parts enter the exact summation.  The reported
    value is ``scale`` times the sum, and tolerances apply to that product.

    Raises
    ------
    NoConvergence
        When ``opts.max_terms`` is reached; the best estimate is attached.
    """
    max_terms = opts.max_terms
    scale = complex(scale)
    ascale = abs(scale)
    if finite_terms is not None and finite_terms <= max_terms:
        terms, lo, mag = _unpack(block(0, finite_terms))
        value = scale * (csum(terms) + csum(lo))
        err = 4 * EPS * (mag * ascale + abs(value))
        ev = Evaluation(value, err, finite_terms, True, method)
        last = float(abs(terms[-1])) * ascale if len(terms) else 0.0
        return ev, SeriesDiagnostics(finite_terms, last, 0.0, math.nan)

    k0 = max(period, period * math.ceil(k0 / period))
    s = lead.real if lead is not None else None
    rich = Richardson(lead) if (accelerate and lead is not None) else None

    re_parts: list[float] = []
    im_parts: list[float] = []
    mag = 0.0
    k = 0
    target = min(k0, max_terms)
    best_value, best_err, best_acc = 0j, math.inf, False
    last_block = np.empty(0, dtype=np.complex128)
    pushed = 0
    while True:
        terms, lo, block_mag = _unpack(block(k, target))
        re_parts.append(math.fsum(np.concatenate([terms.real, lo.real])))
        im_parts.append(math.fsum(np.concatenate([terms.imag, lo.imag])))
        partial = complex(math.fsum(re_parts), math.fsum(im_parts))
        mag += block_mag
        half = terms[len(terms) // 2:]
        kk = np.arange(target - len(half), target, dtype=float)
        last_block = terms
        k = target
        noise = 8 * EPS * max(mag, abs(partial)) * ascale

        plain = math.inf
        if tail_bound is not None:
            plain = tail_bound(k, terms) * ascale
        elif s is not None and s > 0 and len(half):
            with np.errstate(over="ignore"):
                c = float(np.max(np.abs(half) * (kk + 1.0) ** (s + 1.0)))
            plain = 2.0 * c * k ** (-s) / s * ascale
        plain_total = plain + noise
        if plain_total < best_err:
            best_value, best_err, best_acc = scale * partial, plain_total, False

        if rich is not None and k % period == 0 and (pushed == 0 or k == 2 * pushed):
            pushed = k
            rich.push(partial)
            val, est = rich.best()
            rich_total = est * ascale + noise * rich.amplification
            if rich_total < best_err:
                best_value, best_err, best_acc = scale * val, rich_total, True

        if best_err <= opts.tolerance(best_value):
            break
        if k >= max_terms:
            ev = Evaluation(best_value, best_err, k, False, method)
            raise NoConvergence(
                f"series did not reach tolerance within {max_terms} terms "
                f"(error estimate {best_err:.3g})",
                ev,
            )
        target = min(2 * k, max_terms)

    last_mod = float(abs(last_block[-1])) * ascale if len(last_block) else 0.0
    diag = SeriesDiagnostics(k, last_mod, best_err, math.nan, best_acc)
    return Evaluation(best_value, best_err, k, True, method), diag
