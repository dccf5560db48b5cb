"""Evaluation options and the result record returned by numerical routes."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError


class Method(str, enum.Enum):
    GAMMA_RATIO = "gamma-ratio"
    FINITE_SINC_SUM = "finite-sum"
    INFINITE_SINC_SERIES = "sinc-series"
    AUTO = "auto"

    @classmethod
    def parse(cls, text: str) -> "Method":
        aliases = {
            "gamma": cls.GAMMA_RATIO,
            "gammaratio": cls.GAMMA_RATIO,
            "finitesincsum": cls.FINITE_SINC_SUM,
            "finite": cls.FINITE_SINC_SUM,
            "infinitesincseries": cls.INFINITE_SINC_SERIES,
            "series": cls.INFINITE_SINC_SERIES,
        }
        key = text.strip().lower()
        for m in cls:
            if m.value == key:
                return m
        try:
            return aliases[key.replace("-", "").replace("_", "")]
        except KeyError:
            raise DomainError(f"unknown method {text!r}") from None


@dataclass(frozen=True)
class EvalOptions:
    method: Method = Method.AUTO
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_terms: int = 10**6

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")

    def tolerance(self, value: complex) -> float:
        """Effective absolute tolerance for a result of size ``|value|``."""
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class Evaluation:
    """A computed value with its error estimate and the work it took."""

    value: complex
    abs_error_estimate: float
    terms_used: int
    converged: bool
    method: str = ""

    def __post_init__(self):
        # normalise numpy scalars so results serialise cleanly
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "abs_error_estimate", float(self.abs_error_estimate))
        object.__setattr__(self, "terms_used", int(self.terms_used))
        object.__setattr__(self, "converged", bool(self.converged))

    def to_dict(self) -> dict:
        return {
            "value": {"re": self.value.real, "im": self.value.imag},
            "abs_error_estimate": self.abs_error_estimate,
            "terms_used": self.terms_used,
            "converged": self.converged,
            "method": self.method,
        }
