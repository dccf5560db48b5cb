import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sincbinom import (
    DomainError,
    PoleError,
    beta_gamma,
    beta_series,
    gamma,
    log_gamma,
    reciprocal_gamma_weierstrass,
    rect,
    rgamma,
    si,
    sinc,
)

mpmath.mp.dps = 30

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def off_lattice(z, gap=1e-2):
    return abs(z.real - round(z.real)) >= gap or abs(z.imag) >= gap


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class TestGamma:
    def test_factorial(self):
        assert gamma(5) == pytest.approx(24, rel=1e-14)

    def test_half(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_reflection_at_one_plus_i(self):
        z = 1 + 1j
        lhs = gamma(z) * gamma(1 - z) * cmath.sin(math.pi * z) / math.pi
        assert abs(lhs - 1) < 1e-12

    @pytest.mark.parametrize("n", [0, -1, -7])
    def test_pole(self, n):
        with pytest.raises(PoleError):
            gamma(n)

    def test_array_input(self):
        z = np.array([1.0, 2.0, 3.5 + 1j])
        out = gamma(z)
        assert out.shape == (3,)
        assert abs(out[2] - complex(mpmath.gamma(3.5 + 1j))) < 1e-13 * abs(out[2])

    @pytest.mark.parametrize("z", [0.1 + 0.2j, 7.3 - 4j, -3.7 + 0.5j, 25 + 30j, -12.25 - 8j, 1e-3])
    def test_against_mpmath(self, z):
        assert rel(gamma(z), complex(mpmath.gamma(z))) < 1e-12

    @settings(max_examples=200, deadline=None)
    @given(finite, finite)
    def test_reflection_property(self, x, y):
        z = complex(x, y)
        if not off_lattice(z):
            return
        s = cmath.sin(math.pi * z) / math.pi
        assert abs(rgamma(z) * rgamma(1 - z) - s) <= 1e-10 * (1 + abs(s))

    @settings(max_examples=200, deadline=None)
    @given(finite, finite)
    def test_recurrence(self, x, y):
        z = complex(x, y)
        if not off_lattice(z):
            return
        assert rel(gamma(z + 1), z * gamma(z)) <= 1e-11


class TestLogGamma:
    def test_one(self):
        assert abs(log_gamma(1)) < 1e-15

    def test_big_factorial(self):
        expected = math.fsum(math.log(k) for k in range(1, 101))
        assert log_gamma(101) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(363.7393755556, abs=1e-9)

    def test_consistent_with_gamma(self):
        assert cmath.exp(log_gamma(0.5)) == pytest.approx(1.7724538509, abs=1e-10)

    @pytest.mark.parametrize("z", [-3.5, -23.5, -100.5, 2 - 40j, -7.5 + 3j, 0.01 - 0.01j])
    def test_principal_branch(self, z):
        assert abs(log_gamma(z) - complex(mpmath.loggamma(z))) < 1e-11

    def test_real_on_positive_axis(self):
        assert log_gamma(12.5).imag == 0.0


class TestWeierstrass:
    def test_zero(self):
        assert reciprocal_gamma_weierstrass(0, 10) == 0

    def test_one_slowly(self):
        assert abs(reciprocal_gamma_weierstrass(1, 10**6) - 1) < 1e-6

    def test_pole(self):
        assert abs(reciprocal_gamma_weierstrass(-1, 10**4)) < 1e-3

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-5, 5), st.floats(-3, 3))
    def test_consistency(self, x, y):
        z = complex(x, y)
        if abs(z) > 5 or not off_lattice(z, 0.1):
            return
        n = 10**5
        # the truncated product is off by about |z|^2/(2n) relative
        assert abs(reciprocal_gamma_weierstrass(z, n) * gamma(z) - 1) <= abs(z) ** 2 / n + 1e-10


class TestBeta:
    def test_values(self):
        assert beta_gamma(1, 1) == pytest.approx(1)
        assert beta_gamma(2, 3) == pytest.approx(1 / 12)
        assert beta_gamma(0.5, 0.5) == pytest.approx(math.pi)

    def test_series_single_term(self):
        ev = beta_series(1, 2.5 + 1j)
        assert ev.value == pytest.approx(1 / (2.5 + 1j), abs=1e-15)
        assert ev.terms_used <= 1 or ev.abs_error_estimate == 0

    def test_series_matches_gamma_form(self):
        assert abs(beta_series(2, 3).value - 1 / 12) < 1e-10
        p = 1.5 + 0.5j
        assert abs(beta_series(p, 2).value - beta_gamma(p, 2)) < 1e-8

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.3, 4), st.floats(-2, 2), st.floats(0.3, 4), st.floats(-2, 2))
    def test_symmetry_and_agreement(self, a, b, c, d):
        p, q = complex(a, b), complex(c, d)
        assert rel(beta_gamma(p, q), beta_gamma(q, p)) < 1e-12
        ev = beta_series(p, q, tol=1e-10)
        assert abs(ev.value - beta_gamma(p, q)) <= 1e-8


class TestSinc:
    def test_values(self):
        assert sinc(0) == 1
        assert abs(sinc(3)) < 1e-15
        assert sinc(0.5) == pytest.approx(2 / math.pi, abs=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(finite, st.floats(-3, 3))
    def test_even(self, x, y):
        z = complex(x, y)
        assert sinc(z) == sinc(-z) or abs(sinc(z) - sinc(-z)) < 1e-15 * (1 + abs(sinc(z)))

    @pytest.mark.parametrize("n", [1, -1, 2, 17, -40])
    def test_zero_set(self, n):
        assert sinc(n) == 0


class TestSi:
    def test_values(self):
        assert si(0) == 0
        assert si(math.pi) == pytest.approx(1.8519370, abs=1e-7)
        assert si(-math.pi) == pytest.approx(-1.8519370, abs=1e-7)

    @pytest.mark.parametrize("z", [0.5, 3 + 2j, 12.0, 40 - 3j, -25 + 0.1j, 7j, 100.0, -3.3 - 9j])
    def test_against_mpmath(self, z):
        ref = complex(mpmath.si(z))
        assert abs(si(z) - ref) < 1e-13 * max(1, abs(ref))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-60, 60), st.floats(-5, 5))
    def test_odd(self, x, y):
        z = complex(x, y)
        assert abs(si(z) + si(-z)) <= 1e-13 * (1 + abs(si(z)))


class TestRect:
    def test_values(self):
        assert rect(0) == 1
        assert rect(0.7) == 0
        assert rect(0.5) == 0
        assert rect(-0.5) == 0
        assert rect(0.4999) == 1

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            rect(float("nan"))
