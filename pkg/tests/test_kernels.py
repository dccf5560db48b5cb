import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sincbinom import DomainError, Kernel, KernelKind, sinc


def quad_complex(f, a, b, **kw):
    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-13, **kw)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff at these targets; the asserts carry the tolerance
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda t: f(t).real, a, b, **opts)[0]
        im = integrate.quad(lambda t: f(t).imag, a, b, **opts)[0]
    return complex(re, im)


def coefficient_oracle(kernel, k):
    """c_k straight from its definition, split at 0 where f^ may jump.

    QAWO (scipy's weighted rule) handles the e^{2 pi i k xi} factor.
    """
    if k == 0:
        f = lambda xi: complex(kernel.spectral(xi))
        return quad_complex(f, -0.5, 0.0) + quad_complex(f, 0.0, 0.5)
    g = lambda xi: complex(kernel.spectral(xi))
    total = 0j
    for lo, hi in ((-0.5, 0.0), (0.0, 0.5)):
        cos = quad_complex(g, lo, hi, weight="cos", wvar=2 * math.pi * k)
        sin = quad_complex(g, lo, hi, weight="sin", wvar=2 * math.pi * k)
        total += cos + 1j * sin
    return total


KERNELS = [
    Kernel.rational_simple(0.4 + 1.3j),
    Kernel.rational_simple(2),
    Kernel.rational_square(1),
    Kernel.rational_square(0.7 - 0.4j),
    Kernel.sech(1),
    Kernel.sech(2.5 + 0.6j),
    Kernel.sinc_shift(0.3),
]


class TestConstructors:
    @pytest.mark.parametrize(
        "make, arg",
        [
            (Kernel.rational_simple, 0.5),
            (Kernel.rational_simple, 1 - 0.2j),
            (Kernel.rational_simple, -2),
            (Kernel.rational_square, -1),
            (Kernel.rational_square, 2j),
            (Kernel.sech, 0),
            (Kernel.sinc_shift, float("nan")),
        ],
    )
    def test_domain(self, make, arg):
        with pytest.raises(DomainError):
            make(arg)

    def test_properties(self):
        assert Kernel.sech(1).exponential
        assert Kernel.rational_square(1).decay == 2
        assert Kernel.rational_simple(1j).decay == 1
        assert Kernel.sinc_shift(0).resonant
        assert Kernel.rational_square(1).coefficient_order == 2
        assert Kernel.sinc_shift(0).kind is KernelKind.SINC_SHIFT


class TestCoefficients:
    @pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: f"{k.kind.value}-{k.param}")
    @pytest.mark.parametrize("k", [0, 1, 2, 5, 17, -3])
    def test_against_definition(self, kernel, k):
        got = complex(kernel.coefficients(np.array([k]))[0])
        ref = coefficient_oracle(kernel, k)
        assert abs(got - ref) <= 1e-10 * max(1, abs(ref))

    def test_rational_square_unit(self):
        # (1 - e^{-pi}(-1)^k)/(k^2 + 1) at k = 1
        c1 = Kernel.rational_square(1).coefficients(np.array([1]))[0]
        assert c1 == pytest.approx((1 + math.exp(-math.pi)) / 2, rel=1e-15)

    def test_sinc_shift_is_lattice_sample(self):
        k = np.arange(-5, 6)
        assert np.allclose(Kernel.sinc_shift(0.25).coefficients(k), sinc(k - 0.25), atol=1e-16)

    @pytest.mark.parametrize("alpha", [0.3, 1, 2 + 0.5j, 3 - 0.8j])
    def test_sech_large_k_branch(self, alpha):
        # the asymptotic branch takes over at |k| = 64; check continuity with
        # the quadrature branch and against the definition well past it
        kern = Kernel.sech(alpha)
        for k in (63, 64, 65, 200, 1001):
            ref = coefficient_oracle(kern, k)
            got = complex(kern.coefficients(np.array([k]))[0])
            assert abs(got - ref) <= 1e-12 + 1e-8 * abs(ref)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.2, 4), st.floats(-2, 2), st.integers(0, 400))
    def test_even_kernels_symmetric(self, a, b, k):
        for kern in (Kernel.sech(complex(a, b)), Kernel.rational_square(complex(a, b))):
            c = kern.coefficients(np.array([k, -k]))
            # the integrand is O(1) while c_k can be tiny, hence the absolute floor
            assert abs(c[0] - c[1]) <= 1e-13 * abs(c[0]) + 1e-14


class TestSpectral:
    @pytest.mark.parametrize("alpha", [0.5, 1, 2.2])
    def test_rational_square_transform(self, alpha):
        kern = Kernel.rational_square(alpha)
        for xi in (0.0, 0.1, 0.37):
            ref = 2 * integrate.quad(lambda x: math.cos(2 * math.pi * xi * x) / (x * x + alpha**2),
                                     0, np.inf, limit=400)[0] if xi == 0 else 2 * integrate.quad(
                lambda x: 1 / (x * x + alpha**2), 0, np.inf, weight="cos", wvar=2 * math.pi * xi)[0]
            assert complex(kern.spectral(xi)) == pytest.approx(ref, rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.5, 1, 1.5 + 0.3j])
    def test_sech_transform(self, alpha):
        kern = Kernel.sech(alpha)
        for xi in (0.0, 0.2, -0.45):
            f = lambda x: complex(kern.spatial(x)) * cmath.exp(-2j * math.pi * xi * x)
            ref = quad_complex(f, -60, 0) + quad_complex(f, 0, 60)
            assert abs(complex(kern.spectral(xi)) - ref) < 1e-9

    def test_rational_simple_one_sided(self):
        kern = Kernel.rational_simple(1j)
        assert kern.spectral(-0.2) == 0
        assert abs(kern.spectral(0.2)) == pytest.approx(2 * math.pi * math.exp(-2 * math.pi * 0.2))


def shifted_sinc_table(a, n=129):
    xi = np.linspace(-0.5, 0.5, n)
    return Kernel.tabulated(xi, np.exp(-2j * math.pi * a * xi))


class TestTabulated:
    def test_reproduces_sinc_shift(self):
        kern = shifted_sinc_table(0.3)
        x = np.array([-7.2, -1.0, 0.0, 0.3, 2.5, 11.0])
        assert np.max(np.abs(kern.spatial(x) - sinc(x - 0.3))) < 1e-6

    @pytest.mark.parametrize("x", [0.7, 3.9, 4.1, 12.5, -40.0])
    def test_spline_transform_exact(self, x):
        # both branches (|x| < 4 and the by-parts form) against direct quadrature
        kern = shifted_sinc_table(-0.2, n=65)
        s = kern._spline()
        knots = kern.table_xi
        ref = sum(
            quad_complex(lambda t: complex(s(t)) * cmath.exp(2j * math.pi * t * x), lo, hi)
            for lo, hi in zip(knots[:-1], knots[1:])
        )
        assert abs(complex(kern.spatial(x)) - ref) < 1e-12

    def test_coefficients_are_samples(self):
        kern = shifted_sinc_table(0.3)
        k = np.arange(-4, 5)
        assert np.allclose(kern.coefficients(k), kern.spatial(k.astype(float)), atol=1e-15)

    def test_validation(self):
        xi = np.linspace(-0.5, 0.5, 64)
        with pytest.raises(DomainError):
            Kernel.tabulated(xi[:-1], np.ones(63))
        with pytest.raises(DomainError):
            Kernel.tabulated(np.linspace(-0.4, 0.5, 64), np.ones(64))
        bad = xi.copy()
        bad[10] = bad[9]
        with pytest.raises(DomainError):
            Kernel.tabulated(bad, np.ones(64))
        with pytest.raises(DomainError):
            Kernel.tabulated(xi, np.ones(63))

    def test_csv_round_trip(self, tmp_path):
        xi = np.linspace(-0.5, 0.5, 80)
        vals = np.exp(-2j * math.pi * 0.1 * xi)
        path = tmp_path / "fhat.csv"
        rows = "\n".join(f"{a:.17g},{v.real:.17g},{v.imag:.17g}" for a, v in zip(xi, vals))
        path.write_text("xi,re,im\n" + rows + "\n")
        kern = Kernel.from_csv(path)
        assert np.array_equal(kern.table_xi, xi)
        assert abs(kern.spatial(0.1) - 1) < 1e-6

    def test_csv_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,z\n0,1,0\n")
        with pytest.raises(DomainError, match="header"):
            Kernel.from_csv(path)
