import math
from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite import hermval
from scipy.special import airy

from onsim.grid import (
    DensitySamples,
    Grid,
    NumericalGuardError,
    airy_ai,
    hermite,
    integrate,
    sample_from_density,
    translate_samples,
)

finite = st.floats(-5, 5, allow_nan=False)


def test_default_grid_shape():
    g = Grid.default()
    assert (g.x_min, g.x_max, g.n_points) == (-12.0, 12.0, 4096)
    assert g.is_symmetric
    assert g.dx == pytest.approx(24 / 4095)
    assert g.refined().dx == pytest.approx(g.dx / 2)


@pytest.mark.parametrize("kw", [dict(x_min=1, x_max=1, n_points=10), dict(x_min=0, x_max=1, n_points=1)])
def test_grid_rejects_degenerate(kw):
    with pytest.raises(ValueError):
        Grid(**kw)


@pytest.mark.parametrize("n", [2, 3, 17, 1000])
def test_integrate_constant(n):
    assert integrate(np.ones(n), Grid(-1, 1, n)) == pytest.approx(2.0, abs=1e-14)


def test_integrate_odd_function_vanishes():
    g = Grid.default()
    assert abs(integrate(g.points, g)) < 1e-12


def test_integrate_gaussian_against_erf():
    g = Grid(-10, 10, 4001)
    oracle = math.sqrt(math.pi) * math.erf(10.0)
    assert abs(integrate(np.exp(-g.points ** 2), g) - oracle) < 1e-10


def test_integrate_length_mismatch():
    with pytest.raises(ValueError):
        integrate(np.ones(5), Grid(-1, 1, 6))


@settings(max_examples=40, deadline=None)
@given(a=finite, b=finite, s=st.floats(0.2, 3.0))
def test_integrate_linear(a, b, s):
    g = Grid(-4, 4, 257)
    f, h = np.exp(-g.points ** 2 / s), np.cos(g.points) * np.exp(-g.points ** 2)
    lhs = integrate(a * f + b * h, g)
    assert abs(lhs - (a * integrate(f, g) + b * integrate(h, g))) < 1e-10


@pytest.mark.parametrize("n,x,want", [(0, 7.3, 1.0), (3, 2.0, 40.0), (4, 1.0, -20.0)])
def test_hermite_examples(n, x, want):
    assert hermite(n, x) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 5, 12, 25])
def test_hermite_matches_numpy_series(n):
    x = np.linspace(-3, 3, 31)
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1
    np.testing.assert_allclose(hermite(n, x), hermval(x, coeffs), rtol=1e-11, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 30), x=finite)
def test_hermite_recurrence(n, x):
    lhs = hermite(n + 1, x)
    rhs = 2 * x * hermite(n, x) - 2 * n * hermite(n - 1, x)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-8 * max(1.0, abs(hermite(n, x))))


def test_hermite_negative_order():
    with pytest.raises(ValueError):
        hermite(-1, 0.0)


def test_airy_at_zero():
    oracle = 3 ** (-2 / 3) / math.gamma(2 / 3)
    assert airy_ai(0.0) == pytest.approx(oracle, abs=1e-14)
    assert airy_ai(0.0) == pytest.approx(0.3550280538, abs=1e-10)


def test_airy_decay():
    assert 0 < airy_ai(20.0) < 1e-10


def test_airy_minus_two_against_series():
    # direct Maclaurin series with a generous number of terms
    t = -2.0
    c1 = 3 ** (-2 / 3) / math.gamma(2 / 3)
    c2 = 3 ** (-1 / 3) / math.gamma(1 / 3)
    f = g = 0.0
    tf, tg = 1.0, t
    for k in range(60):
        f += tf
        g += tg
        tf *= t ** 3 / ((3 * k + 2) * (3 * k + 3))
        tg *= t ** 3 / ((3 * k + 3) * (3 * k + 4))
    assert airy_ai(t) == pytest.approx(c1 * f - c2 * g, abs=1e-10)


def test_airy_against_scipy_wide_range():
    t = np.concatenate([np.linspace(-40, 30, 1401), [-7.0, -6.999, 5.0, 5.001]])
    np.testing.assert_allclose(airy_ai(t), airy(t)[0], rtol=1e-8, atol=1e-11)


def test_airy_vectorizes_and_keeps_shape():
    t = np.array([[0.0, 1.0], [-3.0, 2.5]])
    assert airy_ai(t).shape == (2, 2)


def _normal_density(grid):
    return DensitySamples(grid, np.exp(-grid.points ** 2 / 2) / math.sqrt(2 * math.pi))


def test_sampler_median_of_symmetric_density():
    g = Grid(-8, 8, 1601)
    assert abs(sample_from_density(_normal_density(g), 0.5)) <= g.dx


def test_sampler_matches_normal_quantile():
    g = Grid(-8, 8, 1601)
    assert abs(sample_from_density(_normal_density(g), 0.8413) - 1.0) <= 2 * g.dx
    want = NormalDist().inv_cdf(0.8413)
    assert abs(sample_from_density(_normal_density(g), 0.8413) - want) < 1e-4


def test_sampler_single_bin():
    g = Grid(0, 10, 11)
    vals = np.zeros(11)
    vals[4] = 1.0
    q = sample_from_density(DensitySamples(g, vals), 0.3)
    assert abs(q - 4.0) <= g.dx


def test_sampler_errors():
    g = Grid(0, 1, 5)
    with pytest.raises(NumericalGuardError):
        sample_from_density(DensitySamples(g, np.zeros(5)), 0.2)
    with pytest.raises(ValueError):
        sample_from_density(DensitySamples(g, np.ones(5)), 1.0)


@settings(max_examples=50, deadline=None)
@given(u1=st.floats(0, 0.999999), u2=st.floats(0, 0.999999))
def test_sampler_monotone(u1, u2):
    g = Grid(-8, 8, 801)
    d = _normal_density(g)
    lo, hi = sorted((u1, u2))
    assert sample_from_density(d, lo) <= sample_from_density(d, hi)


def test_density_rejects_negative():
    with pytest.raises(ValueError):
        DensitySamples(Grid(0, 1, 3), np.array([0.1, -0.1, 0.2]))


def test_density_moments_and_window():
    g = Grid(-10, 10, 2001)
    d = DensitySamples(g, np.exp(-(g.points - 1) ** 2 / 2) / math.sqrt(2 * math.pi))
    assert d.total() == pytest.approx(1, abs=1e-10)
    assert d.mean() == pytest.approx(1, abs=1e-10)
    assert d.variance() == pytest.approx(1, abs=1e-8)
    want = NormalDist(1, 1).cdf(1.5) - NormalDist(1, 1).cdf(0.5)
    # trapezoid error ~ dx^2 / 12 * max|f''| over a unit window
    assert d.mass_between(0.5, 1.5) == pytest.approx(want, abs=1e-5)
    assert d.cdf()[0] == 0.0 and d.cdf()[-1] == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("shift", [0.0, 0.37, -1.234567, 3 * 24 / 4095, 5.5])
def test_translate_samples_against_analytic(shift):
    g = Grid.default()
    f = lambda x: np.exp(-(x - 0.3) ** 2 / 1.7) * (1 + 0.2j * x ** 3)  # noqa: E731
    np.testing.assert_allclose(translate_samples(f(g.points), g, shift), f(g.points + shift), atol=1e-13)


def test_translate_samples_extended_window_and_cubic():
    g = Grid.default()
    f = lambda x: np.exp(-x ** 2)  # noqa: E731
    ext = translate_samples(f(g.points), g, -3.0, start=-50, count=g.n_points + 100)
    x_ext = g.x_min + (np.arange(-50, g.n_points + 50)) * g.dx - 3.0
    np.testing.assert_allclose(ext, f(x_ext), atol=1e-13)
