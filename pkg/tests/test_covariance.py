import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdim.covariance import (
    CovarianceModel,
    GridSpec,
    alpha_centering,
    fractal_dimension,
    gamma,
    mu_u,
    theoretical_variogram,
)
from fracdim.errors import AlphaOutOfRange, ConfigError, DegenerateIncrement
from fracdim.estimators import ols_weights
from fracdim.increments import dilate, first_difference, second_difference, square_increment


def brute_mu(model, inc, u, grid):
    """Double sum over coefficient pairs, written independently of the package."""
    dil = dilate(inc, u).coeffs
    total = 0.0
    for j, aj in dil.items():
        for k, ak in dil.items():
            lag = [(a - b) / n for a, b, n in zip(j, k, grid.n0)]
            total += aj * ak * math.exp(-model.c * math.hypot(*lag) ** model.alpha)
    return grid.n ** (model.alpha / model.dim) * total


def test_gamma_examples():
    m1 = CovarianceModel(1.0, 1.0, 1)
    assert gamma(m1, [0.0]) == 1.0
    assert gamma(m1, [1.0]) == pytest.approx(0.3678794, abs=1e-7)
    m2 = CovarianceModel(0.5, 10.0, 2)
    assert gamma(m2, [0.01, 0.0]) == pytest.approx(math.exp(-1.0), rel=1e-14)
    with pytest.raises(ConfigError):
        gamma(m2, [0.1])


def test_variogram_examples():
    m = CovarianceModel(1.0, 1.0, 1)
    assert theoretical_variogram(m, [0.0]) == 0.0
    assert theoretical_variogram(m, [0.001]) == pytest.approx(0.00199900, abs=1e-8)
    h = 1e-6
    assert theoretical_variogram(m, [h]) / (2 * h) == pytest.approx(1.0, abs=1e-4)


def test_fractal_dimension():
    assert fractal_dimension(1.0, 1) == 1.5
    assert fractal_dimension(2.0, 2) == 2.0
    assert fractal_dimension(0.5, 2) == 2.75
    for bad in (0.0, -1.0, 2.1):
        with pytest.raises(AlphaOutOfRange):
            fractal_dimension(bad, 1)


def test_model_validation_and_defaults():
    assert CovarianceModel.default(1.0, 1).c == 1.0
    assert CovarianceModel.default(1.0, 2).c == 10.0
    with pytest.raises(AlphaOutOfRange):
        CovarianceModel(2.5)
    with pytest.raises(ConfigError):
        CovarianceModel(1.0, c=0.0)
    with pytest.raises(ConfigError):
        GridSpec((100, 10))
    assert GridSpec((50, 50), 4).shape == (58, 58)


def test_mu_u_closed_form():
    model = CovarianceModel(1.0, 1.0, 1)
    grid = GridSpec((1000,))
    assert mu_u(model, first_difference(), 1, grid) == pytest.approx(1000 * 2 * (1 - math.exp(-0.001)), rel=1e-12)
    assert mu_u(model, first_difference(), 1, grid) == pytest.approx(1.99900, abs=1e-5)
    with pytest.raises(DegenerateIncrement):
        mu_u(model, {0: 0.0, 1: 0.0}, 1, grid)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.05, 1.95),
    st.floats(0.2, 20.0),
    st.sampled_from(["diff0", "diff1", "square"]),
    st.integers(1, 10),
    st.integers(20, 3000),
)
def test_mu_u_matches_brute_force(alpha, c, name, u, n):
    inc = {"diff0": first_difference(), "diff1": second_difference(), "square": square_increment()}[name]
    grid = GridSpec((n,) if inc.dim == 1 else (int(math.sqrt(n)) + 2,) * 2)
    model = CovarianceModel(alpha, c, inc.dim)
    ref = brute_mu(model, inc, u, grid)
    got = mu_u(model, inc, u, grid)
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref)) + 1e-10
    if inc.dim == 1 and name == "diff0":
        nu = theoretical_variogram(model, [u / n])
        assert got == pytest.approx(n**alpha * nu, rel=1e-9)


def test_alpha_centering():
    model = CovarianceModel(1.0, 1.0, 1)
    grid = GridSpec((1000,))
    inc = first_difference()
    L2 = ols_weights(2)
    expected = (math.log(mu_u(model, inc, 2, grid)) - math.log(mu_u(model, inc, 1, grid))) / math.log(2)
    assert alpha_centering(model, L2, inc, grid) == pytest.approx(expected, rel=1e-12)
    assert abs(alpha_centering(model, ols_weights(4), inc, grid) - 1.0) < 0.01
    # exact power law recovers alpha through the weight constraints
    L = ols_weights(6).L
    logmu = np.log(2.0 * np.arange(1, 7) ** 0.8)
    assert float(L @ logmu) == pytest.approx(0.8, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.1, 20), st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_gamma_is_bounded_correlation(alpha, c, t):
    model = CovarianceModel(alpha, c, 2)
    g = gamma(model, t)
    assert 0.0 <= g <= 1.0
    assert g == gamma(model, [-t[0], -t[1]])


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_variogram_nonnegative_monotone(alpha, h1, h2):
    model = CovarianceModel(alpha, 1.0, 1)
    lo, hi = sorted((h1, h2))
    assert 0.0 <= theoretical_variogram(model, [lo]) <= theoretical_variogram(model, [hi])


@given(st.floats(0.01, 1.99), st.floats(0.01, 1.99), st.sampled_from([1, 2]))
def test_fractal_dimension_decreasing(a, b, d):
    if a < b:
        assert fractal_dimension(a, d) > fractal_dimension(b, d)
    assert d <= fractal_dimension(a, d) < d + 1
