import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from fracdim.errors import ConfigError
from fracdim.transforms import (
    CHI_SQUARED,
    EXPONENTIAL,
    IDENTITY,
    UNIFORM,
    affine,
    lognormal,
    parse_transform,
    std_normal_cdf,
    std_normal_quantile,
)

mpmath.mp.dps = 40


def phi_oracle(x):
    # quadrature of the density, independent of erfc
    x = mpmath.mpf(x)
    dens = lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi)  # noqa: E731
    return float(mpmath.mpf(0.5) + mpmath.quad(dens, [0, x]))


def test_cdf_examples():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021049, abs=1e-10)
    assert abs(std_normal_cdf(1.96) - phi_oracle(1.96)) <= 1e-12


@pytest.mark.parametrize("x", [-8.0, -5.3, -2.0, -1e-3, 0.4, 1.0, 3.7, 6.5])
def test_cdf_accuracy(x):
    assert abs(std_normal_cdf(x) - phi_oracle(x)) <= 1e-12


@given(st.floats(-40, 40))
def test_cdf_reflection(x):
    assert std_normal_cdf(-x) + std_normal_cdf(x) == 1.0 or abs(std_normal_cdf(-x) + std_normal_cdf(x) - 1.0) <= 1e-16


@given(st.floats(1e-6, 1 - 1e-6))
def test_quantile_round_trip(q):
    assert abs(std_normal_cdf(std_normal_quantile(q)) - q) <= 1e-9


def test_apply_examples():
    assert CHI_SQUARED(2.0) == 4.0
    assert lognormal(4)(0.0) == 1.0
    assert UNIFORM(0.0) == 0.5
    assert IDENTITY(1.25) == 1.25
    assert affine(2.0, -1.0)(3.0) == 5.0
    # guarded tail: 1 - Phi(40) rounds to zero but -log Phi(-40) is finite
    assert np.isfinite(EXPONENTIAL(40.0)) and EXPONENTIAL(40.0) > 800
    assert EXPONENTIAL(0.0) == pytest.approx(np.log(2.0), rel=1e-15)


def test_monotonicity():
    x = np.linspace(-6, 6, 1001)
    for g in (UNIFORM, EXPONENTIAL, lognormal(1.0)):
        assert np.all(np.diff(g(x)) > 0)
    y = CHI_SQUARED(x)
    assert not (np.all(np.diff(y) >= 0) or np.all(np.diff(y) <= 0))


def test_distributional_checks():
    z = np.random.default_rng(11).standard_normal(10_000)
    u = UNIFORM(z)
    assert np.all((u > 0) & (u < 1))
    assert stats.kstest(u, "uniform").pvalue > 0.01
    e = EXPONENTIAL(z)
    assert abs(e.mean() - 1.0) <= 4 * e.std(ddof=1) / 100


def test_parse_and_tags():
    for text in ("identity", "uniform", "exp1", "chisq1", "lognormal:4", "affine:2,-1.5"):
        assert parse_transform(text).tag == text
    assert parse_transform("lognormal:4").label == "Log-N(4)"
    assert parse_transform("exp1").label == "Exp(1)"
    assert IDENTITY.is_affine and affine(3, 1).is_affine and not UNIFORM.is_affine
    for bad in ("cube", "affine:0,1", "lognormal:-1", "affine:1"):
        with pytest.raises(ConfigError):
            parse_transform(bad)
