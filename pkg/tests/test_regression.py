from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eastudy.errors import DegenerateRegressor, TooFewPoints
from eastudy.regression import fit_es_regression


def regression_oracle(pairs):
    """slope = cov(x,y)/var(x) in exact rationals, plus intercept and R^2."""
    n = len(pairs)
    xs = [Fraction(x) for x, _ in pairs]
    ys = [Fraction(y) for _, y in pairs]
    x_mean = sum(xs) / n
    y_mean = sum(ys) / n
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    ssr = sum((y - slope * x - intercept) ** 2 for x, y in zip(xs, ys))
    sst = sum((y - y_mean) ** 2 for y in ys)
    r2 = 1 - ssr / sst if sst > 0 else Fraction(0)
    return slope, intercept, r2


class TestFitEsRegression:
    def test_exact_line(self):
        pairs = [(x / 10, 2 * x / 10 + 1) for x in range(-5, 6)]
        fit = fit_es_regression(pairs, "toy")
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.n == 11

    def test_constant_response(self):
        pairs = [(0.1, 0.04), (0.2, 0.04), (0.5, 0.04)]
        fit = fit_es_regression(pairs)
        assert fit.slope == 0.0
        assert fit.r_squared == 0.0

    def test_matches_oracle(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for _ in range(25):
            n = int(rng.integers(5, 60))
            xs = rng.normal(0.05, 0.2, size=n)
            ys = 0.13 * xs + 0.04 + rng.normal(0, 0.05, size=n)
            pairs = [(float(x), float(y)) for x, y in zip(xs, ys)]
            fit = fit_es_regression(pairs)
            slope, intercept, r2 = regression_oracle(pairs)
            assert abs(fit.slope - float(slope)) <= 1e-10
            assert abs(fit.intercept - float(intercept)) <= 1e-10
            assert abs(fit.r_squared - float(r2)) <= 1e-10

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            fit_es_regression([(0.1, 0.2)])

    def test_degenerate_regressor(self):
        with pytest.raises(DegenerateRegressor):
            fit_es_regression([(0.3, 0.1), (0.3, 0.2), (0.3, 0.3)])

    @given(
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_r2_invariant_slope_scales_under_affine_x(self, scale, shift):
        rng = np.random.Generator(np.random.PCG64(4))
        xs = rng.normal(0, 0.3, size=40)
        ys = 0.2 * xs + rng.normal(0, 0.1, size=40)
        base = fit_es_regression([(float(x), float(y)) for x, y in zip(xs, ys)])
        moved = fit_es_regression(
            [(float(x) * scale + shift, float(y)) for x, y in zip(xs, ys)]
        )
        assert moved.r_squared == pytest.approx(base.r_squared, rel=1e-9, abs=1e-12)
        assert moved.slope == pytest.approx(base.slope / scale, rel=1e-9, abs=1e-12)
