import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tandemq import confidence_interval, normal_quantile


def mp_quantile(p: float) -> float:
    # 2p - 1 must keep the digits of p itself
    digits = 40 + math.ceil(-math.log10(min(p, 1 - p)))
    with mpmath.workdps(digits):
        return float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))


class TestNormalQuantile:
    @pytest.mark.parametrize(
        "p, expected",
        [
            (0.975, 1.959964),  # 1.95996398454005...
            (0.995, 2.575829),  # 2.57582930354890...
            (0.5, 0.0),
        ],
    )
    def test_frozen_values(self, p, expected):
        assert normal_quantile(p) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("p", [1e-300, 1e-12, 1e-6, 0.001, 0.01, 0.02425, 0.03, 0.1, 0.3, 0.49, 0.51, 0.9, 0.97575, 0.99, 0.999999])
    def test_against_high_precision_oracle(self, p):
        assert abs(normal_quantile(p) - mp_quantile(p)) < 1e-8

    def test_dense_grid_against_oracle(self):
        grid = np.linspace(1e-4, 1 - 1e-4, 501)
        worst = max(abs(normal_quantile(p) - mp_quantile(p)) for p in grid)
        assert worst < 1e-8

    # 1 - p is inexact in binary, so the far tails amplify that rounding
    @given(st.floats(1e-6, 1 - 1e-6))
    def test_antisymmetry(self, p):
        assert abs(normal_quantile(p) + normal_quantile(1 - p)) < 1e-10

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)


class TestConfidenceInterval:
    def test_reference_in_system(self):
        ci = confidence_interval(2.936, 3.867, 67, 0.05)
        assert ci.lower == pytest.approx(2.466, abs=0.002)
        assert ci.upper == pytest.approx(3.406, abs=0.002)
        assert ci.level == pytest.approx(0.95)
        assert ci.sample_size == 67

    def test_negative_lower_is_kept(self):
        ci = confidence_interval(0.075, 0.177, 67, 0.05)
        assert ci.lower == pytest.approx(-0.026, abs=0.002)
        assert ci.upper == pytest.approx(0.176, abs=0.002)
        assert ci.negative_lower

    def test_zero_variance(self):
        ci = confidence_interval(1.25, 0.0, 10, 0.1)
        assert ci.lower == ci.point == ci.upper == 1.25
        assert not ci.negative_lower

    @given(st.floats(-1e6, 1e6), st.floats(0, 1e6), st.integers(1, 10_000), st.floats(0.001, 0.5))
    def test_ordered_and_symmetric(self, mean, var, n, alpha):
        ci = confidence_interval(mean, var, n, alpha)
        assert ci.lower <= ci.point <= ci.upper
        assert abs((ci.point - ci.lower) - (ci.upper - ci.point)) < 1e-12 * max(1.0, abs(mean))

    def test_monotonicity(self):
        widths_n = [confidence_interval(0.0, 2.0, n).half_width for n in range(1, 200)]
        assert all(b < a for a, b in zip(widths_n, widths_n[1:]))
        widths_v = [confidence_interval(0.0, v, 67).half_width for v in np.linspace(0.01, 10, 100)]
        assert all(b > a for a, b in zip(widths_v, widths_v[1:]))

    @pytest.mark.parametrize(
        "kwargs",
        [dict(variance=-1.0), dict(n=0), dict(alpha=0.0), dict(alpha=1.0), dict(variance=math.inf)],
    )
    def test_domain(self, kwargs):
        args = dict(mean=1.0, variance=1.0, n=10, alpha=0.05) | kwargs
        with pytest.raises(ValueError):
            confidence_interval(**args)

    def test_coverage(self):
        rng = np.random.default_rng(20240601)
        true_mean, sd, n, reps = 3.0, 1.7, 67, 10_000
        means = rng.normal(true_mean, sd, size=(reps, n)).mean(axis=1)
        covered = 0
        for m in means:
            ci = confidence_interval(float(m), sd**2, n, 0.05)
            covered += ci.lower <= true_mean <= ci.upper
        assert abs(covered / reps - 0.95) <= 0.01
