"""Normal-theory confidence intervals and the standard normal quantile."""

from __future__ import annotations

import math
from dataclasses import dataclass

# Acklam's rational approximation to the inverse normal CDF (rel. error ~1e-9).
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425

DEFAULT_SAMPLE_SIZE = 67


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    )


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(prob: float) -> float:
    """Inverse standard normal CDF.

    Acklam's approximation followed by one Halley step against ``math.erfc``.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {prob!r}")
    if prob > 0.5:
        return -normal_quantile(1.0 - prob)
    if prob == 0.5:
        return 0.0
    x = _acklam(prob)
    err = _normal_cdf(x) - prob
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass(frozen=True)
class ConfidenceInterval:
    point: float
    lower: float
    upper: float
    level: float
    sample_size: int

    @property
    def half_width(self) -> float:
        return self.upper - self.point

    @property
    def negative_lower(self) -> bool:
        """Advisory: lower bound below zero, meaningless for nonnegative metrics."""
        return self.lower < 0.0


def confidence_interval(
    mean: float, variance: float, n: int = DEFAULT_SAMPLE_SIZE, alpha: float = 0.05
) -> ConfidenceInterval:
    """Two-sided z interval ``mean +/- z_{1-alpha/2} * sqrt(variance / n)``.

    Bounds are not clamped; check ``negative_lower`` for nonnegative metrics.
    """
    if not (math.isfinite(variance) and variance >= 0):
        raise ValueError(f"variance must be finite and >= 0, got {variance!r}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    z = normal_quantile(1.0 - alpha / 2.0)
    h = z * math.sqrt(variance / n)
    return ConfidenceInterval(mean, mean - h, mean + h, 1.0 - alpha, int(n))
