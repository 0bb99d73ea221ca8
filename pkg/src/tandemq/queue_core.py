"""Steady-state analysis of a single M/M/c station with unlimited waiting room.

Time is in minutes and rates are per minute throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

# Accumulated Erlang terms are rescaled by this factor when they grow past it.
_RESCALE = 1e250


class UnstableStationError(ValueError):
    """Raised when a station has traffic intensity >= 1."""

    def __init__(self, params: "QueueParams", label: str | None = None):
        self.params = params
        self.label = label
        phi = traffic_intensity(params)
        where = f"{label}: " if label else ""
        super().__init__(
            f"{where}unstable station (lambda={params.lam:g}, mu={params.mu:g}, "
            f"c={params.servers}, traffic intensity={phi:.6g} >= 1)"
        )


@dataclass(frozen=True)
class QueueParams:
    """One M/M/c station: arrival rate, per-server service rate, server count."""

    lam: float
    mu: float
    servers: int

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"arrival rate must be finite and >= 0, got {self.lam!r}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"service rate must be finite and > 0, got {self.mu!r}")
        if isinstance(self.servers, bool) or int(self.servers) != self.servers or self.servers < 1:
            raise ValueError(f"server count must be a positive integer, got {self.servers!r}")
        object.__setattr__(self, "servers", int(self.servers))

    @property
    def offered_load(self) -> float:
        return self.lam / self.mu


class Stability(NamedTuple):
    stable: bool
    intensity: float


@dataclass(frozen=True)
class StationMetrics:
    params: QueueParams
    traffic_intensity: float
    delay_probability: float
    empty_probability: float
    mean_queue_length: float
    conditional_queue_length: float
    conditional_wait: float
    mean_wait: float
    mean_service_time: float
    mean_busy_servers: float
    mean_in_system: float
    mean_sojourn: float
    util_single: float
    util_system: float
    util_overall: float


@dataclass(frozen=True)
class VarianceSet:
    var_in_system: float
    var_queue_length: float
    var_sojourn: float
    var_wait: float


def traffic_intensity(p: QueueParams) -> float:
    return p.lam / (p.servers * p.mu)


def check_stability(p: QueueParams) -> Stability:
    phi = traffic_intensity(p)
    return Stability(phi < 1.0, phi)


def _require_stable(p: QueueParams) -> float:
    phi = traffic_intensity(p)
    if not phi < 1.0:
        raise UnstableStationError(p)
    return phi


def _erlang_terms(a: float, c: int) -> tuple[float, float, float]:
    """Return ``(sum_{n<c} a^n/n!, a^c/c!, log_scale)``.

    Both values are divided by ``exp(log_scale)``; the factor cancels in ratios.
    """
    partial = 0.0
    term = 1.0
    log_scale = 0.0
    for n in range(c):
        partial += term
        term *= a / (n + 1)
        if term > _RESCALE:
            partial /= _RESCALE
            term /= _RESCALE
            log_scale += math.log(_RESCALE)
    return partial, term, log_scale


def erlang_c(p: QueueParams) -> float:
    """Probability that an arriving customer has to wait (Erlang C)."""
    phi = _require_stable(p)
    partial, top, _ = _erlang_terms(p.offered_load, p.servers)
    return top / ((1.0 - phi) * partial + top)


def empty_probability(p: QueueParams) -> float:
    phi = _require_stable(p)
    partial, top, log_scale = _erlang_terms(p.offered_load, p.servers)
    return math.exp(-log_scale) / (partial + top / (1.0 - phi))


def stationary_pmf(p: QueueParams, n: int) -> float:
    """Stationary probability of exactly ``n`` customers in the station."""
    phi = _require_stable(p)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    p0 = empty_probability(p)
    a, c = p.offered_load, p.servers
    if a == 0.0:
        return p0 if n == 0 else 0.0
    if n < c:
        log_p = n * math.log(a) - math.lgamma(n + 1)
    else:
        log_p = c * math.log(a) - math.lgamma(c + 1) + (n - c) * math.log(phi)
    return p0 * math.exp(log_p)


def station_metrics(p: QueueParams) -> StationMetrics:
    phi = _require_stable(p)
    delay = erlang_c(p)
    p0 = empty_probability(p)
    theta = p.servers * p.mu - p.lam
    lq = delay * phi / (1.0 - phi)
    wait = delay / theta
    service = 1.0 / p.mu
    busy = p.offered_load
    return StationMetrics(
        params=p,
        traffic_intensity=phi,
        delay_probability=delay,
        empty_probability=p0,
        mean_queue_length=lq,
        conditional_queue_length=1.0 / (1.0 - phi),
        conditional_wait=1.0 / theta,
        mean_wait=wait,
        mean_service_time=service,
        mean_busy_servers=busy,
        mean_in_system=lq + busy,
        mean_sojourn=wait + service,
        util_single=phi,
        util_system=1.0 - p0,
        util_overall=busy,
    )


def station_variances(p: QueueParams) -> VarianceSet:
    phi = _require_stable(p)
    delay = erlang_c(p)
    p0 = empty_probability(p)
    a, c = p.offered_load, p.servers
    theta = c * p.mu - p.lam

    var_wait = 2.0 * delay / theta**2 - (delay / theta) ** 2
    lq = delay * phi / (1.0 - phi)
    var_queue = delay * phi * (1.0 + phi) / (1.0 - phi) ** 2 - lq**2

    # Second moment of N: finite sum below c, geometric closed form from c upward.
    second = 0.0
    term = p0
    for n in range(1, c):
        term *= a / n
        second += n * n * term
    second += delay * (c * c + 2.0 * c * phi / (1.0 - phi) + phi * (1.0 + phi) / (1.0 - phi) ** 2)
    mean_n = lq + a

    return VarianceSet(
        var_in_system=max(second - mean_n**2, 0.0),
        var_queue_length=max(var_queue, 0.0),
        var_sojourn=var_wait + 1.0 / p.mu**2,
        var_wait=var_wait,
    )


def _check_time(t: float) -> None:
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t!r}")


def wait_tail(p: QueueParams, t: float) -> float:
    """P(W > t) for the waiting time in queue."""
    _require_stable(p)
    _check_time(t)
    theta = p.servers * p.mu - p.lam
    return erlang_c(p) * math.exp(-theta * t)


def sojourn_tail(p: QueueParams, t: float) -> float:
    """P(T > t) for the total time spent in the station."""
    _require_stable(p)
    _check_time(t)
    delay = erlang_c(p)
    mu = p.mu
    theta = p.servers * mu - p.lam
    if abs(theta - mu) < 1e-9 * mu:
        return math.exp(-mu * t) * (1.0 - delay + delay * (1.0 + mu * t))
    mixed = (theta * math.exp(-mu * t) - mu * math.exp(-theta * t)) / (theta - mu)
    return (1.0 - delay) * math.exp(-mu * t) + delay * mixed
