"""Queueing analytics for multi-server stations and two-stage tandem networks."""

from tandemq.queue_core import (
    QueueParams,
    StationMetrics,
    Stability,
    UnstableStationError,
    VarianceSet,
    check_stability,
    empty_probability,
    erlang_c,
    sojourn_tail,
    station_metrics,
    station_variances,
    stationary_pmf,
    traffic_intensity,
    wait_tail,
)
from tandemq.inference import ConfidenceInterval, confidence_interval, normal_quantile
from tandemq.tandem import Linkage, NetworkMetrics, TandemConfig, link_stages, network_metrics

__version__ = "0.1.0"

__all__ = [
    "ConfidenceInterval",
    "Linkage",
    "NetworkMetrics",
    "QueueParams",
    "Stability",
    "StationMetrics",
    "TandemConfig",
    "UnstableStationError",
    "VarianceSet",
    "check_stability",
    "confidence_interval",
    "empty_probability",
    "erlang_c",
    "link_stages",
    "network_metrics",
    "normal_quantile",
    "sojourn_tail",
    "station_metrics",
    "station_variances",
    "stationary_pmf",
    "traffic_intensity",
    "wait_tail",
]
