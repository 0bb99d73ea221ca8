"""Two M/M/c stations in series, analysed as independent open stations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from tandemq.inference import DEFAULT_SAMPLE_SIZE, ConfidenceInterval, confidence_interval
from tandemq.queue_core import (
    QueueParams,
    StationMetrics,
    UnstableStationError,
    VarianceSet,
    check_stability,
    station_metrics,
    station_variances,
)


class Linkage(enum.Enum):
    """How the stage-two arrival rate is derived from stage one.

    ``PAPER_CONVENTION`` feeds stage two at stage one's *service* rate, which is
    what the published vaccination-centre tables use. ``THROUGHPUT_CONSERVATION``
    feeds it at stage one's arrival rate, the true departure rate of a stable
    station.
    """

    PAPER_CONVENTION = "paper"
    THROUGHPUT_CONSERVATION = "throughput"

    @classmethod
    def parse(cls, value: "str | Linkage") -> "Linkage":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value in (member.value, member.name, member.name.lower()):
                return member
        raise ValueError(f"unknown linkage {value!r}")


@dataclass(frozen=True)
class TandemConfig:
    stage1: QueueParams
    stage2: QueueParams
    linkage: Linkage = Linkage.PAPER_CONVENTION

    def __post_init__(self):
        expected = self.stage1.mu if self.linkage is Linkage.PAPER_CONVENTION else self.stage1.lam
        if not math.isclose(self.stage2.lam, expected, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(
                f"stage-two arrival rate {self.stage2.lam!r} does not follow "
                f"{self.linkage.name} linkage (expected {expected!r})"
            )
        for label, stage in (("stage 1", self.stage1), ("stage 2", self.stage2)):
            if not check_stability(stage).stable:
                raise UnstableStationError(stage, label)

    @property
    def stages(self) -> tuple[QueueParams, QueueParams]:
        return self.stage1, self.stage2


def link_stages(stage1: QueueParams, mu2: float, c2: int, linkage=Linkage.PAPER_CONVENTION) -> TandemConfig:
    linkage = Linkage.parse(linkage)
    if not check_stability(stage1).stable:
        raise UnstableStationError(stage1, "stage 1")
    lam2 = stage1.mu if linkage is Linkage.PAPER_CONVENTION else stage1.lam
    return TandemConfig(stage1, QueueParams(lam2, mu2, c2), linkage)


@dataclass(frozen=True)
class NetworkMetrics:
    mean_in_network: float
    mean_queue: float
    mean_sojourn: float
    mean_wait: float
    sd_in_network: float
    sd_queue: float
    sd_sojourn: float
    sd_wait: float
    intervals: dict[str, ConfidenceInterval]
    stage_metrics: tuple[StationMetrics, StationMetrics]
    stage_variances: tuple[VarianceSet, VarianceSet]


# network metric name -> (StationMetrics field, VarianceSet field)
NETWORK_FIELDS = {
    "N": ("mean_in_system", "var_in_system"),
    "Q": ("mean_queue_length", "var_queue_length"),
    "T": ("mean_sojourn", "var_sojourn"),
    "W": ("mean_wait", "var_wait"),
}


def network_metrics(cfg: TandemConfig, n: int = DEFAULT_SAMPLE_SIZE, alpha: float = 0.05) -> NetworkMetrics:
    """Sum stage means and variances (stages treated as independent)."""
    metrics = tuple(station_metrics(s) for s in cfg.stages)
    variances = tuple(station_variances(s) for s in cfg.stages)
    means, sds, intervals = {}, {}, {}
    for key, (mean_field, var_field) in NETWORK_FIELDS.items():
        mean = sum(getattr(m, mean_field) for m in metrics)
        var = sum(getattr(v, var_field) for v in variances)
        means[key] = mean
        sds[key] = math.sqrt(var)
        intervals[key] = confidence_interval(mean, var, n, alpha)
    return NetworkMetrics(
        mean_in_network=means["N"],
        mean_queue=means["Q"],
        mean_sojourn=means["T"],
        mean_wait=means["W"],
        sd_in_network=sds["N"],
        sd_queue=sds["Q"],
        sd_sojourn=sds["T"],
        sd_wait=sds["W"],
        intervals=intervals,
        stage_metrics=metrics,
        stage_variances=variances,
    )
