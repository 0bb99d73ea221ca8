"""Server-count scenarios for the two-stage network and minimal staffing search."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from tandemq.inference import DEFAULT_SAMPLE_SIZE
from tandemq.queue_core import (
    QueueParams,
    StationMetrics,
    check_stability,
    erlang_c,
    sojourn_tail,
    station_metrics,
    wait_tail,
)
from tandemq.tandem import Linkage, NetworkMetrics, TandemConfig, network_metrics


class ConstraintKind(enum.Enum):
    STABILITY = "stability"
    DELAY_PROBABILITY_MAX = "delay"
    WAIT_TAIL_MAX = "wait_tail"
    SOJOURN_TAIL_MAX = "sojourn_tail"
    MEAN_SOJOURN_MAX = "mean_sojourn"


_PROBABILITY_KINDS = {
    ConstraintKind.DELAY_PROBABILITY_MAX,
    ConstraintKind.WAIT_TAIL_MAX,
    ConstraintKind.SOJOURN_TAIL_MAX,
}


@dataclass(frozen=True)
class Constraint:
    """A service-level requirement every stage must meet.

    ``t`` is the time point (minutes) for the two tail kinds; ``threshold`` is a
    probability for delay/tail kinds and minutes for ``MEAN_SOJOURN_MAX``.
    """

    kind: ConstraintKind
    threshold: float = 0.0
    t: float | None = None

    def __post_init__(self):
        kind = self.kind
        if kind in _PROBABILITY_KINDS and not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"{kind.value} threshold must be a probability, got {self.threshold}")
        if kind is ConstraintKind.MEAN_SOJOURN_MAX and not self.threshold > 0:
            raise ValueError("mean sojourn threshold must be > 0 minutes")
        needs_t = kind in (ConstraintKind.WAIT_TAIL_MAX, ConstraintKind.SOJOURN_TAIL_MAX)
        if needs_t and (self.t is None or self.t < 0):
            raise ValueError(f"{kind.value} needs a time point t >= 0")

    @classmethod
    def parse(cls, text: str) -> "Constraint":
        """Parse ``stability``, ``delay=0.1``, ``wait_tail:1=0.005``,
        ``sojourn_tail:2=0.5`` or ``mean_sojourn=5``."""
        head, _, value = text.partition("=")
        name, _, t = head.strip().partition(":")
        try:
            kind = ConstraintKind(name.strip())
        except ValueError:
            raise ValueError(f"unknown constraint kind {name!r}") from None
        if kind is ConstraintKind.STABILITY:
            return cls(kind)
        if not value:
            raise ValueError(f"constraint {text!r} needs a threshold")
        return cls(kind, float(value), float(t) if t else None)

    def measure(self, p: QueueParams) -> float:
        """Value compared against the threshold (infinite when unstable)."""
        if not check_stability(p).stable:
            return float("inf")
        kind = self.kind
        if kind is ConstraintKind.STABILITY:
            return check_stability(p).intensity
        if kind is ConstraintKind.DELAY_PROBABILITY_MAX:
            return erlang_c(p)
        if kind is ConstraintKind.WAIT_TAIL_MAX:
            return wait_tail(p, self.t)
        if kind is ConstraintKind.SOJOURN_TAIL_MAX:
            return sojourn_tail(p, self.t)
        return station_metrics(p).mean_sojourn

    def satisfied(self, p: QueueParams) -> bool:
        value = self.measure(p)
        if self.kind is ConstraintKind.STABILITY:
            return value < 1.0
        return value <= self.threshold

    def label(self) -> str:
        if self.kind is ConstraintKind.STABILITY:
            return "stability"
        if self.t is not None:
            return f"{self.kind.value}:{self.t:g}<={self.threshold:g}"
        return f"{self.kind.value}<={self.threshold:g}"


# Selects (7, 6) for the reference vaccination-centre rates.
REFERENCE_PRESET = (Constraint(ConstraintKind.WAIT_TAIL_MAX, 0.005, 1.0),)
DEFAULT_T_VALUES = (1.0, 2.0, 4.0)


@dataclass(frozen=True)
class ScenarioRow:
    c1: int
    c2: int
    stages: tuple[QueueParams, QueueParams]
    stable: bool
    stage_metrics: tuple[StationMetrics, StationMetrics] | None
    network: NetworkMetrics | None
    # (stage index 1/2, "W" or "T", t) -> probability
    tails: dict[tuple[int, str, float], float] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.stable and all(self.checks.values())

    @property
    def total_servers(self) -> int:
        return self.c1 + self.c2


def _stage_params(base: TandemConfig, c1: int, c2: int, linkage: Linkage) -> tuple[QueueParams, QueueParams]:
    s1 = QueueParams(base.stage1.lam, base.stage1.mu, c1)
    lam2 = s1.mu if linkage is Linkage.PAPER_CONVENTION else s1.lam
    return s1, QueueParams(lam2, base.stage2.mu, c2)


def scenario_row(
    base: TandemConfig,
    c1: int,
    c2: int,
    constraints=(),
    t_values=DEFAULT_T_VALUES,
    linkage: Linkage = Linkage.PAPER_CONVENTION,
    n: int = DEFAULT_SAMPLE_SIZE,
    alpha: float = 0.05,
) -> ScenarioRow:
    s1, s2 = _stage_params(base, c1, c2, linkage)
    stable = check_stability(s1).stable and check_stability(s2).stable
    checks = {con.label(): stable and all(con.satisfied(s) for s in (s1, s2)) for con in constraints}
    if not stable:
        return ScenarioRow(c1, c2, (s1, s2), False, None, None, {}, checks)
    net = network_metrics(TandemConfig(s1, s2, linkage), n, alpha)
    tails = {}
    for idx, s in ((1, s1), (2, s2)):
        for t in t_values:
            tails[(idx, "W", float(t))] = wait_tail(s, t)
            tails[(idx, "T", float(t))] = sojourn_tail(s, t)
    return ScenarioRow(c1, c2, (s1, s2), True, net.stage_metrics, net, tails, checks)


def scan_scenarios(
    base: TandemConfig,
    c1_range,
    c2_range,
    constraints=(),
    t_values=DEFAULT_T_VALUES,
    include_unstable: bool = False,
    linkage: Linkage = Linkage.PAPER_CONVENTION,
    n: int = DEFAULT_SAMPLE_SIZE,
    alpha: float = 0.05,
) -> list[ScenarioRow]:
    """Evaluate every (c1, c2) pair; rows sorted by total servers, then c1."""
    c1_values, c2_values = list(c1_range), list(c2_range)
    if not c1_values or not c2_values:
        raise ValueError("server ranges must be nonempty")
    rows = []
    for c1 in c1_values:
        for c2 in c2_values:
            row = scenario_row(base, c1, c2, constraints, t_values, linkage, n, alpha)
            if row.stable or include_unstable:
                rows.append(row)
    rows.sort(key=lambda r: (r.c1 + r.c2, r.c1))
    return rows


def best_scenario(rows: list[ScenarioRow]) -> ScenarioRow | None:
    """First feasible row in scan order (fewest servers, then smaller c1)."""
    return next((r for r in rows if r.feasible), None)


class InfeasibleError(ValueError):
    def __init__(self, message: str, best_attempt):
        super().__init__(message)
        self.best_attempt = best_attempt


def min_servers(lam: float, mu: float, constraints, c_max: int) -> int:
    """Smallest server count up to ``c_max`` meeting every constraint."""
    if c_max < 1:
        raise ValueError(f"c_max must be >= 1, got {c_max}")
    constraints = tuple(constraints) or (Constraint(ConstraintKind.STABILITY),)
    for c in range(1, c_max + 1):
        p = QueueParams(lam, mu, c)
        if check_stability(p).stable and all(con.satisfied(p) for con in constraints):
            return c
    p = QueueParams(lam, mu, c_max)
    attempt = {"servers": c_max, **{con.label(): con.measure(p) for con in constraints}}
    raise InfeasibleError(f"no server count <= {c_max} satisfies {[c.label() for c in constraints]}", attempt)
