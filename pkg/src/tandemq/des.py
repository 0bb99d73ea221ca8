"""Event-calendar simulation of M/M/c stations in series.

Used as an independent check on the closed-form results. Customers leaving
stage one physically join stage two, so the simulated stage-two arrival rate is
the stage-one arrival rate regardless of the configured linkage.

Random numbers: replication ``r`` of seed ``s`` draws from
``numpy.random.PCG64(SeedSequence(s, spawn_key=(r, k)))`` where ``k = 0`` is the
external arrival stream and ``k = i`` the service stream of stage ``i``.
Exponential variates are ``-log1p(-U) / rate``.
"""

from __future__ import annotations

import csv
import heapq
import math
import statistics
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from tandemq.queue_core import QueueParams, UnstableStationError, station_metrics
from tandemq.tandem import TandemConfig

METRICS = ("N", "Q", "W", "T")
_CHUNK = 1 << 15
_BATCHES = 10  # batch count for standard errors from a single replication

_DEPARTURE = 0
_ARRIVAL = 1


@dataclass(frozen=True)
class SimConfig:
    # a single station, a tandem config, or a tuple of stations in series
    network: TandemConfig | QueueParams | tuple
    horizon: float
    warmup: float = 0.0
    seed: int = 0
    replications: int = 1
    allow_unstable: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and math.isfinite(self.warmup)):
            raise ValueError("horizon and warmup must be finite")
        if not (self.horizon > self.warmup >= 0):
            raise ValueError(f"need horizon > warmup >= 0, got horizon={self.horizon}, warmup={self.warmup}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def stations(self) -> tuple[QueueParams, ...]:
        """Stations as actually simulated: every stage sees the external arrival rate."""
        if isinstance(self.network, QueueParams):
            return (self.network,)
        stages = self.network.stages if isinstance(self.network, TandemConfig) else tuple(self.network)
        lam = stages[0].lam
        return tuple(QueueParams(lam, s.mu, s.servers) for s in stages)


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float


@dataclass(frozen=True)
class ReplicationOutput:
    # per stage: {"N", "Q", "W", "T", "throughput"}
    stages: tuple[dict[str, float], ...]
    completed: int
    events: int
    monotone: bool
    batches: tuple[tuple[dict[str, float], ...], ...] = ()


@dataclass(frozen=True)
class SimResult:
    stages: tuple[dict[str, Estimate], ...]
    network: dict[str, Estimate]
    replications: int
    completed: int
    runs: tuple[ReplicationOutput, ...] = field(repr=False, default=())


def _exp_stream(seed: int, replication: int, stream: int, rate: float):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replication, stream))))
    while True:
        yield from (-np.log1p(-rng.random(_CHUNK)) / rate).tolist()


def replication_stream(seed: int, replication: int, stream: int, rate: float):
    """The exponential variate stream used by the simulator (for inspection)."""
    return _exp_stream(seed, replication, stream, rate)


def _run_replication(cfg: SimConfig, r: int, trace: list | None = None) -> ReplicationOutput:
    stations = cfg.stations
    K = len(stations)
    lam = stations[0].lam
    horizon, warmup = cfg.horizon, cfg.warmup
    servers = [s.servers for s in stations]
    services = [_exp_stream(cfg.seed, r, k + 1, s.mu).__next__ for k, s in enumerate(stations)]

    busy = [0] * K
    queues = [deque() for _ in range(K)]
    last = [warmup] * K
    area_n = [0.0] * K
    area_q = [0.0] * K
    n_cust = [0] * K
    sum_w = [0.0] * K
    sum_t = [0.0] * K
    done = [0] * K  # departures after warmup

    span = horizon - warmup
    n_batches = _BATCHES if cfg.replications == 1 else 0
    boundaries = [warmup + span * (i + 1) / n_batches for i in range(n_batches)]
    snapshots = []
    next_boundary = boundaries[0] if boundaries else math.inf
    b_index = 0

    heap = []
    push, pop = heapq.heappush, heapq.heappop
    seq = 0
    if lam > 0:
        arrivals = _exp_stream(cfg.seed, r, 0, lam).__next__
        push(heap, (arrivals(), _ARRIVAL, seq, 0, 0, 0.0, 0.0))
        seq += 1
    next_customer = 1
    events = 0
    monotone = True
    prev_time = 0.0

    def snapshot(t):
        for k in range(K):
            if t > last[k]:
                q = len(queues[k])
                dt = t - last[k]
                area_n[k] += (busy[k] + q) * dt
                area_q[k] += q * dt
                last[k] = t
        snapshots.append(tuple((area_n[k], area_q[k], n_cust[k], sum_w[k], sum_t[k], done[k]) for k in range(K)))

    while heap:
        t, kind, _, k, cust, arr_t, wait = pop(heap)
        if t > horizon:
            break
        while t > next_boundary:
            snapshot(next_boundary)
            b_index += 1
            next_boundary = boundaries[b_index] if b_index < n_batches else math.inf
        events += 1
        if t < prev_time:
            monotone = False
        prev_time = t

        if kind == _ARRIVAL:
            push(heap, (t + arrivals(), _ARRIVAL, seq, 0, next_customer, 0.0, 0.0))
            seq += 1
            next_customer += 1
        else:
            if t > warmup:
                q = len(queues[k])
                dt = t - last[k]
                area_n[k] += (busy[k] + q) * dt
                area_q[k] += q * dt
                last[k] = t
                done[k] += 1
                if arr_t >= warmup:
                    n_cust[k] += 1
                    sum_w[k] += wait
                    sum_t[k] += t - arr_t
            queue = queues[k]
            if queue:
                nxt, nxt_arr = queue.popleft()
                push(heap, (t + services[k](), _DEPARTURE, seq, k, nxt, nxt_arr, t - nxt_arr))
                seq += 1
            else:
                busy[k] -= 1
            if trace is not None:
                trace.append((r, t, "departure", cust, k + 1, len(queue)))
            k += 1
            if k == K:
                continue

        # arrival of ``cust`` at stage k at time t
        if t > warmup:
            q = len(queues[k])
            dt = t - last[k]
            area_n[k] += (busy[k] + q) * dt
            area_q[k] += q * dt
            last[k] = t
        if busy[k] < servers[k]:
            busy[k] += 1
            push(heap, (t + services[k](), _DEPARTURE, seq, k, cust, t, 0.0))
            seq += 1
        else:
            queues[k].append((cust, t))
        if trace is not None:
            trace.append((r, t, "arrival", cust, k + 1, len(queues[k])))

    while b_index < n_batches:
        snapshot(boundaries[b_index])
        b_index += 1
    for k in range(K):
        q = len(queues[k])
        dt = horizon - last[k]
        area_n[k] += (busy[k] + q) * dt
        area_q[k] += q * dt

    def stage_values(an, aq, nc, sw, st, dn, length):
        return {
            "N": an / length,
            "Q": aq / length,
            "W": sw / nc if nc else 0.0,
            "T": st / nc if nc else 0.0,
            "throughput": dn / length,
        }

    stages = tuple(
        stage_values(area_n[k], area_q[k], n_cust[k], sum_w[k], sum_t[k], done[k], span) for k in range(K)
    )
    batches = []
    prev = tuple((0.0, 0.0, 0, 0.0, 0.0, 0) for _ in range(K))
    for snap in snapshots:
        batches.append(
            tuple(
                stage_values(*(cur - old for cur, old in zip(snap[k], prev[k])), span / n_batches)
                for k in range(K)
            )
        )
        prev = snap
    return ReplicationOutput(stages, done[K - 1], events, monotone, tuple(batches))


def _replicate(args):
    cfg, r = args
    return _run_replication(cfg, r)


def _network_values(stage_values: tuple[dict[str, float], ...]) -> dict[str, float]:
    return {m: math.fsum(s[m] for s in stage_values) for m in METRICS}


def _summarise(samples: list[float]) -> Estimate:
    mean = math.fsum(samples) / len(samples)
    se = statistics.stdev(samples) / math.sqrt(len(samples)) if len(samples) > 1 else 0.0
    return Estimate(mean, se)


def _check_stable(cfg: SimConfig) -> None:
    if cfg.allow_unstable:
        return
    for i, st in enumerate(cfg.stations):
        if not st.lam / (st.servers * st.mu) < 1.0:
            raise UnstableStationError(st, f"simulated stage {i + 1}")


def simulate(cfg: SimConfig, workers: int = 1, trace_path=None) -> SimResult:
    """Run all replications and aggregate them in replication order.

    With ``workers > 1`` replications run in separate processes; the result is
    identical to the serial run. A single replication gets batch-means
    standard errors instead of across-replication ones.
    """
    _check_stable(cfg)
    if trace_path is not None:
        trace: list = []
        runs = [_run_replication(cfg, r, trace) for r in range(cfg.replications)]
        with open(trace_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["replication", "time", "event", "customer_id", "stage", "queue_len"])
            for rep, t, event, cust, stage, qlen in trace:
                writer.writerow([rep, repr(t), event, cust, stage, qlen])
    elif workers > 1 and cfg.replications > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_replicate, [(cfg, r) for r in range(cfg.replications)]))
    else:
        runs = [_run_replication(cfg, r) for r in range(cfg.replications)]

    K = len(cfg.stations)
    if cfg.replications > 1:
        samples = [run.stages for run in runs]
    else:
        samples = list(runs[0].batches)
    stage_est = []
    for k in range(K):
        est = {}
        for m in (*METRICS, "throughput"):
            est[m] = _summarise([s[k][m] for s in samples])
            if cfg.replications == 1:
                # point estimate from the whole run, spread from its batches
                est[m] = Estimate(runs[0].stages[k][m], est[m].se)
        stage_est.append(est)

    net_samples = [_network_values(s) for s in samples]
    network = {}
    for m in METRICS:
        est = _summarise([s[m] for s in net_samples])
        if cfg.replications == 1:
            est = Estimate(_network_values(runs[0].stages)[m], est.se)
        network[m] = est
    return SimResult(
        stages=tuple(stage_est),
        network=network,
        replications=cfg.replications,
        completed=sum(run.completed for run in runs),
        runs=tuple(runs),
    )


@dataclass(frozen=True)
class DiscrepancyRow:
    scope: str
    metric: str
    analytical: float
    simulated: float
    se: float
    z: float

    @property
    def flagged(self) -> bool:
        return abs(self.z) > 3.0


@dataclass(frozen=True)
class DiscrepancyReport:
    rows: tuple[DiscrepancyRow, ...]
    result: SimResult

    @property
    def flagged(self) -> tuple[DiscrepancyRow, ...]:
        return tuple(r for r in self.rows if r.flagged)


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


def validate_against_analytics(cfg: SimConfig, workers: int = 1, result: SimResult | None = None) -> DiscrepancyReport:
    """Compare simulated means with closed forms under flow conservation."""
    _check_stable(cfg)
    if result is None:
        result = simulate(cfg, workers=workers)
    fields = {"N": "mean_in_system", "Q": "mean_queue_length", "W": "mean_wait", "T": "mean_sojourn"}
    rows = []
    totals = dict.fromkeys(METRICS, 0.0)
    stations = cfg.stations
    for k, st in enumerate(stations):
        sm = station_metrics(st)
        for m in METRICS:
            value = getattr(sm, fields[m])
            totals[m] += value
            est = result.stages[k][m]
            rows.append(DiscrepancyRow(f"stage {k + 1}", m, value, est.mean, est.se, _z(est.mean - value, est.se)))
        est = result.stages[k]["throughput"]
        rows.append(DiscrepancyRow(f"stage {k + 1}", "throughput", st.lam, est.mean, est.se, _z(est.mean - st.lam, est.se)))
    if len(stations) > 1:
        for m in METRICS:
            est = result.network[m]
            rows.append(DiscrepancyRow("network", m, totals[m], est.mean, est.se, _z(est.mean - totals[m], est.se)))
    return DiscrepancyReport(tuple(rows), result)
