"""Field observations from vaccination centres and cluster-sampling quantities.

CSV layouts (UTF-8, comma-delimited, header row required):

* centers:      ``center_id,daily_arrivals,servers_stage1,servers_stage2``
* observations: ``center_id,stage,duration_minutes`` with stage in {1, 2}
* clusters:     ``cluster,vaccinated_count``

Blank fields are errors; nothing is imputed.
"""

from __future__ import annotations

import csv
import enum
import os
import statistics
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_WORKDAY_MINUTES = 480.0

CENTERS_HEADER = ("center_id", "daily_arrivals", "servers_stage1", "servers_stage2")
OBSERVATIONS_HEADER = ("center_id", "stage", "duration_minutes")
CLUSTERS_HEADER = ("cluster", "vaccinated_count")


class DataError(ValueError):
    """Malformed or invalid input data; ``line`` is the 1-based CSV line."""

    def __init__(self, message: str, path: str | os.PathLike | None = None, line: int | None = None):
        self.path = None if path is None else str(path)
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class ReferentialError(DataError):
    pass


class Stage(enum.IntEnum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class CenterRecord:
    center_id: str
    daily_arrivals: int
    servers_stage1: int
    servers_stage2: int

    def __post_init__(self):
        if not self.center_id:
            raise ValueError("center_id must be nonempty")
        if self.daily_arrivals < 0:
            raise ValueError(f"daily_arrivals must be >= 0, got {self.daily_arrivals}")
        if self.servers_stage1 < 1 or self.servers_stage2 < 1:
            raise ValueError("server counts must be >= 1")


@dataclass(frozen=True)
class ServiceObservation:
    center_id: str
    stage: Stage
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "stage", Stage(self.stage))
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration!r}")


@dataclass(frozen=True)
class ObservationSet:
    centers: tuple[CenterRecord, ...] = ()
    observations: tuple[ServiceObservation, ...] = ()
    workday_minutes: float = DEFAULT_WORKDAY_MINUTES

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(self, "observations", tuple(self.observations))
        if not self.workday_minutes > 0:
            raise ValueError(f"workday_minutes must be > 0, got {self.workday_minutes!r}")
        known = {c.center_id for c in self.centers}
        if len(known) != len(self.centers):
            raise ValueError("duplicate center_id")
        for obs in self.observations:
            if obs.center_id not in known:
                raise ReferentialError(f"observation references unknown center {obs.center_id!r}")


@dataclass(frozen=True)
class ClusterFrame:
    clusters: tuple[tuple[str, int], ...]
    k: int = 1
    _total: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clusters = tuple((str(name), int(size)) for name, size in self.clusters)
        object.__setattr__(self, "clusters", clusters)
        if any(size < 0 for _, size in clusters):
            raise ValueError("cluster sizes must be >= 0")
        total = sum(size for _, size in clusters)
        if total <= 0:
            raise ValueError("total cluster size must be > 0")
        if self.k < 1 or self.k > len(clusters):
            raise ValueError(f"k must be between 1 and {len(clusters)}, got {self.k}")
        object.__setattr__(self, "_total", total)


def _cell(row: dict, key: str, path, line: int) -> str:
    value = row.get(key)
    if value is None or value.strip() == "":
        raise DataError(f"missing value for {key!r}", path, line)
    return value.strip()


def _int_cell(row, key, path, line) -> int:
    raw = _cell(row, key, path, line)
    try:
        return int(raw)
    except ValueError:
        raise DataError(f"{key!r} is not an integer: {raw!r}", path, line) from None


def _float_cell(row, key, path, line) -> float:
    raw = _cell(row, key, path, line)
    try:
        return float(raw)
    except ValueError:
        raise DataError(f"{key!r} is not a number: {raw!r}", path, line) from None


def _read_rows(path, header: tuple[str, ...]):
    """Yield ``(line_number, row_dict)``; an empty file yields nothing."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            return
        names = tuple(h.strip() for h in first)
        if names != header:
            raise DataError(f"expected header {','.join(header)}, got {','.join(names)}", path, 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"expected {len(header)} fields, got {len(row)}", path, line)
            yield line, dict(zip(header, row))


def load_centers(path) -> list[CenterRecord]:
    centers = []
    for line, row in _read_rows(path, CENTERS_HEADER):
        try:
            centers.append(
                CenterRecord(
                    _cell(row, "center_id", path, line),
                    _int_cell(row, "daily_arrivals", path, line),
                    _int_cell(row, "servers_stage1", path, line),
                    _int_cell(row, "servers_stage2", path, line),
                )
            )
        except DataError:
            raise
        except ValueError as exc:
            raise DataError(str(exc), path, line) from None
    return centers


def load_observations(centers_path, observations_path=None, workday_minutes: float = DEFAULT_WORKDAY_MINUTES) -> ObservationSet:
    """Read and validate a centres file plus an optional observations file."""
    centers = load_centers(centers_path)
    seen = set()
    for rec in centers:
        if rec.center_id in seen:
            raise DataError(f"duplicate center_id {rec.center_id!r}", centers_path)
        seen.add(rec.center_id)

    observations = []
    if observations_path is not None:
        for line, row in _read_rows(observations_path, OBSERVATIONS_HEADER):
            center_id = _cell(row, "center_id", observations_path, line)
            if center_id not in seen:
                raise ReferentialError(f"unknown center_id {center_id!r}", observations_path, line)
            stage_raw = _cell(row, "stage", observations_path, line)
            if stage_raw not in ("1", "2"):
                raise DataError(f"stage must be 1 or 2, got {stage_raw!r}", observations_path, line)
            duration = _float_cell(row, "duration_minutes", observations_path, line)
            if not duration > 0:
                raise DataError(f"duration must be > 0, got {duration!r}", observations_path, line)
            observations.append(ServiceObservation(center_id, Stage(int(stage_raw)), duration))
    return ObservationSet(tuple(centers), tuple(observations), workday_minutes)


def write_observations(data: ObservationSet, centers_path, observations_path) -> None:
    """Canonical serialisation; floats use ``repr`` so values survive a reload."""
    with open(centers_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CENTERS_HEADER)
        for c in data.centers:
            writer.writerow([c.center_id, c.daily_arrivals, c.servers_stage1, c.servers_stage2])
    with open(observations_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(OBSERVATIONS_HEADER)
        for o in data.observations:
            writer.writerow([o.center_id, int(o.stage), repr(float(o.duration))])


def load_clusters(path, k: int) -> ClusterFrame:
    clusters = []
    for line, row in _read_rows(path, CLUSTERS_HEADER):
        name = _cell(row, "cluster", path, line)
        size = _int_cell(row, "vaccinated_count", path, line)
        if size < 0:
            raise DataError(f"vaccinated_count must be >= 0, got {size}", path, line)
        clusters.append((name, size))
    if not clusters:
        raise DataError("no clusters", path)
    try:
        return ClusterFrame(tuple(clusters), k)
    except ValueError as exc:
        raise DataError(str(exc), path) from None


def estimate_arrival_rate(data: ObservationSet) -> float:
    """Mean daily arrivals spread over the working day (customers per minute)."""
    if not data.centers:
        raise DataError("cannot estimate arrival rate from zero centers")
    return statistics.fmean(c.daily_arrivals for c in data.centers) / data.workday_minutes


def estimate_service_rate(data: ObservationSet, stage: Stage | int) -> float:
    """Reciprocal of the sample-mean service duration for ``stage``."""
    stage = Stage(stage)
    durations = [o.duration for o in data.observations if o.stage is stage]
    if not durations:
        raise DataError(f"no service observations for stage {int(stage)}")
    return 1.0 / statistics.fmean(durations)


def mean_servers(data: ObservationSet, stage: Stage | int) -> float:
    if not data.centers:
        raise DataError("no centers")
    attr = "servers_stage1" if Stage(stage) is Stage.ONE else "servers_stage2"
    return statistics.fmean(getattr(c, attr) for c in data.centers)


def cluster_share(frame: ClusterFrame, j: int) -> float:
    """Cluster ``j``'s fraction of the whole population."""
    if not 0 <= j < len(frame.clusters):
        raise IndexError(f"cluster index {j} out of range")
    return frame.clusters[j][1] / frame._total


def inclusion_probability(frame: ClusterFrame, j: int) -> float:
    """Chance cluster ``j`` is drawn at least once in ``frame.k`` size-weighted draws."""
    return 1.0 - (1.0 - cluster_share(frame, j)) ** frame.k
