"""Report documents: sections of labelled numeric rows, rendered as text, JSON or CSV.

Every row carries a metric identifier and unit. JSON keeps full float precision
with sorted keys so identical inputs give byte-identical output; text mode
prints three decimals.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from tandemq import reference as ref
from tandemq.inference import confidence_interval
from tandemq.queue_core import StationMetrics, VarianceSet, sojourn_tail, wait_tail
from tandemq.tandem import NetworkMetrics

STATION_ROWS = (
    # field, label, unit
    ("lam", "Arrival rate", "1/min"),
    ("mu", "Service rate", "1/min"),
    ("traffic_intensity", "Traffic intensity", "ratio"),
    ("servers", "Count of servers", "servers"),
    ("delay_probability", "Delay probability (Erlang C)", "probability"),
    ("empty_probability", "Probability of an empty station", "probability"),
    ("mean_queue_length", "Mean queue length", "customers"),
    ("conditional_queue_length", "Mean queue length given delay", "customers"),
    ("conditional_wait", "Mean wait given delay", "min"),
    ("mean_wait", "Mean waiting time", "min"),
    ("mean_service_time", "Mean service time", "min"),
    ("mean_busy_servers", "Mean number of busy servers", "servers"),
    ("mean_in_system", "Mean number in station", "customers"),
    ("mean_sojourn", "Mean time in station", "min"),
    ("util_single", "Utilization of a single server", "probability"),
    ("util_system", "Utilization of the station", "probability"),
    ("util_overall", "Overall utilization", "servers"),
)

# metric key -> (mean id, mean unit, variance id, variance unit, mean field, variance field)
MOMENT_ROWS = {
    "N": ("mean_in_system", "customers", "var_in_system", "customers^2", "mean_in_system", "var_in_system"),
    "Q": ("mean_queue_length", "customers", "var_queue_length", "customers^2", "mean_queue_length", "var_queue_length"),
    "T": ("mean_sojourn", "min", "var_sojourn", "min^2", "mean_sojourn", "var_sojourn"),
    "W": ("mean_wait", "min", "var_wait", "min^2", "mean_wait", "var_wait"),
}

TAIL_NOTE = (
    "stage 1 P(T>1): the sojourn-time distribution gives {value:.3f}; the reference "
    "figure 0.72 is not reproduced and is treated as a misprint (the same formula "
    "matches the other seven reference tail values)."
)
SERVICE_TIME_NOTE = (
    "stage {stage} mean service time: reported as 1/mu = {value:.3f} min; the reference "
    "figure {printed} contradicts the reference mean time in station minus mean wait "
    "and is not compared."
)


@dataclass
class Row:
    metric: str
    unit: str
    values: dict
    label: str = ""

    def to_dict(self) -> dict:
        return {"metric": self.metric, "unit": self.unit, "label": self.label, "values": dict(self.values)}


@dataclass
class Section:
    key: str
    title: str
    columns: list[str]
    rows: list[Row] = field(default_factory=list)

    def add(self, metric: str, unit: str, label: str = "", **values) -> Row:
        row = Row(metric, unit, values, label)
        self.rows.append(row)
        return row

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "columns": list(self.columns),
            "rows": [r.to_dict() for r in self.rows],
        }


@dataclass
class ReportDocument:
    command: str
    metadata: dict = field(default_factory=dict)
    sections: list[Section] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def section(self, key: str) -> Section:
        for s in self.sections:
            if s.key == key:
                return s
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "metadata": self.metadata,
            "sections": [s.to_dict() for s in self.sections],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "metric", "unit", "column", "value"])
        for s in self.sections:
            for r in s.rows:
                for col in s.columns:
                    if col in r.values:
                        writer.writerow([s.key, r.metric, r.unit, col, _csv_value(r.values[col])])
        for note in self.notes:
            writer.writerow(["notes", "note", "", "", note])
        return buf.getvalue()

    def to_text(self) -> str:
        out = []
        for key in sorted(self.metadata):
            out.append(f"# {key}: {_text_value(self.metadata[key])}")
        for s in self.sections:
            out.append("")
            out.append(s.title)
            header = ["metric", *s.columns]
            table = [header]
            for r in s.rows:
                table.append([r.label or r.metric, *(_text_value(r.values.get(c)) for c in s.columns)])
            widths = [max(len(row[i]) for row in table) for i in range(len(header))]
            for i, row in enumerate(table):
                out.append("  ".join(cell.ljust(w) if j == 0 else cell.rjust(w) for j, (cell, w) in enumerate(zip(row, widths))).rstrip())
                if i == 0:
                    out.append("  ".join("-" * w for w in widths))
        if self.notes:
            out.append("")
            out.append("Notes")
            out.extend(f"- {n}" for n in self.notes)
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise ValueError(f"unknown format {fmt!r}")


def _jsonable(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _text_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return f"{value:.3f}"
    return str(value)


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def station_section(key: str, title: str, m: StationMetrics) -> Section:
    sec = Section(key, title, ["value"])
    for name, label, unit in STATION_ROWS:
        if name in ("lam", "mu", "servers"):
            value = getattr(m.params, name)
        else:
            value = getattr(m, name)
        sec.add(name, unit, label, value=value)
    return sec


def interval_section(key: str, title: str, m: StationMetrics, v: VarianceSet, n: int, alpha: float) -> Section:
    sec = Section(key, title, ["value", "lower", "upper", "negative_lower"])
    for mean_id, mean_unit, var_id, var_unit, mean_field, var_field in MOMENT_ROWS.values():
        mean, var = getattr(m, mean_field), getattr(v, var_field)
        ci = confidence_interval(mean, var, n, alpha)
        sec.add(mean_id, mean_unit, value=mean, lower=ci.lower, upper=ci.upper, negative_lower=ci.negative_lower)
        sec.add(var_id, var_unit, value=var)
    return sec


def network_section(key: str, title: str, net: NetworkMetrics) -> Section:
    sec = Section(key, title, ["value", "lower", "upper", "negative_lower"])
    sds = {"N": net.sd_in_network, "Q": net.sd_queue, "T": net.sd_sojourn, "W": net.sd_wait}
    for k, (mean_id, mean_unit, var_id, _, _, _) in MOMENT_ROWS.items():
        ci = net.intervals[k]
        sec.add(mean_id, mean_unit, value=ci.point, lower=ci.lower, upper=ci.upper, negative_lower=ci.negative_lower)
        sec.add("sd_" + mean_id.removeprefix("mean_"), mean_unit, value=sds[k])
    return sec


def scenario_detail_section(key: str, title: str, net: NetworkMetrics) -> Section:
    """Per-stage and network means and variances with network intervals."""
    sec = Section(key, title, ["stage1", "stage2", "network", "lower", "upper"])
    for k, (mean_id, mean_unit, var_id, var_unit, mean_field, var_field) in MOMENT_ROWS.items():
        m1, m2 = (getattr(m, mean_field) for m in net.stage_metrics)
        v1, v2 = (getattr(v, var_field) for v in net.stage_variances)
        ci = net.intervals[k]
        sec.add(mean_id, mean_unit, stage1=m1, stage2=m2, network=ci.point, lower=ci.lower, upper=ci.upper)
        sec.add(var_id, var_unit, stage1=v1, stage2=v2, network=v1 + v2)
    return sec


def tail_section(key: str, title: str, stages, t_values) -> Section:
    sec = Section(key, title, ["t", "stage1", "stage2"])
    for t in t_values:
        for kind, fn, metric in (("W", wait_tail, "wait_tail"), ("T", sojourn_tail, "sojourn_tail")):
            sec.add(metric, "probability", f"P({kind}>{t:g})", t=float(t), stage1=fn(stages[0], t), stage2=fn(stages[1], t))
    return sec


def tail_notes(stages) -> list[str]:
    """Notes for tail cells that disagree with the reference figures."""
    value = sojourn_tail(stages[0], 1.0)
    return [TAIL_NOTE.format(value=value)]


def service_time_notes(metrics) -> list[str]:
    notes = []
    for stage, m in enumerate(metrics, start=1):
        if (stage, "mean_service_time") in ref.ERRATA:
            notes.append(SERVICE_TIME_NOTE.format(stage=stage, value=m.mean_service_time, printed=ref.STATION[stage]["mean_service_time"]))
    return notes
