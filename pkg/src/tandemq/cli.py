"""Command-line front end.

Exit codes: 0 ok, 2 bad input, 3 unstable station, 4 simulation discrepancy
flagged (|z| > 3), 5 no feasible server configuration.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

from tandemq import __version__
from tandemq import reference as ref
from tandemq.des import SimConfig, simulate, validate_against_analytics
from tandemq.field_data import (
    DataError,
    Stage,
    cluster_share,
    estimate_arrival_rate,
    estimate_service_rate,
    inclusion_probability,
    load_clusters,
    load_observations,
    mean_servers,
)
from tandemq.planner import (
    DEFAULT_T_VALUES,
    REFERENCE_PRESET,
    Constraint,
    best_scenario,
    scan_scenarios,
)
from tandemq.queue_core import (
    QueueParams,
    UnstableStationError,
    check_stability,
    sojourn_tail,
    station_metrics,
    wait_tail,
)
from tandemq.report import (
    ReportDocument,
    Section,
    interval_section,
    network_section,
    scenario_detail_section,
    service_time_notes,
    station_section,
    tail_notes,
    tail_section,
)
from tandemq.tandem import Linkage, TandemConfig, link_stages, network_metrics

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNSTABLE = 3
EXIT_FLAGGED = 4
EXIT_INFEASIBLE = 5

OUTPUT_DIR_ENV = "TANDEMQ_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}", EXIT_INPUT)


def _int_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"empty or invalid range {text!r}")
    return range(lo_i, hi_i + 1)


def _constraint(text: str) -> Constraint:
    try:
        return Constraint.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _metadata(args, **inputs) -> dict:
    meta = {"tool": "tandemq", "version": __version__, "command": args.command, "inputs": inputs}
    if getattr(args, "timestamp", False):
        meta["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return meta


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", help="output path (default: stdout, or $%s/<command>.<ext>)" % OUTPUT_DIR_ENV)
    p.add_argument("--timestamp", action="store_true", help="add a generation time to the metadata")


def _ci_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=ref.SAMPLE_SIZE, help="sample size for intervals (default 67)")
    p.add_argument("--alpha", type=float, default=ref.ALPHA)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tandemq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tandemq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="estimate rates from field data and analyse both stages")
    p.add_argument("centers_csv")
    p.add_argument("observations_csv")
    p.add_argument("--workday", type=float, default=480.0, help="minutes per working day")
    p.add_argument("--c1", type=int, help="stage-one servers (default: mean over centres, rounded)")
    p.add_argument("--c2", type=int, help="stage-two servers (default: mean over centres, rounded)")
    p.add_argument("--linkage", default="paper", choices=("paper", "throughput"))
    p.add_argument("--t", type=float, nargs="+", default=[1.0, 2.0], help="tail time points (minutes)")
    p.add_argument("--allow-unstable", action="store_true")
    _ci_args(p)
    _common(p)

    p = sub.add_parser("simulate", help="discrete-event simulation checked against closed forms")
    p.add_argument("--config", help="JSON file with stage1/stage2 parameters")
    p.add_argument("--lam", type=float, help="external arrival rate (1/min)")
    p.add_argument("--mu", type=float, help="stage-one service rate")
    p.add_argument("--servers", type=int, help="stage-one servers")
    p.add_argument("--mu2", type=float, help="stage-two service rate (omit for one station)")
    p.add_argument("--servers2", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--horizon", type=float, default=200_000.0)
    p.add_argument("--warmup", type=float, default=10_000.0)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace", help="write an event trace CSV to this path")
    p.add_argument("--allow-unstable", action="store_true")
    _common(p)

    p = sub.add_parser("optimize", help="scan server counts against service-level constraints")
    p.add_argument("--lam", type=float)
    p.add_argument("--mu1", type=float)
    p.add_argument("--mu2", type=float)
    p.add_argument("--constraint", type=_constraint, action="append", default=[],
                   help="stability | delay=P | wait_tail:T=P | sojourn_tail:T=P | mean_sojourn=MIN")
    p.add_argument("--preset", choices=("reference",), help="reference rates with P(W>1) <= 0.005 per stage")
    p.add_argument("--c1-range", type=_int_range, default=range(1, 13))
    p.add_argument("--c2-range", type=_int_range, default=range(1, 13))
    p.add_argument("--t", type=float, nargs="+", default=list(DEFAULT_T_VALUES))
    p.add_argument("--include-unstable", action="store_true")
    _ci_args(p)
    _common(p)

    p = sub.add_parser("sample", help="cluster shares and inclusion probabilities")
    p.add_argument("clusters_csv")
    p.add_argument("--k", type=int, default=ref.CLUSTER_DRAWS)
    _common(p)

    p = sub.add_parser("report", help="full reference-case tables with comparison and notes")
    p.add_argument("--lam", type=float, default=ref.ARRIVAL_RATE)
    p.add_argument("--mu1", type=float, default=ref.SERVICE_RATE_1)
    p.add_argument("--mu2", type=float, default=ref.SERVICE_RATE_2)
    _ci_args(p)
    _common(p)
    return parser


def _stations_doc(doc: ReportDocument, cfg: TandemConfig, n: int, alpha: float) -> None:
    net = network_metrics(cfg, n, alpha)
    for idx, (m, v) in enumerate(zip(net.stage_metrics, net.stage_variances), start=1):
        doc.sections.append(station_section(f"stage{idx}", f"Stage {idx} station metrics", m))
        doc.sections.append(interval_section(f"stage{idx}_intervals", f"Stage {idx} confidence intervals", m, v, n, alpha))
    doc.sections.append(network_section("network", "Network (both stages)", net))


def cmd_analyze(args) -> tuple[ReportDocument, int]:
    data = load_observations(args.centers_csv, args.observations_csv, args.workday)
    lam = estimate_arrival_rate(data)
    mu1 = estimate_service_rate(data, Stage.ONE)
    mu2 = estimate_service_rate(data, Stage.TWO)
    c1 = args.c1 if args.c1 is not None else max(1, round(mean_servers(data, Stage.ONE)))
    c2 = args.c2 if args.c2 is not None else max(1, round(mean_servers(data, Stage.TWO)))
    linkage = Linkage.parse(args.linkage)
    doc = ReportDocument("analyze", _metadata(
        args, centers=args.centers_csv, observations=args.observations_csv, workday_minutes=args.workday,
        linkage=linkage.value, n=args.n, alpha=args.alpha,
    ))
    est = Section("estimates", "Estimated inputs", ["value"])
    est.add("centers", "count", "Centres", value=len(data.centers))
    est.add("lam", "1/min", "Arrival rate", value=lam)
    est.add("mu1", "1/min", "Stage 1 service rate", value=mu1)
    est.add("mu2", "1/min", "Stage 2 service rate", value=mu2)
    est.add("servers1", "servers", "Stage 1 servers", value=c1)
    est.add("servers2", "servers", "Stage 2 servers", value=c2)
    doc.sections.append(est)

    stage1 = QueueParams(lam, mu1, c1)
    lam2 = mu1 if linkage is Linkage.PAPER_CONVENTION else lam
    stage2 = QueueParams(lam2, mu2, c2)
    verdicts = [check_stability(stage1), check_stability(stage2)]
    if not all(v.stable for v in verdicts):
        stab = Section("stability", "Stability", ["traffic_intensity", "stable"])
        for idx, v in enumerate(verdicts, start=1):
            stab.add(f"stage{idx}", "ratio", f"Stage {idx}", traffic_intensity=v.intensity, stable=v.stable)
        doc.sections.append(stab)
        if args.allow_unstable:
            doc.notes.append("unstable configuration: metrics not computed")
            return doc, EXIT_OK
        bad = [i for i, v in enumerate(verdicts, start=1) if not v.stable]
        raise CliError(f"unstable stage(s) {bad}: traffic intensity >= 1", EXIT_UNSTABLE)

    cfg = link_stages(stage1, mu2, c2, linkage)
    _stations_doc(doc, cfg, args.n, args.alpha)
    doc.sections.append(tail_section("tails", "Tail probabilities", cfg.stages, args.t))
    return doc, EXIT_OK


def _load_sim_network(args):
    if args.config:
        try:
            spec = json.loads(Path(args.config).read_text(encoding="utf-8"))
            s1 = QueueParams(float(spec["stage1"]["lam"]), float(spec["stage1"]["mu"]), int(spec["stage1"]["servers"]))
            if "stage2" not in spec:
                return s1
            s2 = spec["stage2"]
            return s1, float(s2["mu"]), int(s2["servers"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise CliError(f"bad config {args.config}: {exc}") from None
    if args.lam is None or args.mu is None or args.servers is None:
        raise CliError("simulate needs --config or --lam, --mu and --servers")
    s1 = QueueParams(args.lam, args.mu, args.servers)
    if args.mu2 is None:
        return s1
    if args.servers2 is None:
        raise CliError("--mu2 needs --servers2")
    return s1, args.mu2, args.servers2


def cmd_simulate(args) -> tuple[ReportDocument, int]:
    net = _load_sim_network(args)
    if isinstance(net, tuple):
        s1, mu2, c2 = net
        network = (s1, QueueParams(s1.lam, mu2, c2))
    else:
        network = net
    cfg = SimConfig(network, args.horizon, args.warmup, args.seed, args.reps, args.allow_unstable)
    inputs = {"seed": args.seed, "horizon": args.horizon, "warmup": args.warmup, "replications": args.reps,
              "stations": [{"lam": s.lam, "mu": s.mu, "servers": s.servers} for s in cfg.stations]}
    doc = ReportDocument("simulate", _metadata(args, **inputs))
    doc.metadata["seed"] = args.seed

    stable = all(check_stability(s).stable for s in cfg.stations)
    if not stable and not args.allow_unstable:
        raise CliError("unstable simulated station (use --allow-unstable)", EXIT_UNSTABLE)
    result = simulate(cfg, workers=args.workers, trace_path=args.trace)

    sim = Section("simulation", "Simulated estimates", ["mean", "se"])
    units = {"N": "customers", "Q": "customers", "W": "min", "T": "min", "throughput": "1/min"}
    for idx, est in enumerate(result.stages, start=1):
        for m, e in est.items():
            sim.add(f"stage{idx}.{m}", units[m], mean=e.mean, se=e.se)
    if len(result.stages) > 1:
        for m, e in result.network.items():
            sim.add(f"network.{m}", units[m], mean=e.mean, se=e.se)
    sim.add("completed", "customers", mean=result.completed)
    doc.sections.append(sim)

    if not stable:
        doc.notes.append("unstable configuration simulated: no closed-form comparison")
        return doc, EXIT_OK
    report = validate_against_analytics(cfg, result=result)
    disc = Section("discrepancy", "Simulation vs closed form", ["analytical", "simulated", "se", "z", "flagged"])
    for r in report.rows:
        disc.add(f"{r.scope.replace(' ', '')}.{r.metric}", units[r.metric], analytical=r.analytical,
                 simulated=r.simulated, se=r.se, z=r.z, flagged=r.flagged)
    doc.sections.append(disc)
    if report.flagged:
        doc.notes.append(f"{len(report.flagged)} metric(s) with |z| > 3")
        return doc, EXIT_FLAGGED
    return doc, EXIT_OK


def _scenario_section(rows, constraints) -> Section:
    labels = [c.label() for c in constraints]
    sec = Section("scenarios", "Server-count scenarios",
                  ["c1", "c2", "total", "stable", "feasible", "N", "Q", "T", "W", *labels])
    for r in rows:
        values = {"c1": r.c1, "c2": r.c2, "total": r.total_servers, "stable": r.stable, "feasible": r.feasible}
        if r.network is not None:
            values.update(N=r.network.mean_in_network, Q=r.network.mean_queue,
                          T=r.network.mean_sojourn, W=r.network.mean_wait)
        values.update(r.checks)
        sec.add("scenario", "mixed", f"({r.c1},{r.c2})", **values)
    return sec


def cmd_optimize(args) -> tuple[ReportDocument, int]:
    constraints = list(args.constraint)
    lam, mu1, mu2 = args.lam, args.mu1, args.mu2
    if args.preset == "reference":
        constraints = constraints or list(REFERENCE_PRESET)
        lam = ref.ARRIVAL_RATE if lam is None else lam
        mu1 = ref.SERVICE_RATE_1 if mu1 is None else mu1
        mu2 = ref.SERVICE_RATE_2 if mu2 is None else mu2
    if None in (lam, mu1, mu2):
        raise CliError("optimize needs --lam, --mu1 and --mu2 (or --preset reference)")
    # base servers only need to be stable; scan replaces them
    c1_base = int(lam / mu1) + 1
    c2_base = int(mu1 / mu2) + 1
    base = TandemConfig(QueueParams(lam, mu1, c1_base), QueueParams(mu1, mu2, c2_base))
    rows = scan_scenarios(base, args.c1_range, args.c2_range, constraints, args.t,
                          include_unstable=args.include_unstable, n=args.n, alpha=args.alpha)
    doc = ReportDocument("optimize", _metadata(
        args, lam=lam, mu1=mu1, mu2=mu2, constraints=[c.label() for c in constraints],
        c1_range=[args.c1_range.start, args.c1_range.stop - 1], c2_range=[args.c2_range.start, args.c2_range.stop - 1],
        t=list(args.t), n=args.n, alpha=args.alpha,
    ))
    doc.sections.append(_scenario_section(rows, constraints))
    best = best_scenario(rows)
    if best is None:
        attempts = [r for r in rows if r.stable] or rows
        if attempts:
            attempt = min(attempts, key=lambda r: (sum(not ok for ok in r.checks.values()), -r.total_servers))
            sec = _scenario_section([attempt], constraints)
            sec.key, sec.title = "best_attempt", "Best attempt (infeasible)"
            doc.sections.append(sec)
        doc.notes.append("no feasible configuration in the scanned ranges")
        return doc, EXIT_INFEASIBLE
    doc.metadata["best"] = [best.c1, best.c2]
    doc.sections.append(network_section("best_network", f"Network at c1={best.c1}, c2={best.c2}", best.network))
    doc.sections.append(scenario_detail_section("best_detail", f"Stage and network moments at c1={best.c1}, c2={best.c2}", best.network))
    doc.sections.append(tail_section("best_tails", "Tail probabilities at the selected configuration", best.stages, args.t))
    return doc, EXIT_OK


def cmd_sample(args) -> tuple[ReportDocument, int]:
    frame = load_clusters(args.clusters_csv, args.k)
    doc = ReportDocument("sample", _metadata(args, clusters=args.clusters_csv, k=args.k))
    sec = Section("clusters", f"Cluster shares and inclusion probabilities (k={args.k})",
                  ["size", "share", "inclusion_probability"])
    for j, (name, size) in enumerate(frame.clusters):
        sec.add(name, "probability", name, size=size, share=cluster_share(frame, j),
                inclusion_probability=inclusion_probability(frame, j))
    doc.sections.append(sec)
    return doc, EXIT_OK


def reference_document(lam=ref.ARRIVAL_RATE, mu1=ref.SERVICE_RATE_1, mu2=ref.SERVICE_RATE_2,
                       n=ref.SAMPLE_SIZE, alpha=ref.ALPHA, metadata=None) -> ReportDocument:
    """Reference-case tables: both stations, intervals, network, best case, tails."""
    doc = ReportDocument("report", metadata or {})
    cfg = link_stages(QueueParams(lam, mu1, ref.SERVERS[0]), mu2, ref.SERVERS[1])
    _stations_doc(doc, cfg, n, alpha)
    doc.sections.append(tail_section("tails", "Tail probabilities, original servers", cfg.stages, (1.0, 2.0)))
    c1, c2 = ref.BEST_SERVERS
    best = link_stages(QueueParams(lam, mu1, c1), mu2, c2)
    best_net = network_metrics(best, n, alpha)
    doc.sections.append(scenario_detail_section("best_case", f"Best case c1={c1}, c2={c2}", best_net))
    doc.sections.append(tail_section("best_tails", "Tail probabilities, best case", best.stages, DEFAULT_T_VALUES))
    doc.sections.append(_reference_comparison(cfg, best))
    doc.notes.extend(service_time_notes([station_metrics(s) for s in cfg.stages]))
    doc.notes.extend(tail_notes(cfg.stages))
    return doc


def _reference_comparison(cfg: TandemConfig, best: TandemConfig) -> Section:
    sec = Section("reference", "Comparison with reference figures",
                  ["reference", "computed", "abs_diff", "tolerance", "status"])

    def add(metric, unit, printed, computed, tol, status=None):
        diff = abs(computed - printed)
        if status is None:
            status = "ok" if diff <= tol else "off"
        sec.add(metric, unit, reference=printed, computed=computed, abs_diff=diff, tolerance=tol, status=status)

    for idx, stage in enumerate(cfg.stages, start=1):
        m = station_metrics(stage)
        tol = 0.005 if idx == 1 else 0.01
        for name, printed in ref.STATION[idx].items():
            status = "erratum" if (idx, name) in ref.ERRATA else None
            add(f"stage{idx}.{name}", "", printed, getattr(m, name), tol, status)
    for (idx, kind, t), printed in ref.TAILS.items():
        fn = wait_tail if kind == "W" else sojourn_tail
        status = "discrepancy" if (idx, kind, t) in ref.TAIL_DISCREPANCIES else None
        add(f"stage{idx}.P({kind}>{t:g})", "probability", printed, fn(cfg.stages[idx - 1], t), 0.005, status)
    for (kind, t), printed in ref.BEST_TAILS.items():
        fn = wait_tail if kind == "W" else sojourn_tail
        for idx in (1, 2):
            add(f"best.stage{idx}.P({kind}>{t:g})", "probability", printed[idx - 1], fn(best.stages[idx - 1], t), 0.001)
    return sec


def _emit(doc: ReportDocument, args) -> None:
    text = doc.render(args.format)
    out = args.out
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{ 'txt' if args.format == 'text' else args.format}")
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "report":
            doc = reference_document(args.lam, args.mu1, args.mu2, args.n, args.alpha,
                                     _metadata(args, lam=args.lam, mu1=args.mu1, mu2=args.mu2, n=args.n, alpha=args.alpha))
            code = EXIT_OK
        else:
            doc, code = COMMANDS[args.command](args)
        _emit(doc, args)
        return code
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except UnstableStationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
