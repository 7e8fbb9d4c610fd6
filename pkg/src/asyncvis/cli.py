"""Command-line interface: simulate, analyze, serve, replay.

Failures exit nonzero with a machine-readable JSON error on stderr.
"""

import argparse
import glob
import json
import sys

from . import analytics
from .errors import AsyncVisError, ConfigurationError
from .scheduler import parse_latency_profile
from .session import SessionConfig, replay, run_simulation
from .trace import load_trace
from .types import (
    ANIMATION,
    BLOCKING,
    CATEGORICAL,
    CUMULATIVE,
    MULTIPLES,
    NAIVE,
    ORDINAL,
    OVERLAY,
    PolicySpec,
)
from .workload import parse_agent_spec, parse_task_spec

METRIC_NAMES = ("completion_time", "accuracy", "concurrency_fraction",
                "out_of_order_count", "mismatch_count", "flashing_count")


def parse_policy_spec(text):
    """blocking | naive | cumulative | multiples:K | overlay:K:SCHEME |
    animation:DWELL"""
    text = text.strip()
    if text in (BLOCKING, NAIVE, CUMULATIVE):
        return PolicySpec(kind=text)
    if text.startswith("multiples:"):
        return PolicySpec(kind=MULTIPLES, cap=int(text[len("multiples:"):]))
    if text.startswith("overlay:"):
        parts = text[len("overlay:"):].split(":")
        if len(parts) == 1:
            return PolicySpec(kind=OVERLAY, cap=int(parts[0]))
        if len(parts) == 2 and parts[1] in (ORDINAL, CATEGORICAL):
            return PolicySpec(kind=OVERLAY, cap=int(parts[0]), scheme=parts[1])
        raise ConfigurationError(f"bad overlay policy {text!r}")
    if text.startswith("animation:"):
        return PolicySpec(kind=ANIMATION, min_dwell=float(text[len("animation:"):]))
    raise ConfigurationError(f"unknown policy {text!r}")


def _cmd_simulate(args):
    config = SessionConfig(
        policy=parse_policy_spec(args.policy),
        latency=parse_latency_profile(args.latency),
        task=parse_task_spec(args.task),
        agent=parse_agent_spec(args.agent),
        seed=args.seed,
        participant=args.participant,
    )
    summary = run_simulation(config, out_path=args.out)
    print(json.dumps(summary.to_dict(), indent=2))
    return 0


def _expand(paths):
    out = []
    for p in paths:
        matches = sorted(glob.glob(p))
        out.extend(matches if matches else [p])
    return out


def _format_table(rows, headers):
    widths = [len(h) for h in headers]
    text_rows = []
    for row in rows:
        cells = [f"{v:.4g}" if isinstance(v, float) else str(v) for v in row]
        widths = [max(w, len(c)) for w, c in zip(widths, cells)]
        text_rows.append(cells)
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for cells in text_rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


def _cmd_analyze(args):
    metrics = [m.strip() for m in args.metrics.split(",")] if args.metrics \
        else list(METRIC_NAMES)
    for name in metrics:
        if name not in METRIC_NAMES:
            raise ConfigurationError(f"unknown metric {name!r}")

    if args.compare:
        return _cmd_compare(args, metrics)

    paths = _expand(args.paths)
    if not paths:
        raise ConfigurationError("no trace files given")
    traces = [load_trace(p) for p in paths]
    removal = None
    if args.clean:
        kept, removal = analytics.clean_traces(traces)
        kept_set = set(id(t) for t in kept)
        paths = [p for p, t in zip(paths, traces) if id(t) in kept_set]
        traces = kept

    rows = []
    reports = []
    for path, trace in zip(paths, traces):
        report = analytics.metric_report(trace)
        reports.append({"path": path, "metrics": report.to_dict()})
        rows.append([path] + [getattr(report, name) for name in metrics])
    print(_format_table(rows, ["trace"] + list(metrics)))
    payload = {"traces": reports}
    if removal is not None:
        payload["removed"] = removal
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_compare(args, metrics):
    group_a = [load_trace(p) for p in _expand([args.compare[0]])]
    group_b = [load_trace(p) for p in _expand([args.compare[1]])]
    if args.clean:
        group_a, _ = analytics.clean_traces(group_a)
        group_b, _ = analytics.clean_traces(group_b)
    if not group_a or not group_b:
        raise ConfigurationError("comparison groups must be non-empty")

    results = []
    for name in metrics:
        a = [float(getattr(analytics.metric_report(t), name) or 0.0)
             for t in group_a]
        b = [float(getattr(analytics.metric_report(t), name) or 0.0)
             for t in group_b]
        if args.test == "signed-rank":
            if len(a) != len(b):
                raise ConfigurationError(
                    "signed-rank needs equal-length paired groups")
            try:
                res = analytics.wilcoxon_signed_rank(list(zip(a, b)))
            except AsyncVisError as exc:
                results.append({"metric": name, "skipped": str(exc)})
                continue
        else:
            res = analytics.wilcoxon_rank_sum(a, b)
        results.append({"metric": name, **res.to_dict()})

    tested = [r for r in results if "p" in r]
    if args.correction == "holm" and tested:
        flags, _ = analytics.holm_bonferroni([r["p"] for r in tested],
                                             alpha=args.alpha)
        for r, flag in zip(tested, flags):
            r["reject"] = flag

    rows = [[r["metric"], r.get("statistic", "-"), r.get("p", "-"),
             r.get("reject", "-")] for r in results]
    print(_format_table(rows, ["metric", "statistic", "p", "reject"]))
    print(json.dumps({"comparison": results, "alpha": args.alpha,
                      "correction": args.correction}, indent=2))
    return 0


def _cmd_serve(args):
    import asyncio

    from .server import serve

    settings = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            settings = json.load(fh)
    try:
        asyncio.run(serve(
            args.port,
            static_dir=settings.get("static_dir"),
            trace_dir=settings.get("trace_dir"),
            host=settings.get("host", "0.0.0.0"),
        ))
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_replay(args):
    trace = load_trace(args.path)
    events = replay(trace)
    if args.verify:
        print(json.dumps({"path": args.path, "verified": True,
                          "reconstructed_events": len(events)}))
    else:
        for t, ev_type, req_id, slot in events:
            print(json.dumps({"t": t, "type": ev_type, "req_id": req_id,
                              "slot": slot}))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="asyncvis",
        description="Asynchronous-rendering engine, simulator, and service")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one headless agent session")
    sim.add_argument("--policy", required=True,
                     help="blocking|naive|cumulative|multiples:K|"
                          "overlay:K:ordinal|overlay:K:categorical|"
                          "animation:DWELL")
    sim.add_argument("--latency", required=True,
                     help="none|fixed:S|uniform:LO,HI|trace:PATH")
    sim.add_argument("--task", required=True, help="threshold:CUT|maximum|trend")
    sim.add_argument("--agent", required=True, help="serial:THINK|eager:THINK")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True, help="trace output path (JSONL)")
    sim.add_argument("--participant", default=None)
    sim.set_defaults(func=_cmd_simulate)

    ana = sub.add_parser("analyze", help="metrics and tests over traces")
    ana.add_argument("paths", nargs="*", help="trace files or globs")
    ana.add_argument("--clean", action="store_true",
                     help="apply the log-cleaning rules first")
    ana.add_argument("--metrics", default=None,
                     help=f"comma list from: {','.join(METRIC_NAMES)}")
    ana.add_argument("--compare", nargs=2, metavar=("A", "B"),
                     help="two trace groups (files or globs) to test")
    ana.add_argument("--test", choices=("signed-rank", "rank-sum"),
                     default="rank-sum")
    ana.add_argument("--alpha", type=float, default=0.05)
    ana.add_argument("--correction", choices=("none", "holm"), default="holm")
    ana.set_defaults(func=_cmd_analyze)

    srv = sub.add_parser("serve", help="run the live session service")
    srv.add_argument("--port", type=int, required=True)
    srv.add_argument("--config", default=None,
                     help="JSON file: static_dir, trace_dir, host")
    srv.set_defaults(func=_cmd_serve)

    rep = sub.add_parser("replay", help="reconstruct a trace's render history")
    rep.add_argument("path")
    rep.add_argument("--verify", action="store_true",
                     help="check the reconstruction against the log")
    rep.set_defaults(func=_cmd_replay)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AsyncVisError as exc:
        print(json.dumps({"error": exc.code, "detail": str(exc)}),
              file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io_error", "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
