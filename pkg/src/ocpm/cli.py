"""Command-line front end.

Every subcommand reads its input artifact from ``--input`` and writes its
reports into the ``--out`` directory, so stages can be run one by one::

    ocpm generate --seed 7 --out run/
    ocpm preprocess --input run/log.ocel.json --out run/
    ocpm check --input run/preprocessed.ocel.json --rules default --out run/

Exit codes: 0 success, 1 domain error (integrity, unknown type, bad
config), 2 usage error (bad flags, missing input file).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import conformance, discovery, performance, preprocessing, stats
from .exceptions import OCPMError
from .loggen import GenConfig, generate
from .ocel import OCEventLog, parse_ocel_json, serialize_ocel_json

logger = logging.getLogger("ocpm")

FORMATS = ("json", "csv", "dot")


class UsageError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(out: Path, name: str, content) -> Path:
    path = out / name
    if isinstance(content, str):
        content = content.encode("utf-8")
    path.write_bytes(content)
    logger.info("wrote %s", path)
    return path


def _read_text(path) -> str:
    if path is None:
        raise UsageError("--input is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _load_log(path) -> OCEventLog:
    if path is None:
        raise UsageError("--input is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return parse_ocel_json(p.read_bytes())


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory not writable: {out}")
    return out


def _counts(log: OCEventLog) -> dict:
    per_type = dict.fromkeys(sorted(log.object_types), 0)
    for obj in log.objects.values():
        per_type[obj.otype] += 1
    return {"events": len(log.events), "objects": per_type}


# ---------------------------------------------------------------------------
# stages


def _gen_config(args) -> GenConfig:
    config = GenConfig.from_json(_read_text(args.config)) if args.config else GenConfig()
    if args.seed is not None:
        config = GenConfig.from_dict({**config.to_dict(), "seed": args.seed})
    return config


def cmd_generate(args) -> int:
    config = _gen_config(args)
    out = _out_dir(args)
    log, truth = generate(config)
    _write(out, "log.ocel.json", serialize_ocel_json(log))
    _write(out, "log.truth.json", truth.to_json())
    return 0


def _validation_report(log: OCEventLog) -> dict:
    return {"valid": True, **stats.log_summary(log)}


def cmd_validate(args) -> int:
    log = _load_log(args.input)
    report = _validation_report(log)
    print(f"valid: {len(log.events)} events, {len(log.objects)} objects")
    if args.out:
        _write(_out_dir(args), "validation.json", _dump(report))
    return 0


def _preprocess_config(args) -> preprocessing.PreprocessConfig:
    if args.config:
        return preprocessing.PreprocessConfig.from_json(_read_text(args.config))
    return preprocessing.PreprocessConfig()


def _run_preprocess(log, config):
    clean, steps, results = preprocessing.preprocess(log, config)
    report = {
        "config": config.to_dict(),
        "steps": steps,
        "removed_objects": [
            {"step": s["step"],
             "oids": {t: sorted(v) for t, v in sorted(r.removed_objects.items())}}
            for s, r in zip(steps, results)
        ],
    }
    return clean, report


def cmd_preprocess(args) -> int:
    log = _load_log(args.input)
    out = _out_dir(args)
    clean, report = _run_preprocess(log, _preprocess_config(args))
    _write(out, "preprocessed.ocel.json", serialize_ocel_json(clean))
    _write(out, "preprocess_report.json", _dump(report))
    return 0


def _run_discover(log, out, fmt, min_edge_freq) -> dict:
    ocdfg = discovery.discover_ocdfg(log)
    net = discovery.assemble_ocpn(ocdfg)
    if fmt == "dot":
        _write(out, "ocdfg.dot", discovery.export_dot(ocdfg, min_edge_freq))
        _write(out, "ocpn.dot", discovery.export_dot(net))
    else:
        _write(out, "ocdfg.json", _dump(discovery.ocdfg_to_dict(ocdfg)))
        _write(out, "ocpn.json", _dump(discovery.ocpn_to_dict(net)))
    return {
        "edges": {t: len(d.edges) for t, d in sorted(ocdfg.per_type.items())},
        "variable_arcs": sum(1 for a in net.arcs if a.variable),
    }


def cmd_discover(args) -> int:
    if args.format == "csv":
        raise UsageError("discover supports --format json or dot")
    log = _load_log(args.input)
    _run_discover(log, _out_dir(args), args.format, args.min_edge_freq)
    return 0


def _rules(spec):
    if spec in (None, "default"):
        return conformance.default_rules()
    return conformance.rules_from_json(_read_text(spec))


def _run_check(log, rules, out) -> dict:
    reports = conformance.check_all(log, rules)
    _write(out, "conformance.json", _dump({"reports": [r.to_dict() for r in reports]}))
    return {r.rule_id: r.violation_count for r in reports}


def cmd_check(args) -> int:
    rules = _rules(args.rules)
    log = _load_log(args.input)
    _run_check(log, rules, _out_dir(args))
    return 0


def _metric_selection(spec):
    if not spec:
        return performance.METRICS
    names = tuple(n.strip() for n in spec.split(",") if n.strip())
    unknown = [n for n in names if n not in performance.METRICS]
    if unknown:
        raise UsageError(f"unknown metric(s) {unknown}; choose from {list(performance.METRICS)}")
    return names


def _run_perf(log, selection, out, fmt) -> dict:
    results = performance.all_metrics(log, selection)
    doc = {}
    for name, value in results.items():
        if isinstance(value, performance.PerfStat):
            doc[name] = value.to_dict()
            if fmt == "csv":
                _write(out, f"perf_{name}.csv", value.to_csv())
        else:
            doc[name] = value.to_dict()
    _write(out, "performance.json", _dump(doc))
    return {n: v["summary"]["count"] for n, v in doc.items() if "summary" in v}


def cmd_perf(args) -> int:
    if args.format == "dot":
        raise UsageError("perf supports --format json or csv")
    selection = _metric_selection(args.metrics)
    log = _load_log(args.input)
    _run_perf(log, selection, _out_dir(args), args.format)
    return 0


def _run_stats(log, out, fmt, strict) -> dict:
    rows = stats.region_distribution(log, strict=strict)
    summary = stats.log_summary(log)
    _write(out, "stats.json", _dump({"summary": summary, "regions": stats.regions_to_dict(rows)}))
    if fmt == "csv":
        _write(out, "regions.csv", stats.regions_to_csv(rows))
    return {"regions": len(rows)}


def cmd_stats(args) -> int:
    if args.format == "dot":
        raise UsageError("stats supports --format json or csv")
    log = _load_log(args.input)
    _run_stats(log, _out_dir(args), args.format, args.strict)
    return 0


def cmd_pipeline(args) -> int:
    """validate -> preprocess -> discover -> check -> perf -> stats.

    Each stage writes its artifacts into ``--out``; downstream stages use
    the log exactly as written to ``preprocessed.ocel.json``.
    """
    rules = _rules(args.rules)
    selection = _metric_selection(args.metrics)
    config = _preprocess_config(args)
    out = _out_dir(args)
    log = _load_log(args.input)
    stages = [{"stage": "validate", "after": _counts(log)}]
    _write(out, "validation.json", _dump(_validation_report(log)))

    clean, report = _run_preprocess(log, config)
    _write(out, "preprocessed.ocel.json", serialize_ocel_json(clean))
    _write(out, "preprocess_report.json", _dump(report))
    stages.append({"stage": "preprocess", "before": _counts(log), "after": _counts(clean),
                   "steps": report["steps"]})

    dot_or_json = "dot" if args.format == "dot" else "json"
    stages.append({"stage": "discover", **_run_discover(clean, out, dot_or_json,
                                                        args.min_edge_freq)})
    stages.append({"stage": "check", "violations": _run_check(clean, rules, out)})
    perf_fmt = "csv" if args.format == "csv" else "json"
    stages.append({"stage": "perf", "counts": _run_perf(clean, selection, out, perf_fmt)})
    stages.append({"stage": "stats", **_run_stats(clean, out, args.format, False)})
    _write(out, "stage_summary.json", _dump({"stages": stages}))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocpm", description="Object-centric process mining for after-sales service logs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *, inp=True, fmt=None):
        p = sub.add_parser(name, help=help_)
        if inp:
            p.add_argument("--input", help="OCEL 1.0 JSON log")
        p.add_argument("--out", default="." if name != "validate" else None,
                       help="output directory")
        if fmt:
            p.add_argument("--format", choices=FORMATS, default=fmt)
        p.set_defaults(func=func)
        return p

    p = add("generate", cmd_generate, "generate a synthetic log and its ground truth", inp=False)
    p.add_argument("--config", help="GenConfig JSON file")
    p.add_argument("--seed", type=int, help="override the configured seed")

    add("validate", cmd_validate, "parse and validate a log")

    p = add("preprocess", cmd_preprocess, "filter incomplete, anomalous and multi-resource objects")
    p.add_argument("--config", help="preprocessing config JSON file")

    p = add("discover", cmd_discover, "discover OCDFG and OCPN", fmt="json")
    p.add_argument("--min-edge-freq", type=int, default=1,
                   help="hide DFG edges rarer than this in DOT output")

    p = add("check", cmd_check, "evaluate compliance rules")
    p.add_argument("--rules", default="default", help="'default' or a rule JSON file")

    p = add("perf", cmd_perf, "compute performance metrics", fmt="json")
    p.add_argument("--metrics", help=f"comma-separated subset of {','.join(performance.METRICS)}")

    p = add("stats", cmd_stats, "region distribution and log summary", fmt="json")
    p.add_argument("--strict", action="store_true",
                   help="fail when objects lack the region attribute")

    p = add("pipeline", cmd_pipeline, "run every analysis stage", fmt="json")
    p.add_argument("--config", help="preprocessing config JSON file")
    p.add_argument("--rules", default="default")
    p.add_argument("--metrics")
    p.add_argument("--min-edge-freq", type=int, default=1)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("OCPM_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ocpm {args.command}: {exc}", file=sys.stderr)
        return 2
    except OCPMError as exc:
        print(f"ocpm {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
