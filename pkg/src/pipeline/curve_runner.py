#!/usr/bin/env python3
"""
Toroidal curve runner
Command-line bridge: sample, verify, export and list presets.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration or
input, 3 unexpected failure. Results go to stdout as JSON; errors go to
stderr as {"status": "error", "error": {...}, "error_codes": [...]}.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add repository root to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", ".."))
from src.core.config import (
    OUTPUT_FORMATS,
    RunConfig,
    build_run_config,
    load_config_file,
    parse_outputs,
    parse_tolerance_pairs,
)
from src.core.errors import ConfigurationError, GeometryError
from src.geometry.families import (
    GENERAL_FAMILIES,
    PRESET_NAMES,
    describe_preset,
    preset_spec,
)
from src.pipeline.export import export_records, load_json
from src.pipeline.sample_pipeline import STATUSES, create_sample_pipeline
from src.pipeline.verification import run_verification

logger = logging.getLogger("src.pipeline.curve_runner")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNEXPECTED = 3


def _add_curve_arguments(parser: argparse.ArgumentParser) -> None:
    curve = parser.add_argument_group("curve")
    curve.add_argument("--preset", type=str, help=f"one of {', '.join(PRESET_NAMES + tuple(GENERAL_FAMILIES))}")
    curve.add_argument("--expr-x", dest="expr_x", type=str, help="x(t) expression")
    curve.add_argument("--expr-y", dest="expr_y", type=str, help="y(t) expression")
    curve.add_argument("--expr-f", dest="expr_f", type=str, help="explicit height f(t) expression")
    curve.add_argument("--a", type=float, help="torus: distance from axis to tube centre")
    curve.add_argument("--b", type=float, help="torus: tube radius")
    curve.add_argument("--n", type=int, help="helix winding count")
    curve.add_argument("--r", type=float, help="rolling-circle radius")
    curve.add_argument("--R", dest="R", type=float, help="fixed-circle radius (general families)")
    curve.add_argument("--branch", choices=("upper", "lower"), help="torus height branch")
    curve.add_argument("--period", type=float, help="period of a user curve")
    curve.add_argument("--t-min", dest="t_min", type=float)
    curve.add_argument("--t-max", dest="t_max", type=float)

    run = parser.add_argument_group("run")
    run.add_argument("--samples", type=int)
    run.add_argument("--out", type=str, help=f"comma-separated subset of {','.join(OUTPUT_FORMATS)}")
    run.add_argument("--out-dir", dest="out_dir", type=str)
    run.add_argument("--tol", action="append", default=[], metavar="KEY=VAL", help="override a tolerance")
    run.add_argument("--config", type=str, metavar="PATH", help="TOML config file")
    run.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curve_runner",
        description="Toroidal curves: Frenet frames, focal curves and their verification",
    )
    parser.add_argument("--log-level", default="WARNING", help="logging level on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="sample a curve and write its invariants")
    _add_curve_arguments(sample)

    verify = sub.add_parser("verify", help="run the cross-path and oracle checks")
    _add_curve_arguments(verify)

    export = sub.add_parser("export", help="write SVG/OBJ (or any format) of a sampled curve")
    _add_curve_arguments(export)
    export.add_argument("--from-json", dest="from_json", type=str, metavar="PATH", help="reuse a sample JSON file")

    sub.add_parser("presets", help="list built-in presets")
    return parser


def config_from_args(args: argparse.Namespace, default_outputs: Optional[str] = None) -> RunConfig:
    """Flags > config file > defaults."""
    file_values: Dict[str, Any] = load_config_file(Path(args.config)) if args.config else {}
    t_range = None
    if (args.t_min is None) != (args.t_max is None):
        raise ConfigurationError("--t-min and --t-max must be given together", key="t_range")
    if args.t_min is not None:
        t_range = (args.t_min, args.t_max)
    outputs = args.out
    if outputs is None and default_outputs and "outputs" not in file_values:
        outputs = default_outputs
    flag_values = {
        "preset": args.preset,
        "expr_x": args.expr_x,
        "expr_y": args.expr_y,
        "expr_f": args.expr_f,
        "a": args.a,
        "b": args.b,
        "n": args.n,
        "r": args.r,
        "R": args.R,
        "branch": args.branch,
        "period": args.period,
        "t_range": t_range,
        "samples": args.samples,
        "outputs": outputs,
        "out_dir": args.out_dir,
        "workers": args.workers,
        "tol": parse_tolerance_pairs(args.tol) or None,
    }
    return build_run_config(file_values, flag_values)


def _stem(config: RunConfig) -> str:
    return config.preset or "curve"


def cmd_sample(config: RunConfig) -> Dict[str, Any]:
    pipeline = create_sample_pipeline(config)
    records = pipeline.run()
    files = export_records(records, config.outputs, config.out_dir, _stem(config))
    counts = {status: sum(1 for r in records if r.status == status) for status in STATUSES}
    return {
        "status": "success",
        "curve": pipeline.setup.label,
        "records": len(records),
        "arcs": [list(arc) for arc in pipeline.setup.arcs],
        "counts": counts,
        "files": files,
    }


def cmd_verify(config: RunConfig) -> Dict[str, Any]:
    return run_verification(config).to_dict()


def cmd_export(args: argparse.Namespace) -> Dict[str, Any]:
    if args.from_json:
        records = load_json(Path(args.from_json))
        outputs = parse_outputs(args.out or "svg,obj")
        out_dir = Path(args.out_dir or "out")
        stem = Path(args.from_json).stem
        label = stem
    else:
        config = config_from_args(args, default_outputs="svg,obj")
        pipeline = create_sample_pipeline(config)
        records = pipeline.run()
        outputs, out_dir, stem = config.outputs, config.out_dir, _stem(config)
        label = pipeline.setup.label
    unknown = set(outputs) - set(OUTPUT_FORMATS)
    if unknown:
        raise ConfigurationError(f"unknown output formats {sorted(unknown)}", key="outputs")
    files = export_records(records, outputs, out_dir, stem)
    return {"status": "success", "curve": label, "files": files}


def cmd_presets() -> List[Dict[str, Any]]:
    listing = [describe_preset(name, preset_spec(name)) for name in PRESET_NAMES]
    for name in GENERAL_FAMILIES:
        listing.append({"name": name, "family": name, "kind": name, "requires": ["R", "r", "a", "b"]})
    return listing


def _error_payload(exc: Exception) -> Dict[str, Any]:
    if isinstance(exc, GeometryError):
        return {"status": "error", "error": exc.to_dict(), "error_codes": [exc.error_code]}
    return {
        "status": "error",
        "error": {"error_type": type(exc).__name__, "message": str(exc)},
        "error_codes": ["PROCESSING_ERROR"],
    }


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "presets":
            print(json.dumps(cmd_presets(), indent=2))
            return EXIT_OK
        if args.command == "export":
            print(json.dumps(cmd_export(args), indent=2))
            return EXIT_OK

        config = config_from_args(args)
        if args.command == "sample":
            print(json.dumps(cmd_sample(config), indent=2))
            return EXIT_OK

        report = cmd_verify(config)
        print(json.dumps(report, indent=2))
        if report["status"] != "pass":
            worst = report.get("worst", {})
            failure = {
                "status": "error",
                "error": {
                    "message": f"verification failed: {', '.join(report['failed'])}",
                    "check": worst.get("check"),
                    "t": worst.get("t"),
                    "deviation": worst.get("deviation"),
                },
                "error_codes": ["VERIFICATION_FAILED"],
            }
            print(json.dumps(failure), file=sys.stderr)
            return EXIT_VERIFY_FAILED
        return EXIT_OK

    except GeometryError as exc:
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        logger.exception("unexpected failure")
        print(json.dumps(_error_payload(exc)), file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
