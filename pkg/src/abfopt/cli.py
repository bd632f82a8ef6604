"""Command-line front end: run benchmark specs, compare methods, verify runs.

The CLI is a thin shell over the library: every number it prints is
recomputable from the exported CSVs.  Exit codes: 0 success, 1 certificate
violation, 2 configuration or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import diagnostics, solvers
from .errors import ConfigurationError, DivergenceError, UnconvergedError
from .problem import instance_from_descriptor

OUTPUT_DIR_ENV = "ABFOPT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


def _load_json(text_or_path: str) -> dict:
    """Accept an inline JSON object or a path to a JSON file."""
    text = text_or_path
    if not text_or_path.lstrip().startswith("{"):
        with open(text_or_path) as handle:
            text = handle.read()
    return json.loads(text)


def _resolve_instance(descriptor_arg: str):
    return instance_from_descriptor(_load_json(descriptor_arg))


def _config_from_entry(entry: dict) -> solvers.RunConfig:
    schedule = entry.get("schedule", {})
    return solvers.RunConfig(
        method=entry["method"],
        max_iterations=int(entry.get("iterations", entry.get("max_iterations", 0))),
        s=entry.get("s"),
        record_every=int(entry.get("record_every", 1)),
        schedule_variant=schedule.get("variant", "tk"),
        m=float(schedule.get("m", 1.0)),
        alpha=float(schedule.get("alpha", 3.0)),
        fixed_point_tol=(entry.get("stopping") or {}).get("fixed_point_tol"),
    )


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "w") as handle:
        handle.write(text)
    os.replace(tmp, path)


def cmd_run(spec_path: str) -> int:
    """Execute every run in a benchmark spec; exit 0 iff no violations."""
    try:
        with open(spec_path) as handle:
            text = handle.read()
        spec = json.loads(text)
    except OSError as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: spec parse failure at line {exc.lineno}, column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return EXIT_CONFIG

    output_dir = os.environ.get(OUTPUT_DIR_ENV) or spec.get("output_dir", ".")
    report_format = spec.get("report", "json")
    if report_format not in ("json", "csv"):
        print(f"error: report must be 'json' or 'csv', got {report_format!r}",
              file=sys.stderr)
        return EXIT_CONFIG

    summaries = []
    any_violation = False
    for index, entry in enumerate(spec.get("runs", [])):
        try:
            instance = instance_from_descriptor(entry["instance"])
            config = _config_from_entry(entry)
            trajectory = solvers.run(instance, config)
        except (ConfigurationError, KeyError, UnconvergedError) as exc:
            print(f"error: run {index}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except DivergenceError as exc:
            print(f"error: run {index} diverged: {exc}", file=sys.stderr)
            return EXIT_VIOLATION
        name = f"run{index:03d}_{config.method}_{instance.kind}"
        diagnostics.write_trajectory_csv(
            trajectory, os.path.join(output_dir, name + ".csv"))
        checks = diagnostics.verify_trajectory(trajectory)
        violations = [c.name for c in checks if not c.passed]
        any_violation = any_violation or bool(violations)
        bounds = [c for c in checks
                  if c.name.startswith(("theorem_bound", "reference_bound"))]
        summaries.append({
            "method": config.method,
            "instance": instance.descriptor(),
            "final_gap": trajectory.final_gap,
            "bound_slack_min": (-bounds[0].worst if bounds else None),
            "violations": violations,
        })
        status = "violations: " + ", ".join(violations) if violations else "ok"
        print(f"{name}: final_gap={trajectory.final_gap:.6g} ({status})")

    if report_format == "json":
        _atomic_write(os.path.join(output_dir, "summary.json"),
                      json.dumps(summaries, indent=2, default=float) + "\n")
    else:
        lines = ["method,instance_kind,final_gap,bound_slack_min,violations"]
        for item in summaries:
            lines.append(",".join([
                item["method"], item["instance"]["kind"],
                repr(float(item["final_gap"])),
                "" if item["bound_slack_min"] is None else repr(float(item["bound_slack_min"])),
                ";".join(item["violations"]),
            ]))
        _atomic_write(os.path.join(output_dir, "summary.csv"), "\n".join(lines) + "\n")
    return EXIT_VIOLATION if any_violation else EXIT_OK


def cmd_compare(descriptor_arg: str, iterations: int, record_every: int = 1) -> int:
    """Run the backward-forward method and the forward-backward baseline side
    by side and print the per-iteration gap table.

    Observational only: worst-case-rate comparisons between the two methods
    come from performance-estimation analysis, not from any per-instance
    guarantee, so no dominance is asserted here.
    """
    instance = _resolve_instance(descriptor_arg)
    trajectories = {}
    for method in ("abf", "fista"):
        config = solvers.RunConfig(method=method, max_iterations=iterations,
                                   record_every=record_every)
        trajectories[method] = solvers.run(instance, config)
    print("observational comparison; no per-instance dominance is implied")
    print(f"{'k':>6s} {'gap_abf':>13s} {'bound_abf':>13s} "
          f"{'gap_fista':>13s} {'bound_fista':>13s} {'ratio':>10s}")
    tiny = float(np.finfo(float).tiny)
    abf_by_k = {r.k: r for r in trajectories["abf"].records}
    for rec in trajectories["fista"].records:
        abf_rec = abf_by_k.get(rec.k)
        if abf_rec is None:
            continue
        ratio = (max(abf_rec.f_gap, 0.0) + tiny) / (max(rec.f_gap, 0.0) + tiny)
        print(f"{rec.k:6d} {abf_rec.f_gap:13.6e} {abf_rec.bound:13.6e} "
              f"{rec.f_gap:13.6e} {rec.bound:13.6e} {ratio:10.4g}")
    final_abf = trajectories["abf"].final_gap
    final_fista = trajectories["fista"].final_gap
    print(f"final gaps: abf={final_abf:.6e} fista={final_fista:.6e}")
    return EXIT_OK


def cmd_verify(descriptor_arg: str, method: str, iterations: int) -> int:
    """Run one method and assert every applicable invariant."""
    instance = _resolve_instance(descriptor_arg)
    config = solvers.RunConfig(method=method, max_iterations=iterations)
    trajectory = solvers.run(instance, config)
    checks = diagnostics.verify_trajectory(trajectory)
    failed = False
    for check in checks:
        print(str(check))
        failed = failed or not check.passed
    print(f"{sum(c.passed for c in checks)}/{len(checks)} invariants passed")
    return EXIT_VIOLATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abfopt",
        description="Backward-forward composite optimization runs with "
                    "certificate verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a benchmark spec (JSON)")
    p_run.add_argument("spec", help="path to the spec file")

    p_cmp = sub.add_parser("compare", help="ABF vs FISTA gap table")
    p_cmp.add_argument("instance", help="instance descriptor (JSON text or file)")
    p_cmp.add_argument("--iters", type=int, default=100)
    p_cmp.add_argument("--record-every", type=int, default=1)

    p_ver = sub.add_parser("verify", help="run one method and check invariants")
    p_ver.add_argument("instance", help="instance descriptor (JSON text or file)")
    p_ver.add_argument("method", choices=solvers.METHODS)
    p_ver.add_argument("--iters", type=int, default=500)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.spec)
        if args.command == "compare":
            return cmd_compare(args.instance, args.iters, args.record_every)
        return cmd_verify(args.instance, args.method, args.iters)
    except json.JSONDecodeError as exc:
        print(f"error: JSON parse failure at line {exc.lineno}, column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError, OSError, KeyError, UnconvergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"error: divergence: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
