"""Command-line front end: run scenarios and presets, search the advantage
grid, and exercise the self-check suite.

Exit codes: 0 on success, 1 on validation or numerical failure, 2 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import __version__
from .engine import ConfigError, EngineConfig, NoiseConfig
from .linalg import LinalgError
from .multicycle import (
    compare_coherent_incoherent,
    peak_advantage,
    run_engine,
    sweep,
)
from .output import (
    write_advantage_csv,
    write_grid_csv,
    write_json,
    write_trace_csv,
)
from .scenario import (
    PRESETS,
    OutputSpec,
    ScenarioError,
    ScenarioFile,
    SCHEMA_VERSION,
    config_to_dict,
    resolve_scenario,
)
from .validate import run_all_checks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinotto",
        description="Simulate a coherently fueled two-spin Otto engine "
        "charging a qubit battery.",
    )
    parser.add_argument("--version", action="version", version=f"spinotto {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for result files")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument(
        "--format",
        choices=("csv", "json", "both"),
        default=None,
        help="override the scenario's output formats",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help="reserved; all computation is deterministic and ignores it",
    )

    run_p = sub.add_parser(
        "run",
        parents=[common],
        help="run a scenario file or a built-in preset "
        f"({', '.join(sorted(PRESETS))})",
    )
    run_p.add_argument("scenario", help="scenario file path or preset name")
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", parents=[common], help="run the self-check suite")
    val_p.set_defaults(func=cmd_validate)

    search_p = sub.add_parser(
        "search", parents=[common], help="grid-search the coherent work advantage"
    )
    search_p.add_argument("scenario", help="search-advantage scenario file or preset name")
    search_p.set_defaults(func=cmd_search)

    return parser


def _formats(s: ScenarioFile, args) -> tuple[str, ...]:
    if args.format is None:
        return s.output.formats
    if args.format == "both":
        return ("csv", "json")
    return (args.format,)


def _summary_path(outdir: str, prefix: str) -> str:
    return os.path.join(outdir, f"{prefix}_summary.json")


def _finish(s, args, outputs, results, t0) -> int:
    formats = _formats(s, args)
    if "json" in formats:
        summary = {
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "scenario": s.kind,
            "config": config_to_dict(s.engine),
            "outputs": outputs,
            "results": results,
        }
        path = _summary_path(args.output_dir, s.output.prefix)
        write_json(path, summary)
        outputs = outputs + [os.path.basename(path)]
    for name in outputs:
        print(f"wrote {os.path.join(args.output_dir, name)}")
    print(f"elapsed {time.perf_counter() - t0:.3f} s")
    return 0


def _run_single_cycle_sweep(s: ScenarioFile, args) -> tuple[list[str], dict]:
    outputs = []
    variant_labels = []
    formats = _formats(s, args)
    for label, config in s.variants or (("", s.engine),):
        traces = sweep(replace(config, cycles=1), s.sweep.field, s.sweep.values, args.workers)
        records = [t.records[0] for t in traces]
        name = f"{s.output.prefix}_{label}.csv" if label else f"{s.output.prefix}.csv"
        if "csv" in formats:
            write_trace_csv(
                os.path.join(args.output_dir, name), s.sweep.field, s.sweep.values, records
            )
            outputs.append(name)
        variant_labels.append(label or "base")
    results = {
        "sweep_field": s.sweep.field,
        "sweep_points": len(s.sweep.values),
        "variants": variant_labels,
    }
    return outputs, results


def _run_multicycle(s: ScenarioFile, args) -> tuple[list[str], dict]:
    outputs = []
    formats = _formats(s, args)
    results: dict = {}
    if s.sweep is None:
        trace = run_engine(s.engine)
        if "csv" in formats:
            name = f"{s.output.prefix}.csv"
            write_trace_csv(
                os.path.join(args.output_dir, name),
                "cycle_index",
                [r.cycle_index for r in trace.records],
                trace.records,
            )
            outputs.append(name)
        results["cumulative_work"] = trace.records[-1].cumulative_work
    else:
        traces = sweep(s.engine, s.sweep.field, s.sweep.values, args.workers)
        mapping = []
        for i, (value, trace) in enumerate(zip(s.sweep.values, traces)):
            name = f"{s.output.prefix}_s{i:02d}.csv"
            if "csv" in formats:
                write_trace_csv(
                    os.path.join(args.output_dir, name),
                    "cycle_index",
                    [r.cycle_index for r in trace.records],
                    trace.records,
                )
                outputs.append(name)
            mapping.append({"index": i, "value": value, "file": name})
        results["sweep_field"] = s.sweep.field
        results["sweep_map"] = mapping
    return outputs, results


def _run_compare(s: ScenarioFile, args) -> tuple[list[str], dict]:
    result = compare_coherent_incoherent(s.engine)
    outputs = []
    formats = _formats(s, args)
    if "csv" in formats:
        for tag, trace in (("coherent", result.coherent), ("incoherent", result.incoherent)):
            name = f"{s.output.prefix}_{tag}.csv"
            write_trace_csv(
                os.path.join(args.output_dir, name),
                "cycle_index",
                [r.cycle_index for r in trace.records],
                trace.records,
            )
            outputs.append(name)
        name = f"{s.output.prefix}_advantage.csv"
        rows = [
            (rc.cycle_index, rc.cycle_work, ri.cycle_work, ratio)
            for rc, ri, ratio in zip(
                result.coherent.records, result.incoherent.records, result.advantage
            )
        ]
        write_advantage_csv(os.path.join(args.output_dir, name), rows)
        outputs.append(name)
    peak = peak_advantage(result)
    results = {
        "peak_advantage_ratio": None if peak is None else peak[0],
        "peak_advantage_cycle": None if peak is None else peak[1],
        "cumulative_work_coherent": result.coherent.records[-1].cumulative_work,
        "cumulative_work_incoherent": result.incoherent.records[-1].cumulative_work,
    }
    if peak is not None:
        print(f"peak advantage {peak[0]:.4g} at cycle {peak[1]}")
    return outputs, results


def _search_grid(s: ScenarioFile):
    spec = s.search
    axes = [
        sorted(spec.theta),
        sorted(spec.p_mx),
        sorted(spec.battery_dephasing_per_reset),
        sorted(spec.battery_t2_per_cycle),
    ]
    if any(len(a) == 0 for a in axes):
        raise ConfigError("search grid is empty")
    points = list(itertools.product(*axes))
    configs = [
        replace(
            s.engine,
            theta=t,
            p_mx=p,
            noise=NoiseConfig(
                battery_dephasing_per_reset=rd, battery_t2_per_cycle=t2
            ),
            cycles=spec.max_cycles,
        )
        for (t, p, rd, t2) in points
    ]
    return points, configs


def _run_search(s: ScenarioFile, args) -> tuple[list[str], dict]:
    points, configs = _search_grid(s)
    if args.workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            comparisons = list(pool.map(compare_coherent_incoherent, configs))
    else:
        comparisons = [compare_coherent_incoherent(c) for c in configs]

    best = None  # (ratio, cycle, point index); strict > keeps the lex-smallest point
    rows = []
    for i, (point, comparison) in enumerate(zip(points, comparisons)):
        peak = peak_advantage(comparison)
        if peak is not None and (best is None or peak[0] > best[0]):
            best = (peak[0], peak[1], i)
        rows.append(
            point + ((peak[0], peak[1], True) if peak is not None else (None, 0, False))
        )

    outputs = []
    formats = _formats(s, args)
    if "csv" in formats:
        name = f"{s.output.prefix}_grid.csv"
        write_grid_csv(
            os.path.join(args.output_dir, name),
            (
                "theta",
                "p_mx",
                "battery_dephasing_per_reset",
                "battery_t2_per_cycle",
                "peak_ratio",
                "peak_cycle",
                "defined",
            ),
            rows,
        )
        outputs.append(name)

    if best is None:
        results = {"grid_points": len(points), "best": None}
        print("no grid point had a defined advantage ratio")
    else:
        ratio, cycle, idx = best
        t, p, rd, t2 = points[idx]
        results = {
            "grid_points": len(points),
            "best": {
                "theta": t,
                "p_mx": p,
                "battery_dephasing_per_reset": rd,
                "battery_t2_per_cycle": t2,
                "peak_ratio": ratio,
                "peak_cycle": cycle,
            },
        }
        print(
            f"best grid point theta={t:.6g} p_mx={p:.6g} reset={rd:.6g} t2={t2:.6g}: "
            f"advantage {ratio:.4g} at cycle {cycle}"
        )
    return outputs, results


def _run_validate(s: ScenarioFile, args) -> tuple[int, list[str], dict]:
    checks = run_all_checks()
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    all_passed = all(c.passed for c in checks)
    results = {
        "all_passed": all_passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
        ],
    }
    return (0 if all_passed else 1), [], results


def _execute(s: ScenarioFile, args) -> int:
    t0 = time.perf_counter()
    os.makedirs(args.output_dir, exist_ok=True)
    if s.kind == "validate":
        code, outputs, results = _run_validate(s, args)
        finish = _finish(s, args, outputs, results, t0)
        return code or finish
    if s.kind == "single-cycle-sweep":
        outputs, results = _run_single_cycle_sweep(s, args)
    elif s.kind == "multicycle":
        outputs, results = _run_multicycle(s, args)
    elif s.kind == "compare":
        outputs, results = _run_compare(s, args)
    elif s.kind == "search-advantage":
        outputs, results = _run_search(s, args)
    else:  # pragma: no cover - parse_scenario rejects unknown kinds
        raise ScenarioError(f"unhandled scenario kind {s.kind!r}")
    return _finish(s, args, outputs, results, t0)


def cmd_run(args) -> int:
    return _execute(resolve_scenario(args.scenario), args)


def cmd_validate(args) -> int:
    s = ScenarioFile(
        schema_version=SCHEMA_VERSION,
        kind="validate",
        engine=EngineConfig(),
        output=OutputSpec(prefix="validate"),
    )
    return _execute(s, args)


def cmd_search(args) -> int:
    s = resolve_scenario(args.scenario)
    if s.kind != "search-advantage":
        raise ScenarioError(
            f"'search' requires a search-advantage scenario, got {s.kind!r}"
        )
    return _execute(s, args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, LinalgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
