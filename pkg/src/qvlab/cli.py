"""Command-line driver: build examples, run audits, scan branch sets,
estimate decay exponents and dimensions, and export plot-ready data.

Exit codes: 0 on success, 1 when a verified bound fails, 2 on usage or
configuration errors.  Identical invocations produce byte-identical output
files; floats are serialized with their shortest round-trip representation
and infinities as the strings "inf"/"-inf".
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acceptance, branch, constructions as cons, disk2d, func1d

__all__ = ["main", "console_main"]

USAGE_ERROR = 2
VERIFY_FAILURE = 1

NAMED_FUNCTIONS = (
    "double-line",
    "diamond",
    "losange",
    "pluri-losange-demo",
    "sin",
    "cantor-diamond",
    "cantor-losange",
    "fat-cantor-diamond",
    "fat-cantor-losange",
)

_LEVELED = {name for name in NAMED_FUNCTIONS if "cantor" in name}


class UsageError(ValueError):
    pass


def build_named_function(name: str, level: int | None = None, samples: int | None = None) -> func1d.PiecewiseAffineQ:
    """Construct one of the named example functions."""
    if name not in NAMED_FUNCTIONS:
        raise UsageError(f"unknown function {name!r}; choose from {', '.join(NAMED_FUNCTIONS)}")
    if name in _LEVELED:
        if level is None:
            raise UsageError(f"{name} requires --level")
        if level < 1:
            raise UsageError("--level must be at least 1")
        flavor = "diamond" if "diamond" in name else "losange"
        schedule = "fat" if name.startswith("fat-") else "ternary"
        return cons.cantor_level(cons.CantorConstruction(level, flavor, schedule))
    if name == "double-line":
        return cons.make_double_line(0.0, 1.0)
    if name == "diamond":
        return cons.make_diamond(0.0, 1.0, 0.0)
    if name == "losange":
        return cons.make_losange(0.0, 1.0)
    if name == "pluri-losange-demo":
        return cons.make_pluri_losange([(0.1, 0.3), (0.5, 0.9)])
    if name == "sin":
        return cons.sin_sampled(samples if samples else 4097)
    raise AssertionError(name)


def _json_default(value):
    if isinstance(value, float) and np.isinf(value):
        return "inf" if value > 0 else "-inf"
    raise TypeError(f"not JSON serializable: {value!r}")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _thread_count() -> int:
    raw = os.environ.get("QVLAB_THREADS", "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise UsageError(f"QVLAB_THREADS must be an integer, got {raw!r}") from exc
    return max(1, count)


def _audit_chunks(fn, pieces):
    """Evaluate per-chunk reports, possibly on worker threads.

    Chunk order is fixed up front and results are merged in that order, so
    the assembled report does not depend on scheduling.
    """
    workers = _thread_count()
    if workers == 1 or len(pieces) == 1:
        return [fn(p) for p in pieces]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, pieces))


def _merge_reports(mode: str, reports: list[func1d.MinimalityReport], alpha=None) -> func1d.MinimalityReport:
    reports = [r for r in reports if r.figure.size]
    if not reports:
        return func1d.MinimalityReport(mode, *(np.empty(0) for _ in range(5)), 0.0, None, alpha)
    cat = lambda attr: np.concatenate([getattr(r, attr) for r in reports])
    centers, radii, dir_u, dir_min, figure = (cat(a) for a in ("centers", "radii", "dir_u", "dir_min", "figure"))
    merged = func1d._build_report(mode, centers, radii, dir_u, dir_min, figure, alpha=alpha)
    return merged


def _cmd_example(args) -> int:
    u = build_named_function(args.name, args.level, args.samples)
    n = args.samples if args.samples else 1025
    lo, hi = u.domain
    xs = np.linspace(lo, hi, n)
    values = func1d.branch_values(u, xs)
    if args.format == "csv":
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x"] + [f"branch_{i + 1}" for i in range(u.q_count)])
            for j, x in enumerate(xs):
                writer.writerow([repr(float(x))] + [repr(float(v)) for v in values[:, j]])
    else:
        _write_json(
            args.out,
            {
                "name": args.name,
                "level": args.level,
                "x": [float(x) for x in xs],
                "branches": [[float(v) for v in row] for row in values],
            },
        )
    return 0


def _cmd_audit(args) -> int:
    u = build_named_function(args.name, args.level, args.samples)
    if args.mode == "omega":
        lo, hi = u.domain
        if args.radii:
            radii = args.radii
        else:
            radii = [(hi - lo) * f for f in (0.02, 0.05, 0.1, 0.2)]
        reports = []
        for r in radii:
            if 2 * r >= hi - lo:
                raise UsageError(f"radius {r} does not fit inside the domain")
            centers = np.linspace(lo + r, hi - r, args.centers)
            reports.append(func1d.omega_report(u, [r], centers))
        report = _merge_reports("omega", reports)
    else:
        intervals = func1d.audit_intervals(u, depth=args.depth)
        chunks = np.array_split(intervals, max(1, min(_thread_count() * 4, len(intervals))))
        if args.mode == "quasi":
            reports = _audit_chunks(lambda part: func1d.quasi_k_ratio(u, part), chunks)
            report = _merge_reports("quasi_k", reports)
        else:
            alpha = args.alpha
            reports = _audit_chunks(
                lambda part: func1d.almost_deficiency(u, alpha, np.column_stack(
                    (0.5 * (part[:, 0] + part[:, 1]), 0.5 * (part[:, 1] - part[:, 0])))),
                chunks,
            )
            report = _merge_reports("almost", reports, alpha=alpha)
    if args.format == "csv":
        report.to_csv(args.out)
    else:
        report.to_json(args.out)
    sup = report.supremum
    print(f"audit {args.name} mode={args.mode} records={report.figure.size} supremum={sup!r}")
    return 0


def _cmd_branch(args) -> int:
    u = build_named_function(args.name, args.level, args.samples)
    sc = branch.scan(u, args.grid, args.tol)
    scales = args.scales if args.scales else [3.0**-k for k in range(2, 8)]
    report = branch.dimension_report(sc, scales)
    if args.format == "csv":
        sc.to_csv(args.out)
    else:
        _write_json(
            args.out,
            {
                "scan": {
                    "x": [float(x) for x in sc.grid],
                    "sigma": [int(s) for s in sc.sigma],
                    "flagged": [bool(f) for f in sc.flags],
                    "tol": sc.tol,
                },
                "dimension": report.to_json_dict(),
            },
        )
    print(f"branch {args.name} flagged={int(sc.flags.sum())} dimension={report.slope!r}")
    return 0


def _cmd_decay(args) -> int:
    u = build_named_function(args.name, args.level, args.samples)
    scales = args.scales if args.scales else list(np.logspace(0, -2, 12))
    energies = [
        (float(s), func1d.dirichlet_energy(u, args.center - s * args.r0, args.center + s * args.r0))
        for s in scales
    ]
    slope = func1d.energy_decay_exponent(u, args.center, args.r0, scales)
    if args.format == "csv":
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scale", "radius", "energy"])
            for s, e in energies:
                writer.writerow([repr(s), repr(s * args.r0), repr(e)])
    else:
        _write_json(
            args.out,
            {
                "name": args.name,
                "center": args.center,
                "r0": args.r0,
                "profile": [[s, e] for s, e in energies],
                "slope": slope,
            },
        )
    print(f"decay {args.name} center={args.center!r} slope={slope!r}")
    return 0


_TRACES = ("single-cos", "shifted-pair", "sqrt-type", "constant")


def _trace_values(spec: str):
    if spec == "single-cos":
        return lambda t: [np.cos(t)]
    if spec == "shifted-pair":
        return lambda t: [np.cos(t), 2.0 + np.cos(t)]
    if spec == "sqrt-type":
        return lambda t: [np.cos(t / 2.0), -np.cos(t / 2.0)]
    if spec == "constant":
        return lambda t: [1.0]
    raise UsageError(f"unknown trace {spec!r}; choose from {', '.join(_TRACES)}")


def _cmd_disk(args) -> int:
    values = _trace_values(args.trace)
    trace = disk2d.sorted_trace(values, args.samples, args.modes, radius=args.radius)
    minimizer = disk2d.minimize_disk(trace)
    holds, margin = disk2d.check_squeeze_2d(minimizer)
    if args.format == "csv":
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["angle"] + [f"branch_{i + 1}" for i in range(trace.q_count)])
            for j, t in enumerate(trace.angles):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in trace.samples[:, j]])
    else:
        minimizer.to_json(args.out)
    print(
        f"disk trace={args.trace} dir_interior={minimizer.dir_interior!r} "
        f"dir_boundary={minimizer.dir_boundary!r} squeeze={'ok' if holds else 'VIOLATED'} margin={margin!r}"
    )
    return 0


def _cmd_verify_all(_args) -> int:
    results = acceptance.run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)} of {len(results)} checks passed")
    return 0 if not failed else VERIFY_FAILURE


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qvlab", description=__doc__)
    parser.add_argument("--config", help="load parameters from a JSON file instead of flags")
    sub = parser.add_subparsers(dest="command")

    def add_common(p, with_level=True):
        if with_level:
            p.add_argument("--level", type=int, default=None, help="refinement level for cantor-* functions")
            p.add_argument("--samples", type=int, default=None, help="sample count (sin example / outputs)")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("example", help="emit sampled branches of a named function")
    p.add_argument("name", choices=NAMED_FUNCTIONS)
    add_common(p)
    p.set_defaults(fn=_cmd_example)

    p = sub.add_parser("audit", help="run a minimality audit")
    p.add_argument("name", choices=NAMED_FUNCTIONS)
    p.add_argument("--mode", choices=("quasi", "omega", "almost"), required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--radii", type=_float_list, default=None, help="omega mode: comma-separated radii")
    p.add_argument("--centers", type=int, default=201, help="omega mode: centers per radius")
    add_common(p)
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("branch", help="scan the branch set and estimate its dimension")
    p.add_argument("name", choices=NAMED_FUNCTIONS)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--scales", type=_float_list, default=None)
    p.add_argument("--tol", type=float, default=None)
    add_common(p)
    p.set_defaults(fn=_cmd_branch)

    p = sub.add_parser("decay", help="energy decay profile around a center")
    p.add_argument("name", choices=NAMED_FUNCTIONS)
    p.add_argument("--center", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--scales", type=_float_list, default=None)
    add_common(p)
    p.set_defaults(fn=_cmd_decay)

    p = sub.add_parser("disk", help="least-energy disk extension of a circle trace")
    p.add_argument("--trace", choices=_TRACES, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--modes", type=int, default=512)
    add_common(p, with_level=False)
    p.set_defaults(fn=_cmd_disk)

    p = sub.add_parser("verify-all", help="run the full acceptance suite")
    p.set_defaults(fn=_cmd_verify_all)

    return parser


_CONFIG_KEYS = {
    "example": {"name", "level", "samples", "out", "format"},
    "audit": {"name", "mode", "alpha", "depth", "radii", "centers", "level", "samples", "out", "format"},
    "branch": {"name", "grid", "scales", "tol", "level", "samples", "out", "format"},
    "decay": {"name", "center", "r0", "scales", "level", "samples", "out", "format"},
    "disk": {"trace", "radius", "samples", "modes", "out", "format"},
    "verify-all": set(),
}


def _argv_from_config(path: str) -> list[str]:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(config, dict) or "command" not in config:
        raise UsageError("config must be a JSON object with a 'command' key")
    command = config.pop("command")
    if command not in _CONFIG_KEYS:
        raise UsageError(f"unknown command {command!r} in config")
    unknown = set(config) - _CONFIG_KEYS[command]
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    argv = [command]
    positional = config.pop("name", None)
    if positional is not None:
        argv.append(str(positional))
    for key, value in config.items():
        flag = f"--{key}"
        if isinstance(value, list):
            argv.extend([flag, ",".join(repr(float(v)) for v in value)])
        else:
            argv.extend([flag, str(value)])
    return argv


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        if args.config:
            if extras or args.command:
                raise UsageError("--config cannot be combined with other arguments")
            args = parser.parse_args(_argv_from_config(args.config))
        elif extras:
            parser.error(f"unrecognized arguments: {' '.join(extras)}")
        if args.command is None:
            parser.print_usage(sys.stderr)
            return USAGE_ERROR
        return args.fn(args)
    except SystemExit as exc:  # argparse errors exit with code 2 already
        return int(exc.code) if exc.code is not None else 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (func1d.DomainError, func1d.EmptyIntervalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def console_main() -> None:
    sys.exit(main())
