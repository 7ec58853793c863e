"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 no symmetry point.
"""

import argparse
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .critical import McConfig, batch_stderr, lookup, simulate_functional, type7_quantile
from .exceptions import DataError, NoSymmetryPoint, OutOfTableRange, TrendSymError
from .ingest import read_csv
from .observables import KINDS, build_observable, density_profile, describe
from .rolling import DEFAULT_EVENTS, RollingConfig, annotate, points_to_csv, read_events, roll
from .scan import GridSpec, scan
from .tn import tn_shifted

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_SYMMETRY = 0, 1, 2, 3


class UsageError(TrendSymError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(suppress):
    # the same flags are accepted before and after the subcommand
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--price-column", choices=["close", "adjclose"], default=default("close"))
    p.add_argument("--date-format", choices=["iso", "us"], default=default("iso"))
    p.add_argument("--json", action="store_true", default=default(False))
    p.add_argument("--seed", type=int, default=default(12345))
    p.add_argument("--out", type=Path, default=default(None))
    return p


def build_parser():
    parser = _Parser(
        prog="trendsym",
        description="Empirical-likelihood symmetry analysis of price variations.",
        parents=[_global_flags(False)],
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_global_flags(True)]

    p = sub.add_parser("describe", parents=common, help="descriptive statistics")
    p.add_argument("files", nargs="+", type=Path)

    p = sub.add_parser("test", parents=common, help="test symmetry about a point")
    p.add_argument("file", type=Path)
    p.add_argument("--observable", choices=KINDS, default="returns")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--c", type=float, default=0.0)

    p = sub.add_parser("scan", parents=common, help="symmetry interval and point")
    p.add_argument("file", type=Path)
    p.add_argument("--observable", choices=KINDS, default="returns")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid-points", type=int, default=2001)
    p.add_argument("--grid-span", type=float, default=30.0)
    p.add_argument("--curve-out", type=Path, default=None)

    p = sub.add_parser("roll", parents=common, help="rolling-window evolution")
    p.add_argument("file", type=Path)
    p.add_argument("--window", type=int, default=252)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--observable", choices=KINDS, default="returns")
    p.add_argument("--events", type=Path, default=None)
    p.add_argument("--n-jobs", type=int, default=None)

    p = sub.add_parser("critical", parents=common, help="upper percentage points")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=4096)
    return parser


def load_schema(command):
    """JSON schema of the ``--json`` output of ``command``."""
    path = resources.files("trendsym").joinpath("schemas", f"{command}.schema.json")
    return json.loads(path.read_text())


def _digest(paths):
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
    return "sha256:" + h.hexdigest()


def _manifest(args, inputs, seed=None):
    config = {
        k: (str(v) if isinstance(v, Path) else [str(x) for x in v] if isinstance(v, list) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("command", "out")
    }
    return {
        "command": args.command,
        "config": config,
        "input_digest": _digest(inputs) if inputs else None,
        "seed": seed,
        "tool_version": __version__,
    }


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _emit(args, text, manifest=None):
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.write_text(text)
    if manifest is not None and not args.json:
        sidecar = args.out.with_name(args.out.name + ".manifest.json")
        sidecar.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _dump(doc):
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def _load(args, path):
    try:
        series, report = read_csv(path, args.price_column, args.date_format)
    except DataError as exc:
        raise type(exc)(f"{path}: {exc}") from exc
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    return series, report


def _fmt(v, spec=".4g"):
    return "-" if v is None or (isinstance(v, float) and math.isnan(v)) else format(v, spec)


def cmd_describe(args):
    rows = []
    for path in args.files:
        series, report = _load(args, path)
        for kind in KINDS:
            obs = build_observable(series, kind)
            row = {"market": series.symbol, "observable": kind, "n": len(obs)}
            try:
                row.update(describe(obs).to_dict())
            except DataError:
                row.update(mean=None, std=None, sem=None, skewness=None, kurtosis=None)
            try:
                row["peak_ratio"] = density_profile(obs).peak_ratio
            except DataError:
                row["peak_ratio"] = None
            rows.append(row)
    manifest = _manifest(args, args.files)
    if args.json:
        return _dump({"rows": rows, "manifest": manifest}), manifest, EXIT_OK
    head = f"{'Market':<12}{'Observable':<11}{'Entries':>8}{'mean':>12}{'sem':>11}{'std':>10}{'Skewness':>10}{'Kurtosis':>10}{'PeakRatio':>10}"
    lines = [head]
    for r in rows:
        lines.append(
            f"{r['market']:<12}{r['observable']:<11}{r['n']:>8}{_fmt(r['mean'], '.3e'):>12}"
            f"{_fmt(r['sem'], '.2e'):>11}{_fmt(r['std'], '.3f'):>10}{_fmt(r['skewness'], '.3f'):>10}"
            f"{_fmt(r['kurtosis'], '.3f'):>10}{_fmt(r['peak_ratio'], '.4f'):>10}"
        )
    return "\n".join(lines) + "\n", manifest, EXIT_OK


def _threshold(alpha):
    try:
        return lookup(alpha)
    except OutOfTableRange as exc:
        raise UsageError(f"{exc}; use `critical --simulate` for other levels") from exc


def cmd_test(args):
    series, _ = _load(args, args.file)
    obs = build_observable(series, args.observable)
    crit = _threshold(args.alpha)
    value = tn_shifted(obs.values, args.c)
    rejected = value.statistic >= crit.point
    manifest = _manifest(args, [args.file])
    doc = {
        "observable": args.observable,
        "c": args.c,
        "alpha": args.alpha,
        "statistic": value.statistic,
        "threshold": crit.point,
        "n_effective": value.n_effective,
        "zeros_dropped": value.zeros_dropped,
        "rejected": bool(rejected),
        "manifest": manifest,
    }
    if args.json:
        return _dump(doc), manifest, EXIT_OK
    verdict = "rejected" if rejected else "not rejected"
    text = (
        f"observable: {args.observable}  n={value.n_effective} (zeros dropped: {value.zeros_dropped})\n"
        f"Tn({args.c:g}) = {value.statistic:.6g}\n"
        f"T({args.alpha:g}) = {crit.point:g}\n"
        f"symmetry about {args.c:g}: {verdict}\n"
    )
    return text, manifest, EXIT_OK


def cmd_scan(args):
    series, _ = _load(args, args.file)
    obs = build_observable(series, args.observable)
    crit = _threshold(args.alpha)
    grid = GridSpec(points=args.grid_points, span=args.grid_span)
    manifest = _manifest(args, [args.file])
    try:
        res = scan(obs.values, args.alpha, grid, crit.point)
    except NoSymmetryPoint as exc:
        if args.curve_out is not None and exc.curve is not None:
            args.curve_out.write_text(exc.curve.to_csv())
        doc = {"status": "no_symmetry_point", "alpha": args.alpha,
               "threshold": crit.point, "observable": args.observable,
               "message": str(exc), "manifest": manifest}
        text = _dump(doc) if args.json else f"{exc}\n"
        return text, manifest, EXIT_NO_SYMMETRY
    if args.curve_out is not None:
        args.curve_out.write_text(res.curve.to_csv())
    doc = {"status": "ok", "observable": args.observable, **res.to_dict(), "manifest": manifest}
    if args.json:
        return _dump(doc), manifest, EXIT_OK
    text = (
        f"observable: {args.observable}  n={res.n}  alpha={res.alpha:g}  T(alpha)={res.threshold:g}\n"
        f"symmetry interval: ({res.c_min:.4e}, {res.c_max:.4e})  resolution {res.resolution:.1e}\n"
        f"most plausible point C: {res.c_star:.4e}  Tn(C) = {res.tn_at_c_star:.4g}\n"
        f"Tn(0) = {_fmt(res.tn_at_zero)}  zero symmetric: {'yes' if res.zero_symmetric else 'no'}\n"
    )
    if res.disconnected:
        text += f"warning: plausible set has {len(res.components)} components\n"
    if res.truncated:
        text += "warning: plausible set reaches the grid edge\n"
    return text, manifest, EXIT_OK


def cmd_roll(args):
    series, _ = _load(args, args.file)
    try:
        cfg = RollingConfig(args.window, args.step, args.alpha, args.observable)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _threshold(args.alpha)
    points = roll(series, cfg, n_jobs=args.n_jobs)
    events = DEFAULT_EVENTS
    inputs = [args.file]
    if args.events is not None:
        events = read_events(args.events.read_text())
        inputs.append(args.events)
    notes = annotate(points, events, series_start=series.dates[0])
    manifest = _manifest(args, inputs)
    if args.json:
        doc = {
            "points": [p.to_dict() for p in points],
            "annotations": [
                {
                    "label": a.event.label,
                    "date": a.event.date.isoformat(),
                    "window_end_date": None if a.outside_range
                    else points[a.point_index].window_end_date.isoformat(),
                    "outside_range": a.outside_range,
                }
                for a in notes
            ],
            "manifest": manifest,
        }
        return _dump(doc), manifest, EXIT_OK
    return points_to_csv(points), manifest, EXIT_OK


def cmd_critical(args):
    manifest = _manifest(args, [], seed=args.seed if args.simulate else None)
    if args.simulate:
        try:
            cfg = McConfig(paths=args.paths, time_steps=args.steps, seed=args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not 0 < args.alpha < 1:
            raise UsageError("alpha must lie in (0, 1)")
        values = simulate_functional(cfg)
        prob = 1.0 - args.alpha
        doc = {
            "alpha": args.alpha,
            "point": float(type7_quantile(values, [prob])[0]),
            "source": "simulated",
            "stderr_estimate": batch_stderr(values, prob),
        }
    else:
        try:
            crit = lookup(args.alpha)
        except (OutOfTableRange, ValueError) as exc:
            raise UsageError(f"{exc}; add --simulate for levels outside the table") from exc
        doc = {"alpha": args.alpha, "point": crit.point, "source": crit.source,
               "stderr_estimate": None}
    doc["manifest"] = manifest
    return _dump(doc), manifest, EXIT_OK


COMMANDS = {
    "describe": cmd_describe,
    "test": cmd_test,
    "scan": cmd_scan,
    "roll": cmd_roll,
    "critical": cmd_critical,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text, manifest, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"trendsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"trendsym: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"trendsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, text, manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
