"""Command-line entry point: ``shockflow {ingest,simulate,sweep,analyze}``.

Exit codes: 0 success, 2 bad input or configuration, 3 scenario outside the
model's valid region, 4 series cannot be analyzed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .antifragility import phi_table
from .errors import ConfigError, InputError, ParseError, ShockflowError
from .fund_flow import NORMALIZED_HEADER, net_flow, normalize_flow, normalized_rows, read_flow_csv
from .hht import NotOscillatory, hilbert_transform
from .output import RunRecorder, input_ref
from .phases import Phase
from .price_model import SweepAxis, sweep
from .scale_analysis import analyze_series
from .scenario import PRESETS, resolve

log = logging.getLogger("shockflow")


def _seeds(args) -> list[int] | None:
    if args.n_seeds is not None:
        if args.n_seeds < 1:
            raise ConfigError("--n-seeds must be >= 1")
        start = 1 if args.seed is None else args.seed
        return list(range(start, start + args.n_seeds))
    if args.seed is not None:
        return [args.seed]
    return None


def _out_dir(args) -> Path:
    return Path(args.out)


def _phase_label(tags, day):
    return tags[day].value if day < len(tags) else ""


# -- ingest -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    if not args.flow and not args.statements:
        raise ConfigError("ingest needs --flow and/or --statements")
    rec = RunRecorder(_out_dir(args), "ingest",
                      {"flow": input_ref(args.flow), "statements": input_ref(args.statements)})
    if args.flow:
        flow = normalize_flow(net_flow(read_flow_csv(args.flow)))
        rec.write_csv("normalized_flow.csv", NORMALIZED_HEADER, normalized_rows(flow))
        print(f"normalized {len(flow)} days; max |psi| = {np.max(np.abs(flow.values)):g}")
    if args.statements:
        companies, sector = phi_table(args.statements)
        rows = [(name, a.value, a.scope.value) for name, a in companies]
        rows.append(("SECTOR", sector.value, sector.scope.value))
        rec.write_csv("phi.csv", ("entity", "phi", "scope"), rows)
        print(f"{len(companies)} companies; sector phi = {sector.value:.6g}")
    rec.finish()
    return 0


# -- simulate ---------------------------------------------------------------

def _ensemble_rows(paths, tags):
    med = np.median(paths, axis=0)
    q25, q75 = np.quantile(paths, [0.25, 0.75], axis=0)
    return [(d, _phase_label(tags, d), float(med[d]), float(q25[d]), float(q75[d]))
            for d in range(paths.shape[1])]


def cmd_simulate(args) -> int:
    resolved = resolve(args.preset, args.config, args.flow, _seeds(args))
    sc = resolved.scenario
    seeds = list(sc.seeds) if sc.synthetic else sc.seeds[:1]
    rec = RunRecorder(_out_dir(args), "simulate", sc.describe(), seeds)
    if len(seeds) == 1:
        series = sc.run(seeds[0])
        rows = [(d, _phase_label(series.phase_tags, d),
                 float(series.psi[d]) if d < len(series.psi) else None, float(p))
                for d, p in enumerate(series.values)]
        rec.write_csv("prices.csv", ("day", "phase", "psi", "price"), rows)
        print(f"{sc.name}: {len(series) - 1} days, phi={sc.phi:g}, "
              f"terminal price {series.values[-1]:.6g}")
    else:
        point = sweep(sc, SweepAxis.PHI, [sc.phi], seeds, jobs=args.jobs)[0]
        rec.write_csv("ensemble.csv", ("day", "phase", "median", "q25", "q75"),
                      _ensemble_rows(point.paths, point.phase_tags))
        print(f"{sc.name}: {len(seeds)} seeds, median terminal/pre-shock "
              f"{point.terminal_ratio:.4f}")
    rec.finish()
    return 0


# -- sweep ------------------------------------------------------------------

def _parse_grid(text: str) -> list[float]:
    items = [t for t in (text or "").replace(";", ",").split(",") if t.strip()]
    try:
        return [float(t) for t in items]
    except ValueError:
        raise ConfigError(f"--grid: not a list of numbers: {text!r}") from None


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    axis = SweepAxis.parse(args.axis)
    resolved = resolve(args.preset, args.config, args.flow, _seeds(args))
    sc = resolved.scenario
    desc = sc.describe() | {"axis": axis.value, "grid": grid}
    rec = RunRecorder(_out_dir(args), "sweep", desc, sc.seeds)
    points = sweep(sc, axis, grid, sc.seeds, jobs=args.jobs)
    summary = []
    for i, pt in enumerate(points):
        rec.write_csv(f"point_{i:02d}.csv", ("day", "phase", "median", "q25", "q75"),
                      _ensemble_rows(pt.paths, pt.phase_tags))
        summary.append((pt.grid_value, len(pt.seeds), pt.trough, pt.trough_day, pt.terminal_ratio))
        print(f"{axis.value}={pt.grid_value:g}: trough {pt.trough:.4g} (day {pt.trough_day}), "
              f"terminal/pre-shock {pt.terminal_ratio:.4f}")
    rec.write_csv("summary.csv", ("grid_value", "seed_count", "trough", "trough_day",
                                  "terminal_ratio"), summary)
    rec.finish()
    return 0


# -- analyze ----------------------------------------------------------------

def read_series(path: str | Path, column: str | None = None) -> tuple[np.ndarray, int | None]:
    """Values of one numeric column plus the first shock day, if a phase column exists."""
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if column is None:
            column = next((c for c in ("price", "median", "value") if c in fields),
                          fields[-1] if fields else None)
        if column not in fields:
            raise ParseError(path, 1, f"no column {column!r} in header")
        values, shock_start = [], None
        for lineno, row in enumerate(reader, start=2):
            try:
                v = float(row[column])
            except (TypeError, ValueError):
                raise ParseError(path, lineno, f"{column}: not a number: {row[column]!r}") from None
            if not math.isfinite(v):
                raise ParseError(path, lineno, f"{column}: not finite")
            if shock_start is None and (row.get("phase") or "").strip() == Phase.SHOCK.value:
                shock_start = len(values)
            values.append(v)
    if len(values) < 8:
        raise ParseError(path, len(values) + 1, f"need at least 8 rows, got {len(values)}")
    return np.array(values), shock_start


def cmd_analyze(args) -> int:
    x, hint = read_series(args.series_file, args.column)
    if args.shock_start is not None:
        hint = args.shock_start
    rec = RunRecorder(_out_dir(args), "analyze",
                      {"series": input_ref(args.series_file), "column": args.column,
                       "shock_start": hint})
    result = analyze_series(x, hint)
    imfs = result.imfs
    k = len(imfs)
    header = ("day", *(f"imf{i}" for i in range(1, k + 1)), "residue")
    rec.write_csv("imfs.csv", header,
                  ((d, *(float(m[d]) for m in imfs.imfs), float(imfs.residue[d]))
                   for d in range(len(x))))
    table = result.table
    rec.write_csv("dominance.csv", ("imf", "nu", "sigma2", "dominant"),
                  ((r.index, r.nu, r.sigma2, r.index == table.dominant_index) for r in table.rows))
    period_rows = []
    for i, imf in enumerate(imfs.imfs, start=1):
        try:
            a = hilbert_transform(imf)
        except NotOscillatory:
            period_rows.append((i, None, False))
            continue
        lo, hi = a.valid_range
        rec.write_csv(f"analytic_imf{i}.csv", ("day", "phase_rad", "omega", "tau"),
                      ((d, float(a.phase[d]), float(a.omega[d]), float(a.tau[d]))
                       for d in range(lo, hi)))
        period_rows.append((i, result.mean_periods[i - 1], a.well_formed))
    rec.write_csv("periods.csv", ("imf", "mean_period", "well_formed"), period_rows)
    ts = result.timescales
    rec.write_csv("timescales.csv",
                  ("dominant_imf", "trough_day", "peak_day", "shock_days", "recovery_days",
                   "recovered", "shape"),
                  [(table.dominant_index, ts.trough_day, ts.peak_day, ts.shock_days,
                    ts.recovery_days, ts.recovered, ts.shape.value)])
    rec.finish()
    print(f"{k} IMFs; dominant IMF{table.dominant_index} (nu={table.dominant.nu:.4f}); "
          f"T_S={ts.shock_days} T_R={ts.recovery_days} shape={ts.shape.value}")
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario config file (YAML or JSON)")
    common.add_argument("--preset", choices=sorted(PRESETS), help="named built-in scenario")
    common.add_argument("--seed", type=int, help="seed (first seed with --n-seeds)")
    common.add_argument("--n-seeds", type=int, help="run seeds SEED..SEED+N-1 (SEED defaults to 1)")
    common.add_argument("--flow", help="fund-flow file; overrides the config's flow")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for ensembles")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="shockflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="validate and normalize input files")
    s.add_argument("--statements", help="financial statements file")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("simulate", parents=[common], help="run one scenario")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="sweep shock length or phi")
    s.add_argument("--axis", required=True, help="shock-length or phi")
    s.add_argument("--grid", required=True, help="comma-separated grid values")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("analyze", parents=[common], help="EMD time-scale analysis of a series")
    s.add_argument("series_file")
    s.add_argument("--column", help="value column (default: price, median or value)")
    s.add_argument("--shock-start", type=int, help="day index where the trough search begins")
    s.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ShockflowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
