"""Named presets and scenario-config resolution.

A config file (YAML or JSON) looks like::

    preset: pharma            # optional starting point
    initial_price: 0.5
    phi: 0.4                  # or {statements: path, entities: [...]}
    phases:
      - {kind: pre_shock, length_days: 60, lambda: 0.2}
      - {kind: shock, start: 2020-03-02, length_days: 20, lambda: 0.1}
      - {kind: recovery, end: 2020-04-30, lambda: 0.7}
      - {kind: post_recovery, lambda: 0.3}     # rest of a dated flow file
    flow:
      synthetic: {regimes: {shock: [-0.2, 0.49]}}   # or: file: flows.csv
    seeds: [1, 2, 3]

Dates only make sense against a dated flow file. Relative paths are taken
from the config file's directory.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .antifragility import phi_table, sector_phi
from .errors import ConfigError, InputError
from .fund_flow import (
    FLOW_HEADER,
    DEFAULT_REGIMES,
    NormalizedFlowSeries,
    RegimeSpec,
    net_flow,
    normalize_flow,
    read_flow_csv,
    read_normalized_csv,
)
from .phases import Phase, PhaseSchedule, PhaseSpec
from .price_model import Scenario

PRESET_LAMBDAS = {
    "synthetic": (0.2, 0.1, 0.7, 0.3),
    "pharma": (0.6, 0.2, 0.8, 0.6),
    "fmcg": (0.6, 0.4, 0.9, 0.7),
    "tatamotors": (0.6, 1.0, 0.8, 0.7),
    "bpcl": (0.6, 0.8, 0.8, 0.7),
}

DEFAULT_CALM_DAYS = 60
COVID_SHOCK_START = "2020-03-02"


def _phases(lambdas, pre=None, shock=20, recovery=20, post=None, shock_start=None):
    pre_entry = {"kind": "pre_shock", "lambda": lambdas[0]}
    shock_entry = {"kind": "shock", "length_days": shock, "lambda": lambdas[1]}
    post_entry = {"kind": "post_recovery", "lambda": lambdas[3]}
    if shock_start is None:
        pre_entry["length_days"] = pre
        post_entry["length_days"] = post
    else:
        shock_entry["start"] = shock_start
    return [pre_entry, shock_entry,
            {"kind": "recovery", "length_days": recovery, "lambda": lambdas[2]},
            post_entry]


def _synthetic_preset(phi):
    return {
        "initial_price": 0.5,
        "phi": phi,
        "phases": _phases(PRESET_LAMBDAS["synthetic"], DEFAULT_CALM_DAYS, 20, 20, DEFAULT_CALM_DAYS),
        "flow": {"synthetic": {}},
        "seeds": [1],
    }


def _real_preset(name, phi):
    # shock window fixed at 20 trading days from the first week of March 2020;
    # recovery taken equal to it, the post-recovery phase runs to the end of the file
    return {
        "initial_price": 1.0,
        "phi": phi,
        "phases": _phases(PRESET_LAMBDAS[name], shock_start=COVID_SHOCK_START),
        "flow": {"file": None},
        "seeds": [1],
    }


PRESETS: dict[str, dict] = {
    "synthetic-quality": _synthetic_preset(0.4),
    "synthetic-stressed": _synthetic_preset(-0.08),
    "pharma": _real_preset("pharma", 0.41),
    "fmcg": _real_preset("fmcg", 0.21),
    "tatamotors": _real_preset("tatamotors", -0.077),
    "bpcl": _real_preset("bpcl", -0.052),
}


@dataclass
class ResolvedConfig:
    scenario: Scenario
    raw: dict = field(default_factory=dict)


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed config: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return data


def merge_config(preset: str | None, config: dict | None) -> dict:
    """Preset values overlaid by explicit config keys (top level only)."""
    config = dict(config or {})
    name = preset or config.pop("preset", None)
    config.pop("preset", None)
    if name is None:
        return config
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    base = {k: (v.copy() if isinstance(v, dict) else v) for k, v in PRESETS[name].items()}
    base["name"] = name
    base.update(config)
    return base


def _as_date(value, where) -> dt.date:
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(f"{where}: bad ISO date {value!r}") from None


def _phase_entries(raw) -> list[dict]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'phases' must be a non-empty list")
    out = []
    for i, e in enumerate(raw):
        if not isinstance(e, dict) or "kind" not in e or "lambda" not in e:
            raise ConfigError(f"phases[{i}]: needs 'kind' and 'lambda'")
        out.append(e)
    return out


def _spec(kind, length, lam, where) -> PhaseSpec:
    try:
        return PhaseSpec(kind, int(length), lam)
    except (InputError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def resolve_phases(entries: list[dict], dates=None) -> tuple[PhaseSchedule, slice]:
    """Turn phase entries into a schedule and the flow rows it covers.

    Without ``dates`` (synthetic flow) every entry needs ``length_days``.
    With dates, an entry's ``start`` moves its first row to the first date on
    or after it (only the first phase may skip rows), and its extent comes
    from ``length_days``, an inclusive ``end`` date, the next phase's
    ``start``, or for the last phase the rest of the file.
    """
    specs = []
    cursor = None
    first_row = None
    n = None if dates is None else len(dates)
    for i, e in enumerate(entries):
        where = f"phases[{i}]"
        try:
            kind = Phase.parse(str(e["kind"]))
        except (InputError, ValueError):
            raise ConfigError(f"{where}: unknown phase kind {e['kind']!r}") from None
        try:
            lam = float(e["lambda"])
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: lambda must be a number") from None
        length = e.get("length_days")
        if dates is None:
            if "start" in e or "end" in e:
                raise ConfigError(f"{where}: start/end dates need a dated flow file")
            if length is None:
                raise ConfigError(f"{where}: synthetic flow needs length_days")
            specs.append(_spec(kind, length, lam, where))
            continue
        begin = 0 if cursor is None else cursor
        if e.get("start") is not None:
            start = _as_date(e["start"], where)
            begin = next((j for j, d in enumerate(dates) if d >= start), n)
            if cursor is not None and begin != cursor:
                raise ConfigError(f"{where}: start {start} leaves a gap or overlap with the previous phase")
        if first_row is None:
            first_row = begin
        if length is not None:
            stop = begin + int(length)
        elif e.get("end") is not None:
            end = _as_date(e["end"], where)
            stop = next((j for j, d in enumerate(dates) if d > end), n)
        elif i == len(entries) - 1:
            stop = n
        elif entries[i + 1].get("start") is not None:
            nxt = _as_date(entries[i + 1]["start"], f"phases[{i + 1}]")
            stop = next((j for j, d in enumerate(dates) if d >= nxt), n)
        else:
            raise ConfigError(f"{where}: needs length_days, end, or a following phase with start")
        if stop > n:
            raise ConfigError(f"{where}: runs past the end of the flow file ({n} rows)")
        if stop < begin:
            raise ConfigError(f"{where}: ends before it starts")
        specs.append(_spec(kind, stop - begin, lam, where))
        cursor = stop
    try:
        schedule = PhaseSchedule(tuple(specs))
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    if dates is None:
        return schedule, slice(0, schedule.total_length)
    return schedule, slice(first_row, cursor)


def _resolve_path(value, base_dir: Path | None) -> Path:
    p = Path(str(value))
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p


def load_flow_file(path: Path) -> NormalizedFlowSeries:
    """Raw fund-flow file (normalized on read) or an already-normalized file."""
    try:
        with path.open() as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise ConfigError(f"cannot read flow file {path}: {exc}") from None
    if header.replace(" ", "") == ",".join(FLOW_HEADER):
        return normalize_flow(net_flow(read_flow_csv(path)))
    return read_normalized_csv(path)


def _resolve_phi(raw, base_dir) -> float:
    if isinstance(raw, dict):
        if "statements" not in raw:
            raise ConfigError("phi mapping needs a 'statements' file")
        companies, sector = phi_table(_resolve_path(raw["statements"], base_dir))
        wanted = raw.get("entities")
        if wanted:
            chosen = [a for name, a in companies if name in set(wanted)]
            missing = set(wanted) - {name for name, _ in companies}
            if missing:
                raise ConfigError(f"entities not in statements file: {', '.join(sorted(missing))}")
            sector = sector_phi(chosen)
        return sector.value
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"phi must be a number or a statements mapping, got {raw!r}") from None


def _resolve_regimes(raw) -> dict[Phase, RegimeSpec]:
    regimes = dict(DEFAULT_REGIMES)
    for key, pair in (raw or {}).items():
        kind = Phase.parse(str(key))
        try:
            mean, sigma = (float(v) for v in pair)
        except (TypeError, ValueError):
            raise ConfigError(f"regime {key}: expected [mean, sigma]") from None
        regimes[kind] = RegimeSpec(kind, mean, sigma)
    return regimes


def build_scenario(cfg: dict, base_dir: Path | None = None, flow_path: str | Path | None = None,
                   seeds=None) -> Scenario:
    """Scenario from a merged config mapping.

    ``flow_path`` and ``seeds`` override the config's flow file and seeds.
    """
    for key in ("initial_price", "phi", "phases"):
        if key not in cfg:
            raise ConfigError(f"config is missing {key!r}")
    try:
        p0 = float(cfg["initial_price"])
    except (TypeError, ValueError):
        raise ConfigError("initial_price must be a number") from None
    phi = _resolve_phi(cfg["phi"], base_dir)
    entries = _phase_entries(cfg["phases"])
    flow_cfg = dict(cfg.get("flow") or {"synthetic": {}})
    if flow_path is not None:
        flow_cfg = {"file": str(flow_path)}
        base_for_flow = None
    else:
        base_for_flow = base_dir
    if seeds is None:
        seeds = cfg.get("seeds") or [1]
        if "synthetic" in flow_cfg and isinstance(flow_cfg["synthetic"], dict) \
                and "seed" in flow_cfg["synthetic"] and "seeds" not in cfg:
            seeds = [flow_cfg["synthetic"]["seed"]]
    try:
        seeds = tuple(int(s) for s in seeds)
    except (TypeError, ValueError):
        raise ConfigError("seeds must be integers") from None
    name = str(cfg.get("name", "custom"))

    if flow_cfg.get("file") is not None:
        flow = load_flow_file(_resolve_path(flow_cfg["file"], base_for_flow))
        if flow.dates is not None:
            schedule, rows = resolve_phases(entries, flow.dates)
            flow = NormalizedFlowSeries(flow.values[rows], flow.origin,
                                        dates=flow.dates[rows])
        else:
            schedule, rows = resolve_phases(entries)
        return Scenario(p0, phi, schedule, flow=flow, seeds=seeds, name=name)
    if "file" in flow_cfg:
        raise ConfigError(f"preset {name!r} needs a fund-flow file (--flow or flow.file)")
    if "synthetic" not in flow_cfg:
        raise ConfigError("flow must be {synthetic: ...} or {file: path}")
    synthetic = flow_cfg["synthetic"] or {}
    schedule, _ = resolve_phases(entries)
    return Scenario(p0, phi, schedule, regimes=_resolve_regimes(synthetic.get("regimes")),
                    seeds=seeds, name=name)


def resolve(preset: str | None = None, config_path: str | Path | None = None,
            flow_path=None, seeds=None) -> ResolvedConfig:
    raw = load_config_file(config_path) if config_path else {}
    merged = merge_config(preset, raw)
    if not merged:
        raise ConfigError("give --preset or --config")
    base_dir = Path(config_path).resolve().parent if config_path else None
    return ResolvedConfig(build_scenario(merged, base_dir, flow_path, seeds), merged)

