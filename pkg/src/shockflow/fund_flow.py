"""Institutional fund flow: net flow, normalization, and synthetic regimes.

The normalized net fund flow is the daily net purchase by foreign and
domestic institutional investors divided by the largest absolute daily net
purchase in the sample, so it lives in [-1, 1]. Synthetic flow draws each
day from a Gaussian attached to that day's market phase.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateSeries,
    EmptyInput,
    InputError,
    MissingRegime,
    NonMonotonicDates,
    ParseError,
)
from .phases import Phase, PhaseSchedule

FLOW_HEADER = ("date", "fii_buy", "fii_sell", "dii_buy", "dii_sell")
NORMALIZED_HEADER = ("date", "psi", "phase")

#: Identifier recorded in run manifests next to the seed.
RNG_ALGORITHM = "numpy.random.Generator(PCG64)"


class FlowOrigin(str, Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DailyInstitutionalFlow:
    date: dt.date
    fii_buy: float
    fii_sell: float
    dii_buy: float
    dii_sell: float

    def __post_init__(self):
        for name in FLOW_HEADER[1:]:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InputError(f"{self.date}: {name} must be finite and >= 0, got {v}")

    @property
    def net(self) -> float:
        return (self.fii_buy - self.fii_sell) + (self.dii_buy - self.dii_sell)


@dataclass(frozen=True)
class NetFlowSeries:
    values: np.ndarray
    dates: tuple[dt.date, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.values) != len(self.dates):
            raise InputError("values and dates differ in length")
        if not np.all(np.isfinite(self.values)):
            raise InputError("net flow contains non-finite values")


@dataclass(frozen=True)
class NormalizedFlowSeries:
    values: np.ndarray
    origin: FlowOrigin
    phase_tags: tuple[Phase, ...] | None = None
    dates: tuple[dt.date, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.size and (np.any(~np.isfinite(self.values))
                                 or np.max(np.abs(self.values)) > 1.0):
            raise InputError("normalized flow must lie in [-1, 1]")
        for attr in ("phase_tags", "dates"):
            seq = getattr(self, attr)
            if seq is not None:
                seq = tuple(seq)
                if len(seq) != len(self.values):
                    raise InputError(f"{attr} length differs from values")
                object.__setattr__(self, attr, seq)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class RegimeSpec:
    """Gaussian for one phase; ``sigma`` is a standard deviation."""

    phase: Phase
    mean: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma) and math.isfinite(self.mean)):
            raise InputError(f"{self.phase.value}: sigma must be > 0, got {self.sigma}")


# The post-recovery phase reuses the recovery distribution; only three
# distributions are published for the four phases.
DEFAULT_REGIMES: dict[Phase, RegimeSpec] = {
    Phase.PRE_SHOCK: RegimeSpec(Phase.PRE_SHOCK, 0.0, 0.17),
    Phase.SHOCK: RegimeSpec(Phase.SHOCK, -0.2, 0.49),
    Phase.RECOVERY: RegimeSpec(Phase.RECOVERY, 0.06, 0.22),
    Phase.POST_RECOVERY: RegimeSpec(Phase.POST_RECOVERY, 0.06, 0.22),
}


def net_flow(records: Sequence[DailyInstitutionalFlow]) -> NetFlowSeries:
    """Daily combined net purchase ``(fii_buy - fii_sell) + (dii_buy - dii_sell)``."""
    if not records:
        raise EmptyInput("no flow records")
    dates = [r.date for r in records]
    for i, (a, b) in enumerate(zip(dates, dates[1:]), start=1):
        if b <= a:
            raise NonMonotonicDates(f"record {i}: date {b} does not follow {a}")
    return NetFlowSeries(np.array([r.net for r in records]), tuple(dates))


def normalize_flow(net: NetFlowSeries) -> NormalizedFlowSeries:
    """Divide by the full-sample maximum absolute net flow."""
    values = np.asarray(net.values, dtype=float)
    scale = np.max(np.abs(values)) if values.size else 0.0
    if scale == 0.0:
        raise DegenerateSeries("net flow is identically zero; normalization undefined")
    return NormalizedFlowSeries(values / scale, FlowOrigin.REAL, dates=net.dates)


def _regime_for(regimes: Mapping[Phase, RegimeSpec], kind: Phase) -> RegimeSpec:
    try:
        return regimes[kind]
    except KeyError:
        raise MissingRegime(f"no regime for phase {kind.value!r}") from None


def draw_unclamped(regimes: Mapping[Phase, RegimeSpec], schedule: PhaseSchedule,
                   seed: int) -> np.ndarray:
    """Raw Gaussian draws, phase by phase, from one seeded generator.

    ``generate_synthetic_flow`` clips exactly this array, so the two share a
    random stream for a given seed.
    """
    rng = np.random.default_rng(seed)
    parts = []
    for p in schedule.phases:
        regime = _regime_for(regimes, p.kind)
        parts.append(rng.normal(regime.mean, regime.sigma, size=p.length))
    return np.concatenate(parts)


def generate_synthetic_flow(regimes: Mapping[Phase, RegimeSpec], schedule: PhaseSchedule,
                            seed: int) -> NormalizedFlowSeries:
    """Synthetic normalized flow clipped to [-1, 1], tagged by phase."""
    raw = draw_unclamped(regimes, schedule, seed)
    return NormalizedFlowSeries(np.clip(raw, -1.0, 1.0), FlowOrigin.SYNTHETIC,
                                phase_tags=schedule.day_phases())


# -- files -------------------------------------------------------------------

def _parse_amount(path, lineno, field, text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ParseError(path, lineno, f"{field}: not a number: {text!r}") from None
    if not math.isfinite(v) or v < 0:
        raise ParseError(path, lineno, f"{field}: must be finite and >= 0, got {text!r}")
    return v


def read_flow_csv(path: str | Path) -> list[DailyInstitutionalFlow]:
    """Parse a ``date,fii_buy,fii_sell,dii_buy,dii_sell`` file.

    Rows must be strictly ascending by ISO date; a duplicate or out-of-order
    date is reported with its line number.
    """
    path = Path(path)
    records: list[DailyInstitutionalFlow] = []
    seen: dict[dt.date, int] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != FLOW_HEADER:
            raise ParseError(path, 1, f"expected header {','.join(FLOW_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(FLOW_HEADER):
                raise ParseError(path, lineno, f"expected {len(FLOW_HEADER)} fields, got {len(row)}")
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(path, lineno, f"bad ISO date {row[0]!r}") from None
            if date in seen:
                raise ParseError(path, lineno, f"duplicate date {date} (first on line {seen[date]})")
            if records and date < records[-1].date:
                raise ParseError(path, lineno, f"date {date} is earlier than {records[-1].date}")
            seen[date] = lineno
            amounts = [_parse_amount(path, lineno, f, c.strip())
                       for f, c in zip(FLOW_HEADER[1:], row[1:])]
            records.append(DailyInstitutionalFlow(date, *amounts))
    if not records:
        raise ParseError(path, 2, "no data rows")
    return records


def normalized_rows(flow: NormalizedFlowSeries) -> list[list[str]]:
    rows = []
    for i, v in enumerate(flow.values):
        date = flow.dates[i].isoformat() if flow.dates else ""
        phase = flow.phase_tags[i].value if flow.phase_tags else ""
        rows.append([date, repr(float(v)), phase])
    return rows


def read_normalized_csv(path: str | Path) -> NormalizedFlowSeries:
    """Read a ``date,psi,phase`` file back; dates and phases may be blank."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != NORMALIZED_HEADER:
            raise ParseError(path, 1, f"expected header {','.join(NORMALIZED_HEADER)}")
        dates, values, tags = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ParseError(path, lineno, "expected 3 fields")
            try:
                values.append(float(row[1]))
                dates.append(dt.date.fromisoformat(row[0]) if row[0] else None)
                tags.append(Phase.parse(row[2]) if row[2] else None)
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    if not values:
        raise ParseError(path, 2, "no data rows")
    real = all(d is not None for d in dates)
    tagged = all(t is not None for t in tags)
    try:
        return NormalizedFlowSeries(
            np.array(values),
            FlowOrigin.REAL if real else FlowOrigin.SYNTHETIC,
            phase_tags=tuple(tags) if tagged else None,
            dates=tuple(dates) if real else None,
        )
    except InputError as exc:
        raise ParseError(path, 2, str(exc)) from None
