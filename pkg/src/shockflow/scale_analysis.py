"""Dominant-mode selection and shock/recovery time scales.

Each IMF is scored by its Pearson correlation with the source series and by
its variance. The most correlated IMF is taken as the dominant mode, and the
shock and recovery durations are read off its trough.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InputError, NoOscillatoryMode, NoTroughFound, NotOscillatory, ZeroVarianceSource
from .hht import IMFSet, SiftConfig, emd_decompose, hilbert_transform, mean_period


@dataclass(frozen=True)
class DominanceRow:
    index: int  # 1-based, 1 = highest frequency
    nu: float
    sigma2: float


@dataclass(frozen=True)
class DominanceTable:
    rows: tuple[DominanceRow, ...]
    dominant_index: int

    @property
    def dominant(self) -> DominanceRow:
        return self.rows[self.dominant_index - 1]


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if den == 0:
        return 0.0
    return float(np.clip(np.dot(a, b) / den, -1.0, 1.0))


def select_dominant(nus: Sequence[float]) -> int:
    """1-based index of the largest correlation; ties go to the higher index."""
    if not len(nus):
        raise NoOscillatoryMode("no IMFs to choose from")
    nus = np.asarray(nus, dtype=float)
    best = np.flatnonzero(nus == nus.max())
    return int(best[-1]) + 1


def dominance_table(source, imfs: IMFSet) -> DominanceTable:
    """Correlation and population variance of every IMF against ``source``."""
    x = np.asarray(source, dtype=float)
    if len(x) != imfs.source_length:
        raise InputError("IMF set was not derived from a series of this length")
    if np.ptp(x) == 0:
        raise ZeroVarianceSource("source series is constant; correlation undefined")
    if not len(imfs):
        raise NoOscillatoryMode("decomposition produced no IMFs")
    rows = tuple(DominanceRow(k, _pearson(x, imf), float(np.var(imf)))
                 for k, imf in enumerate(imfs.imfs, start=1))
    return DominanceTable(rows, select_dominant([r.nu for r in rows]))


class Shape(str, Enum):
    V_SHAPE = "V"
    L_SHAPE = "L"


@dataclass(frozen=True)
class ShockRecoveryEstimate:
    trough_day: int
    shock_days: int
    recovery_days: int
    recovered: bool
    shape: Shape
    peak_day: int


def shock_recovery_timescales(dominant, shock_start_hint: int | None = None) -> ShockRecoveryEstimate:
    """Read shock and recovery durations off a mode's trough.

    The trough is the global minimum at or after ``shock_start_hint`` (the
    whole series when no hint is given). The reference peak is the nearest
    sample before the trough from which the series falls strictly, so a flat
    top anchors at its last day. Shock length runs from that peak to the
    trough, recovery length from the trough to the first sample back at or
    above the peak level.
    When the level is never regained, ``recovery_days`` counts to the end of
    the series and the shape is L.
    """
    x = np.asarray(dominant, dtype=float)
    if len(x) < 8:
        raise InputError(f"need at least 8 samples, got {len(x)}")
    d = np.diff(x)
    if np.all(d >= 0) or np.all(d <= 0):
        raise NoTroughFound("series is monotonic")
    start = 0 if shock_start_hint is None else int(shock_start_hint)
    if not 0 <= start < len(x):
        raise InputError(f"shock start {start} outside series of length {len(x)}")
    trough = start + int(np.argmin(x[start:]))
    peak = trough
    while peak > 0 and x[peak - 1] > x[peak]:
        peak -= 1
    if peak == trough:
        raise NoTroughFound(f"no descent into the minimum at day {trough}")
    after = np.flatnonzero(x[trough + 1:] >= x[peak])
    recovered = bool(after.size)
    back = trough + 1 + int(after[0]) if recovered else len(x) - 1
    return ShockRecoveryEstimate(
        trough_day=trough,
        shock_days=trough - peak,
        recovery_days=back - trough,
        recovered=recovered,
        shape=Shape.V_SHAPE if recovered else Shape.L_SHAPE,
        peak_day=peak,
    )


@dataclass(frozen=True)
class SeriesAnalysis:
    imfs: IMFSet
    table: DominanceTable
    mean_periods: tuple[float | None, ...]
    timescales: ShockRecoveryEstimate


def analyze_series(series, shock_start_hint: int | None = None,
                   config: SiftConfig | None = None) -> SeriesAnalysis:
    """EMD, dominance table, per-IMF mean periods and time scales in one go.

    Raises NoOscillatoryMode when the series yields no IMF.
    """
    x = np.asarray(series, dtype=float)
    imfs = emd_decompose(x, config)
    if not len(imfs):
        raise NoOscillatoryMode("series has no oscillatory mode (monotonic or near-monotonic)")
    table = dominance_table(x, imfs)
    periods = []
    for imf in imfs.imfs:
        try:
            periods.append(mean_period(hilbert_transform(imf)))
        except NotOscillatory:
            periods.append(None)
    scales = shock_recovery_timescales(imfs.imfs[table.dominant_index - 1], shock_start_hint)
    return SeriesAnalysis(imfs, table, tuple(periods), scales)
