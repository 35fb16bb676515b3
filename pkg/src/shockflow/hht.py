"""Empirical mode decomposition and Hilbert spectral analysis.

``emd_decompose`` sifts a series into intrinsic mode functions (IMFs),
highest frequency first, plus a residue. ``hilbert_transform`` turns one IMF
into its analytic signal and reads off instantaneous phase, angular frequency
and period.

Sifting details
---------------
* extrema: strict local maxima/minima, flat runs collapse to their midpoint
* envelopes: natural cubic splines through the extrema, with the two extrema
  nearest each end mirrored about that end (about the outermost extremum
  when the end sample sits inside the envelope, as in Rilling's scheme)
* a candidate is accepted when the Cauchy-type deviation
  ``sum((h_prev - h)**2) / sum(h_prev**2)`` drops below ``sd_threshold`` and
  its extrema and zero-crossing counts differ by at most one, or after
  ``max_sift_iterations`` rounds
* decomposition stops when the remainder has fewer than two extrema, its
  peak-to-peak span is below ``NEGLIGIBLE`` times the input's, or
  ``max_imfs`` modes have been taken
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import EmptyValidRange, NonFiniteInput, NotOscillatory, TooShort

logger = logging.getLogger(__name__)

MIN_LENGTH = 8
EDGE_TRIM = 0.05
NEGLIGIBLE = 1e-10


@dataclass(frozen=True)
class SiftConfig:
    sd_threshold: float = 0.2
    max_sift_iterations: int = 100
    max_imfs: int | None = None  # None -> floor(log2(n))

    def imf_limit(self, n: int) -> int:
        return self.max_imfs if self.max_imfs is not None else int(math.floor(math.log2(n)))


@dataclass(frozen=True)
class IMFSet:
    imfs: tuple[np.ndarray, ...]
    residue: np.ndarray
    source_length: int
    sift_config: SiftConfig = field(default_factory=SiftConfig)
    sift_iterations: tuple[int, ...] = ()

    def __len__(self):
        return len(self.imfs)

    def as_array(self) -> np.ndarray:
        """IMFs stacked as rows, shape ``(k, n)``."""
        if not self.imfs:
            return np.empty((0, self.source_length))
        return np.vstack(self.imfs)

    def reconstruct(self) -> np.ndarray:
        total = self.residue.copy()
        for imf in self.imfs:
            total = total + imf
        return total


def local_extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of interior local maxima and minima.

    A flat run counts once, at its middle sample, and only when the series
    turns around across it.
    """
    x = np.asarray(x, dtype=float)
    d = np.sign(np.diff(x))
    nz = np.flatnonzero(d)
    if nz.size < 2:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    s = d[nz]
    turns = np.flatnonzero(s[:-1] != s[1:])
    locs = (nz[turns] + 1 + nz[turns + 1]) // 2
    is_max = s[turns] > 0
    return locs[is_max], locs[~is_max]


def count_extrema(x: np.ndarray) -> int:
    mx, mn = local_extrema(x)
    return len(mx) + len(mn)


def count_zero_crossings(x: np.ndarray) -> int:
    """Sign changes, skipping exact zeros."""
    s = np.sign(np.asarray(x, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[:-1] != s[1:]))


def is_imf(x: np.ndarray) -> bool:
    return abs(count_extrema(x) - count_zero_crossings(x)) <= 1


def _boundary_points(maxima: np.ndarray, minima: np.ndarray, x: np.ndarray, nbsym: int = 2):
    """Mirror the ``nbsym`` extrema nearest each end to pin the spline ends.

    The mirror axis is the outermost extremum, unless the end sample lies
    beyond it, in which case the end sample is the axis and also joins the
    opposite envelope. Returns ``(t_max, y_max, t_min, y_min)``.
    """
    last = len(x) - 1
    flip = np.flip

    if maxima[0] < minima[0]:
        if x[0] > x[minima[0]]:
            lmax, lmin, lsym = flip(maxima[1:nbsym + 1]), flip(minima[:nbsym]), maxima[0]
        else:
            lmax, lmin, lsym = flip(maxima[:nbsym]), np.r_[flip(minima[:nbsym - 1]), 0], 0
    else:
        if x[0] < x[maxima[0]]:
            lmax, lmin, lsym = flip(maxima[:nbsym]), flip(minima[1:nbsym + 1]), minima[0]
        else:
            lmax, lmin, lsym = np.r_[flip(maxima[:nbsym - 1]), 0], flip(minima[:nbsym]), 0

    if maxima[-1] < minima[-1]:
        if x[-1] < x[maxima[-1]]:
            rmax, rmin, rsym = flip(maxima[-nbsym:]), flip(minima[-nbsym - 1:-1]), minima[-1]
        else:
            rmax, rmin, rsym = np.r_[last, flip(maxima[-(nbsym - 1):])], flip(minima[-nbsym:]), last
    else:
        if x[-1] > x[minima[-1]]:
            rmax, rmin, rsym = flip(maxima[-nbsym - 1:-1]), flip(minima[-nbsym:]), maxima[-1]
        else:
            rmax, rmin, rsym = flip(maxima[-nbsym:]), np.r_[last, flip(minima[-(nbsym - 1):])], last

    # mirrored points must reach past the ends; otherwise mirror about the end itself
    def short_left(a):
        return a.size == 0 or 2 * lsym - a[0] > 0

    def short_right(a):
        return a.size == 0 or 2 * rsym - a[-1] < last

    if lsym != 0 and (short_left(lmax) or short_left(lmin)):
        if lsym == maxima[0]:
            lmax = flip(maxima[:nbsym])
        else:
            lmin = flip(minima[:nbsym])
        lsym = 0
    if rsym != last and (short_right(rmax) or short_right(rmin)):
        if rsym == maxima[-1]:
            rmax = flip(maxima[-nbsym:])
        else:
            rmin = flip(minima[-nbsym:])
        rsym = last

    t_max = np.r_[2 * lsym - lmax, maxima, 2 * rsym - rmax]
    t_min = np.r_[2 * lsym - lmin, minima, 2 * rsym - rmin]
    y_max = x[np.r_[lmax, maxima, rmax].astype(int)]
    y_min = x[np.r_[lmin, minima, rmin].astype(int)]
    return t_max.astype(float), y_max, t_min.astype(float), y_min


def _spline(t: np.ndarray, y: np.ndarray, grid: np.ndarray) -> np.ndarray:
    t, keep = np.unique(t, return_index=True)
    y = y[keep]
    if len(t) == 1:
        return np.full_like(grid, y[0])
    return CubicSpline(t, y, bc_type="natural")(grid)


def _envelope_mean(h: np.ndarray) -> np.ndarray | None:
    maxima, minima = local_extrema(h)
    if len(maxima) == 0 or len(minima) == 0:
        return None
    grid = np.arange(len(h), dtype=float)
    t_max, y_max, t_min, y_min = _boundary_points(maxima, minima, h)
    return 0.5 * (_spline(t_max, y_max, grid) + _spline(t_min, y_min, grid))


def _sift(r: np.ndarray, cfg: SiftConfig) -> tuple[np.ndarray, int]:
    h = r.copy()
    it = 0
    for it in range(1, cfg.max_sift_iterations + 1):
        mean = _envelope_mean(h)
        if mean is None:
            break
        prev = h
        h = prev - mean
        denom = float(np.dot(prev, prev))
        sd = float(np.dot(mean, mean)) / denom if denom > 0 else 0.0
        if sd < cfg.sd_threshold and is_imf(h):
            break
    else:
        logger.debug("sifting hit the %d-iteration cap", cfg.max_sift_iterations)
    return h, it


def emd_decompose(series, config: SiftConfig | None = None) -> IMFSet:
    """Decompose ``series`` into IMFs (highest frequency first) and a residue.

    ``sum(imfs) + residue`` reproduces the input up to rounding.
    """
    cfg = config or SiftConfig()
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < MIN_LENGTH:
        raise TooShort(f"need a 1-D series of at least {MIN_LENGTH} samples, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("series contains NaN or infinite values")

    imfs, iters = [], []
    r = x.copy()
    limit = cfg.imf_limit(len(x))
    floor = NEGLIGIBLE * np.ptp(x)
    while len(imfs) < limit and count_extrema(r) >= 2 and np.ptp(r) > floor:
        imf, it = _sift(r, cfg)
        if not np.any(imf):
            break
        imfs.append(imf)
        iters.append(it)
        r = r - imf
    return IMFSet(tuple(imfs), r, len(x), cfg, tuple(iters))


# -- Hilbert spectral analysis ------------------------------------------------

def analytic_signal(x) -> np.ndarray:
    """Discrete analytic signal: drop negative frequencies, double positive ones."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    weights = np.zeros(n)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[n // 2] = 1.0
        weights[1:n // 2] = 2.0
    else:
        weights[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(x) * weights)


@dataclass(frozen=True)
class AnalyticSignal:
    """Instantaneous quantities of one IMF; ``tau`` is in samples (days) per cycle."""

    imaginary_part: np.ndarray
    phase: np.ndarray
    omega: np.ndarray
    tau: np.ndarray
    valid_range: tuple[int, int]

    def valid(self, name: str) -> np.ndarray:
        lo, hi = self.valid_range
        return getattr(self, name)[lo:hi]

    @property
    def well_formed(self) -> bool:
        """Phase strictly increasing on the valid range, so every tau there is positive."""
        omega = self.valid("omega")
        return bool(omega.size) and bool(np.all(omega > 0))


def hilbert_transform(imf) -> AnalyticSignal:
    """Analytic signal, unwrapped phase, angular frequency and period of an IMF.

    ``omega`` is the centered difference of the unwrapped phase in radians
    per sample; ``tau = 2*pi/omega`` so a sinusoid of period T reports T.
    The valid range drops 5% of the samples at each end.
    """
    x = np.asarray(imf, dtype=float)
    if len(x) < MIN_LENGTH:
        raise TooShort(f"need at least {MIN_LENGTH} samples, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("IMF contains NaN or infinite values")
    if count_zero_crossings(x) < 2:
        raise NotOscillatory("instantaneous frequency needs at least two zero crossings")
    z = analytic_signal(x)
    phase = np.unwrap(np.angle(z))
    omega = np.gradient(phase)
    with np.errstate(divide="ignore"):
        tau = 2.0 * np.pi / omega
    trim = int(math.ceil(EDGE_TRIM * len(x)))
    return AnalyticSignal(z.imag, phase, omega, tau, (trim, len(x) - trim))


def mean_period(analytic: AnalyticSignal) -> float:
    """Average period over the valid range, in days."""
    lo, hi = analytic.valid_range
    if hi <= lo:
        raise EmptyValidRange("valid range is empty")
    return float(np.mean(analytic.tau[lo:hi]))
