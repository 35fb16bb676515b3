"""Phase-dependent multiplicative price update driven by normalized flow.

During the shock the price moves with the flow alone,
``P[t+1] = P[t] * (1 + lam * psi)``; in every other phase the company's
antifragility scales the flow, ``P[t+1] = P[t] * (1 + lam * psi * phi)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .antifragility import Antifragility
from .errors import (
    InputError,
    InvalidGridValue,
    LengthMismatch,
    NonPositivePrice,
)
from .fund_flow import (
    NormalizedFlowSeries,
    RegimeSpec,
    generate_synthetic_flow,
)
from .phases import Phase, PhaseSchedule, PhaseSpec

__all__ = [
    "Phase", "PhaseSchedule", "PhaseSpec", "PriceSeries", "Scenario",
    "SweepAxis", "SweepPoint", "step_price", "simulate", "simulate_ensemble", "sweep",
]


def step_price(p: float, psi: float, lam: float, phi: float, in_shock: bool) -> float:
    """One model day. Raises NonPositivePrice if the factor is not positive."""
    if not p > 0:
        raise NonPositivePrice(f"price must be positive, got {p}")
    factor = 1.0 + lam * psi if in_shock else 1.0 + lam * psi * phi
    if factor <= 0:
        raise NonPositivePrice(
            f"update factor {factor:.6g} <= 0 (lambda={lam}, psi={psi}, phi={phi})")
    return p * factor


@dataclass(frozen=True)
class PriceSeries:
    """Prices for days 0..n; ``phase_tags[t]`` and ``psi[t]`` drive step t -> t+1."""

    values: np.ndarray
    phase_tags: tuple[Phase, ...]
    psi: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("values", "psi"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(self.values) != len(self.psi) + 1 or len(self.phase_tags) != len(self.psi):
            raise LengthMismatch("price series needs one more price than steps")
        if np.any(self.values <= 0):
            raise NonPositivePrice("price series contains a non-positive value")

    def __len__(self):
        return len(self.values)


def _phi_value(phi) -> float:
    return float(phi.value if isinstance(phi, Antifragility) else phi)


def _step_factors(flow: np.ndarray, schedule: PhaseSchedule, phi: float) -> np.ndarray:
    lam = schedule.day_lambdas()
    shock = np.array([k is Phase.SHOCK for k in schedule.day_phases()], dtype=bool)
    # same expression order as step_price so both routes agree bit for bit
    return np.where(shock, 1.0 + lam * flow, 1.0 + lam * flow * phi)


def simulate(p0: float, flow: NormalizedFlowSeries, schedule: PhaseSchedule,
             phi: Antifragility | float, seed: int | None = None) -> PriceSeries:
    """Fold the daily update over the whole schedule.

    Parameters
    ----------
    p0 : float
        Price on day 0, must be positive.
    flow : NormalizedFlowSeries
        One value per schedule day. If it carries phase tags they must agree
        with the schedule.
    schedule : PhaseSchedule
        Per-day phase and lambda; shock days use the flow-only update.
    phi : Antifragility or float
        Held constant for the whole run.
    seed : int, optional
        Only recorded in the metadata.

    Raises
    ------
    LengthMismatch
        Flow and schedule lengths differ.
    NonPositivePrice
        Some day's factor is <= 0; ``day`` holds the first such index.
    """
    if not p0 > 0 or not math.isfinite(p0):
        raise InputError(f"initial price must be positive and finite, got {p0}")
    n = schedule.total_length
    if len(flow) != n:
        raise LengthMismatch(f"flow has {len(flow)} days but schedule has {n}")
    tags = schedule.day_phases()
    if flow.phase_tags is not None and tuple(flow.phase_tags) != tags:
        raise LengthMismatch("flow phase tags disagree with the schedule")
    phi_v = _phi_value(phi)
    factors = _step_factors(flow.values, schedule, phi_v)
    bad = np.flatnonzero(factors <= 0)
    if bad.size:
        d = int(bad[0])
        raise NonPositivePrice(
            f"update factor {factors[d]:.6g} <= 0 (phase={tags[d].value}, psi={flow.values[d]:.6g}, "
            f"phi={phi_v})", day=d)
    prices = np.cumprod(np.concatenate(([float(p0)], factors)))
    meta = {"seed": seed, "phi": phi_v, "schedule": schedule.summary(),
            "origin": flow.origin.value}
    return PriceSeries(prices, tags, flow.values, meta)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to produce price paths.

    Exactly one of ``regimes`` (synthetic flow, one draw per seed) or
    ``flow`` (a fixed, usually real, normalized flow) is set.
    """

    initial_price: float
    phi: float
    schedule: PhaseSchedule
    regimes: Mapping[Phase, RegimeSpec] | None = None
    flow: NormalizedFlowSeries | None = None
    seeds: tuple[int, ...] = (1,)
    name: str = "custom"

    def __post_init__(self):
        if (self.regimes is None) == (self.flow is None):
            raise InputError("scenario needs exactly one of synthetic regimes or a flow series")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def synthetic(self) -> bool:
        return self.regimes is not None

    def flow_for(self, seed: int) -> NormalizedFlowSeries:
        if self.flow is not None:
            return self.flow
        return generate_synthetic_flow(self.regimes, self.schedule, seed)

    def run(self, seed: int) -> PriceSeries:
        return simulate(self.initial_price, self.flow_for(seed), self.schedule, self.phi, seed=seed)

    def describe(self) -> dict:
        """JSON-ready resolved form; hashed into run manifests."""
        d = {
            "name": self.name,
            "initial_price": self.initial_price,
            "phi": self.phi,
            "phases": self.schedule.summary(),
            "seeds": list(self.seeds),
        }
        if self.regimes is not None:
            d["flow"] = {"synthetic": {k.value: [r.mean, r.sigma]
                                       for k, r in sorted(self.regimes.items(),
                                                          key=lambda kv: kv[0].value)}}
        else:
            d["flow"] = {"values": [float(v) for v in self.flow.values]}
        return d


def simulate_ensemble(scenario: Scenario, seeds: Sequence[int]) -> np.ndarray:
    """Price paths stacked as ``(len(seeds), n_days + 1)``, rows in seed order."""
    return np.vstack([scenario.run(s).values for s in seeds])


class SweepAxis(str, Enum):
    SHOCK_LENGTH = "shock_length"
    PHI = "phi"

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        key = text.strip().lower().replace("-", "_")
        if key in ("shocklength", "ts", "t_s"):
            key = "shock_length"
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown sweep axis {text!r}") from None


@dataclass(frozen=True)
class SweepPoint:
    """Ensemble of price paths for one grid value."""

    grid_value: float
    scenario: Scenario
    seeds: tuple[int, ...]
    paths: np.ndarray

    @property
    def phase_tags(self) -> tuple[Phase, ...]:
        return self.scenario.schedule.day_phases()

    @property
    def shock_start(self) -> int:
        s = self.scenario.schedule.start_of(Phase.SHOCK)
        return 0 if s is None else s

    @property
    def median_path(self) -> np.ndarray:
        return np.median(self.paths, axis=0)

    @property
    def quartiles(self) -> tuple[np.ndarray, np.ndarray]:
        q = np.quantile(self.paths, [0.25, 0.75], axis=0)
        return q[0], q[1]

    @property
    def trough(self) -> float:
        """Median over seeds of each path's minimum price."""
        return float(np.median(self.paths.min(axis=1)))

    @property
    def trough_day(self) -> int:
        """Day of the minimum of the per-day median path."""
        return int(np.argmin(self.median_path))

    @property
    def terminal_ratio(self) -> float:
        """Median over seeds of final price / price on the first shock day."""
        return float(np.median(self.paths[:, -1] / self.paths[:, self.shock_start]))

    @property
    def median_terminal(self) -> float:
        return float(np.median(self.paths[:, -1]))

    def mean_daily_return(self, phase: Phase) -> float:
        """Ensemble mean of ``P[t+1]/P[t] - 1`` over the days of ``phase``."""
        mask = np.array([k is phase for k in self.phase_tags], dtype=bool)
        if not mask.any():
            raise InputError(f"schedule has no {phase.value} days")
        r = self.paths[:, 1:] / self.paths[:, :-1] - 1.0
        return float(r[:, mask].mean())


def _grid_scenario(base: Scenario, axis: SweepAxis, value: float) -> Scenario:
    if not math.isfinite(value):
        raise InvalidGridValue(f"grid value must be finite, got {value}")
    if axis is SweepAxis.PHI:
        return replace(base, phi=float(value))
    if value < 0 or int(value) != value:
        raise InvalidGridValue(f"shock length must be a non-negative integer, got {value}")
    t = int(value)
    # recovery is as long as the shock
    return replace(base, schedule=base.schedule.replace_lengths(shock=t, recovery=t))


def sweep(base: Scenario, axis: SweepAxis | str, grid: Sequence[float],
          seeds: Sequence[int], jobs: int = 1) -> list[SweepPoint]:
    """Run the base scenario at every grid value over every seed.

    Results come back in grid order with paths in seed order whatever
    ``jobs`` is.
    """
    axis = SweepAxis.parse(axis) if isinstance(axis, str) else axis
    if not len(grid):
        raise InvalidGridValue("grid is empty")
    if not len(seeds):
        raise InvalidGridValue("no seeds")
    if not base.synthetic and len(seeds) > 1:
        raise InputError("a sweep over seeds needs a synthetic flow scenario")
    seeds = tuple(int(s) for s in seeds)
    scenarios = [_grid_scenario(base, axis, float(v)) for v in grid]

    def run_point(i):
        sc = scenarios[i]
        return SweepPoint(float(grid[i]), sc, seeds, simulate_ensemble(sc, seeds))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_point, range(len(scenarios))))
    return [run_point(i) for i in range(len(scenarios))]
