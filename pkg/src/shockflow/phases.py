"""Market phases and the per-phase length / lambda schedule."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidSchedule, ZeroLengthSchedule


class Phase(str, Enum):
    PRE_SHOCK = "pre_shock"
    SHOCK = "shock"
    RECOVERY = "recovery"
    POST_RECOVERY = "post_recovery"

    @classmethod
    def parse(cls, label: str) -> "Phase":
        key = label.strip().lower().replace("-", "_")
        aliases = {
            "pre": cls.PRE_SHOCK,
            "pre_shock_normal": cls.PRE_SHOCK,
            "normal": cls.PRE_SHOCK,
            "post": cls.POST_RECOVERY,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InvalidSchedule(f"unknown phase kind {label!r}") from None


PHASE_ORDER = (Phase.PRE_SHOCK, Phase.SHOCK, Phase.RECOVERY, Phase.POST_RECOVERY)


@dataclass(frozen=True)
class PhaseSpec:
    kind: Phase
    length: int
    lam: float

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 0:
            raise InvalidSchedule(f"{self.kind.value}: length must be a non-negative integer, got {self.length}")
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidSchedule(f"{self.kind.value}: lambda must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class PhaseSchedule:
    """Ordered market phases, one model step per trading day.

    Phases must follow pre-shock, shock, recovery, post-recovery order. A
    kind may be omitted, and a phase may have zero length.
    """

    phases: tuple[PhaseSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        ranks = [PHASE_ORDER.index(p.kind) for p in self.phases]
        if any(b <= a for a, b in zip(ranks, ranks[1:])):
            raise InvalidSchedule(
                "phases must appear once each in the order "
                + ", ".join(k.value for k in PHASE_ORDER)
            )
        if self.total_length < 1:
            raise ZeroLengthSchedule("schedule has zero total length")

    @classmethod
    def build(cls, lengths: dict, lambdas: dict) -> "PhaseSchedule":
        """Schedule from ``{Phase: days}`` and ``{Phase: lambda}`` maps."""
        return cls(tuple(PhaseSpec(k, int(lengths[k]), float(lambdas[k]))
                         for k in PHASE_ORDER if k in lengths))

    @property
    def total_length(self) -> int:
        return sum(p.length for p in self.phases)

    def length_of(self, kind: Phase) -> int:
        return sum(p.length for p in self.phases if p.kind is kind)

    def start_of(self, kind: Phase) -> int | None:
        """First day index of ``kind``; None if the phase is absent or empty."""
        day = 0
        for p in self.phases:
            if p.kind is kind:
                return day if p.length else None
            day += p.length
        return None

    def day_phases(self) -> tuple[Phase, ...]:
        return tuple(p.kind for p in self.phases for _ in range(p.length))

    def day_lambdas(self) -> np.ndarray:
        return np.concatenate([np.full(p.length, p.lam) for p in self.phases])

    def replace_lengths(self, **lengths: int) -> "PhaseSchedule":
        """Copy with some phase lengths changed, keyed by ``Phase.value``."""
        return PhaseSchedule(tuple(
            PhaseSpec(p.kind, int(lengths.get(p.kind.value, p.length)), p.lam)
            for p in self.phases
        ))

    def summary(self) -> list[dict]:
        return [{"kind": p.kind.value, "length": p.length, "lambda": p.lam}
                for p in self.phases]
