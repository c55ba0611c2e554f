"""RIS scheduling policies.

Three controllers:

* static   - hold one setting (a plain wall when that setting is the rest angle)
* sweep    - blind triangle wave, rotating the panel left to right and back
* context  - probe every setting once, then cycle through the settings the
             receivers report as best for their own objective
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from .scene import Receiver


class Sense(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


@dataclass(frozen=True)
class Objective:
    receiver_id: str
    sense: Sense
    threshold_dbm: float

    @classmethod
    def for_receiver(cls, rx: Receiver) -> "Objective":
        sense = Sense.MAXIMIZE if rx.role.wants_signal else Sense.MINIMIZE
        return cls(rx.id, sense, rx.threshold_dbm)


@dataclass(frozen=True)
class RisSchedule:
    dwell_steps: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.dwell_steps < 1:
            raise ValueError("dwell_steps must be >= 1")
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    @property
    def total_steps(self) -> int:
        return self.dwell_steps * len(self.entries)

    def step_settings(self) -> np.ndarray:
        """Active setting index at every time step."""
        return np.repeat(np.array(self.entries, dtype=int), self.dwell_steps)

    def validate(self, n_settings: int) -> None:
        for e in self.entries:
            if not 0 <= e < n_settings:
                raise ValueError(f"schedule references unknown setting {e}")


@dataclass(frozen=True)
class ProbeReport:
    """Received power per RIS setting (rows) and receiver (columns)."""

    receiver_ids: Tuple[str, ...]
    powers_dbm: np.ndarray  # (n_settings, n_receivers)

    def __post_init__(self):
        p = np.asarray(self.powers_dbm, dtype=float)
        if p.ndim != 2 or p.shape[1] != len(self.receiver_ids):
            raise ValueError("probe report must be n_settings x n_receivers")
        if not np.isfinite(p).all():
            raise ValueError("probe report has missing cells")
        object.__setattr__(self, "powers_dbm", p)

    @property
    def n_settings(self) -> int:
        return self.powers_dbm.shape[0]

    def column(self, receiver_id: str) -> np.ndarray:
        try:
            j = self.receiver_ids.index(receiver_id)
        except ValueError:
            raise KeyError(f"unknown receiver id: {receiver_id}") from None
        return self.powers_dbm[:, j]


def static_schedule(
    setting_index: int, dwell_steps: int, n_intervals: int, n_settings: int | None = None
) -> RisSchedule:
    if n_intervals < 1:
        raise ValueError("n_intervals must be >= 1")
    if setting_index < 0 or (n_settings is not None and setting_index >= n_settings):
        raise ValueError(f"unknown RIS setting: index {setting_index}")
    return RisSchedule(dwell_steps, (setting_index,) * n_intervals)


def triangle_wave(n_settings: int, n_intervals: int) -> List[int]:
    if n_settings < 1:
        raise ValueError("n_settings must be >= 1")
    period = list(range(n_settings)) + list(range(n_settings - 2, 0, -1))
    return [period[k % len(period)] for k in range(n_intervals)]


def sweep_schedule(n_settings: int, dwell_steps: int, n_intervals: int) -> RisSchedule:
    return RisSchedule(dwell_steps, tuple(triangle_wave(n_settings, n_intervals)))


def best_setting(report: ProbeReport, objective: Objective) -> int:
    col = report.column(objective.receiver_id)
    # argmax/argmin return the first extremum, i.e. ties go to the lowest index
    if Sense(objective.sense) is Sense.MAXIMIZE:
        return int(np.argmax(col))
    return int(np.argmin(col))


def context_schedule(
    report: ProbeReport,
    objectives: Sequence[Objective],
    n_settings: int,
    dwell_steps: int,
    n_intervals: int,
) -> RisSchedule:
    if not objectives:
        raise ValueError("context policy needs at least one objective")
    if n_intervals < n_settings:
        raise ValueError("horizon shorter than probe phase")
    picks = list(dict.fromkeys(best_setting(report, o) for o in objectives))
    tail = [picks[k % len(picks)] for k in range(n_intervals - n_settings)]
    return RisSchedule(dwell_steps, tuple(range(n_settings)) + tuple(tail))


def probe_steps(policy: str, n_settings: int, dwell_steps: int) -> int:
    """Length of the probe phase in time steps (zero for the blind policies)."""
    return n_settings * dwell_steps if policy == "context" else 0
