"""Time-stepped runs of a RIS schedule over a static scene."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .control import ProbeReport, RisSchedule
from .propagation import PropagationParams, received_powers
from .scene import Scene, Wall


@dataclass(frozen=True)
class SimulationTrace:
    receiver_ids: Tuple[str, ...]
    settings: np.ndarray  # (steps,) active setting index
    powers_dbm: np.ndarray  # (steps, n_receivers)

    @property
    def steps(self) -> int:
        return len(self.settings)

    def column(self, receiver_id: str) -> np.ndarray:
        try:
            j = self.receiver_ids.index(receiver_id)
        except ValueError:
            raise KeyError(f"unknown receiver id: {receiver_id}") from None
        return self.powers_dbm[:, j]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(("step", "setting_index") + self.receiver_ids) + "\n")
        for k in range(self.steps):
            vals = ",".join(f"{v:.6f}" for v in self.powers_dbm[k])
            buf.write(f"{k},{int(self.settings[k])},{vals}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SimulationTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty trace CSV")
        header = [h.strip() for h in lines[0].split(",")]
        if header[:2] != ["step", "setting_index"] or len(header) < 3:
            raise ValueError("trace CSV header must be step,setting_index,<rx-id>...")
        settings, rows = [], []
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split(",")
            if len(parts) != len(header):
                raise ValueError(f"trace CSV line {lineno}: expected {len(header)} fields")
            settings.append(int(parts[1]))
            rows.append([float(v) for v in parts[2:]])
        return cls(tuple(header[2:]), np.array(settings, dtype=int), np.array(rows, dtype=float))


def _receiver_points(scene: Scene) -> np.ndarray:
    return np.array([[rx.position.x, rx.position.y] for rx in scene.receivers], dtype=float)


def _powers_for(scene: Scene, walls: Sequence[Wall], params: PropagationParams) -> np.ndarray:
    return received_powers(scene.tx, _receiver_points(scene), walls, params)


def baseline_powers(scene: Scene, params: PropagationParams) -> np.ndarray:
    """Receiver powers with the panel fixed at rest, i.e. a plain wall."""
    return _powers_for(scene, scene.baseline_walls(), params)


def _setting_powers(
    scene: Scene, settings: Sequence[int], params: PropagationParams, workers: int
) -> Dict[int, np.ndarray]:
    settings = list(settings)

    def one(i):
        return _powers_for(scene, scene.walls_for_setting(i), params)

    if workers > 1 and len(settings) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, settings))
    else:
        rows = [one(i) for i in settings]
    return dict(zip(settings, rows))


def probe_reports(scene: Scene, params: PropagationParams, workers: int = 1) -> ProbeReport:
    n = scene.ris.setting_count
    rows = _setting_powers(scene, range(n), params, workers)
    return ProbeReport(scene.receiver_ids, np.stack([rows[i] for i in range(n)]))


def run_simulation(
    scene: Scene, schedule: RisSchedule, params: PropagationParams, workers: int = 1
) -> SimulationTrace:
    """Apply ``schedule`` and record every receiver's power at every step.

    The world is static apart from the panel, so each setting is traced
    once and its row reused wherever the schedule holds it.
    """
    n = scene.ris.setting_count
    for e in schedule.entries:
        if not 0 <= e < n:
            raise ValueError(f"schedule references unknown setting {e}")
    rows = _setting_powers(scene, sorted(set(schedule.entries)), params, workers)
    per_interval = np.stack([rows[e] for e in schedule.entries]).reshape(-1, len(scene.receivers))
    powers = np.repeat(per_interval, schedule.dwell_steps, axis=0)
    return SimulationTrace(scene.receiver_ids, schedule.step_settings(), powers)
