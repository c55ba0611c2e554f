"""Objective satisfaction and dB statistics over simulation traces.

Statistics are taken on the dBm values themselves, not on linear power.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .scene import Receiver, Scene
from .simulation import SimulationTrace


@dataclass(frozen=True)
class DbStats:
    mean: float
    median: float
    p10: float
    p90: float

    def __sub__(self, other: "DbStats") -> "DbStats":
        return DbStats(
            self.mean - other.mean,
            self.median - other.median,
            self.p10 - other.p10,
            self.p90 - other.p90,
        )


def _window(trace: SimulationTrace, receiver_id: str, skip_steps: int) -> np.ndarray:
    if not 0 <= skip_steps < trace.steps:
        raise ValueError("empty evaluation window")
    try:
        col = trace.column(receiver_id)
    except KeyError:
        raise ValueError(f"unknown receiver id: {receiver_id}") from None
    return col[skip_steps:]


def satisfaction_fraction(trace: SimulationTrace, receiver: Receiver, skip_steps: int = 0) -> float:
    """Share of steps (from ``skip_steps`` on) where the receiver's objective holds."""
    p = _window(trace, receiver.id, skip_steps)
    if receiver.role.wants_signal:
        ok = p >= receiver.threshold_dbm
    else:
        ok = p < receiver.threshold_dbm
    return float(np.count_nonzero(ok)) / len(p)


def db_statistics(series: Sequence[float]) -> DbStats:
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    # numpy's default "linear" method is h = q (n - 1) with interpolation
    p10, median, p90 = np.percentile(x, [10.0, 50.0, 90.0])
    return DbStats(float(np.mean(x)), float(median), float(p10), float(p90))


def compare_traces(
    baseline: SimulationTrace, trace: SimulationTrace, receiver_id: str, skip_steps: int = 0
) -> DbStats:
    """Baseline statistic minus trace statistic; positive means a reduction."""
    before = db_statistics(_window(baseline, receiver_id, skip_steps))
    after = db_statistics(_window(trace, receiver_id, skip_steps))
    return before - after


def _r6(x: float) -> float:
    return float(f"{x:.6f}")


def _stats_dict(s: DbStats) -> Dict[str, float]:
    return {k: _r6(v) for k, v in asdict(s).items()}


@dataclass(frozen=True)
class ReceiverMetrics:
    receiver: str
    role: str
    threshold_dbm: float
    satisfaction_fraction: float
    satisfaction_fraction_post_probe: float
    stats: DbStats
    deltas: Optional[DbStats]

    def to_dict(self) -> dict:
        d = {
            "receiver": self.receiver,
            "role": self.role,
            "threshold_dbm": _r6(self.threshold_dbm),
            "satisfaction_fraction": _r6(self.satisfaction_fraction),
            "satisfaction_fraction_post_probe": _r6(self.satisfaction_fraction_post_probe),
            "stats": _stats_dict(self.stats),
        }
        if self.deltas is not None:
            d["deltas"] = _stats_dict(self.deltas)
        return d


def metrics_report(
    scene: Scene,
    trace: SimulationTrace,
    probe_steps: int = 0,
    baseline: Optional[SimulationTrace] = None,
) -> List[ReceiverMetrics]:
    """Per-receiver figures of merit; deltas are taken over the whole trace."""
    out = []
    post = probe_steps if probe_steps < trace.steps else 0
    for rx in scene.receivers:
        out.append(
            ReceiverMetrics(
                receiver=rx.id,
                role=rx.role.value,
                threshold_dbm=rx.threshold_dbm,
                satisfaction_fraction=satisfaction_fraction(trace, rx, 0),
                satisfaction_fraction_post_probe=satisfaction_fraction(trace, rx, post),
                stats=db_statistics(trace.column(rx.id)),
                deltas=None if baseline is None else compare_traces(baseline, trace, rx.id, 0),
            )
        )
    return out


def report_json(records: Sequence[ReceiverMetrics], **header) -> str:
    doc = dict(header)
    doc["receivers"] = [r.to_dict() for r in records]
    return json.dumps(doc, indent=2) + "\n"
