"""Walls, RIS panel, transmitter and receivers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .geometry import Point2, Segment

DEFAULT_THRESHOLDS = (-51.5, -53.0, -55.0)  # dBm for A, B, C
DEFAULT_ANGLES_DEG = (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)


class Role(str, Enum):
    DETECTOR = "detector"
    SUBSCRIBER = "subscriber"
    VICTIM = "victim"

    @property
    def wants_signal(self) -> bool:
        return self is not Role.VICTIM


@dataclass(frozen=True)
class Wall:
    segment: Segment
    reflection_loss_db: float = 6.0

    def __post_init__(self):
        if not self.reflection_loss_db >= 0.0:
            raise ValueError("reflection_loss_db must be >= 0")


@dataclass(frozen=True)
class RisPanel:
    """A flat reflector rotated about ``pivot`` through a discrete angle set.

    Angles are offsets from ``base_orientation_deg``, the panel direction
    at rest. Rotating the panel moves the whole segment, so its shadow
    moves with it.
    """

    pivot: Point2
    half_length: float = 2.0
    base_orientation_deg: float = 90.0
    angle_set_deg: Tuple[float, ...] = DEFAULT_ANGLES_DEG
    reflection_loss_db: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "angle_set_deg", tuple(float(a) for a in self.angle_set_deg))

    @property
    def setting_count(self) -> int:
        return len(self.angle_set_deg)

    def wall_at(self, offset_deg: float) -> Wall:
        theta = math.radians(self.base_orientation_deg + offset_deg)
        ux = self.half_length * math.cos(theta)
        uy = self.half_length * math.sin(theta)
        p = self.pivot
        seg = Segment(Point2(p.x - ux, p.y - uy), Point2(p.x + ux, p.y + uy))
        return Wall(seg, self.reflection_loss_db)

    def index_of(self, angle_deg: float) -> int:
        """Setting index of an exact member of the angle set."""
        for i, a in enumerate(self.angle_set_deg):
            if a == angle_deg:
                return i
        raise ValueError(f"unknown RIS setting: angle {angle_deg:g} deg")


def ris_segment(panel: RisPanel, setting_index: int) -> Wall:
    if not 0 <= setting_index < panel.setting_count:
        raise ValueError(f"unknown RIS setting: index {setting_index}")
    return panel.wall_at(panel.angle_set_deg[setting_index])


def setting_count(panel: RisPanel) -> int:
    return panel.setting_count


@dataclass(frozen=True)
class Transmitter:
    position: Point2
    power_dbm: float = 20.0
    frequency_hz: float = 3.5e9


@dataclass(frozen=True)
class Receiver:
    id: str
    position: Point2
    role: Role
    threshold_dbm: float

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))

    def satisfied(self, power_dbm: float) -> bool:
        # a sample exactly at threshold is detected/received, and interfered
        if self.role.wants_signal:
            return power_dbm >= self.threshold_dbm
        return power_dbm < self.threshold_dbm


@dataclass(frozen=True)
class Bounds:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, p: Point2) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin


@dataclass(frozen=True)
class Scene:
    bounds: Bounds
    walls: Tuple[Wall, ...]
    ris: RisPanel
    tx: Transmitter
    receivers: Tuple[Receiver, ...]

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "receivers", tuple(self.receivers))

    def receiver(self, rx_id: str) -> Receiver:
        for rx in self.receivers:
            if rx.id == rx_id:
                return rx
        raise KeyError(f"unknown receiver id: {rx_id}")

    @property
    def receiver_ids(self) -> Tuple[str, ...]:
        return tuple(rx.id for rx in self.receivers)

    def walls_for_setting(self, setting_index: int) -> Tuple[Wall, ...]:
        return self.walls + (ris_segment(self.ris, setting_index),)

    def baseline_walls(self) -> Tuple[Wall, ...]:
        """The RIS frozen at its rest orientation, i.e. a plain wall piece."""
        return self.walls + (self.ris.wall_at(0.0),)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}" if self.detail else self.kind


def validate_scene(scene: Scene) -> List[Violation]:
    out: List[Violation] = []
    b = scene.bounds
    if not (b.xmax > b.xmin and b.ymax > b.ymin):
        out.append(Violation("degenerate bounds", f"{b}"))
    positions = [("transmitter", scene.tx.position), ("RIS pivot", scene.ris.pivot)]
    positions += [(f"receiver {rx.id}", rx.position) for rx in scene.receivers]
    for name, p in positions:
        if not b.contains(p):
            out.append(Violation("position outside bounds", f"{name} at ({p.x:g}, {p.y:g})"))
    if not scene.receivers:
        out.append(Violation("no receivers"))
    seen = set()
    for rx in scene.receivers:
        if rx.id in seen:
            out.append(Violation("duplicate receiver id", rx.id))
        seen.add(rx.id)
    angles = scene.ris.angle_set_deg
    if not angles:
        out.append(Violation("empty RIS angle set"))
    elif any(b2 <= a for a, b2 in zip(angles, angles[1:])):
        out.append(Violation("RIS angle set not strictly increasing", f"{angles}"))
    if not scene.ris.half_length > 0:
        out.append(Violation("RIS half_length must be > 0"))
    if not scene.ris.reflection_loss_db >= 0:
        out.append(Violation("negative reflection loss", "RIS"))
    if not scene.tx.frequency_hz > 0:
        out.append(Violation("frequency must be > 0"))
    return out


def reference_scene(
    tx_power_dbm: float = 20.0,
    frequency_hz: float = 3.5e9,
    wall_loss_db: float = 6.0,
    ris_loss_db: float = 1.0,
    thresholds: Optional[Sequence[float]] = None,
) -> Scene:
    """The default room: a 20 m x 8 m hall split lengthwise by a divider.

    The divider runs from the left wall to x = 12 m, so the transmitter's
    upper corridor and the receivers' lower corridor only meet in the far
    end of the hall, where the RIS completes the right-hand wall.
    """
    thr_a, thr_b, thr_c = thresholds if thresholds is not None else DEFAULT_THRESHOLDS
    P = Point2

    def w(ax, ay, bx, by):
        return Wall(Segment(P(float(ax), float(ay)), P(float(bx), float(by))), wall_loss_db)

    walls = (
        w(0, 0, 20, 0),
        w(20, 0, 20, 2),
        w(20, 6, 20, 8),
        w(20, 8, 0, 8),
        w(0, 8, 0, 0),
        w(0, 4, 12, 4),
    )
    return Scene(
        bounds=Bounds(0.0, 0.0, 20.0, 8.0),
        walls=walls,
        ris=RisPanel(P(20.0, 4.0), 2.0, 90.0, DEFAULT_ANGLES_DEG, ris_loss_db),
        tx=Transmitter(P(2.0, 6.0), tx_power_dbm, frequency_hz),
        receivers=(
            Receiver("A", P(17.0, 0.75), Role.DETECTOR, thr_a),
            Receiver("B", P(14.5, 1.0), Role.SUBSCRIBER, thr_b),
            Receiver("C", P(4.5, 2.0), Role.VICTIM, thr_c),
        ),
    )
