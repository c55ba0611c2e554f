"""Scenario files.

A scenario is a flat, sectioned ``key = value`` file::

    # everything is optional; missing keys fall back to the reference room
    [scene]
    bounds = 0, 0, 20, 8
    wall.loss_db = 6
    wall = 0, 4, 12, 4            # x1, y1, x2, y2 [, loss_db]; repeatable
    ris.pivot = 20, 4
    ris.angles = -20:20:5         # start:stop:step, or a comma list
    tx.position = 2, 6
    tx.power_dbm = 20
    receiver = A, 17, 0.75, detector, -51.5   # id, x, y, role, threshold

    [propagation]
    max_order = 3

    [simulation]
    policy = context
    objectives = A, B, C

Any ``wall`` line replaces the default wall list as a whole, and likewise
for ``receiver``. Comments start with ``#``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .geometry import Point2, Segment
from .propagation import PropagationParams
from .scene import (
    Bounds,
    Receiver,
    Role,
    Scene,
    Wall,
    reference_scene,
    validate_scene,
)

POLICIES = ("static", "sweep", "context")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimulationSettings:
    policy: str = "context"
    dwell: int = 1
    intervals: int = 53
    resolution: float = 0.1
    objectives: Tuple[str, ...] = ()  # empty = every receiver, in file order


@dataclass(frozen=True)
class ScenarioConfig:
    scene: Scene = field(default_factory=reference_scene)
    propagation: PropagationParams = field(default_factory=PropagationParams)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)

    def objective_ids(self) -> Tuple[str, ...]:
        return self.simulation.objectives or self.scene.receiver_ids


SECTION_KEYS = {
    "scene": {
        "bounds", "wall", "wall.loss_db", "ris.pivot", "ris.half_length",
        "ris.base_orientation_deg", "ris.angles", "ris.loss_db", "tx.position",
        "tx.power_dbm", "tx.frequency_hz", "receiver",
    },
    "propagation": {"max_order", "power_floor_dbm", "summation", "tx.power_dbm", "tx.frequency_hz"},
    "simulation": {"policy", "dwell", "intervals", "resolution", "objectives"},
}
REPEATED = {"wall", "receiver"}


def _floats(value: str, n: Optional[int], lineno: int) -> List[float]:
    try:
        out = [float(v) for v in value.split(",")]
    except ValueError:
        raise ConfigError(f"line {lineno}: expected numbers, got {value!r}") from None
    if n is not None and len(out) != n:
        raise ConfigError(f"line {lineno}: expected {n} numbers, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ConfigError(f"line {lineno}: non-finite number in {value!r}")
    return out


def _int(value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: expected an integer, got {value!r}") from None


def parse_angles(value: str, lineno: int = 0) -> Tuple[float, ...]:
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: angle range must be start:stop:step")
        start, stop, step = _floats(",".join(parts), 3, lineno)
        if step <= 0 or stop < start:
            raise ConfigError(f"line {lineno}: bad angle range {value!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + k * step for k in range(n))
    return tuple(_floats(value, None, lineno))


def _read_lines(text: str) -> Dict[str, List[Tuple[str, int]]]:
    entries: Dict[str, List[Tuple[str, int]]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip()
            if section not in SECTION_KEYS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if section is None:
            raise ConfigError(f"line {lineno}: key {key!r} outside of any section")
        if key not in SECTION_KEYS[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        if key in entries and key not in REPEATED:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries.setdefault(key, []).append((value, lineno))
    return entries


def parse_scenario(text: str) -> ScenarioConfig:
    e = _read_lines(text)

    def one(key):
        return e[key][0] if key in e else None

    base = reference_scene()
    wall_loss = 6.0
    if one("wall.loss_db"):
        v, ln = one("wall.loss_db")
        wall_loss = _floats(v, 1, ln)[0]
        if wall_loss < 0:
            raise ConfigError(f"line {ln}: wall.loss_db must be >= 0")

    bounds = base.bounds
    if one("bounds"):
        v, ln = one("bounds")
        bounds = Bounds(*_floats(v, 4, ln))

    if "wall" in e:
        walls = []
        for v, ln in e["wall"]:
            nums = _floats(v, None, ln)
            if len(nums) not in (4, 5):
                raise ConfigError(f"line {ln}: wall needs x1, y1, x2, y2 [, loss_db]")
            loss = nums[4] if len(nums) == 5 else wall_loss
            try:
                walls.append(Wall(Segment(Point2(*nums[0:2]), Point2(*nums[2:4])), loss))
            except ValueError as exc:
                raise ConfigError(f"line {ln}: {exc}") from None
        walls = tuple(walls)
    else:
        walls = tuple(replace(w, reflection_loss_db=wall_loss) for w in base.walls)

    ris = base.ris
    ris_kw = {}
    if one("ris.pivot"):
        v, ln = one("ris.pivot")
        ris_kw["pivot"] = Point2(*_floats(v, 2, ln))
    for key, attr in (("ris.half_length", "half_length"), ("ris.base_orientation_deg", "base_orientation_deg"), ("ris.loss_db", "reflection_loss_db")):
        if one(key):
            v, ln = one(key)
            ris_kw[attr] = _floats(v, 1, ln)[0]
    if one("ris.angles"):
        v, ln = one("ris.angles")
        ris_kw["angle_set_deg"] = parse_angles(v, ln)
    ris = replace(ris, **ris_kw)

    tx = base.tx
    if one("tx.position"):
        v, ln = one("tx.position")
        tx = replace(tx, position=Point2(*_floats(v, 2, ln)))
    for key, attr in (("tx.power_dbm", "power_dbm"), ("tx.frequency_hz", "frequency_hz")):
        if one(key):
            v, ln = one(key)
            tx = replace(tx, **{attr: _floats(v, 1, ln)[0]})

    receivers = base.receivers
    if "receiver" in e:
        receivers = []
        for v, ln in e["receiver"]:
            parts = [p.strip() for p in v.split(",")]
            if len(parts) != 5:
                raise ConfigError(f"line {ln}: receiver needs id, x, y, role, threshold_dbm")
            rid, x, y, role, thr = parts
            x, y, thr = _floats(f"{x},{y},{thr}", 3, ln)
            try:
                receivers.append(Receiver(rid, Point2(x, y), Role(role), thr))
            except ValueError:
                raise ConfigError(f"line {ln}: unknown role {role!r}") from None
        receivers = tuple(receivers)

    scene = Scene(bounds, walls, ris, tx, receivers)

    prop_kw = {}
    if one("max_order"):
        prop_kw["max_order"] = _int(*one("max_order"))
    if one("power_floor_dbm"):
        v, ln = one("power_floor_dbm")
        prop_kw["power_floor_dbm"] = _floats(v, 1, ln)[0]
    if one("summation"):
        v, ln = one("summation")
        if v != "incoherent":
            raise ConfigError(f"line {ln}: unsupported summation {v!r}")
        prop_kw["summation"] = v

    sim_kw = {}
    if one("policy"):
        v, ln = one("policy")
        if v not in POLICIES:
            raise ConfigError(f"line {ln}: policy must be one of {', '.join(POLICIES)}")
        sim_kw["policy"] = v
    for key in ("dwell", "intervals"):
        if one(key):
            sim_kw[key] = _int(*one(key))
    if one("resolution"):
        v, ln = one("resolution")
        sim_kw["resolution"] = _floats(v, 1, ln)[0]
    if one("objectives"):
        v, _ = one("objectives")
        sim_kw["objectives"] = tuple(s.strip() for s in v.split(",") if s.strip())

    problems = []
    try:
        params = PropagationParams(**prop_kw)
    except ValueError as exc:
        problems.append(str(exc))
        params = PropagationParams()
    sim = SimulationSettings(**sim_kw)
    cfg = ScenarioConfig(scene, params, sim)
    problems += check_config(cfg)
    if problems:
        raise ConfigError("invalid scenario:\n  " + "\n  ".join(problems))
    return cfg


def check_config(cfg: ScenarioConfig) -> List[str]:
    problems = [str(v) for v in validate_scene(cfg.scene)]
    sim = cfg.simulation
    if sim.dwell < 1:
        problems.append("dwell must be >= 1")
    if sim.intervals < 1:
        problems.append("intervals must be >= 1")
    if not sim.resolution > 0:
        problems.append("resolution must be > 0")
    ids = set(cfg.scene.receiver_ids)
    for o in sim.objectives:
        if o not in ids:
            problems.append(f"objective names unknown receiver {o!r}")
    return problems


def load_scenario(path) -> ScenarioConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config not found: {p}")
    return parse_scenario(p.read_text())


def dump_scenario(cfg: ScenarioConfig) -> str:
    """Render ``cfg`` so that ``parse_scenario`` gives it back unchanged."""
    s = cfg.scene
    r = repr
    lines = ["[scene]", f"bounds = {r(s.bounds.xmin)}, {r(s.bounds.ymin)}, {r(s.bounds.xmax)}, {r(s.bounds.ymax)}"]
    for w in s.walls:
        a, b = w.segment.a, w.segment.b
        lines.append(f"wall = {r(a.x)}, {r(a.y)}, {r(b.x)}, {r(b.y)}, {r(w.reflection_loss_db)}")
    ris = s.ris
    lines += [
        f"ris.pivot = {r(ris.pivot.x)}, {r(ris.pivot.y)}",
        f"ris.half_length = {r(ris.half_length)}",
        f"ris.base_orientation_deg = {r(ris.base_orientation_deg)}",
        "ris.angles = " + ", ".join(r(a) for a in ris.angle_set_deg),
        f"ris.loss_db = {r(ris.reflection_loss_db)}",
        f"tx.position = {r(s.tx.position.x)}, {r(s.tx.position.y)}",
        f"tx.power_dbm = {r(s.tx.power_dbm)}",
        f"tx.frequency_hz = {r(s.tx.frequency_hz)}",
    ]
    for rx in s.receivers:
        lines.append(f"receiver = {rx.id}, {r(rx.position.x)}, {r(rx.position.y)}, {rx.role.value}, {r(rx.threshold_dbm)}")
    p = cfg.propagation
    lines += [
        "",
        "[propagation]",
        f"max_order = {p.max_order}",
        f"power_floor_dbm = {r(p.power_floor_dbm)}",
        f"summation = {p.summation.value}",
    ]
    sim = cfg.simulation
    lines += [
        "",
        "[simulation]",
        f"policy = {sim.policy}",
        f"dwell = {sim.dwell}",
        f"intervals = {sim.intervals}",
        f"resolution = {r(sim.resolution)}",
    ]
    if sim.objectives:
        lines.append("objectives = " + ", ".join(sim.objectives))
    return "\n".join(lines) + "\n"
