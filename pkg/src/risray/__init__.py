"""2D image-source RF propagation with a rotatable reconfigurable intelligent surface."""

from .control import (
    Objective,
    ProbeReport,
    RisSchedule,
    Sense,
    best_setting,
    context_schedule,
    static_schedule,
    sweep_schedule,
)
from .geometry import Point2, Ray, Segment, intersect_ray_segment, is_visible, mirror_point, reflect_direction
from .metrics import DbStats, compare_traces, db_statistics, metrics_report, report_json, satisfaction_fraction
from .propagation import (
    PowerMap,
    PropagationParams,
    PropagationPath,
    enumerate_paths,
    path_power,
    power_map,
    received_power,
)
from .scene import Receiver, RisPanel, Role, Scene, Transmitter, Wall, reference_scene, ris_segment, validate_scene
from .simulation import SimulationTrace, probe_reports, run_simulation

__version__ = "0.1.0"
