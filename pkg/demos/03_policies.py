"""
Three ways to drive the panel
=============================

* static: leave it at rest, i.e. an ordinary wall
* sweep: rotate left to right and back without listening to anyone
* context: try every angle once, then hold whatever the receiver liked best

Each receiver is run on its own here, with a horizon of 16 intervals after
the probe phase, which is exactly one sweep period for 9 angles.
"""

from risray import (
    Objective,
    PropagationParams,
    context_schedule,
    probe_reports,
    reference_scene,
    run_simulation,
    satisfaction_fraction,
    static_schedule,
    sweep_schedule,
)

scene = reference_scene()
params = PropagationParams()
n = scene.ris.setting_count
rest = scene.ris.index_of(0.0)
report = probe_reports(scene, params)
horizon = 16

print(f"{'rx':3s} {'role':10s} {'static':>8s} {'sweep':>8s} {'context':>8s}")
for rx in scene.receivers:
    static = run_simulation(scene, static_schedule(rest, 1, horizon), params)
    sweep = run_simulation(scene, sweep_schedule(n, 1, horizon), params)
    ctx = run_simulation(scene, context_schedule(report, [Objective.for_receiver(rx)], n, 1, n + horizon), params)
    fr = [satisfaction_fraction(static, rx), satisfaction_fraction(sweep, rx), satisfaction_fraction(ctx, rx, n)]
    print(f"{rx.id:3s} {rx.role.value:10s} " + " ".join(f"{f:8.2%}" for f in fr))

# The detector is only above threshold at the three steepest angles. A
# triangle sweep spends 5 of its 16 slots there, hence 31.25%.
