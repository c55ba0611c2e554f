"""
Receiver power versus RIS angle
===============================

Rotating the panel changes where the reflection from the far wall lands.
Here we probe every angle once and look at what each receiver sees.
"""

import numpy as np

from risray import Objective, PropagationParams, best_setting, probe_reports, reference_scene

scene = reference_scene()
report = probe_reports(scene, PropagationParams())

print("angle   " + "".join(f"{rid:>9s}" for rid in report.receiver_ids))
for angle, row in zip(scene.ris.angle_set_deg, report.powers_dbm):
    print(f"{angle:+5.0f}   " + "".join(f"{v:9.2f}" for v in row))

# Detector and subscriber want the strongest setting; the victim wants the weakest.
print()
for rx in scene.receivers:
    obj = Objective.for_receiver(rx)
    i = best_setting(report, obj)
    print(f"{rx.id}: {obj.sense.value} -> {scene.ris.angle_set_deg[i]:+.0f} deg "
          f"({report.powers_dbm[i, report.receiver_ids.index(rx.id)]:.2f} dBm)")

# How much does the panel matter at all?
swing = report.powers_dbm.max(axis=0) - report.powers_dbm.min(axis=0)
print("\nswing over all angles (dB):", np.round(swing, 2))
