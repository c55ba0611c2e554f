"""
Power map of the reference room
===============================

The hall is 20 m x 8 m. A divider runs from the left wall to x = 12 m, so
the transmitter in the upper corridor cannot see the receivers in the lower
one. Energy only gets around through reflections, mostly off the far
right-hand wall, whose middle piece is the RIS panel.

With the panel held at its rest angle it is just a wall. This script traces
that case and draws the map in the terminal.
"""

import numpy as np

from risray import PropagationParams, power_map, received_power, reference_scene

scene = reference_scene()
params = PropagationParams(max_order=3)

# 0.25 m cells are plenty for a terminal picture
pm = power_map(scene.tx, scene.baseline_walls(), scene.bounds, 0.25, params)
print(f"{pm.nx} x {pm.ny} cells, {pm.values.min():.1f} .. {pm.values.max():.1f} dBm")

# one character per cell, denser = stronger; row 0 of the array is the floor,
# so flip it for printing
shades = " .:-=+*#%@"
lo, hi = -70.0, -20.0
idx = np.clip((pm.values - lo) / (hi - lo) * (len(shades) - 1), 0, len(shades) - 1).astype(int)
for row in idx[::-1]:
    print("".join(shades[i] for i in row))

# The receivers sit in the lower corridor. C is near the divider's open end
# on the transmitter's side of the room, A and B further right.
print()
for rx in scene.receivers:
    p = received_power(scene.tx, rx.position, scene.baseline_walls(), params)
    verdict = "ok" if rx.satisfied(p) else "not ok"
    print(f"{rx.id} ({rx.role.value:10s}) at ({rx.position.x:5.2f}, {rx.position.y:4.2f}): "
          f"{p:7.2f} dBm, threshold {rx.threshold_dbm} -> {verdict}")
