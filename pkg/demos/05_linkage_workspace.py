"""Five-bar linkage: inverse and forward kinematics over the strip.

Two servos drive proximal links; two distal links meet at the contact
tip. Inverse kinematics turns a strip position and press depth into the
two shaft angles; forward kinematics recovers the tip from the angles.
The script sweeps the 70 mm strip, prints the angle table, and saves a
workspace figure.

    python3 demos/05_linkage_workspace.py
"""
from __future__ import annotations

import math
import pathlib

from hapticnav.haptics.linkage import LinkageGeometry, forward_kinematics, inverse_kinematics

geometry = LinkageGeometry()

print("strip sweep at full press (position -> shaft angles -> tip):")
print(f"{'mm':>5} {'angle1':>8} {'angle2':>8} {'tip x':>8} {'tip y':>8} {'err mm':>9}")
for position in range(0, 71, 10):
    angle1, angle2 = inverse_kinematics(float(position), geometry, pressure=1.0)
    tip = forward_kinematics(angle1, angle2, geometry)
    target = geometry.contact_point(float(position), 1.0)
    err = math.dist(tip, target)
    print(
        f"{position:>5} {angle1:>8.2f} {angle2:>8.2f} "
        f"{tip[0]:>8.2f} {tip[1]:>8.2f} {err:>9.1e}"
    )

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(7.0, 4.0))
for pressure, color in ((0.0, "#bbbbbb"), (0.5, "#7799cc"), (1.0, "#cc5555")):
    xs, ys = [], []
    for i in range(141):
        position = 70.0 * i / 140.0
        angles = inverse_kinematics(position, geometry, pressure=pressure)
        x, y = forward_kinematics(*angles, geometry)
        xs.append(x)
        ys.append(y)
    ax.plot(xs, ys, color=color, label=f"pressure {pressure:g}")
(m1, m2) = geometry.motor_positions
ax.plot([m1[0], m2[0]], [m1[1], m2[1]], "ks", ms=6, label="servo shafts")
ax.set_xlabel("x (mm)")
ax.set_ylabel("y (mm)")
ax.set_title("contact tip paths across the temple strip")
ax.legend()
ax.set_aspect("equal")
fig.tight_layout()
target_file = out_dir / "linkage_workspace.svg"
fig.savefig(target_file, metadata={"Date": None})
print(f"\nworkspace figure written to {target_file}")
