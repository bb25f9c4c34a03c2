"""Every haptic pattern: duration, temples, keyframes, wire stream.

Thirteen cues cover taps at three temple positions per side plus slow
and fast slides in four directions. Compiling one yields keyframes on a
70 mm strip; rendering turns those into per-tick servo angles; encoding
prints the serial lines the glasses firmware consumes.

    python3 demos/04_pattern_gallery.py
"""
from __future__ import annotations

from hapticnav.haptics.linkage import Calibration, LinkageGeometry
from hapticnav.haptics.patterns import HapticPatternId, compile_pattern
from hapticnav.haptics.rendering import render
from hapticnav.haptics.wire import encode_stream

print(f"{'pattern':<18} {'ms':>6}  temples  keyframes")
for pattern in HapticPatternId:
    trajectory = compile_pattern(pattern)
    temples = "+".join(t.value for t in trajectory.temples())
    print(
        f"{pattern.value:<18} {trajectory.duration_ms:>6.0f}  "
        f"{temples:<7}  {len(trajectory.keyframes)}"
    )

# One pattern end to end: keyframes, then the first few wire lines.
pattern = HapticPatternId.SLIDE_LEFT_FAST
trajectory = compile_pattern(pattern)
print(f"\n{pattern.value} keyframes (t_ms, temple, position_mm, pressure):")
for kf in trajectory.keyframes:
    print(f"  {kf.t_ms:>6.0f}  {kf.temple.value}  {kf.position_mm:>5.1f}  {kf.pressure:.2f}")

commands = render(trajectory, LinkageGeometry(), Calibration(), tick_hz=50.0)
stream = encode_stream(commands, LinkageGeometry())
lines = stream.splitlines()
print(f"\nrendered at 50 Hz: {len(commands)} servo commands; first four lines:")
for line in lines[:4]:
    print(f"  {line}")
print(
    "\nA left slide hands off between the temples: pressure rises and falls"
    "\non the right side first, then on the left, so the stroke reads as one"
    "\nmotion around the head."
)
