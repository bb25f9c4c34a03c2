"""Line protocol between the host and the actuator firmware.

One servo command per line, ASCII, newline terminated:

    S,<temple>,<angle1_cdeg>,<angle2_cdeg>,<t_ms>\n

temple is L or R; angles are signed integers in hundredths of a degree;
t_ms is a non-negative integer tick time. Hundredth-degree quantization
matches what rendering emits, so encode/decode round-trips exactly.
"""
from __future__ import annotations

import re
from typing import Iterable, Iterator

from .linkage import LinkageGeometry
from .patterns import Temple
from .rendering import ServoCommand


class WireFormatError(ValueError):
    """A line does not parse as a servo command."""


_FIELD_NAMES = ("tag", "temple", "angle1_cdeg", "angle2_cdeg", "t_ms")


def encode_command(command: ServoCommand, geometry: LinkageGeometry | None = None) -> str:
    """Encode one command as a protocol line (with trailing newline).

    With a geometry given, angles outside its servo limits are refused;
    the firmware would clamp them and the rendered pattern would distort
    silently otherwise.
    """
    if geometry is not None:
        for angle in (command.angle1_deg, command.angle2_deg):
            if not geometry.servo_min_deg <= angle <= geometry.servo_max_deg:
                raise WireFormatError(
                    f"angle {angle} deg outside servo limits "
                    f"[{geometry.servo_min_deg}, {geometry.servo_max_deg}]"
                )
    if command.t_ms < 0:
        raise WireFormatError(f"t_ms must be >= 0, got {command.t_ms}")
    a1 = int(round(command.angle1_deg * 100.0))
    a2 = int(round(command.angle2_deg * 100.0))
    return f"S,{command.temple.value},{a1},{a2},{command.t_ms}\n"


def decode_line(line: str, line_number: int | None = None) -> ServoCommand:
    """Parse one protocol line, raising WireFormatError with the offending
    field named and its character offset in the line."""
    where = f"line {line_number}: " if line_number is not None else ""
    body = line.rstrip("\n")
    if body != body.strip() or "\r" in body:
        raise WireFormatError(f"{where}stray whitespace around line {body!r}")
    parts = body.split(",")
    if len(parts) != 5:
        raise WireFormatError(
            f"{where}expected 5 comma-separated fields, got {len(parts)} in {body!r}"
        )

    offsets = []
    offset = 0
    for part in parts:
        offsets.append(offset)
        offset += len(part) + 1

    def bad(index: int, reason: str) -> WireFormatError:
        return WireFormatError(
            f"{where}field {index + 1} ({_FIELD_NAMES[index]}) at column "
            f"{offsets[index] + 1}: {reason}"
        )

    if parts[0] != "S":
        raise bad(0, f"expected tag 'S', got {parts[0]!r}")
    try:
        temple = Temple(parts[1])
    except ValueError:
        raise bad(1, f"expected L or R, got {parts[1]!r}") from None

    values = []
    for index in (2, 3, 4):
        text = parts[index]
        pattern = r"-?\d+" if index < 4 else r"\d+"
        if not re.fullmatch(pattern, text):
            raise bad(index, f"expected an integer, got {text!r}")
        values.append(int(text))
    a1_cdeg, a2_cdeg, t_ms = values
    return ServoCommand(
        t_ms=t_ms,
        temple=temple,
        angle1_deg=a1_cdeg / 100.0,
        angle2_deg=a2_cdeg / 100.0,
    )


def encode_stream(commands: Iterable[ServoCommand], geometry: LinkageGeometry | None = None) -> str:
    return "".join(encode_command(c, geometry) for c in commands)


def decode_stream(text: str, strict: bool = True) -> Iterator[ServoCommand]:
    """Parse a multi-line stream.

    In strict mode the first bad line raises. Otherwise bad lines are
    skipped; callers that need the diagnostics should parse line by line
    with decode_line. Blank lines are ignored either way.
    """
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield decode_line(line, line_number)
        except WireFormatError:
            if strict:
                raise
