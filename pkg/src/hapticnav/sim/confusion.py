"""How reliably wearers recognize each pattern.

A user study measured, for every pattern actually played, the probability
distribution over what participants reported feeling. The simulator draws
a perceived pattern from the row of the actual one, so misread cues (the
dominant real-world failure mode) occur at realistic rates. Published
rows carry rounding error, so each row is renormalized proportionally to
sum to one; both the raw and normalized forms are kept.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..haptics.patterns import HapticPatternId

DEFAULT_REACTION_LATENCY_MS = 500.0
_ROW_SUM_SLACK = 0.05  # raw rows may miss 1.0 by this much before we refuse


@dataclass(frozen=True)
class PerceptionProfile:
    """Row-stochastic confusion model plus reaction latency.

    labels gives row/column order; raw is the matrix as loaded, rows may
    be slightly off 1.0; matrix is the row-normalized form actually
    sampled from. reaction_latency_ms is the delay between a pattern
    starting and the wearer acting on it.
    """

    labels: tuple[HapticPatternId, ...]
    raw: np.ndarray
    matrix: np.ndarray
    reaction_latency_ms: float

    def __post_init__(self) -> None:
        n = len(self.labels)
        if self.raw.shape != (n, n) or self.matrix.shape != (n, n):
            raise InputError(f"confusion matrix must be {n}x{n}")
        if np.any(self.raw < 0):
            raise InputError("confusion entries must be >= 0")
        if self.reaction_latency_ms < 0:
            raise InputError(f"reaction latency must be >= 0: {self.reaction_latency_ms}")
        sums = self.matrix.sum(axis=1)
        if not np.allclose(sums, 1.0, atol=1e-9):
            raise InputError(f"normalized rows must sum to 1, got {sums}")

    def row(self, pattern: HapticPatternId) -> np.ndarray:
        return self.matrix[self.labels.index(pattern)]

    def raw_row(self, pattern: HapticPatternId) -> np.ndarray:
        return self.raw[self.labels.index(pattern)]

    def probability(self, actual: HapticPatternId, perceived: HapticPatternId) -> float:
        return float(self.matrix[self.labels.index(actual), self.labels.index(perceived)])


def _build(
    labels: list[HapticPatternId], raw: np.ndarray, reaction_latency_ms: float
) -> PerceptionProfile:
    sums = raw.sum(axis=1)
    bad = [
        labels[i].value
        for i in range(len(labels))
        if abs(sums[i] - 1.0) > _ROW_SUM_SLACK or sums[i] <= 0
    ]
    if bad:
        raise InputError(f"confusion rows too far from stochastic: {bad}")
    matrix = raw / sums[:, None]
    return PerceptionProfile(
        labels=tuple(labels),
        raw=raw,
        matrix=matrix,
        reaction_latency_ms=reaction_latency_ms,
    )


def load_confusion_csv(
    path: str | Path, reaction_latency_ms: float = DEFAULT_REACTION_LATENCY_MS
) -> PerceptionProfile:
    """Load a confusion matrix CSV.

    Format: header row "pattern,<col label>,..." then one row per actual
    pattern. Row and column label sets must both cover every pattern id.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read confusion matrix {path}: {exc}") from exc
    return _parse_confusion_rows(rows, reaction_latency_ms, source=str(path))


def _parse_confusion_rows(
    rows: list[list[str]], reaction_latency_ms: float, source: str
) -> PerceptionProfile:
    if not rows or rows[0][:1] != ["pattern"]:
        raise InputError(f"{source}: first cell must be 'pattern'")
    try:
        columns = [HapticPatternId(v) for v in rows[0][1:]]
    except ValueError as exc:
        raise InputError(f"{source}: unknown column label: {exc}") from exc
    if set(columns) != set(HapticPatternId) or len(columns) != len(HapticPatternId):
        raise InputError(f"{source}: columns must cover all {len(HapticPatternId)} patterns once")

    seen: dict[HapticPatternId, list[float]] = {}
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            label = HapticPatternId(row[0])
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise InputError(f"{source} line {i}: {exc}") from exc
        if label in seen:
            raise InputError(f"{source} line {i}: duplicate row {label.value}")
        if len(values) != len(columns):
            raise InputError(f"{source} line {i}: expected {len(columns)} values")
        seen[label] = values
    if set(seen) != set(HapticPatternId):
        missing = sorted(p.value for p in set(HapticPatternId) - set(seen))
        raise InputError(f"{source}: missing rows: {missing}")

    labels = list(seen.keys())
    raw = np.array(
        [[seen[r][columns.index(c)] for c in labels] for r in labels], dtype=float
    )
    return _build(labels, raw, reaction_latency_ms)


def bundled_profile(
    reaction_latency_ms: float = DEFAULT_REACTION_LATENCY_MS,
) -> PerceptionProfile:
    """The packaged study-measured confusion matrix."""
    ref = resources.files("hapticnav.data").joinpath("confusion_matrix.csv")
    rows = list(csv.reader(ref.read_text(encoding="utf-8").splitlines()))
    return _parse_confusion_rows(rows, reaction_latency_ms, source="bundled confusion matrix")


def perfect_profile(reaction_latency_ms: float = 0.0) -> PerceptionProfile:
    """Identity confusion: every pattern is recognized instantly."""
    labels = list(HapticPatternId)
    return _build(labels, np.eye(len(labels)), reaction_latency_ms)


def sample_perceived(
    actual: HapticPatternId, profile: PerceptionProfile, rng: np.random.Generator
) -> HapticPatternId:
    """Draw what the wearer felt given what was played."""
    row = profile.row(actual)
    index = int(rng.choice(len(row), p=row))
    return profile.labels[index]
