"""Classifier-mediated perception.

A classifier profile is reduced to a 7x7 row-stochastic confusion matrix
(rows: true emotion, columns: perceived emotion). Because a trained network
applied to a fixed face image always gives the same answer, each matrix is
frozen into a :class:`PerceptionTable` by sampling one perceived label per
(identity, true emotion) pair.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import EMOTIONS, NEGATIVE, POSITIVE, Emotion

N_EMOTIONS = len(EMOTIONS)
CSV_HEADER = "true\\" + ",".join(e.value for e in EMOTIONS)


class PerceptionError(Exception):
    pass


class InvalidParameter(PerceptionError, ValueError):
    pass


class ParseError(PerceptionError):
    pass


class NotRowStochastic(PerceptionError):
    pass


class NegativeEntry(PerceptionError):
    pass


class UnknownIdentity(PerceptionError, KeyError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    label: str
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.shape != (N_EMOTIONS, N_EMOTIONS):
            raise InvalidParameter(f"confusion matrix must be 7x7, got {rows.shape}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def accuracy(self) -> float:
        return float(np.mean(np.diag(self.rows)))

    def row(self, true: Emotion) -> np.ndarray:
        return self.rows[true.index]


# label -> (accuracy, negativity bias)
DEFAULT_PROFILES: dict[str, tuple[float, float]] = {
    "kdef": (0.96, 0.5),
    "ck+": (0.37, 0.7),
    "jaffe": (0.19, 0.85),
}


def synthesize_confusion_matrix(
    accuracy: float, negativity_bias: float, label: str = "synthetic"
) -> ConfusionMatrix:
    """Build a matrix with ``accuracy`` on the diagonal.

    In every row the error mass ``1 - accuracy`` is split so that a share
    ``negativity_bias`` lands uniformly on the negative emotions other than
    the true one, and the rest uniformly on the other positive emotions.
    """
    for name, v in (("accuracy", accuracy), ("negativity_bias", negativity_bias)):
        if not (0.0 <= v <= 1.0) or not np.isfinite(v):
            raise InvalidParameter(f"{name} must lie in [0, 1], got {v}")

    err = 1.0 - accuracy
    rows = np.zeros((N_EMOTIONS, N_EMOTIONS))
    for true in EMOTIONS:
        neg = [e for e in EMOTIONS if e in NEGATIVE and e is not true]
        pos = [e for e in EMOTIONS if e in POSITIVE and e is not true]
        r = rows[true.index]
        for e in neg:
            r[e.index] = err * negativity_bias / len(neg)
        for e in pos:
            r[e.index] = err * (1.0 - negativity_bias) / len(pos)
        off = r.sum()
        if off > 0:
            r *= err / off
        r[true.index] = accuracy
    return ConfusionMatrix(label, rows)


def default_matrix(label: str) -> ConfusionMatrix:
    try:
        acc, bias = DEFAULT_PROFILES[label]
    except KeyError:
        raise InvalidParameter(f"no built-in profile named {label!r}") from None
    return synthesize_confusion_matrix(acc, bias, label=label)


def load_confusion_matrix(path: str | Path, label: str | None = None) -> ConfusionMatrix:
    path = Path(path)
    with path.open(newline="") as fh:
        lines = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = ",".join(c.strip() for c in lines[0])
    if header != CSV_HEADER:
        raise ParseError(f"{path}: expected header {CSV_HEADER!r}, got {header!r}")
    body = lines[1:]
    if len(body) != N_EMOTIONS:
        raise ParseError(f"{path}: expected {N_EMOTIONS} rows, got {len(body)}")
    rows = np.zeros((N_EMOTIONS, N_EMOTIONS))
    for i, cells in enumerate(body):
        if len(cells) != N_EMOTIONS:
            raise ParseError(f"{path}: row {i + 2} has {len(cells)} fields")
        try:
            rows[i] = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"{path}: row {i + 2}: {exc}") from None
    if not np.all(np.isfinite(rows)):
        raise ParseError(f"{path}: non-finite entry")
    if np.any(rows < 0):
        raise NegativeEntry(f"{path}: negative probability")
    sums = rows.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-6)
    if bad.size:
        i = int(bad[0])
        raise NotRowStochastic(f"{path}: row {EMOTIONS[i].value} sums to {sums[i]:.9g}")
    rows /= sums[:, None]
    return ConfusionMatrix(label or path.stem, rows)


def write_confusion_matrix(m: ConfusionMatrix, path: str | Path) -> Path:
    path = Path(path)
    lines = [CSV_HEADER]
    for r in m.rows:
        lines.append(",".join(f"{v:.12f}" for v in r))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


@dataclass(frozen=True)
class PerceptionTable:
    label: str
    table: np.ndarray  # shape (n_identities, 7), perceived emotion index

    @property
    def n_identities(self) -> int:
        return self.table.shape[0]

    def diagonal_rate(self) -> float:
        return float(np.mean(self.table == np.arange(N_EMOTIONS)[None, :]))


def build_perception_table(
    m: ConfusionMatrix, n_identities: int, rng: np.random.Generator
) -> PerceptionTable:
    if n_identities < 1:
        raise InvalidParameter("n_identities must be >= 1")
    cdf = np.cumsum(m.rows, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random((n_identities, N_EMOTIONS))
    out = np.empty((n_identities, N_EMOTIONS), dtype=np.int8)
    for j in range(N_EMOTIONS):
        out[:, j] = np.searchsorted(cdf[j], u[:, j], side="right")
    out.setflags(write=False)
    return PerceptionTable(m.label, out)


def perceive(table: PerceptionTable, identity: int, emotion: Emotion) -> Emotion:
    if not 0 <= identity < table.n_identities:
        raise UnknownIdentity(f"identity {identity} outside table of {table.n_identities}")
    return EMOTIONS[table.table[identity, emotion.index]]


def perceive_stochastic(m: ConfusionMatrix, emotion: Emotion, rng: np.random.Generator) -> Emotion:
    """Per-encounter resampling; only used for the i.i.d. ablation."""
    row = m.rows[emotion.index]
    return EMOTIONS[int(rng.choice(N_EMOTIONS, p=row))]
