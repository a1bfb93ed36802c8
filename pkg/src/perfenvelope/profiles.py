"""Checkpoint schedules, raw traces, normalized performance profiles and ranks.

Quality is a minimization measure in ``[0, 1]``: 0 is as good as the best
solution any configuration found on an instance, 1 as bad as the worst.
All times are virtual (checkpoint clock), never wall-clock.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class ValidationError(ValueError):
    """Input data breaks a documented invariant."""


@dataclass(frozen=True)
class CheckpointSchedule:
    """Geometric checkpoints ``base_time * 2**k`` for ``k = 0 .. count - 1``."""

    base_time: int = 1
    count: int = 11

    def __post_init__(self):
        if self.count < 2:
            raise ValidationError(f"schedule needs at least 2 checkpoints, got {self.count}")
        if self.base_time <= 0:
            raise ValidationError(f"base_time must be positive, got {self.base_time}")

    @property
    def times(self) -> tuple[int, ...]:
        return tuple(self.base_time * 2**k for k in range(self.count))

    @property
    def full_budget(self) -> int:
        return self.base_time * 2 ** (self.count - 1)

    @property
    def final_index(self) -> int:
        return self.count - 1

    @classmethod
    def from_times(cls, times: Sequence[int]) -> "CheckpointSchedule":
        times = [int(t) for t in times]
        sched = cls(base_time=times[0], count=len(times))
        if list(sched.times) != times:
            raise ValidationError(f"times {times} are not a doubling schedule")
        return sched


@dataclass(frozen=True)
class PerformanceProfile:
    """Best-so-far quality of one configuration at every checkpoint."""

    config_id: int
    quality: tuple[float, ...]

    def __post_init__(self):
        q = np.asarray(self.quality, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ValidationError(f"profile {self.config_id}: quality must be a non-empty vector")
        if np.any(q < 0) or np.any(q > 1) or np.any(np.isnan(q)):
            raise ValidationError(f"profile {self.config_id}: quality outside [0, 1]")
        if np.any(np.diff(q) > 0):
            raise ValidationError(f"profile {self.config_id}: quality is not non-increasing")
        object.__setattr__(self, "quality", tuple(float(x) for x in q))

    def __len__(self):
        return len(self.quality)


def enforce_monotone(profile: PerformanceProfile | Sequence[float]):
    """Running minimum of a quality vector.

    Accepts a :class:`PerformanceProfile` (returned as a new profile) or a bare
    sequence (returned as a numpy array). Idempotent.
    """
    if isinstance(profile, PerformanceProfile):
        return PerformanceProfile(profile.config_id, tuple(np.minimum.accumulate(profile.quality)))
    return np.minimum.accumulate(np.asarray(profile, dtype=float))


def final_quality(profile: PerformanceProfile | Sequence[float]) -> float:
    if isinstance(profile, PerformanceProfile):
        return profile.quality[-1]
    return float(profile[-1])


@dataclass(frozen=True, eq=False)
class QualityMatrix:
    """Qualities of every configuration at every checkpoint.

    Columns before the last are the short-run view; the last column is the
    long-run (full budget) result. Row ``i`` belongs to ``config_ids[i]``.
    """

    schedule: CheckpointSchedule
    config_ids: tuple[int, ...]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        ids = tuple(int(c) for c in self.config_ids)
        if values.ndim != 2 or values.shape[0] == 0:
            raise ValidationError("quality matrix must be a non-empty 2-D array")
        if values.shape != (len(ids), self.schedule.count):
            raise ValidationError(
                f"matrix shape {values.shape} does not match {len(ids)} configs x {self.schedule.count} checkpoints")
        if len(set(ids)) != len(ids):
            raise ValidationError("configuration ids are not unique")
        if np.isnan(values).any() or values.min() < 0 or values.max() > 1:
            raise ValidationError("qualities must lie in [0, 1]")
        bad = np.flatnonzero((np.diff(values, axis=1) > 0).any(axis=1))
        if bad.size:
            raise ValidationError(f"profile of config {ids[bad[0]]} is not non-increasing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "config_ids", ids)
        object.__setattr__(self, "_row", {c: i for i, c in enumerate(ids)})

    @classmethod
    def from_profiles(cls, schedule: CheckpointSchedule, profiles: Iterable[PerformanceProfile], meta=None):
        profiles = list(profiles)
        return cls(schedule, tuple(p.config_id for p in profiles),
                   np.array([p.quality for p in profiles], dtype=float), dict(meta or {}))

    @property
    def n_configs(self) -> int:
        return len(self.config_ids)

    @property
    def final(self) -> np.ndarray:
        return self.values[:, -1]

    def row(self, config_id: int) -> int:
        try:
            return self._row[config_id]
        except KeyError:
            raise KeyError(f"unknown configuration id {config_id!r}") from None

    def profile(self, config_id: int) -> PerformanceProfile:
        return PerformanceProfile(config_id, tuple(self.values[self.row(config_id)]))

    @property
    def profiles(self) -> list[PerformanceProfile]:
        return [PerformanceProfile(c, tuple(v)) for c, v in zip(self.config_ids, self.values)]

    def __eq__(self, other):
        if not isinstance(other, QualityMatrix):
            return NotImplemented
        return (self.schedule == other.schedule and self.config_ids == other.config_ids
                and np.array_equal(self.values, other.values))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RawTraceSet:
    """Raw best-so-far objective values, indexed ``[config, instance, checkpoint]``."""

    schedule: CheckpointSchedule
    config_ids: tuple[int, ...]
    instance_ids: tuple[str, ...]
    objective: np.ndarray

    def __post_init__(self):
        obj = np.asarray(self.objective, dtype=float)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "config_ids", tuple(int(c) for c in self.config_ids))
        object.__setattr__(self, "instance_ids", tuple(str(i) for i in self.instance_ids))
        if obj.size == 0 or len(self.config_ids) == 0 or len(self.instance_ids) == 0:
            raise ValidationError("empty trace set")
        expected = (len(self.config_ids), len(self.instance_ids), self.schedule.count)
        if obj.shape != expected:
            raise ValidationError(f"trace shape {obj.shape} does not match {expected}")
        if not np.isfinite(obj).all():
            raise ValidationError("trace set has missing or non-finite cells")


def normalize(raw: RawTraceSet, reference: str = "run") -> QualityMatrix:
    """Min-max scale objectives per instance, then average over instances.

    ``reference="run"`` (default) takes each instance's best and worst value
    over every configuration and every checkpoint. ``reference="final"`` takes
    them over the final checkpoint only; early values worse than that worst
    are then clipped to 1. A zero-range instance scales to 0 everywhere.
    """
    obj = raw.objective
    rising = np.diff(obj, axis=2) > 0
    if rising.any():
        c, i, _ = np.argwhere(rising)[0]
        raise ValidationError(
            f"trace of config {raw.config_ids[c]} on instance {raw.instance_ids[i]} is not non-increasing")
    if reference == "run":
        ref = obj
    elif reference == "final":
        ref = obj[:, :, -1:]
    else:
        raise ValueError(f"unknown normalization reference {reference!r}")
    best = ref.min(axis=(0, 2))
    worst = ref.max(axis=(0, 2))
    span = worst - best
    safe = np.where(span > 0, span, 1.0)
    scaled = (obj - best[None, :, None]) / safe[None, :, None]
    scaled[:, span <= 0, :] = 0.0
    scaled = np.clip(scaled, 0.0, 1.0)
    quality = np.minimum.accumulate(scaled.mean(axis=1), axis=1)
    return QualityMatrix(raw.schedule, raw.config_ids, quality,
                         {"normalization": reference, "instances": list(raw.instance_ids)})


def rank_percentile(matrix: QualityMatrix, config_id: int, checkpoint_index: int) -> float:
    """Percent of configurations strictly better than ``config_id`` at a checkpoint."""
    if not 0 <= checkpoint_index < matrix.schedule.count:
        raise IndexError(f"checkpoint index {checkpoint_index} out of range")
    col = matrix.values[:, checkpoint_index]
    q = col[matrix.row(config_id)]
    return 100.0 * np.count_nonzero(col < q) / matrix.n_configs


def rank_of_value(matrix: QualityMatrix, value: float, checkpoint_index: int) -> float:
    col = matrix.values[:, checkpoint_index]
    return 100.0 * np.count_nonzero(col < value) / matrix.n_configs


# -- file format -------------------------------------------------------------

def _column_names(schedule: CheckpointSchedule) -> list[str]:
    return ["config_id"] + [f"t_{t}" for t in schedule.times]


def matrix_to_csv(matrix: QualityMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_column_names(matrix.schedule))
    for cid, row in zip(matrix.config_ids, matrix.values):
        w.writerow([cid] + [f"{v:.9g}" for v in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> QualityMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("empty matrix file")
    header = rows[0]
    if not header or header[0] != "config_id" or len(header) < 3:
        raise ValidationError(f"bad matrix header {header!r}; expected config_id,t_1,...")
    try:
        times = [int(h[2:]) for h in header[1:] if h.startswith("t_")]
    except ValueError:
        raise ValidationError(f"bad time column in header {header!r}") from None
    if len(times) != len(header) - 1:
        raise ValidationError(f"missing time columns in header {header!r}")
    schedule = CheckpointSchedule.from_times(times)
    body = [r for r in rows[1:] if r]
    for r in body:
        if len(r) != len(header):
            raise ValidationError(f"row {r[:1]} has {len(r)} columns, expected {len(header)}")
    ids = [int(r[0]) for r in body]
    values = np.array([[float(x) for x in r[1:]] for r in body], dtype=float)
    if ids != sorted(ids):
        raise ValidationError("matrix rows must be in configuration id order")
    return QualityMatrix(schedule, tuple(ids), values.reshape(len(ids), schedule.count))


def meta_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_matrix(matrix: QualityMatrix, path: str | Path, provenance: dict | None = None) -> None:
    path = Path(path)
    order = np.argsort(matrix.config_ids, kind="stable")
    ordered = QualityMatrix(matrix.schedule, tuple(matrix.config_ids[i] for i in order),
                            matrix.values[order], matrix.meta)
    path.write_text(matrix_to_csv(ordered), encoding="utf-8", newline="\n")
    meta = {
        "schedule": {"base_time": matrix.schedule.base_time, "count": matrix.schedule.count},
        "n_configs": matrix.n_configs,
        "provenance": dict(provenance if provenance is not None else matrix.meta),
    }
    meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_matrix(path: str | Path) -> QualityMatrix:
    path = Path(path)
    matrix = matrix_from_csv(path.read_text(encoding="utf-8"))
    mp = meta_path(path)
    if mp.exists():
        meta = json.loads(mp.read_text(encoding="utf-8"))
        sched = CheckpointSchedule(**meta["schedule"])
        if sched != matrix.schedule:
            raise ValidationError(f"schedule in {mp} ({sched}) disagrees with {path} ({matrix.schedule})")
        matrix = QualityMatrix(matrix.schedule, matrix.config_ids, matrix.values, meta.get("provenance", {}))
    return matrix
