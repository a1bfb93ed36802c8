"""Cutoff lines: worst-case envelopes over sets of performance profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .profiles import PerformanceProfile, QualityMatrix


@dataclass(frozen=True)
class CutoffLine:
    value: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "value", tuple(float(v) for v in self.value))

    def __len__(self):
        return len(self.value)

    def __getitem__(self, k):
        return self.value[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.value)


@dataclass(frozen=True)
class MarginPolicy:
    """How far above the cutoff a run may rise before it is terminated.

    ``multiplicative``: threshold = factor * cutoff + floor.
    ``additive``: threshold = cutoff + offset + floor.
    ``factor = inf`` disables termination entirely (see :meth:`disabled`).
    """

    mode: str = "multiplicative"
    factor: float | None = 1.2
    offset: float | None = None
    floor: float = 0.0

    def __post_init__(self):
        if self.mode == "multiplicative":
            if self.factor is None or self.offset is not None or not self.factor > 1:
                raise ValueError(f"multiplicative margin needs factor > 1 and no offset, got {self}")
        elif self.mode == "additive":
            if self.offset is None or self.factor is not None or not self.offset > 0:
                raise ValueError(f"additive margin needs offset > 0 and no factor, got {self}")
        else:
            raise ValueError(f"unknown margin mode {self.mode!r}")
        if self.floor < 0:
            raise ValueError("floor must be non-negative")

    @classmethod
    def multiplicative(cls, factor: float = 1.2, floor: float = 0.0) -> "MarginPolicy":
        return cls("multiplicative", factor, None, floor)

    @classmethod
    def additive(cls, offset: float = 0.2, floor: float = 0.0) -> "MarginPolicy":
        return cls("additive", None, offset, floor)

    @classmethod
    def disabled(cls) -> "MarginPolicy":
        return cls("multiplicative", math.inf, None)

    @classmethod
    def parse(cls, text: str) -> "MarginPolicy":
        """Parse ``x<factor>``, ``+<offset>`` or ``off``."""
        text = text.strip()
        try:
            if text == "off":
                return cls.disabled()
            if text.startswith("x"):
                return cls.multiplicative(float(text[1:]))
            if text.startswith("+"):
                return cls.additive(float(text[1:]))
        except ValueError as exc:
            raise ValueError(f"bad margin {text!r}: {exc}") from None
        raise ValueError(f"bad margin {text!r}; expected x<factor>, +<offset> or off")

    def __str__(self):
        if self.is_disabled:
            return "off"
        return f"x{self.factor:g}" if self.mode == "multiplicative" else f"+{self.offset:g}"

    @property
    def is_disabled(self) -> bool:
        return self.mode == "multiplicative" and math.isinf(self.factor)

    def threshold(self, cutoff_value: float) -> float:
        if self.is_disabled:
            return math.inf
        if self.mode == "multiplicative":
            return self.factor * cutoff_value + self.floor
        return cutoff_value + self.offset + self.floor

    def thresholds(self, cutoff: CutoffLine) -> list[float]:
        return [self.threshold(v) for v in cutoff.value]


def _as_array(p) -> np.ndarray:
    if isinstance(p, PerformanceProfile):
        return np.asarray(p.quality)
    return np.asarray(p, dtype=float)


def worst_case_envelope(profiles: Iterable[PerformanceProfile | Sequence[float]]) -> CutoffLine:
    """Pointwise maximum quality over a set of profiles (quality 1 is worst)."""
    arrays = [_as_array(p) for p in profiles]
    if not arrays:
        raise ValueError("cannot build an envelope over an empty set")
    if len({a.shape for a in arrays}) != 1:
        raise ValueError("profiles have different lengths")
    return CutoffLine(tuple(np.max(arrays, axis=0)))


def top_fraction(matrix: QualityMatrix, fraction: float) -> list[int]:
    """Ids of the ``ceil(fraction * N)`` best configurations by final quality.

    Sorted by (final quality, id), so ties go to the smaller id.
    """
    if matrix.n_configs == 0:
        raise ValueError("empty matrix")
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    size = pool_size(fraction, matrix.n_configs)
    order = np.lexsort((np.asarray(matrix.config_ids), matrix.final))
    return [matrix.config_ids[i] for i in order[:size]]


def pool_size(fraction: float, n: int) -> int:
    # round away float noise first so 0.01 * 300 is 3, not 4
    return max(1, math.ceil(round(fraction * n, 9)))


def exact_cutoff_line(matrix: QualityMatrix, fraction: float) -> CutoffLine:
    ids = top_fraction(matrix, fraction)
    return worst_case_envelope(matrix.values[[matrix.row(c) for c in ids]])


def violates(partial_profile, cutoff: CutoffLine, policy: MarginPolicy, k: int) -> bool:
    """True iff the quality at checkpoint ``k`` is strictly above the margin threshold.

    The final checkpoint is never a termination point.
    """
    final = len(cutoff) - 1
    if not 0 <= k < final:
        raise IndexError(f"checkpoint {k} is not a termination point (valid: 0..{final - 1})")
    q = _as_array(partial_profile)
    if q.size <= k:
        raise IndexError(f"partial profile has {q.size} values, needs at least {k + 1}")
    return bool(q[k] > policy.threshold(cutoff[k]))
