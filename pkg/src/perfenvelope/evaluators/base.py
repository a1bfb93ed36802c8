from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterator

from ..profiles import CheckpointSchedule, PerformanceProfile, QualityMatrix


class Evaluator(ABC):
    """Source of configuration runs for the racer.

    ``run(config_id)`` starts a fresh run and yields its quality at each
    checkpoint in order; the consumer stops iterating to terminate the run.
    Every run of the same id yields the same values.
    """

    schedule: CheckpointSchedule
    config_ids: tuple[int, ...]

    @abstractmethod
    def run(self, config_id: int) -> Iterator[float]:
        ...

    @property
    def n_configs(self) -> int:
        return len(self.config_ids)

    def profile(self, config_id: int) -> PerformanceProfile:
        return PerformanceProfile(config_id, tuple(self.run(config_id)))

    def full_matrix(self) -> QualityMatrix:
        return QualityMatrix.from_profiles(self.schedule, (self.profile(c) for c in self.config_ids))


class ReplayEvaluator(Evaluator):
    """Replays a stored :class:`QualityMatrix` row by row."""

    def __init__(self, matrix: QualityMatrix):
        self.matrix = matrix
        self.schedule = matrix.schedule
        self.config_ids = matrix.config_ids
        self._rows = {c: row.tolist() for c, row in zip(matrix.config_ids, matrix.values)}

    def run(self, config_id: int) -> Iterator[float]:
        try:
            row = self._rows[config_id]
        except KeyError:
            raise KeyError(f"unknown configuration id {config_id!r}") from None
        return iter(row)

    def full_matrix(self) -> QualityMatrix:
        return self.matrix


def replay_evaluator(matrix: QualityMatrix) -> ReplayEvaluator:
    return ReplayEvaluator(matrix)
