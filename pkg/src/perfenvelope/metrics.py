"""Accuracy and speed-up of a race against exhaustive evaluation, plus curve data."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .envelope import exact_cutoff_line, top_fraction
from .evaluators.base import Evaluator
from .profiles import QualityMatrix, rank_of_value, rank_percentile
from .racing import RacingParams, RacingResult, run_racing

TRUTH_FORMAT = "perfenvelope.truth/1"


@dataclass(frozen=True)
class TruthTable:
    matrix: QualityMatrix
    pool_fraction: float
    true_top_set: tuple[int, ...]

    @property
    def true_best(self) -> int:
        return self.true_top_set[0]

    @property
    def n_configs(self) -> int:
        return self.matrix.n_configs

    @property
    def full_budget(self) -> int:
        return self.matrix.schedule.full_budget

    @classmethod
    def from_matrix(cls, matrix: QualityMatrix, pool_fraction: float = 0.01) -> "TruthTable":
        return cls(matrix, pool_fraction, tuple(top_fraction(matrix, pool_fraction)))

    @classmethod
    def from_evaluator(cls, evaluator: Evaluator, pool_fraction: float = 0.01) -> "TruthTable":
        """Runs every configuration to the full budget."""
        return cls.from_matrix(evaluator.full_matrix(), pool_fraction)

    def to_dict(self) -> dict:
        return {"format": TRUTH_FORMAT, "pool_fraction": self.pool_fraction,
                "n_configs": self.n_configs, "full_budget": self.full_budget,
                "true_best": self.true_best, "true_top_set": list(self.true_top_set),
                "final_quality": {str(c): float(self.matrix.final[self.matrix.row(c)]) for c in self.true_top_set}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


@dataclass(frozen=True)
class TruthSummary:
    """The parts of a :class:`TruthTable` that metrics need, as stored on disk."""

    pool_fraction: float
    n_configs: int
    full_budget: int
    true_top_set: tuple[int, ...]

    @property
    def true_best(self) -> int:
        return self.true_top_set[0]

    @classmethod
    def from_dict(cls, d: dict) -> "TruthSummary":
        if d.get("format") != TRUTH_FORMAT:
            raise ValueError(f"not a truth document (format={d.get('format')!r})")
        top = tuple(d["true_top_set"])
        if top[0] != d["true_best"]:
            raise ValueError("true_best is not the first element of true_top_set")
        return cls(d["pool_fraction"], d["n_configs"], d["full_budget"], top)


def speedup(result: RacingResult, truth) -> float:
    return truth.n_configs * truth.full_budget / result.total_virtual_cost


def overlap_top(result: RacingResult, truth) -> bool:
    return truth.true_best in result.pool_ids


def overlap_fraction(result: RacingResult, truth) -> float:
    top = set(truth.true_top_set)
    return 100.0 * len(top & set(result.pool_ids)) / len(top)


def summarize(result: RacingResult, truth) -> dict:
    return {"n_configs": truth.n_configs, "speedup": speedup(result, truth),
            "overlap_top": overlap_top(result, truth), "overlap_pct": overlap_fraction(result, truth),
            "total_virtual_cost": result.total_virtual_cost}


def _pct_label(fraction: float) -> str:
    return f"{fraction * 100:g}"


def figure_data(matrix: QualityMatrix, fractions: Sequence[float] = (0.01, 0.05)) -> list[tuple[int, str, float]]:
    """Long-format ``(time_ms, series, value)`` rows for quality and rank curves.

    Series: ``top_pp`` (profile of the best-final configuration), ``cutoff_<pct>``
    (exact cutoff line), ``rank_top`` and ``rank_cutoff_<pct>`` (rank percentile
    of the top configuration and of the worst member of each top set).
    """
    if matrix.n_configs == 0:
        raise ValueError("empty matrix")
    top = top_fraction(matrix, 1.0 / matrix.n_configs)[0]
    top_row = matrix.values[matrix.row(top)]
    lines = [(f, exact_cutoff_line(matrix, f)) for f in fractions]
    rows = []
    for k, t in enumerate(matrix.schedule.times):
        rows.append((t, "top_pp", float(top_row[k])))
        for f, line in lines:
            rows.append((t, f"cutoff_{_pct_label(f)}", line[k]))
        rows.append((t, "rank_top", rank_percentile(matrix, top, k)))
        for f, line in lines:
            rows.append((t, f"rank_cutoff_{_pct_label(f)}", rank_of_value(matrix, line[k], k)))
    return rows


def figure_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time_ms", "series", "value"])
    for t, s, v in rows:
        w.writerow([t, s, f"{v:.9g}"])
    return buf.getvalue()


def read_figure_csv(text: str) -> dict[str, list[tuple[int, float]]]:
    series: dict[str, list[tuple[int, float]]] = {}
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["time_ms", "series", "value"]:
        raise ValueError(f"bad figure header {reader.fieldnames!r}")
    for row in reader:
        series.setdefault(row["series"], []).append((int(row["time_ms"]), float(row["value"])))
    return series


EXPERIMENT_COLUMNS = ["domain", "n_configs", "speedup", "overlap_top_pct", "overlap_pct", "repetitions"]


@dataclass(frozen=True)
class ExperimentRow:
    domain: str
    n_configs: int
    speedup: float
    overlap_top_pct: float
    overlap_pct: float
    repetitions: int
    runs: tuple[dict, ...] = ()

    def as_csv_row(self) -> list[str]:
        return [self.domain, str(self.n_configs), f"{self.speedup:.4g}",
                f"{self.overlap_top_pct:.4g}", f"{self.overlap_pct:.4g}", str(self.repetitions)]


def _one_repetition(args):
    evaluator, params, truth = args
    return summarize(run_racing(evaluator, params), truth)


def experiment_table(evaluator: Evaluator, params: RacingParams, repetitions: int,
                     truth: TruthTable | None = None, domain: str = "", jobs: int = 1) -> ExperimentRow:
    """Repeat the race with seeds ``params.seed + i`` and aggregate like a results table.

    Reports N, mean speed-up, percent of repetitions whose pool holds the true
    best configuration, and mean overlap with the true top set.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if truth is None:
        truth = TruthTable.from_evaluator(evaluator, params.pool_fraction)
    tasks = [(evaluator, replace(params, seed=params.seed + i), truth) for i in range(repetitions)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            runs = list(ex.map(_one_repetition, tasks))
    else:
        runs = [_one_repetition(t) for t in tasks]
    return ExperimentRow(
        domain=domain,
        n_configs=truth.n_configs,
        speedup=float(np.mean([r["speedup"] for r in runs])),
        overlap_top_pct=100.0 * sum(r["overlap_top"] for r in runs) / repetitions,
        overlap_pct=float(np.mean([r["overlap_pct"] for r in runs])),
        repetitions=repetitions,
        runs=tuple(runs),
    )


def experiment_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPERIMENT_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv_row())
    return buf.getvalue()
