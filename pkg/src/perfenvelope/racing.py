"""Racing configurations against a cutoff line learned from a small pool.

1. Seed: run a random ``pool_fraction`` of the configurations to the full
   budget; the cutoff line is the worst-case envelope of their profiles.
2. First pass: race every other configuration checkpoint by checkpoint and
   stop it as soon as it rises above the margin threshold. A survivor joins
   the pool, the pool member with the worst final quality leaves, and the
   cutoff is recomputed from the pool.
3. Later passes: race again, from scratch, only the configurations that were
   terminated in the previous pass.
4. The pool is the answer.
"""
from __future__ import annotations

import json
import logging
from bisect import bisect_right
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .envelope import CutoffLine, MarginPolicy, pool_size, worst_case_envelope
from .evaluators.base import Evaluator
from .profiles import PerformanceProfile

log = logging.getLogger(__name__)

COMPLETED = "completed"
TERMINATED = "terminated"
RESULT_FORMAT = "perfenvelope.racing-result/1"


class EvaluatorError(RuntimeError):
    """An evaluator failed; carries the config id and the ledger so far."""

    def __init__(self, config_id, cause, outcomes=()):
        super().__init__(f"evaluator failed on config {config_id}: {cause}")
        self.config_id = config_id
        self.outcomes = list(outcomes)


@dataclass(frozen=True)
class RacingParams:
    pool_fraction: float = 0.01
    margin: MarginPolicy = field(default_factory=MarginPolicy)
    seed: int = 0
    candidate_order: str = "id_order"
    passes: int = 2

    def __post_init__(self):
        if not 0 < self.pool_fraction <= 1:
            raise ValueError(f"pool_fraction must be in (0, 1], got {self.pool_fraction}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")
        if self.candidate_order not in ("id_order", "shuffled"):
            raise ValueError(f"unknown candidate_order {self.candidate_order!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = str(self.margin)
        d["margin_floor"] = self.margin.floor
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RacingParams":
        margin = MarginPolicy.parse(d["margin"])
        if d.get("margin_floor"):
            margin = MarginPolicy(margin.mode, margin.factor, margin.offset, d["margin_floor"])
        return cls(d["pool_fraction"], margin, d["seed"], d["candidate_order"], d["passes"])


@dataclass(frozen=True)
class RunOutcome:
    config_id: int
    pass_index: int  # 0 = seeding, 1 = first pass, ...
    status: str
    stop_checkpoint: int
    virtual_cost: int


class Pool:
    """Fixed-capacity set of fully evaluated configurations.

    Members are kept sorted by (final quality, id); the last member is the
    one evicted next.
    """

    def __init__(self, capacity: int, members: Iterable[PerformanceProfile] = ()):
        self.capacity = capacity
        self._members: list[PerformanceProfile] = []
        for p in members:
            self._insert(p)
        if len(self._members) > capacity:
            raise ValueError("more seed members than pool capacity")

    @staticmethod
    def _key(p: PerformanceProfile):
        return (p.quality[-1], p.config_id)

    def _insert(self, p: PerformanceProfile):
        keys = [self._key(m) for m in self._members]
        self._members.insert(bisect_right(keys, self._key(p)), p)

    def admit(self, p: PerformanceProfile) -> PerformanceProfile:
        """Add ``p`` and evict the worst member (ties: larger id). Returns the evicted profile."""
        self._insert(p)
        return self._members.pop()

    @property
    def members(self) -> tuple[PerformanceProfile, ...]:
        return tuple(self._members)

    @property
    def ids(self) -> list[int]:
        return [m.config_id for m in self._members]

    def worst_final(self) -> float:
        return self._members[-1].quality[-1]

    def cutoff(self) -> CutoffLine:
        return worst_case_envelope(self._members)

    def __len__(self):
        return len(self._members)

    def __contains__(self, config_id):
        return config_id in self.ids


@dataclass
class RacingResult:
    final_pool: Pool
    outcomes: list[RunOutcome]
    params: RacingParams
    n_configs: int
    full_budget: int
    cutoff_history: list[tuple[str, CutoffLine]] = field(default_factory=list)

    @property
    def total_virtual_cost(self) -> int:
        return sum(o.virtual_cost for o in self.outcomes)

    @property
    def pool_ids(self) -> list[int]:
        return self.final_pool.ids

    def pass_outcomes(self, pass_index: int) -> list[RunOutcome]:
        return [o for o in self.outcomes if o.pass_index == pass_index]

    def to_dict(self) -> dict:
        return {
            "format": RESULT_FORMAT,
            "params": self.params.to_dict(),
            "n_configs": self.n_configs,
            "full_budget": self.full_budget,
            "pool_capacity": self.final_pool.capacity,
            "pool": [{"config_id": m.config_id, "final_quality": m.quality[-1], "profile": list(m.quality)}
                     for m in self.final_pool.members],
            "outcomes": [asdict(o) for o in self.outcomes],
            "total_virtual_cost": self.total_virtual_cost,
            "cutoff_history": [{"event": e, "cutoff": list(c.value)} for e, c in self.cutoff_history],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RacingResult":
        if d.get("format") != RESULT_FORMAT:
            raise ValueError(f"not a racing result document (format={d.get('format')!r})")
        pool = Pool(d["pool_capacity"], [PerformanceProfile(m["config_id"], tuple(m["profile"])) for m in d["pool"]])
        outcomes = [RunOutcome(**o) for o in d["outcomes"]]
        history = [(h["event"], CutoffLine(tuple(h["cutoff"]))) for h in d.get("cutoff_history", [])]
        result = cls(pool, outcomes, RacingParams.from_dict(d["params"]), d["n_configs"], d["full_budget"], history)
        if result.total_virtual_cost != d["total_virtual_cost"]:
            raise ValueError("total_virtual_cost does not match the outcome ledger")
        return result

    @classmethod
    def from_json(cls, text: str) -> "RacingResult":
        return cls.from_dict(json.loads(text))


def _full_run(evaluator: Evaluator, config_id: int, outcomes) -> PerformanceProfile:
    try:
        return PerformanceProfile(config_id, tuple(evaluator.run(config_id)))
    except Exception as exc:
        raise EvaluatorError(config_id, exc, outcomes) from exc


def seed_pool(evaluator: Evaluator, params: RacingParams, rng: np.random.Generator,
              seed_ids: Sequence[int] | None = None):
    """Draw the initial pool uniformly without replacement and run it in full.

    Returns ``(pool, cutoff, outcomes)``.
    """
    n = evaluator.n_configs
    if n < 1:
        raise ValueError("evaluator has no configurations")
    capacity = pool_size(params.pool_fraction, n)
    if seed_ids is None:
        picks = rng.choice(n, size=capacity, replace=False)
        seed_ids = [evaluator.config_ids[i] for i in picks]
    elif len(seed_ids) != capacity or len(set(seed_ids)) != capacity:
        raise ValueError(f"need {capacity} distinct seed ids, got {list(seed_ids)}")
    final_index = evaluator.schedule.final_index
    budget = evaluator.schedule.full_budget
    outcomes: list[RunOutcome] = []
    profiles = []
    for cid in seed_ids:
        profiles.append(_full_run(evaluator, cid, outcomes))
        outcomes.append(RunOutcome(cid, 0, COMPLETED, final_index, budget))
    pool = Pool(capacity, profiles)
    return pool, pool.cutoff(), outcomes


def race_pass(candidates: Sequence[int], pool: Pool, cutoff: CutoffLine, evaluator: Evaluator,
              params: RacingParams, pass_index: int = 1, history: list | None = None,
              ledger: list | None = None):
    """Race ``candidates`` in order against the pool's cutoff line.

    Mutates ``pool``; returns ``(pool, cutoff, outcomes)``.
    """
    times = evaluator.schedule.times
    final_index = len(times) - 1
    thresholds = params.margin.thresholds(cutoff)
    outcomes: list[RunOutcome] = []
    for cid in candidates:
        quality = []
        stopped = None
        try:
            for k, q in enumerate(evaluator.run(cid)):
                quality.append(q)
                if k < final_index and q > thresholds[k]:
                    stopped = k
                    break
        except Exception as exc:
            raise EvaluatorError(cid, exc, (ledger or []) + outcomes) from exc
        if stopped is not None:
            outcomes.append(RunOutcome(cid, pass_index, TERMINATED, stopped, times[stopped]))
            continue
        if len(quality) != len(times):
            raise EvaluatorError(cid, f"run yielded {len(quality)} checkpoints, expected {len(times)}",
                                 (ledger or []) + outcomes)
        outcomes.append(RunOutcome(cid, pass_index, COMPLETED, final_index, times[final_index]))
        evicted = pool.admit(PerformanceProfile(cid, tuple(quality)))
        if evicted.config_id != cid:
            cutoff = pool.cutoff()
            thresholds = params.margin.thresholds(cutoff)
            if history is not None:
                history.append((f"pass{pass_index}:admit:{cid}:evict:{evicted.config_id}", cutoff))
    return pool, cutoff, outcomes


def run_racing(evaluator: Evaluator, params: RacingParams, seed_ids: Sequence[int] | None = None,
               record_history: bool = False) -> RacingResult:
    """Seed, race all remaining configurations, then re-race the terminated ones.

    ``seed_ids`` overrides the random pool draw (the rest of the procedure is
    unchanged); mainly useful for hand-checked traces.
    """
    rng = np.random.default_rng(params.seed)
    history = [] if record_history else None
    pool, cutoff, outcomes = seed_pool(evaluator, params, rng, seed_ids)
    if history is not None:
        history.append(("seed", cutoff))
    seeded = set(pool.ids)
    candidates = [c for c in evaluator.config_ids if c not in seeded]
    if params.candidate_order == "shuffled":
        candidates = [candidates[i] for i in rng.permutation(len(candidates))]
    for pass_index in range(1, params.passes + 1):
        if not candidates:
            break
        pool, cutoff, pass_out = race_pass(candidates, pool, cutoff, evaluator, params,
                                           pass_index, history, outcomes)
        outcomes.extend(pass_out)
        candidates = [o.config_id for o in pass_out if o.status == TERMINATED]
        log.debug("pass %d: %d raced, %d terminated", pass_index, len(pass_out), len(candidates))
    return RacingResult(pool, outcomes, params, evaluator.n_configs, evaluator.schedule.full_budget,
                        history or [])
