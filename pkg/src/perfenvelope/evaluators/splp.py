"""Simple Plant Location Problem instances and objective."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

OPEN_COST_RANGE = (150.0, 250.0)
SERVICE_COST_RANGE = (0.0, 100.0)


@dataclass(frozen=True, eq=False)
class SplpInstance:
    open_cost: np.ndarray
    service_cost: np.ndarray  # [facility, customer]
    seed: int | None = None
    name: str = ""

    def __post_init__(self):
        oc = np.array(self.open_cost, dtype=float)
        sc = np.array(self.service_cost, dtype=float)
        if oc.ndim != 1 or oc.size < 1:
            raise ValueError("need at least one facility")
        if sc.ndim != 2 or sc.shape[0] != oc.size or sc.shape[1] < 1:
            raise ValueError(f"service cost shape {sc.shape} does not match {oc.size} facilities")
        if (oc < 0).any() or (sc < 0).any():
            raise ValueError("costs must be non-negative")
        oc.setflags(write=False)
        sc.setflags(write=False)
        object.__setattr__(self, "open_cost", oc)
        object.__setattr__(self, "service_cost", sc)

    @property
    def n_facilities(self) -> int:
        return self.open_cost.size

    @property
    def n_customers(self) -> int:
        return self.service_cost.shape[1]

    def to_json(self) -> str:
        doc = {"name": self.name, "seed": self.seed,
               "n_facilities": self.n_facilities, "n_customers": self.n_customers,
               "open_cost": self.open_cost.tolist(), "service_cost": self.service_cost.tolist()}
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplpInstance":
        doc = json.loads(text)
        return cls(doc["open_cost"], doc["service_cost"], doc.get("seed"), doc.get("name", ""))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SplpInstance":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def generate_splp_instance(facilities: int = 30, customers: int = 60, seed: int = 0) -> SplpInstance:
    """Uniform random costs: opening in OPEN_COST_RANGE, service in SERVICE_COST_RANGE."""
    rng = np.random.default_rng(seed)
    open_cost = rng.uniform(*OPEN_COST_RANGE, size=facilities)
    service = rng.uniform(*SERVICE_COST_RANGE, size=(facilities, customers))
    return SplpInstance(open_cost, service, seed, f"splp-{facilities}x{customers}-s{seed}")


def splp_objective(instance: SplpInstance, open_set: Iterable[int] | np.ndarray) -> float:
    idx = np.asarray(open_set)
    if idx.dtype == bool:
        idx = np.flatnonzero(idx)
    idx = np.unique(idx.astype(int))
    if idx.size == 0:
        raise ValueError("open set must not be empty")
    return float(instance.open_cost[idx].sum() + instance.service_cost[idx].min(axis=0).sum())


def brute_force_optimum(instance: SplpInstance) -> tuple[float, tuple[int, ...]]:
    """Exhaustive search over all non-empty open sets. Small instances only."""
    if instance.n_facilities > 16:
        raise ValueError("brute force is limited to 16 facilities")
    best = (np.inf, ())
    for m in range(1, instance.n_facilities + 1):
        for subset in combinations(range(instance.n_facilities), m):
            best = min(best, (splp_objective(instance, subset), subset))
    return best
