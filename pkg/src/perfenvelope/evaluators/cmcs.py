"""A small Conditional Markov Chain Search (CMCS) over SPLP components.

A configuration places three components in slots 0..2 and gives each slot two
successors: one taken after an application that strictly improved the
incumbent, one taken otherwise. Execution starts in slot 0; one component
application costs one virtual tick. The best-so-far objective is recorded at
tick counts equal to the schedule times.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from ..profiles import CheckpointSchedule, RawTraceSet, normalize
from .base import ReplayEvaluator
from .splp import SplpInstance

EPS = 1e-9


class SplpState:
    """Incumbent open set with cached nearest / second-nearest service costs."""

    def __init__(self, instance: SplpInstance, mask: np.ndarray):
        self.inst = instance
        self.mask = np.array(mask, dtype=bool)
        self.moves = 0
        self.refresh()

    def refresh(self):
        inst = self.inst
        self.open_idx = np.flatnonzero(self.mask)
        srv = inst.service_cost[self.open_idx]
        if self.open_idx.size >= 2:
            order = np.argpartition(srv, 1, axis=0)[:2]
            self.d, self.second = np.take_along_axis(srv, order, axis=0)
            self.nearest = self.open_idx[order[0]]
        else:
            self.d = srv[0]
            self.second = np.full(inst.n_customers, np.inf)
            self.nearest = np.full(inst.n_customers, self.open_idx[0])
        self.obj = float(inst.open_cost[self.open_idx].sum() + self.d.sum())

    @property
    def closed_idx(self) -> np.ndarray:
        return np.flatnonzero(~self.mask)

    def flip(self, *facilities: int):
        for f in facilities:
            self.mask[f] = not self.mask[f]
        self.moves += 1
        self.refresh()


def open_first(state: SplpState, rng: np.random.Generator) -> None:
    closed = state.closed_idx
    if closed.size == 0:
        return
    inst = state.inst
    delta = inst.open_cost[closed] + np.minimum(inst.service_cost[closed] - state.d, 0.0).sum(axis=1)
    order = rng.permutation(closed.size)
    hits = order[delta[order] < -EPS]
    if hits.size:
        state.flip(closed[hits[0]])


def close_first(state: SplpState, rng: np.random.Generator) -> None:
    opened = state.open_idx
    if opened.size < 2:
        return
    pos = np.searchsorted(opened, state.nearest)
    delta = np.bincount(pos, weights=state.second - state.d, minlength=opened.size) - state.inst.open_cost[opened]
    order = rng.permutation(opened.size)
    hits = order[delta[order] < -EPS]
    if hits.size:
        state.flip(opened[hits[0]])


def swap_best(state: SplpState, rng: np.random.Generator) -> None:
    opened, closed = state.open_idx, state.closed_idx
    if closed.size == 0:
        return
    inst = state.inst
    without = np.where(state.nearest[None, :] == opened[:, None], state.second[None, :], state.d[None, :])
    served = np.minimum(inst.service_cost[closed][None, :, :], without[:, None, :]).sum(axis=2)
    delta = (served - state.d.sum() + inst.open_cost[closed][None, :] - inst.open_cost[opened][:, None])
    g, f = np.unravel_index(np.argmin(delta), delta.shape)
    if delta[g, f] < -EPS:
        state.flip(opened[g], closed[f])


def random_open(state: SplpState, rng: np.random.Generator) -> None:
    closed = state.closed_idx
    if closed.size:
        state.flip(closed[rng.integers(closed.size)])


def random_close(state: SplpState, rng: np.random.Generator) -> None:
    opened = state.open_idx
    if opened.size >= 2:
        state.flip(opened[rng.integers(opened.size)])


def random_multi_swap(state: SplpState, rng: np.random.Generator, swaps: int = 2) -> None:
    mask = state.mask.copy()
    for _ in range(swaps):
        opened, closed = np.flatnonzero(mask), np.flatnonzero(~mask)
        if closed.size == 0:
            return
        mask[closed[rng.integers(closed.size)]] = True
        mask[opened[rng.integers(opened.size)]] = False
    state.flip(*np.flatnonzero(mask != state.mask))


Component = Callable[[SplpState, np.random.Generator], None]

DEFAULT_LIBRARY: tuple[tuple[str, Component], ...] = (
    ("open_first", open_first),
    ("close_first", close_first),
    ("swap_best", swap_best),
    ("random_open", random_open),
    ("random_close", random_close),
    ("random_multi_swap", random_multi_swap),
)


@dataclass(frozen=True, order=True)
class CmcsConfiguration:
    components: tuple[int, int, int]
    succ_improve: tuple[int, int, int]
    succ_fail: tuple[int, int, int]

    def as_tuple(self) -> tuple[int, ...]:
        return self.components + self.succ_improve + self.succ_fail

    def key(self) -> int:
        """Stable integer encoding (used to seed runs)."""
        k = 0
        for v in self.as_tuple():
            k = k * 64 + v
        return k

    def relabeled(self, perm: Sequence[int]) -> "CmcsConfiguration":
        """Move slot ``i`` to slot ``perm[i]``."""
        comps, imp, fail = [0] * 3, [0] * 3, [0] * 3
        for i in range(3):
            comps[perm[i]] = self.components[i]
            imp[perm[i]] = perm[self.succ_improve[i]]
            fail[perm[i]] = perm[self.succ_fail[i]]
        return CmcsConfiguration(tuple(comps), tuple(imp), tuple(fail))

    def canonical(self) -> "CmcsConfiguration":
        # slot 0 is the start slot, so only 1 and 2 may trade places
        return min(self, self.relabeled((0, 2, 1)), key=CmcsConfiguration.as_tuple)

    def reachable_slots(self) -> set[int]:
        seen, stack = {0}, [0]
        while stack:
            s = stack.pop()
            for nxt in (self.succ_improve[s], self.succ_fail[s]):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def is_meaningful(self) -> bool:
        return len(self.reachable_slots()) == 3

    def describe(self, library=DEFAULT_LIBRARY) -> str:
        names = [library[c][0] for c in self.components]
        return " | ".join(f"{i}:{n} +>{self.succ_improve[i]} ->{self.succ_fail[i]}" for i, n in enumerate(names))


def enumerate_cmcs_configurations(library=DEFAULT_LIBRARY) -> list[CmcsConfiguration]:
    """Every meaningful configuration in canonical form, sorted.

    Meaningful: all three slots reachable from slot 0. Configurations that
    differ only by swapping slots 1 and 2 are listed once.
    """
    size = library if isinstance(library, int) else len(library)
    if size < 1:
        raise ValueError("component library is empty")
    out = []
    for comps in product(range(size), repeat=3):
        for imp in product(range(3), repeat=3):
            for fail in product(range(3), repeat=3):
                cfg = CmcsConfiguration(comps, imp, fail)
                if cfg.is_meaningful() and cfg.canonical() == cfg:
                    out.append(cfg)
    return out


def sample_configurations(configs: Sequence[CmcsConfiguration], n: int, seed: int) -> list[CmcsConfiguration]:
    if n >= len(configs):
        return list(configs)
    idx = np.sort(np.random.default_rng(seed).choice(len(configs), size=n, replace=False))
    return [configs[i] for i in idx]


def initial_mask(instance: SplpInstance) -> np.ndarray:
    rng = np.random.default_rng([instance.seed or 0, 1])
    mask = rng.random(instance.n_facilities) < 0.5
    if not mask.any():
        mask[rng.integers(instance.n_facilities)] = True
    return mask


def run_cmcs(instance: SplpInstance, config: CmcsConfiguration, times: Sequence[int],
             seed: int | None = None, library=DEFAULT_LIBRARY) -> np.ndarray:
    """Best-so-far objective after ``times[k]`` component applications."""
    if seed is None:
        seed = config.key()
    rng = np.random.default_rng([instance.seed or 0, seed])
    state = SplpState(instance, initial_mask(instance))
    funcs = [library[c][1] for c in config.components]
    best = state.obj
    out = np.empty(len(times))
    slot, k = 0, 0
    idle_slots: set[int] = set()
    total = times[-1]
    for tick in range(1, total + 1):
        before, moves = state.obj, state.moves
        funcs[slot](state, rng)
        improved = state.obj < before - EPS
        if state.moves != moves:
            idle_slots.clear()
        else:
            if slot in idle_slots:
                # no-op cycle: nothing can change any more
                out[k:] = best
                return out
            idle_slots.add(slot)
        best = min(best, state.obj)
        slot = config.succ_improve[slot] if improved else config.succ_fail[slot]
        while k < len(times) and times[k] == tick:
            out[k] = best
            k += 1
    return out


def run_component(instance: SplpInstance, component: int, times: Sequence[int], seed: int,
                  library=DEFAULT_LIBRARY) -> np.ndarray:
    """A single component applied repeatedly (the degenerate one-slot machine)."""
    cfg = CmcsConfiguration((component,) * 3, (0, 1, 2), (0, 1, 2))
    return run_cmcs(instance, cfg, times, seed, library)


def trace_configurations(instances: Sequence[SplpInstance], configs: Sequence[CmcsConfiguration],
                         schedule: CheckpointSchedule = CheckpointSchedule(),
                         library=DEFAULT_LIBRARY) -> RawTraceSet:
    times = schedule.times
    obj = np.empty((len(configs), len(instances), schedule.count))
    for c, cfg in enumerate(configs):
        for i, inst in enumerate(instances):
            obj[c, i] = run_cmcs(inst, cfg, times, library=library)
    names = [inst.name or f"instance-{i}" for i, inst in enumerate(instances)]
    return RawTraceSet(schedule, tuple(range(len(configs))), tuple(names), obj)


class CmcsEvaluator(ReplayEvaluator):
    """Runs every configuration on every instance up front, then replays.

    Normalization needs each instance's best and worst value over all
    configurations, so the full trace set is computed once; the racer is still
    charged the virtual ticks of the checkpoints it consumes.
    """

    def __init__(self, instances, configs, schedule=CheckpointSchedule(), library=DEFAULT_LIBRARY):
        self.instances = list(instances)
        self.configs = list(configs)
        self.raw = trace_configurations(self.instances, self.configs, schedule, library)
        matrix = normalize(self.raw)
        meta = dict(matrix.meta, generator="cmcs-splp",
                    configs=[c.as_tuple() for c in self.configs],
                    instance_seeds=[inst.seed for inst in self.instances])
        super().__init__(type(matrix)(matrix.schedule, matrix.config_ids, matrix.values, meta))


def cmcs_evaluator(instances, configs, schedule=CheckpointSchedule(), library=DEFAULT_LIBRARY) -> CmcsEvaluator:
    return CmcsEvaluator(instances, configs, schedule, library)
