"""Synthetic quality matrices with a tunable short/long-run correlation.

For configuration ``c`` with standard normals ``z1, z2``:

* final level ``F = Phi(z1) ** final_exponent``
* ``v = -rho_p * z1 + sqrt(1 - rho_p**2) * z2`` with ``rho_p = 2 sin(pi * rho / 6)``,
  so the Spearman correlation between ``v`` and ``1 - F`` is ``rho``
* rate ``r = rate_min * (rate_max / rate_min) ** Phi(v)`` (log-uniform)
* ``q(k) = clip(F + (1 - F) exp(-r k) + sigma * eps_k, 0, 1)`` with standard
  normal ``eps_k``, followed by a running minimum.

Draw order from ``numpy.random.default_rng(seed)``: ``z1`` (N), ``z2`` (N),
``eps`` (N x count, row-major). If several configurations share the minimum
final quality, every tied row except the first (by id) has its trailing
block of minimum values raised by ``j * 1e-12`` for the ``j``-th extra tie.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ..profiles import CheckpointSchedule, QualityMatrix, ValidationError

TIE_STEP = 1e-12


@dataclass(frozen=True)
class SyntheticParams:
    n_configs: int
    rho: float = 0.85
    sigma: float = 0.03
    seed: int = 0
    rate_min: float = 0.3
    rate_max: float = 3.0
    final_exponent: float = 1.0
    schedule: CheckpointSchedule = CheckpointSchedule()

    def __post_init__(self):
        if self.n_configs < 2:
            raise ValidationError(f"need at least 2 configurations, got {self.n_configs}")
        if not -1 <= self.rho <= 1:
            raise ValidationError(f"rho must be in [-1, 1], got {self.rho}")
        if self.sigma < 0:
            raise ValidationError(f"sigma must be non-negative, got {self.sigma}")
        if not 0 < self.rate_min <= self.rate_max:
            raise ValidationError("need 0 < rate_min <= rate_max")
        if self.final_exponent <= 0:
            raise ValidationError("final_exponent must be positive")


def latent_draws(params: SyntheticParams):
    """Final levels ``F``, rates ``r`` and noise ``eps`` before the curve is formed."""
    n, count = params.n_configs, params.schedule.count
    rng = np.random.default_rng(params.seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    eps = rng.standard_normal((n, count))
    rho_p = 2.0 * np.sin(np.pi * params.rho / 6.0)
    v = -rho_p * z1 + np.sqrt(max(0.0, 1.0 - rho_p**2)) * z2
    final = ndtr(z1) ** params.final_exponent
    rate = params.rate_min * (params.rate_max / params.rate_min) ** ndtr(v)
    return final, rate, eps


def _break_min_ties(values: np.ndarray) -> None:
    final = values[:, -1]
    tied = np.flatnonzero(final == final.min())
    for j, row in enumerate(tied[1:], start=1):
        m = final[row]
        tail = values[row] == m
        # trailing block equal to the minimum; earlier entries are larger
        start = len(tail) - np.argmin(tail[::-1]) if not tail.all() else 0
        values[row, start:] = m + j * TIE_STEP


def generate_synthetic(params: SyntheticParams) -> QualityMatrix:
    final, rate, eps = latent_draws(params)
    k = np.arange(params.schedule.count)
    q = final[:, None] + (1.0 - final[:, None]) * np.exp(-rate[:, None] * k) + params.sigma * eps
    q = np.minimum.accumulate(np.clip(q, 0.0, 1.0), axis=1)
    _break_min_ties(q)
    meta = {"generator": "synthetic", "n_configs": params.n_configs, "rho": params.rho,
            "sigma": params.sigma, "seed": params.seed, "rate_min": params.rate_min,
            "rate_max": params.rate_max, "final_exponent": params.final_exponent}
    return QualityMatrix(params.schedule, tuple(range(params.n_configs)), q, meta)
