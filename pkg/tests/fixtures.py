"""Hand-traced racing fixtures (standard 11-checkpoint schedule, 1024 ms budget)."""
import numpy as np

from perfenvelope import CheckpointSchedule, QualityMatrix

# 5 configs, pool fraction 0.4 -> 2 members seeded with ids 0 and 1, multiplicative 1.2.
#
# seed cutoff = P1; c2 completes, evicts c1 -> cutoff = max(P0, P2) = P0
# c3 vs 1.2*P0: k=2 1.0 > 0.96 -> terminated at 4 ms
# c4 vs 1.2*P0: never above (0.95<=0.96, 0.80<=0.84, ...) -> completes, evicts c0
#   cutoff = max(P4, P2) = (1, 1, .95, .8, .7, .58, .45, .3, .1, .08, .05)
# pass 2, c3 vs 1.2*that: .9<=.96, .8<=.84, .65<=.696, .5<=.54, .3<=.36, .1<=.12, .05<=.096
#   -> completes, evicts c2; final pool [4, 3]
# ledger: 2*1024 (seed) + 1024 + 4 + 1024 (pass 1) + 1024 (pass 2) = 5124
FIVE = np.array([
    [1.0, 0.90, 0.80, 0.70, 0.60, 0.50, 0.40, 0.30, 0.20, 0.15, 0.10],
    [1.0, 0.95, 0.85, 0.75, 0.65, 0.55, 0.45, 0.35, 0.30, 0.25, 0.20],
    [1.0, 0.90, 0.80, 0.60, 0.50, 0.40, 0.30, 0.20, 0.10, 0.08, 0.05],
    [1.0, 1.00, 1.00, 0.90, 0.80, 0.65, 0.50, 0.30, 0.10, 0.05, 0.02],
    [1.0, 1.00, 0.95, 0.80, 0.70, 0.58, 0.45, 0.30, 0.10, 0.05, 0.01],
])
FIVE_SEEDS = [0, 1]
FIVE_LEDGER = 5124
FIVE_TRACE = [  # (config, pass, status, stop checkpoint, cost)
    (0, 0, "completed", 10, 1024),
    (1, 0, "completed", 10, 1024),
    (2, 1, "completed", 10, 1024),
    (3, 1, "terminated", 2, 4),
    (4, 1, "completed", 10, 1024),
    (3, 2, "completed", 10, 1024),
]
FIVE_POOL_HISTORY = [[0, 1], [2, 0], [4, 2], [4, 3]]

# 4 configs, pool fraction 0.25 -> 1 member seeded with id 0.
# c1 equals c0 and is evicted straight away (tie on final, larger id leaves);
# c2 replaces c0; c3 flattens at 0.65 and exceeds 1.2 * 0.5 at 32 ms in both passes.
# ledger: 3*1024 + 32 + 32 = 3136
FOUR = np.array([
    [1.0, 0.9, 0.8, 0.7, 0.60, 0.50, 0.40, 0.30, 0.20, 0.10, 0.05],
    [1.0, 0.9, 0.8, 0.7, 0.60, 0.50, 0.40, 0.30, 0.20, 0.10, 0.05],
    [1.0, 0.9, 0.8, 0.7, 0.60, 0.50, 0.40, 0.30, 0.20, 0.10, 0.01],
    [1.0, 0.9, 0.8, 0.7, 0.65, 0.65, 0.65, 0.65, 0.65, 0.65, 0.65],
])
FOUR_SEEDS = [0]
FOUR_LEDGER = 3136


def five_matrix():
    return QualityMatrix(CheckpointSchedule(), tuple(range(5)), FIVE)


def four_matrix():
    return QualityMatrix(CheckpointSchedule(), tuple(range(4)), FOUR)
