"""
Racing a synthetic configuration space
======================================

Generate 5000 configurations whose early performance predicts the final
result well, race them against a cutoff learned from a 1% pool, and
compare the returned pool with exhaustive evaluation.
"""

import perfenvelope as pe

# A quality matrix: one row per configuration, one column per checkpoint
# (1, 2, 4, ... 1024 virtual ms). Quality 0 is best, 1 is worst.
matrix = pe.generate_synthetic(pe.SyntheticParams(5000, rho=0.85, sigma=0.03, seed=0))
print(matrix.values.shape)

# The racer only sees configurations through an evaluator; replaying the
# stored matrix makes every decision checkable against the full table.
evaluator = pe.replay_evaluator(matrix)
params = pe.RacingParams(pool_fraction=0.01, margin=pe.MarginPolicy.multiplicative(1.2), seed=1)
result = pe.run_racing(evaluator, params)

truth = pe.TruthTable.from_matrix(matrix, 0.01)
print("pool size       ", len(result.final_pool))
print("speed-up        ", round(pe.speedup(result, truth), 2))
print("found true best ", pe.overlap_top(result, truth))
print("overlap with top", pe.overlap_fraction(result, truth), "%")

# Where did the runs stop? Count terminations per checkpoint in the first pass.
from collections import Counter
stops = Counter(o.stop_checkpoint for o in result.pass_outcomes(1) if o.status == "terminated")
for k in sorted(stops):
    print(f"  stopped at {matrix.schedule.times[k]:4d} ms: {stops[k]}")
