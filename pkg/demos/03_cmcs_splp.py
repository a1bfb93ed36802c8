"""
Configuring a small CMCS solver for plant location
==================================================

Enumerate three-slot CMCS configurations over six SPLP components, trace
a sample of them on random instances, and race the resulting matrix.
Takes about half a minute.
"""

import numpy as np
import perfenvelope as pe
from perfenvelope.evaluators import sample_configurations

configs = pe.enumerate_cmcs_configurations()
print(len(configs), "canonical configurations")
sample = sample_configurations(configs, 200, seed=0)
print(sample[0].describe())

instances = [pe.generate_splp_instance(30, 60, seed) for seed in range(1, 6)]
evaluator = pe.cmcs_evaluator(instances, sample)

# Raw objective values are scaled per instance to [0, 1] and averaged.
m = evaluator.matrix
best = int(np.argmin(m.final))
print("best configuration:", sample[best].describe())
print("its profile:", np.round(m.values[best], 4))

row = pe.experiment_table(evaluator, pe.RacingParams(pool_fraction=0.05), repetitions=20, domain="SPLP")
print(f"speed-up {row.speedup:.2f}, top found {row.overlap_top_pct:.0f}%, overlap {row.overlap_pct:.1f}%")
