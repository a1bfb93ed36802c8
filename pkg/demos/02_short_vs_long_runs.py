"""
When do short runs predict long runs?
=====================================

The same racing procedure on two synthetic spaces: one where fast starters
also finish well (rho = 0.85) and one where the link is weak (rho = 0.3).
The weaker the link, the later the cutoff line drops and the smaller the
speed-up.
"""

import perfenvelope as pe

params = pe.RacingParams(pool_fraction=0.01, seed=0)
for rho in (0.85, 0.3):
    matrix = pe.generate_synthetic(pe.SyntheticParams(5000, rho=rho, sigma=0.03, seed=0))
    row = pe.experiment_table(pe.replay_evaluator(matrix), params, repetitions=20, domain=f"rho={rho}")
    print(f"{row.domain:9s} N={row.n_configs} speed-up={row.speedup:5.2f} "
          f"top={row.overlap_top_pct:5.1f}% overlap={row.overlap_pct:5.1f}%")

# Exact cutoff lines and rank curves, as long-format rows (time_ms, series, value)
matrix = pe.generate_synthetic(pe.SyntheticParams(5000, rho=0.3, sigma=0.03, seed=0))
rows = pe.figure_data(matrix, [0.01, 0.05])
for t, series, value in rows:
    if series in ("cutoff_1", "rank_cutoff_1"):
        print(f"{t:5d} ms  {series:14s} {value:8.4f}")
