"""
Choosing the termination margin
===============================

"More than 20% above the cutoff" can be read as a factor (x1.2) or as an
absolute offset (+0.2). Turning the margin off reduces racing to
exhaustive evaluation, which is the reference the others are scored
against.
"""

import perfenvelope as pe

matrix = pe.generate_synthetic(pe.SyntheticParams(2000, rho=0.85, sigma=0.03, seed=3))
truth = pe.TruthTable.from_matrix(matrix, 0.01)
for text in ("off", "x1.5", "x1.2", "x1.05", "+0.2", "+0.05"):
    params = pe.RacingParams(0.01, pe.MarginPolicy.parse(text), seed=0)
    result = pe.run_racing(pe.replay_evaluator(matrix), params)
    print(f"{text:6s} speed-up {pe.speedup(result, truth):6.2f}  overlap {pe.overlap_fraction(result, truth):5.1f}%")

# The comparison is strict: exactly 1.2 times the cutoff is still allowed.
cut = pe.CutoffLine((0.5, 0.5))
print(pe.violates([0.6], cut, pe.MarginPolicy(), 0), pe.violates([0.61], cut, pe.MarginPolicy(), 0))
