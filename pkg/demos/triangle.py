"""Triangle counterexample: expansion stable at psi=0, repaired at psi=0.2."""

import numpy as np

from potts_stable import brute_force_map, check_expansion_stability, solve_repair
from potts_stable.instances import triangle_instance

np.set_printoptions(suppress=True)
inst = triangle_instance(eps=0.1)
x, e = brute_force_map(inst)
print(f"MAP {(x + 1).tolist()} energy {e:.3f}")
halved, eh = brute_force_map(triangle_instance(eps=0.1, weight_scale=0.5))
print(f"after halving every weight: MAP {(halved + 1).tolist()} energy {eh:.3f}")

for psi in (0.0, 0.05, 0.2):
    r = check_expansion_stability(inst, x, psi)
    print(f"psi={psi:<4}  verdict {r.verdict:9s} margin {r.margin:+.4f}")

rep = solve_repair(inst, x, 0.2)
print(f"repair at psi=0.2: L1 change {rep.objective:.4f}, post-check {rep.report.verdict}")
print("repaired costs:\n", rep.costs.round(4))
print("repaired weights:", rep.weights.round(4))
