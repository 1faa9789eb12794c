"""Monte Carlo check of the two noise-model bounds at small scale."""

import numpy as np

from potts_stable import brute_force_map
from potts_stable.instances import grid_edges, random_instance, triangle_instance
from potts_stable.noise import NoiseSpec, validate_apmap, validate_dswhp
from potts_stable.repair import fallback_stable_instance

grid = random_instance(4, 2, np.random.default_rng(0), edges=grid_edges(2, 2))
r = validate_dswhp(grid, NoiseSpec(sigma=0.1, gamma=0.1, seed=1), trials=100)
print(f"deviation bound, 2x2 grid: {r['exceedances']}/100 exceedances, "
      f"bound {r['bound']:.3f}, median sup {r['sup']['median']:.3f}")

r = validate_apmap(triangle_instance(), NoiseSpec(sigma=0.01, gamma=0.01, seed=2), psi=0.05)
print(f"recovery bound, triangle: {r['exceedances']}/100 exceedances, bound {r['bound']:.2f}, "
      f"max error {r['error']['max']:.3g}")

obs = random_instance(9, 2, np.random.default_rng(3), edges=grid_edges(3, 3))
obs = obs.replace(costs=obs.costs + 0.5)
target, _ = brute_force_map(obs)
latent = fallback_stable_instance(obs, target, 0.5).instance
for s in (0.02, 0.2, 0.5):
    r = validate_apmap(latent, NoiseSpec(sigma=s, gamma=s, seed=4), psi=0.5, xbar=target)
    e = r["error"]
    print(f"recovery bound, 3x3 grid, sigma=gamma={s}: {r['exceedances']}/100 exceedances, "
          f"bound {r['bound']:.2f}, error median {e['median']:.3f} q90 {e['q90']:.3f} max {e['max']:.3f}")
