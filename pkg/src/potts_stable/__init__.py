"""MAP inference in ferromagnetic Potts models with expansion-stability tools.

The package checks (2,1,psi)-expansion stability of a labeling with
alpha-expansion min cuts, finds the nearest stable instance by a
max-flow-witness LP, solves the local LP relaxation, and evaluates the
curvature and deviation recovery bounds on noisy instances.
"""

from .config import TOL, Tolerances
from .core import (BIG_M, Instance, InstanceTooLarge, ObjectiveVector, brute_force_map, energy,
                   enumerate_expansions)
from .expansion import alpha_expansion_search, best_expansion, build_aux_graph
from .locallp import FractionalSolution, project_to_lstar, recovery_error, solve_local_lp
from .repair import fallback_stable_instance, solve_repair
from .stability import adversarial_theta, check_expansion_stability

__version__ = "0.1.0"

__all__ = [
    "BIG_M", "FractionalSolution", "Instance", "InstanceTooLarge", "ObjectiveVector", "TOL",
    "Tolerances", "adversarial_theta", "alpha_expansion_search", "best_expansion",
    "brute_force_map", "build_aux_graph", "check_expansion_stability", "energy",
    "enumerate_expansions", "fallback_stable_instance", "project_to_lstar", "recovery_error",
    "solve_local_lp", "solve_repair",
]
