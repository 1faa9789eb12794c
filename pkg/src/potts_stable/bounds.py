"""Curvature and recovery bounds for nearly stable instances.

``theta`` arguments are :class:`~potts_stable.core.ObjectiveVector` values
on the graph of ``inst``.  Deviation suprema over L*(G) are replaced by the
corresponding maxima over the larger local polytope L(G), which are upper
bounds and are what the bounds consume.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import Instance, ObjectiveVector, as_labeling, labelings_differ, marginal_vector
from .locallp import (FractionalSolution, build_local_lp, metric_objective, recovery_error)
from .lp import solve


def _objective_gap(theta_bar: ObjectiveVector, edges, xbar, x: FractionalSolution) -> float:
    return metric_objective(theta_bar, x.node, edges) - theta_bar.energy(edges, xbar)


def curvature_bound(theta_bar: ObjectiveVector, xbar, x: FractionalSolution, psi: float) -> float:
    """``|<theta_bar, x> - <theta_bar, phi(xbar)>| / psi`` (metric form for ``x``)."""
    if psi <= 0:
        raise ValueError("psi must be positive")
    return abs(_objective_gap(theta_bar, x.edges, as_labeling(xbar), x)) / psi


def _max_linear(inst: Instance, theta: ObjectiveVector, method: str) -> float:
    """``max_{x in L(G)} <theta, x>``."""
    neg = ObjectiveVector(-theta.node, -theta.edge_weights)
    sol = solve(build_local_lp(inst, neg), method=method)
    if not sol.optimal:
        raise RuntimeError(f"deviation LP failed: {sol.status} {sol.message}")
    return -float(sol.objective)


def d_up(theta_bar: ObjectiveVector, theta_hat: ObjectiveVector, xbar, inst: Instance,
         method: str = "highs") -> float:
    """``max_{x in L(G)} <theta_bar - theta_hat, x - phi(xbar)>`` (>= 0)."""
    delta = theta_bar - theta_hat
    base = delta.dot(marginal_vector(inst, xbar))
    return max(_max_linear(inst, delta, method) - base, 0.0)


def unconditional_bound(theta_bar, theta_hat, inst: Instance, xbar, xhat_map, psi: float,
                        method: str = "highs") -> float:
    """``d_up / psi + 1/2 ||phi(xhat_map)_V - phi(xbar)_V||_1``."""
    if psi <= 0:
        raise ValueError("psi must be positive")
    return d_up(theta_bar, theta_hat, xbar, inst, method) / psi + labelings_differ(xhat_map, xbar)


def symmetric_deviation_upper(theta_bar, theta_hat, inst: Instance, method: str = "highs") -> float:
    """Upper bound on ``sup_{x in L*(G)} |<theta_hat - theta_bar, x>|`` via L(G)."""
    delta = theta_hat - theta_bar
    neg = ObjectiveVector(-delta.node, -delta.edge_weights)
    return max(_max_linear(inst, delta, method), _max_linear(inst, neg, method), 0.0)


def mapreg_bound(n: int, k: int, d: float, rho: float, eta: float, sigma: float, gamma: float,
                 psi: float, c_const: float = 1.0) -> float:
    """Normalized recovery bound for d-regular graphs with uniform noise.

    ``2 c k sqrt(rho sigma^2 + (eta d k / 8) gamma^2) / psi``; ``n`` is
    accepted for interface symmetry and does not enter the normalized form.
    """
    if psi <= 0:
        raise ValueError("psi must be positive")
    del n
    return 2.0 * c_const * k * np.sqrt(rho * sigma ** 2 + (eta * d * k / 8.0) * gamma ** 2) / psi


@dataclass(frozen=True)
class BoundReport:
    n: int
    psi: float
    objective_gap: float
    curvature_bound: float
    actual_error: float
    d_up: float | None = None
    unconditional_bound: float | None = None
    symmetric_deviation: float | None = None

    @property
    def normalized_curvature(self) -> float:
        return self.curvature_bound / self.n

    @property
    def normalized_actual(self) -> float:
        return self.actual_error / self.n

    @property
    def normalized_unconditional(self) -> float | None:
        return None if self.unconditional_bound is None else self.unconditional_bound / self.n

    def ordering_holds(self, slack: float = 1e-6) -> bool:
        ok = self.actual_error <= self.curvature_bound + slack
        if self.unconditional_bound is not None:
            ok = ok and self.curvature_bound <= self.unconditional_bound + slack
        return bool(ok)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["normalized"] = {
            "curvature_bound": self.normalized_curvature,
            "actual_error": self.normalized_actual,
            "unconditional_bound": self.normalized_unconditional,
        }
        return out


def bound_report(observed: Instance, stable_theta: ObjectiveVector, xbar, xhat: FractionalSolution,
                 psi: float, xhat_map=None, method: str = "highs",
                 with_symmetric: bool = True) -> BoundReport:
    """All bounds for an observed instance against a stable reference.

    ``xbar`` is the stable instance's MAP (the repair target), ``xhat`` the
    local-LP solution of ``observed`` and ``xhat_map`` the observed
    instance's MAP (defaults to ``xbar``).
    """
    xbar = as_labeling(xbar, observed)
    xhat_map = xbar if xhat_map is None else as_labeling(xhat_map, observed)
    hat = ObjectiveVector.from_instance(observed)
    gap = _objective_gap(stable_theta, observed.edges, xbar, xhat)
    du = d_up(stable_theta, hat, xbar, observed, method)
    return BoundReport(
        n=observed.n, psi=float(psi), objective_gap=float(gap),
        curvature_bound=abs(gap) / psi,
        actual_error=recovery_error(xhat, xbar),
        d_up=du,
        unconditional_bound=du / psi + labelings_differ(xhat_map, xbar),
        symmetric_deviation=(symmetric_deviation_upper(stable_theta, hat, observed, method)
                             if with_symmetric else None),
    )
