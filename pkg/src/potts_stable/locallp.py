"""Local (pairwise) LP relaxation over the local polytope L(G).

Variable layout: node marginals ``x_u(i)`` at ``u*k + i``, then edge
marginals ``x_uv(i, j)`` at ``n*k + e*k*k + i*k + j`` where edge ``e`` is
``(u, v)`` in the instance's edge order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .core import Instance, ObjectiveVector, as_labeling, marginal_vector, one_hot
from .lp import EQ, LinearProgram, LpBuilder, LpSolution, solve

RAW, LSTAR, INTEGRAL = "raw-LP", "Lstar-certified", "integral"


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    node: np.ndarray    # (n, k)
    edge: np.ndarray    # (m, k, k)
    edges: np.ndarray   # (m, 2)
    provenance: str = RAW
    objective: float = np.nan
    labeling: np.ndarray | None = None  # set when provenance is integral

    @property
    def n(self) -> int:
        return self.node.shape[0]

    @property
    def k(self) -> int:
        return self.node.shape[1]

    def vector(self) -> np.ndarray:
        return np.concatenate([self.node.ravel(), self.edge.ravel()])

    @classmethod
    def from_labeling(cls, inst: Instance, x) -> "FractionalSolution":
        x = as_labeling(x, inst)
        vec = marginal_vector(inst, x)
        nk = inst.n * inst.k
        return cls(vec[:nk].reshape(inst.n, inst.k), vec[nk:].reshape(inst.m, inst.k, inst.k),
                   inst.edges, INTEGRAL, float(np.nan), x)

    def separations(self) -> np.ndarray:
        """``d(u, v) = 1/2 sum_i |x_u(i) - x_v(i)|`` for every edge."""
        if len(self.edges) == 0:
            return np.zeros(0)
        diff = self.node[self.edges[:, 0]] - self.node[self.edges[:, 1]]
        return 0.5 * np.abs(diff).sum(axis=1)

    def marginalization_error(self) -> float:
        err = float(np.abs(self.node.sum(axis=1) - 1.0).max(initial=0.0))
        if len(self.edges):
            err = max(err,
                      float(np.abs(self.edge.sum(axis=2) - self.node[self.edges[:, 0]]).max()),
                      float(np.abs(self.edge.sum(axis=1) - self.node[self.edges[:, 1]]).max()))
        return err

    def lstar_error(self) -> float:
        if len(self.edges) == 0:
            return 0.0
        diag = np.diagonal(self.edge, axis1=1, axis2=2)
        target = np.minimum(self.node[self.edges[:, 0]], self.node[self.edges[:, 1]])
        return float(np.abs(diag - target).max())

    def in_lstar(self, tol: float = TOL.feasibility) -> bool:
        return (self.marginalization_error() <= tol and self.lstar_error() <= tol
                and float(self.node.min(initial=0.0)) >= -tol
                and float(self.edge.min(initial=0.0)) >= -tol)


def _theta(inst: Instance, theta: ObjectiveVector | None) -> ObjectiveVector:
    return ObjectiveVector.from_instance(inst) if theta is None else theta


def build_local_lp(inst: Instance, theta: ObjectiveVector | None = None) -> LinearProgram:
    """Local LP of ``inst``; ``theta`` replaces the objective (same graph).

    ``theta`` may carry negative edge weights, which is how deviation LPs
    are built.
    """
    n, k, m = inst.n, inst.k, inst.m
    th = _theta(inst, theta)
    if th.node.shape != (n, k) or len(th.edge_weights) != m:
        raise ValueError("objective does not match the instance graph")
    b = LpBuilder()
    off = 1.0 - np.eye(k)
    cost = np.concatenate([th.node.ravel(), (th.edge_weights[:, None, None] * off).ravel()])
    b.add_vars(n * k + m * k * k, lb=0.0, ub=1.0, cost=cost)
    # normalization
    rows = np.repeat(np.arange(n), k)
    b.add_rows(rows, np.arange(n * k), 1.0, EQ, np.ones(n))
    if m:
        e = np.arange(m)
        ii, jj = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
        base = n * k + e[:, None, None] * k * k + ii[None] * k + jj[None]   # (m, k, k)
        u, v = inst.edges[:, 0], inst.edges[:, 1]
        # sum_j x_uv(i, j) - x_u(i) = 0, rows indexed (e, i)
        r_left = e[:, None, None] * k + ii[None]
        rows_l = np.concatenate([r_left.ravel(), (e[:, None] * k + np.arange(k)).ravel()])
        cols_l = np.concatenate([base.ravel(), (u[:, None] * k + np.arange(k)).ravel()])
        vals_l = np.concatenate([np.ones(m * k * k), -np.ones(m * k)])
        b.add_rows(rows_l, cols_l, vals_l, EQ, np.zeros(m * k))
        # sum_i x_uv(i, j) - x_v(j) = 0, rows indexed (e, j)
        r_right = e[:, None, None] * k + jj[None]
        rows_r = np.concatenate([r_right.ravel(), (e[:, None] * k + np.arange(k)).ravel()])
        cols_r = np.concatenate([base.ravel(), (v[:, None] * k + np.arange(k)).ravel()])
        b.add_rows(rows_r, cols_r, vals_l, EQ, np.zeros(m * k))
    return b.build()


def _split(inst: Instance, vec: np.ndarray):
    nk = inst.n * inst.k
    return vec[:nk].reshape(inst.n, inst.k), vec[nk:].reshape(inst.m, inst.k, inst.k)


def solve_local_lp(inst: Instance, theta: ObjectiveVector | None = None,
                   method: str = "highs", tol=TOL, return_lp: bool = False):
    """Optimal point of the local LP.

    When every entry is within ``tol.integrality`` of {0, 1} the point is
    rounded, re-verified (feasible, same objective) and marked integral.
    """
    lp = build_local_lp(inst, theta)
    sol = solve(lp, method=method, tol=tol)
    if not sol.optimal:
        raise RuntimeError(f"local LP solve failed: {sol.status} {sol.message}")
    res = _package(inst, lp, sol, tol)
    return (res, sol) if return_lp else res


def _package(inst, lp: LinearProgram, sol: LpSolution, tol) -> FractionalSolution:
    vec = np.clip(sol.x, 0.0, 1.0)
    node, edge = _split(inst, vec)
    rounded = np.round(vec)
    if np.abs(vec - rounded).max(initial=0.0) <= tol.integrality:
        x = np.argmax(rounded[: inst.n * inst.k].reshape(inst.n, inst.k), axis=1)
        phi = marginal_vector(inst, x)
        obj = float(lp.cost @ phi)
        if (np.array_equal(phi, rounded) and lp.residuals(phi).max(initial=0.0) == 0.0
                and abs(obj - sol.objective) <= tol.duality_gap * (1.0 + abs(obj))):
            n2, e2 = _split(inst, phi)
            return FractionalSolution(n2, e2, inst.edges, INTEGRAL, obj, x)
    return FractionalSolution(node, edge, inst.edges, RAW, float(sol.objective))


def project_to_lstar(node_marginals, inst: Instance, tol: float = TOL.feasibility) -> FractionalSolution:
    """Complete node marginals to a point of L*(G).

    Diagonal ``x_uv(i,i) = min(x_u(i), x_v(i))``; the leftover supply of
    ``u`` and demand of ``v`` are matched by the northwest-corner rule.
    """
    node = np.array(node_marginals, dtype=float)
    if node.shape != (inst.n, inst.k):
        raise ValueError(f"expected node marginals of shape {(inst.n, inst.k)}")
    if node.min(initial=0.0) < -tol or np.abs(node.sum(axis=1) - 1.0).max(initial=0.0) > tol:
        raise ValueError("node marginals must be non-negative and sum to 1 per node")
    node = np.clip(node, 0.0, None)
    k = inst.k
    edge = np.zeros((inst.m, k, k))
    for e, (u, v) in enumerate(inst.edges):
        a, b = node[u], node[v]
        diag = np.minimum(a, b)
        edge[e][np.diag_indices(k)] = diag
        supply = a - diag
        demand = b - diag
        i = j = 0
        while i < k and j < k:
            q = min(supply[i], demand[j])
            if q > 0 and i != j:
                edge[e, i, j] += q
            supply[i] -= q
            demand[j] -= q
            if supply[i] <= 0:
                i += 1
            else:
                j += 1
    return FractionalSolution(node, edge, inst.edges, LSTAR, metric_objective(inst, node))


def node_marginals(a, k: int | None = None) -> np.ndarray:
    """Node marginals of a FractionalSolution, a labeling or an (n, k) array."""
    if isinstance(a, FractionalSolution):
        return a.node
    arr = np.asarray(a)
    if arr.ndim == 1:
        if k is None:
            raise ValueError("label count needed to expand a labeling")
        return one_hot(arr, k)
    return arr.astype(float)


def recovery_error(a, b) -> float:
    """``1/2 sum_u ||a_u - b_u||_1`` over node marginals."""
    k = None
    for z in (a, b):
        if isinstance(z, FractionalSolution):
            k = z.k
        elif np.ndim(z) == 2:
            k = np.shape(z)[1]
    if k is None:
        k = int(max(np.max(a), np.max(b))) + 1
    na, nb = node_marginals(a, k), node_marginals(b, k)
    if na.shape != nb.shape:
        raise ValueError(f"shape mismatch {na.shape} vs {nb.shape}")
    return 0.5 * float(np.abs(na - nb).sum())


def edge_separation(x: FractionalSolution, edge) -> float:
    """``d(u, v)``; ``edge`` is an edge index or an endpoint pair."""
    if np.ndim(edge) == 0:
        u, v = x.edges[int(edge)]
    else:
        u, v = edge
    return 0.5 * float(np.abs(x.node[u] - x.node[v]).sum())


def metric_objective(inst_or_theta, node: np.ndarray, edges: np.ndarray | None = None) -> float:
    """``sum c x_u + sum w d(u, v)``; equals the LP objective on L*(G)."""
    if isinstance(inst_or_theta, Instance):
        costs, weights, edges = inst_or_theta.costs, inst_or_theta.weights, inst_or_theta.edges
    else:
        costs, weights = inst_or_theta.node, inst_or_theta.edge_weights
        if edges is None:
            raise ValueError("edges required with an ObjectiveVector")
    node = np.asarray(node, dtype=float)
    val = float((costs * node).sum())
    if len(edges):
        d = 0.5 * np.abs(node[edges[:, 0]] - node[edges[:, 1]]).sum(axis=1)
        val += float(weights @ d)
    return val


def lp_objective(inst_or_theta, x: FractionalSolution) -> float:
    """Full local-LP objective ``sum c x_u + sum w sum_{i != j} x_uv(i, j)``."""
    if isinstance(inst_or_theta, Instance):
        costs, weights = inst_or_theta.costs, inst_or_theta.weights
    else:
        costs, weights = inst_or_theta.node, inst_or_theta.edge_weights
    off = x.edge.sum(axis=(1, 2)) - np.trace(x.edge, axis1=1, axis2=2) if len(x.edges) else np.zeros(0)
    return float((costs * x.node).sum() + weights @ off)


def random_lstar_point(inst: Instance, rng: np.random.Generator,
                       concentration: float = 1.0) -> FractionalSolution:
    """Dirichlet node marginals completed to L*(G)."""
    node = rng.dirichlet(np.full(inst.k, concentration), size=inst.n)
    return project_to_lstar(node, inst)
