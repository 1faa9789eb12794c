"""Nearest (L1) (2,1,psi)-expansion stable instance with a prescribed MAP.

For every label alpha the program carries a flow ``f_alpha`` on the
auxiliary graph of ``x_t``.  Capacities are affine in the unknown
parameters ``p = (c, w)``, so the rows

    f_a <= cap_a(p)                       (capacity)
    inflow(v) == outflow(v)               (conservation, non-terminals)
    value(f) >= trivial_cut(p)            (flow saturates the no-change cut)

are linear in ``(p, f)``.  By max-flow/min-cut duality such a flow exists
iff the min cut equals the no-change cut, i.e. iff no alpha-expansion
beats ``x_t`` under ``theta_adv(p, psi)``.  The objective is
``sum(pos + neg)`` with ``p - pos + neg = p_hat``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .config import TOL
from .core import Instance, as_labeling, cut_mask
from .expansion import SOURCE, SymbolicAuxGraph, build_aux_graph
from .lp import EQ, GE, LE, LinearProgram, LpSolution, solve
from .maxflow import MaxFlowSolver
from .stability import StabilityReport, check_expansion_stability

OBJECTIVES = ("l1", "l2")


class UnsupportedObjective(NotImplementedError):
    pass


@dataclass(frozen=True, eq=False)
class AlphaBlock:
    alpha: int
    graph: SymbolicAuxGraph
    flow_vars: np.ndarray      # LP column of each arc's flow
    capacity_rows: np.ndarray
    conservation_rows: np.ndarray
    value_row: int


@dataclass(frozen=True, eq=False)
class RepairProgram:
    inst: Instance
    x_t: np.ndarray
    psi: float
    lp: LinearProgram
    param_vars: np.ndarray
    pos_vars: np.ndarray
    neg_vars: np.ndarray
    blocks: list[AlphaBlock]

    @property
    def n_vars(self) -> int:
        return self.lp.n_vars

    @property
    def n_rows(self) -> int:
        return self.lp.n_rows

    def expected_var_count(self) -> int:
        P = self.inst.n_params
        return P + sum(b.graph.n_arcs for b in self.blocks) + 2 * P

    def witness_point(self, params, flows: list[np.ndarray]) -> np.ndarray:
        """Full LP vector for given parameters and per-label flows."""
        z = np.zeros(self.n_vars)
        params = np.asarray(params, dtype=float)
        z[self.param_vars] = params
        for b, f in zip(self.blocks, flows):
            z[b.flow_vars] = f
        diff = params - self.inst.params()
        z[self.pos_vars] = np.maximum(diff, 0.0)
        z[self.neg_vars] = np.maximum(-diff, 0.0)
        return z

    def max_violation(self, z) -> float:
        z = np.asarray(z, dtype=float)
        bounds = np.maximum(self.lp.lb - z, 0.0).max(initial=0.0)
        bounds = max(bounds, np.maximum(z - self.lp.ub, 0.0).max(initial=0.0))
        return float(max(self.lp.residuals(z).max(initial=0.0), bounds))


def build_repair(inst: Instance, x_t, psi: float, objective: str = "l1") -> RepairProgram:
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if objective != "l1":
        raise UnsupportedObjective("only the L1 objective is supported")
    if psi < 0:
        raise ValueError("psi must be non-negative")
    x_t = as_labeling(x_t, inst)
    P = inst.n_params
    graphs = [build_aux_graph(inst, x_t, a, psi, adversarial=True) for a in range(inst.k)]
    arcs = [g.n_arcs for g in graphs]
    n_flow = sum(arcs)
    n_vars = P + n_flow + 2 * P
    param_vars = np.arange(P)
    flow_start = np.concatenate([[P], P + np.cumsum(arcs)])
    pos_vars = np.arange(P + n_flow, P + n_flow + P)
    neg_vars = pos_vars + P

    rows, cols, vals, rel, rhs = [], [], [], [], []
    n_rows = 0
    blocks = []

    def emit(r, c, v):
        rows.append(np.asarray(r, dtype=np.int64))
        cols.append(np.asarray(c, dtype=np.int64))
        vals.append(np.asarray(v, dtype=float))

    for a, g in enumerate(graphs):
        fv = np.arange(flow_start[a], flow_start[a + 1])
        A = g.n_arcs
        # capacity: f_a - cap_matrix[a] @ p <= cap_const[a]
        cap_rows = n_rows + np.arange(A)
        cm = g.cap_matrix.tocoo()
        emit(cap_rows, fv, np.ones(A))
        emit(cap_rows[cm.row], param_vars[cm.col], -cm.data)
        rel.append(np.full(A, LE))
        rhs.append(g.cap_const)
        n_rows += A
        # conservation at non-terminals: sum_in f - sum_out f = 0
        internal = np.arange(2, g.n_graph)
        cons_rows = n_rows + np.arange(len(internal))
        row_of = np.full(g.n_graph, -1)
        row_of[internal] = cons_rows
        into = row_of[g.heads] >= 0
        out = row_of[g.tails] >= 0
        emit(row_of[g.heads[into]], fv[into], np.ones(into.sum()))
        emit(row_of[g.tails[out]], fv[out], -np.ones(out.sum()))
        rel.append(np.full(len(internal), EQ))
        rhs.append(np.zeros(len(internal)))
        n_rows += len(internal)
        # flow value >= trivial cut(p)
        value_row = n_rows
        src = np.flatnonzero(g.tails == SOURCE)
        emit(np.full(len(src), value_row), fv[src], np.ones(len(src)))
        triv = g.trivial_arcs()
        tm = g.cap_matrix[np.flatnonzero(triv)].sum(axis=0).A1
        nz = np.flatnonzero(tm)
        emit(np.full(len(nz), value_row), param_vars[nz], -tm[nz])
        rel.append(np.array([GE]))
        rhs.append(np.array([g.cap_const[triv].sum()]))
        n_rows += 1
        blocks.append(AlphaBlock(a, g, fv, cap_rows, cons_rows, value_row))

    # p - pos + neg = p_hat
    l1_rows = n_rows + np.arange(P)
    emit(l1_rows, param_vars, np.ones(P))
    emit(l1_rows, pos_vars, -np.ones(P))
    emit(l1_rows, neg_vars, np.ones(P))
    rel.append(np.full(P, EQ))
    rhs.append(inst.params())
    n_rows += P

    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_rows, n_vars))
    cost = np.zeros(n_vars)
    cost[pos_vars] = 1.0
    cost[neg_vars] = 1.0
    lp = LinearProgram(cost, A, np.concatenate(rel), np.concatenate(rhs),
                       np.zeros(n_vars), np.full(n_vars, np.inf))
    return RepairProgram(inst, x_t, float(psi), lp, param_vars, pos_vars, neg_vars, blocks)


@dataclass(frozen=True, eq=False)
class RepairResult:
    source: Instance
    costs: np.ndarray          # (n, k), repaired
    weights: np.ndarray        # (m,), aligned with source.edges; may contain zeros
    objective: float
    costs_changed: float       # fraction of cost entries changed beyond TOL.changed
    weights_changed: float
    report: StabilityReport
    lp_status: str
    n_vars: int
    n_rows: int
    nnz: int
    extra: dict = field(default_factory=dict)

    @property
    def instance(self) -> Instance:
        """Repaired instance; edges whose weight dropped to zero are removed."""
        return Instance.drop_zero_weights(self.costs, self.source.edges, self.weights,
                                          TOL.changed * 1e-3)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "costs_changed": self.costs_changed,
            "weights_changed": self.weights_changed,
            "zero_weight_edges": int(np.sum(self.weights <= TOL.changed * 1e-3)),
            "lp": {"status": self.lp_status, "variables": self.n_vars, "rows": self.n_rows,
                   "nonzeros": self.nnz},
            "post_check": self.report.to_dict(),
        }


def solve_repair(inst: Instance, x_t, psi: float, method: str = "highs",
                 objective: str = "l1", certify=None) -> RepairResult:
    prog = build_repair(inst, x_t, psi, objective)
    sol: LpSolution = solve(prog.lp, method=method)
    if not sol.optimal:
        raise RuntimeError(f"repair LP returned {sol.status}: {sol.message}")
    params = np.maximum(sol.x[prog.param_vars], 0.0)
    nk = inst.n * inst.k
    # snap entries that did not move beyond the threshold back to the input
    p_hat = inst.params()
    same = np.abs(params - p_hat) <= TOL.changed * 1e-3
    params = np.where(same, p_hat, params)
    costs = params[:nk].reshape(inst.n, inst.k)
    weights = params[nk:]
    changed = np.abs(params - p_hat) > TOL.changed
    costs_changed = float(changed[:nk].mean()) if nk else 0.0
    weights_changed = float(changed[nk:].mean()) if inst.m else 0.0
    repaired = Instance.drop_zero_weights(costs, inst.edges, weights, TOL.changed * 1e-3)
    report = check_expansion_stability(repaired, prog.x_t, psi, certify=certify)
    obj = float(np.abs(params - p_hat).sum())
    return RepairResult(inst, costs, weights, obj, costs_changed, weights_changed, report,
                        sol.status, prog.n_vars, prog.n_rows, prog.lp.nnz,
                        {"lp_objective": float(sol.objective), "lp_iterations": sol.iterations})


@dataclass(frozen=True, eq=False)
class FallbackInstance:
    instance: Instance
    clamped: np.ndarray        # (n,) True where c(u, x_t(u)) - psi < 0 was clamped to 0


def fallback_stable_instance(inst: Instance, x_t, psi: float) -> FallbackInstance:
    """``c - psi`` on ``x_t``'s labels and ``2w`` on edges ``x_t`` does not cut.

    Under the adversarial perturbation of ``x_t`` this instance turns back
    into the input, so when ``x_t`` is a MAP of the input no expansion beats
    it.  Costs that would go negative are clamped to 0 and flagged.
    """
    x_t = as_labeling(x_t, inst)
    costs = inst.costs.copy()
    rows = np.arange(inst.n)
    lowered = costs[rows, x_t] - psi
    clamped = lowered < 0
    costs[rows, x_t] = np.maximum(lowered, 0.0)
    w = inst.weights.copy()
    if inst.m:
        w[~cut_mask(inst, x_t)] *= 2.0
    return FallbackInstance(Instance(costs, inst.edges, w), clamped)


def witness_flows(prog: RepairProgram, params) -> list[np.ndarray]:
    """Max flows on each label's auxiliary graph evaluated at ``params``."""
    flows = []
    for b in prog.blocks:
        net, _ = b.graph.evaluate(np.asarray(params, dtype=float))
        solver = MaxFlowSolver(net)
        solver.solve()
        flows.append(solver.flows())
    return flows


def witness_violation(prog: RepairProgram, params) -> float:
    """Worst row violation of the repair program at ``params`` with max-flow witnesses."""
    z = prog.witness_point(params, witness_flows(prog, params))
    return prog.max_violation(z)
