"""Alpha-expansion auxiliary graphs with capacities affine in ``(c, w)``.

Graph layout: node 0 is the source ("keep the current label"), node 1 the
sink ("switch to alpha").  Instance nodes already labeled alpha are
contracted into the sink.  Remaining instance nodes get ids ``2 ..``, and
edges whose endpoints carry two different non-alpha labels get one
auxiliary node each.

For every labeling ``y`` in ``E^alpha + {x_t}`` there is a cut that decodes
to ``y`` whose capacity is ``<theta_eval, phi(y)> - K`` and no cut decoding
to ``y`` is cheaper, so the min cut plus ``K`` is the best expansion value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import AffineExpr, Instance, as_labeling, energy
from .maxflow import FlowNetwork, MaxFlowSolver

SOURCE, SINK = 0, 1


@dataclass(frozen=True, eq=False)
class SymbolicAuxGraph:
    alpha: int
    x_t: np.ndarray
    n_graph: int
    node_of: np.ndarray       # instance node -> graph id, -1 when contracted
    tails: np.ndarray
    heads: np.ndarray
    cap_matrix: sp.csr_matrix  # (arcs, params); capacity = cap_matrix @ p + cap_const
    cap_const: np.ndarray
    offset_coef: np.ndarray    # K = offset_coef @ p + offset_const
    offset_const: float

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    @property
    def n_params(self) -> int:
        return self.cap_matrix.shape[1]

    def capacity_exprs(self) -> list[AffineExpr]:
        out = []
        m = self.cap_matrix
        for a in range(self.n_arcs):
            lo, hi = m.indptr[a], m.indptr[a + 1]
            out.append(AffineExpr(self.cap_const[a], dict(zip(m.indices[lo:hi].tolist(),
                                                               m.data[lo:hi].tolist()))))
        return out

    def offset(self) -> AffineExpr:
        nz = np.flatnonzero(self.offset_coef)
        return AffineExpr(self.offset_const, dict(zip(nz.tolist(), self.offset_coef[nz].tolist())))

    def trivial_arcs(self) -> np.ndarray:
        """Arcs crossing the no-change cut (every non-terminal on the source side)."""
        return (self.tails != SOURCE) & (self.heads == SINK)

    def trivial_cut(self) -> AffineExpr:
        """Capacity of the no-change cut, i.e. ``<theta_eval, phi(x_t)> - K``."""
        rows = np.flatnonzero(self.trivial_arcs())
        coef = np.asarray(self.cap_matrix[rows].sum(axis=0)).ravel()
        nz = np.flatnonzero(coef)
        return AffineExpr(float(self.cap_const[rows].sum()), dict(zip(nz.tolist(), coef[nz].tolist())))

    def capacities(self, params: np.ndarray) -> np.ndarray:
        return self.cap_matrix @ params + self.cap_const

    def evaluate(self, params: np.ndarray) -> tuple[FlowNetwork, float]:
        """Numeric network and offset at concrete parameters.

        Negative t-link pairs (possible when costs are negative) are shifted
        to be non-negative; the shift moves into the returned offset.
        """
        caps = self.capacities(np.asarray(params, dtype=float))
        K = float(self.offset_coef @ params + self.offset_const)
        if len(caps) and caps.min() < 0:
            caps, K = _shift_tlinks(self, caps, K)
        return FlowNetwork.from_arrays(self.n_graph, SOURCE, SINK, self.tails,
                                       self.heads, caps), K

    def decode(self, source_side) -> np.ndarray:
        y = self.x_t.copy()
        for u, g in enumerate(self.node_of):
            if g >= 0 and g not in source_side:
                y[u] = self.alpha
        return y


def _shift_tlinks(g: SymbolicAuxGraph, caps: np.ndarray, K: float):
    caps = caps.copy()
    src = np.full(g.n_graph, -1)
    snk = np.full(g.n_graph, -1)
    for a, (t, h) in enumerate(zip(g.tails, g.heads)):
        if t == SOURCE:
            src[h] = a
        elif h == SINK and t >= 2:
            snk[t] = a
    for v in range(2, g.n_graph):
        a, b = src[v], snk[v]
        if a < 0 or b < 0:
            if (a >= 0 and caps[a] < 0) or (b >= 0 and caps[b] < 0):
                raise ValueError("negative capacity on an unpaired terminal link")
            continue
        low = min(caps[a], caps[b])
        if low < 0:
            caps[a] -= low
            caps[b] -= low
            K += low
    if caps.min() < 0:
        raise ValueError("negative non-terminal capacity (edge weights must be >= 0)")
    return caps, K


def build_aux_graph(inst: Instance, x_t, alpha: int, psi: float = 0.0,
                    adversarial: bool = True) -> SymbolicAuxGraph:
    """Auxiliary graph for the best alpha-expansion of ``x_t``.

    With ``adversarial`` the capacities encode ``theta_adv``: ``psi`` added to
    the cost of each node's current label and half weight on edges that
    ``x_t`` does not cut.  Otherwise they encode the plain objective.
    """
    x_t = as_labeling(x_t, inst)
    if psi < 0:
        raise ValueError("psi must be non-negative")
    if not 0 <= alpha < inst.k:
        raise ValueError("alpha out of range")
    shift = float(psi) if adversarial else 0.0
    n = inst.n
    P = inst.n_params

    node_of = np.full(n, -1, dtype=np.int64)
    free = np.flatnonzero(x_t != alpha)
    node_of[free] = np.arange(2, 2 + len(free))
    n_graph = 2 + len(free)

    tails: list[int] = []
    heads: list[int] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    const: list[float] = []

    def arc(t, h, terms, c0=0.0):
        a = len(tails)
        tails.append(t)
        heads.append(h)
        const.append(c0)
        for j, v in terms:
            rows.append(a)
            cols.append(j)
            vals.append(v)
        return a

    sink_arc = {}
    for u in free:
        g = int(node_of[u])
        arc(SOURCE, g, [(inst.cost_id(u, alpha), 1.0)])
        sink_arc[g] = arc(g, SINK, [(inst.cost_id(u, int(x_t[u])), 1.0)], shift)

    for e, (u, v) in enumerate(inst.edges.tolist()):
        gu, gv = int(node_of[u]), int(node_of[v])
        wid = inst.weight_id(e)
        same = x_t[u] == x_t[v]
        wcoef = 0.5 if (adversarial and same) else 1.0
        if gu < 0 and gv < 0:
            continue
        if gu < 0 or gv < 0:
            g = gv if gu < 0 else gu
            a = sink_arc[g]
            rows.append(a)
            cols.append(wid)
            vals.append(wcoef)
        elif same:
            arc(gu, gv, [(wid, wcoef)])
            arc(gv, gu, [(wid, wcoef)])
        else:
            aux = n_graph
            n_graph += 1
            arc(gu, aux, [(wid, 1.0)])
            arc(gv, aux, [(wid, 1.0)])
            arc(aux, SINK, [(wid, 1.0)])

    cap_matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(tails), P))
    cap_matrix.sum_duplicates()
    offset_coef = np.zeros(P)
    contracted = np.flatnonzero(x_t == alpha)
    offset_coef[[inst.cost_id(u, alpha) for u in contracted]] = 1.0
    return SymbolicAuxGraph(
        alpha=alpha, x_t=x_t.copy(), n_graph=n_graph, node_of=node_of,
        tails=np.asarray(tails, dtype=np.int64), heads=np.asarray(heads, dtype=np.int64),
        cap_matrix=cap_matrix, cap_const=np.asarray(const, dtype=float),
        offset_coef=offset_coef, offset_const=shift * len(contracted),
    )


def solve_aux(graph: SymbolicAuxGraph, params) -> tuple[MaxFlowSolver, float]:
    net, K = graph.evaluate(params)
    solver = MaxFlowSolver(net)
    solver.solve()
    return solver, K


def best_expansion(inst: Instance, x_t, alpha: int, psi: float = 0.0,
                   adversarial: bool = True) -> tuple[float, np.ndarray]:
    """Best labeling in ``E^alpha + {x_t}`` and its (perturbed) energy."""
    graph = build_aux_graph(inst, x_t, alpha, psi, adversarial)
    solver, K = solve_aux(graph, inst.params())
    return solver.value + K, graph.decode(solver.min_source_side())


def alpha_expansion_search(inst: Instance, init=None, max_sweeps: int = 1000,
                           tol: float = 1e-9) -> np.ndarray:
    """Local search with best alpha-expansion moves, cycling alpha = 0..k-1.

    A heuristic: the result is a local optimum with respect to expansion
    moves, not a certified MAP labeling.
    """
    x = (np.argmin(inst.costs, axis=1) if init is None else as_labeling(init, inst)).copy()
    e = energy(inst, x)
    for _ in range(max_sweeps):
        improved = False
        for alpha in range(inst.k):
            val, y = best_expansion(inst, x, alpha, 0.0, adversarial=False)
            if val < e - tol:
                x, e = y, energy(inst, y)
                improved = True
        if not improved:
            break
    return x
