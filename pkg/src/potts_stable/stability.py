"""Adversarial perturbations and (2,1,psi)-expansion stability checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .core import (InstanceTooLarge, Instance, ObjectiveVector, as_labeling, brute_force_map,
                   cut_mask, energy)
from .expansion import SINK, SOURCE, build_aux_graph
from .maxflow import FlowNetwork, MaxFlowSolver

STABLE, BOUNDARY, UNSTABLE = "stable", "boundary", "unstable"
CERTIFY_LIMIT = 200_000   # k**n up to which the MAP is certified by exhaustion


def adversarial_theta(inst: Instance, xbar, psi: float = 0.0) -> ObjectiveVector:
    """``+psi`` on ``xbar``'s labels, half weight on edges ``xbar`` does not cut."""
    if psi < 0:
        raise ValueError("psi must be non-negative")
    xbar = as_labeling(xbar, inst)
    node = inst.costs.copy()
    node[np.arange(inst.n), xbar] += psi
    w = inst.weights.copy()
    if inst.m:
        w[~cut_mask(inst, xbar)] *= 0.5
    return ObjectiveVector(node, w)


def adversarial_instance(inst: Instance, xbar, psi: float = 0.0) -> Instance:
    th = adversarial_theta(inst, xbar, psi)
    return Instance(th.node, inst.edges, th.edge_weights)


def verdict_of(margin: float, tol: float = TOL.margin) -> str:
    if margin > tol:
        return STABLE
    if margin >= -tol:
        return BOUNDARY
    return UNSTABLE


@dataclass(frozen=True, eq=False)
class LabelMargin:
    alpha: int
    margin: float | None       # None: every node already has label alpha
    trivial: float             # <theta_adv, phi(xbar)>
    best_proper: float | None  # best value over proper expansions
    mover: np.ndarray | None   # a minimizing proper expansion


@dataclass(frozen=True, eq=False)
class StabilityReport:
    psi: float
    per_label: list[LabelMargin]
    margin: float | None
    verdict: str
    map_certified: bool
    map_unique: bool | None = None
    warning: str | None = None
    tol: float = TOL.margin
    extra: dict = field(default_factory=dict)

    @property
    def margins(self) -> list[float | None]:
        return [lm.margin for lm in self.per_label]

    def to_dict(self) -> dict:
        return {
            "psi": self.psi,
            "verdict": self.verdict,
            "margin": self.margin,
            "margins": [None if m is None else float(m) for m in self.margins],
            "movers": [None if lm.mover is None else (lm.mover + 1).tolist()
                       for lm in self.per_label],
            "map_certified": self.map_certified,
            "map_unique": self.map_unique,
            "warning": self.warning,
            "tolerance": self.tol,
        }


def label_margin(inst: Instance, xbar, alpha: int, psi: float = 0.0,
                 tol: float = TOL.margin) -> LabelMargin:
    """Best proper alpha-expansion minus ``xbar`` under ``theta_adv``.

    When the min cut ties the no-change cut, the minimal min-cut source set
    tells whether a proper expansion also attains it (margin 0).  If not,
    each free node is forced to the alpha side in turn and the extra flow
    gives the exact strict margin.
    """
    xbar = as_labeling(xbar, inst)
    graph = build_aux_graph(inst, xbar, alpha, psi, adversarial=True)
    free = np.flatnonzero(graph.node_of >= 0)
    net, K = graph.evaluate(inst.params())
    trivial_cut = net.cut_capacity([v for v in range(net.n_nodes) if v != SINK])
    trivial = trivial_cut + K
    if len(free) == 0:
        return LabelMargin(alpha, None, trivial, None, None)
    solver = MaxFlowSolver(net)
    flow = solver.solve()
    mover = graph.decode(solver.min_source_side())
    if np.any(mover != xbar):
        # a proper expansion attains the min cut (strictly below or tied)
        gap = flow - trivial_cut
        if abs(gap) <= TOL.flow * (1.0 + abs(trivial_cut)):
            gap = 0.0
        return LabelMargin(alpha, gap, trivial, trivial + gap, mover)
    best, best_node = np.inf, -1
    for u in free:
        extra = solver.extra_flow_to(int(graph.node_of[u]), best)
        if extra < best:
            best, best_node = extra, u
    margin = flow + best - trivial_cut
    return LabelMargin(alpha, margin, trivial, trivial + margin,
                       _forced_mover(graph, solver, best_node))


def _forced_mover(graph, solver: MaxFlowSolver, u: int) -> np.ndarray:
    """Labeling of a min cut with node ``u`` forced to the alpha side."""
    net = solver.net
    big = float(net.caps.sum()) + 1.0
    tails = np.append(net.tails, int(graph.node_of[u]))
    heads = np.append(net.heads, SINK)
    caps = np.append(net.caps, big)
    forced = MaxFlowSolver(FlowNetwork.from_arrays(net.n_nodes, SOURCE, SINK, tails, heads, caps))
    forced.solve()
    return graph.decode(forced.min_source_side())


def check_expansion_stability(inst: Instance, xbar, psi: float = 0.0, certify=None,
                              tol: float = TOL.margin) -> StabilityReport:
    """(2,1,psi)-expansion stability of ``xbar`` via the adversarial perturbation.

    ``certify`` controls the exhaustive MAP cross-check: ``None`` runs it
    when ``k**n`` is at most :data:`CERTIFY_LIMIT`, ``True`` forces it and
    ``False`` skips it.  A mismatch is reported in ``warning``; ``xbar`` is
    never replaced.
    """
    if psi < 0:
        raise ValueError("psi must be non-negative")
    xbar = as_labeling(xbar, inst)
    per = [label_margin(inst, xbar, a, psi, tol) for a in range(inst.k)]
    finite = [lm.margin for lm in per if lm.margin is not None]
    margin = min(finite) if finite else None
    verdict = STABLE if margin is None else verdict_of(margin, tol)

    certified, unique, warning = False, None, None
    do_cert = certify if certify is not None else inst.k ** inst.n <= CERTIFY_LIMIT
    if do_cert:
        try:
            xmap, emap, second = brute_force_map(inst, return_runner_up=True)
        except InstanceTooLarge:
            warning = "instance too large to certify the MAP; xbar assumed"
        else:
            ex = energy(inst, xbar)
            if ex > emap + tol * (1.0 + abs(emap)):
                warning = (f"supplied labeling has energy {ex:.12g} but the MAP energy is "
                           f"{emap:.12g}; stability is relative to the true MAP")
            else:
                certified = True
                unique = bool(second > emap + tol * (1.0 + abs(emap)))
                if not unique:
                    warning = "MAP is not unique; expansion stability presumes a unique MAP"
    elif certify is None:
        warning = "MAP not certified (instance too large for exhaustion); xbar assumed"
    return StabilityReport(float(psi), per, margin, verdict, certified, unique, warning, tol)


def is_perturbation_counterexample(inst: Instance, xbar, w_prime) -> bool:
    """True when the MAP under weights ``w_prime`` differs from ``xbar``.

    ``w_prime`` must lie in the (2,1) band ``w/2 <= w' <= w``.
    """
    xbar = as_labeling(xbar, inst)
    w_prime = np.asarray(w_prime, dtype=float)
    if w_prime.shape != inst.weights.shape:
        raise ValueError("w_prime must have one entry per edge")
    slack = 1e-12 * (1.0 + inst.weights)
    if np.any(w_prime < 0.5 * inst.weights - slack) or np.any(w_prime > inst.weights + slack):
        raise ValueError("w_prime outside the (2,1) band [w/2, w]")
    x, _ = brute_force_map(inst.replace(weights=w_prime))
    return bool(np.any(x != xbar))
