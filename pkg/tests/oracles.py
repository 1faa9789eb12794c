"""Independent exhaustive oracles used only by the test-suite."""

from __future__ import annotations

import itertools

import numpy as np


def lp_vertex_enumeration(c, A, rel, b, lb, ub):
    """Minimum of ``c @ x`` by enumerating basic points of a bounded LP.

    Every constraint (rows and finite bounds) is written as ``g @ x <= h``
    or ``g @ x == h``; every basic point is the solution of ``n`` linearly
    independent tight constraints containing all equalities.  Returns
    ``None`` when no feasible vertex exists.
    """
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    n = len(c)
    G, H, is_eq = [], [], []
    for a, r, h in zip(A, rel, b):
        if r == 0:
            G.append(a); H.append(h); is_eq.append(True)
        elif r < 0:
            G.append(a); H.append(h); is_eq.append(False)
        else:
            G.append(-a); H.append(-h); is_eq.append(False)
    for j in range(n):
        e = np.zeros(n); e[j] = 1
        if np.isfinite(lb[j]):
            G.append(-e); H.append(-lb[j]); is_eq.append(False)
        if np.isfinite(ub[j]):
            G.append(e); H.append(ub[j]); is_eq.append(False)
    G, H, is_eq = np.array(G), np.array(H), np.array(is_eq)
    eqs = np.flatnonzero(is_eq)
    ineqs = np.flatnonzero(~is_eq)
    need = n - len(eqs)
    if need < 0:
        # more equalities than variables: fall back to choosing n of them
        need, eqs, ineqs = n, np.array([], dtype=int), np.arange(len(G))
    best = None
    combos = itertools.combinations(ineqs.tolist(), need)
    while True:
        chunk = list(itertools.islice(combos, 20000))
        if not chunk:
            break
        idx = np.concatenate([np.tile(eqs, (len(chunk), 1)), np.array(chunk, dtype=int).reshape(len(chunk), need)], axis=1)
        M = G[idx]
        det = np.linalg.det(M)
        ok = np.abs(det) > 1e-9
        if not ok.any():
            continue
        X = np.linalg.solve(M[ok], H[idx[ok]][..., None])[..., 0]
        viol = X @ G.T - H
        feas = np.all(np.where(is_eq, np.abs(viol), viol) <= 1e-9, axis=1)
        if feas.any():
            val = float((X[feas] @ c).min())
            best = val if best is None else min(best, val)
    return best


def exhaustive_min_cut(n_nodes, source, sink, arcs):
    """Minimum s-t cut capacity over every bipartition."""
    others = [v for v in range(n_nodes) if v not in (source, sink)]
    best = float("inf")
    for bits in itertools.product((False, True), repeat=len(others)):
        side = {source} | {v for v, b in zip(others, bits) if b}
        val = sum(c for u, v, c in arcs if u in side and v not in side)
        best = min(best, val)
    return best


def potts_energy(costs, edges, weights, x):
    val = sum(costs[u][x[u]] for u in range(len(x)))
    val += sum(w for (u, v), w in zip(edges, weights) if x[u] != x[v])
    return val


def adversarial_energy(costs, edges, weights, xbar, psi, y):
    """Energy of ``y`` after halving uncut edges of ``xbar`` and adding
    ``psi`` to ``xbar``'s labels, written out term by term."""
    val = 0.0
    for u in range(len(y)):
        val += costs[u][y[u]] + (psi if y[u] == xbar[u] else 0.0)
    for (u, v), w in zip(edges, weights):
        if y[u] != y[v]:
            val += w if xbar[u] != xbar[v] else 0.5 * w
    return val


def expansions(x, alpha, include_self=False):
    free = [u for u in range(len(x)) if x[u] != alpha]
    for bits in itertools.product((0, 1), repeat=len(free)):
        if not include_self and not any(bits):
            continue
        y = list(x)
        for u, b in zip(free, bits):
            if b:
                y[u] = alpha
        yield tuple(y)


def expansion_minimum(costs, edges, weights, x, alpha, psi=0.0, adversarial=True):
    """``min`` over ``{x} + E^alpha(x)`` of the (adversarial) energy."""
    if adversarial:
        f = lambda y: adversarial_energy(costs, edges, weights, x, psi, y)
    else:
        f = lambda y: potts_energy(costs, edges, weights, y)
    return min(f(y) for y in expansions(x, alpha, include_self=True))


def stability_margins(costs, edges, weights, xbar, psi):
    """Per-label ``min_{y in E^alpha} theta_adv(y) - theta_adv(xbar)`` (None if empty)."""
    k = len(costs[0])
    base = adversarial_energy(costs, edges, weights, xbar, psi, xbar)
    out = []
    for a in range(k):
        vals = [adversarial_energy(costs, edges, weights, xbar, psi, y)
                for y in expansions(xbar, a)]
        out.append(min(vals) - base if vals else None)
    return out


def repair_by_enumeration(costs, edges, weights, x_t, psi):
    """Nearest (L1) non-negative ``(c, w)`` with every expansion no better than
    ``x_t`` under the adversarial perturbation, one row per expansion."""
    from scipy.optimize import linprog

    costs = np.asarray(costs, float)
    n, k = costs.shape
    m = len(edges)
    P = n * k + m
    p_hat = np.concatenate([costs.ravel(), np.asarray(weights, float)])
    A, b = [], []
    for a in range(k):
        for y in expansions(x_t, a):
            row = np.zeros(P)
            same = 0
            for u in range(n):
                row[u * k + y[u]] += 1.0
                row[u * k + x_t[u]] -= 1.0
                same += y[u] == x_t[u]
            for e, (u, v) in enumerate(edges):
                f = 1.0 if x_t[u] != x_t[v] else 0.5
                row[n * k + e] = f * (float(y[u] != y[v]) - float(x_t[u] != x_t[v]))
            # row @ p + psi * (same - n) >= 0
            A.append(-row)
            b.append(psi * (same - n))
    # variables: p, pos, neg with p - pos + neg = p_hat
    c = np.concatenate([np.zeros(P), np.ones(2 * P)])
    A_ub = np.hstack([np.array(A), np.zeros((len(A), 2 * P))]) if A else None
    A_eq = np.hstack([np.eye(P), -np.eye(P), np.eye(P)])
    res = linprog(c, A_ub=A_ub, b_ub=np.array(b) if A else None, A_eq=A_eq, b_eq=p_hat,
                  bounds=[(0, None)] * (3 * P), method="highs")
    assert res.status == 0, res.message
    return res.fun, res.x[:P]


def binary_sup(dc, dw, edges):
    """``max |sum dc x + sum dw d(x)|`` over ``x in {0,1}^{n x k}``."""
    n, k = np.shape(dc)
    best = 0.0
    for bits in itertools.product((0, 1), repeat=n * k):
        x = np.array(bits).reshape(n, k)
        val = float((np.asarray(dc) * x).sum())
        for (u, v), w in zip(edges, dw):
            val += w * 0.5 * np.abs(x[u] - x[v]).sum()
        best = max(best, abs(val))
    return best
