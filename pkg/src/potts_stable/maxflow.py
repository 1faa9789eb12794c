"""Exact two-terminal max-flow / min-cut (Dinic's algorithm).

Capacities are real and non-negative.  Residual capacities at or below a
small scale-relative threshold count as saturated, so integer inputs are
solved exactly and real inputs to roughly machine precision.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

BRUTE_FORCE_NODES = 22


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed capacitated network on nodes ``0 .. n_nodes-1``."""

    n_nodes: int
    source: int
    sink: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray

    def __init__(self, n_nodes: int, source: int, sink: int, arcs: Sequence = ()):
        arcs = list(arcs)
        tails = np.array([a[0] for a in arcs], dtype=np.int64)
        heads = np.array([a[1] for a in arcs], dtype=np.int64)
        caps = np.array([a[2] for a in arcs], dtype=float)
        self._init(n_nodes, source, sink, tails, heads, caps)

    @classmethod
    def from_arrays(cls, n_nodes, source, sink, tails, heads, caps) -> "FlowNetwork":
        net = cls.__new__(cls)
        net._init(n_nodes, source, sink, np.asarray(tails, dtype=np.int64),
                  np.asarray(heads, dtype=np.int64), np.asarray(caps, dtype=float))
        return net

    def _init(self, n_nodes, source, sink, tails, heads, caps):
        if source == sink:
            raise ValueError("source and sink must differ")
        if not (0 <= source < n_nodes and 0 <= sink < n_nodes):
            raise ValueError("terminal out of range")
        if not (len(tails) == len(heads) == len(caps)):
            raise ValueError("malformed arc arrays")
        if len(tails) and (min(tails.min(), heads.min()) < 0
                           or max(tails.max(), heads.max()) >= n_nodes):
            raise ValueError("arc endpoint out of range")
        if len(caps) and (not np.all(np.isfinite(caps)) or caps.min() < 0):
            raise ValueError("capacities must be finite and non-negative")
        for name, val in (("n_nodes", int(n_nodes)), ("source", int(source)),
                          ("sink", int(sink)), ("tails", tails), ("heads", heads),
                          ("caps", caps)):
            object.__setattr__(self, name, val)

    @property
    def n_arcs(self) -> int:
        return len(self.caps)

    def cut_capacity(self, source_side) -> float:
        side = np.zeros(self.n_nodes, dtype=bool)
        side[list(source_side)] = True
        crossing = side[self.tails] & ~side[self.heads]
        return float(self.caps[crossing].sum())


@dataclass(frozen=True, eq=False)
class CutResult:
    value: float
    source_side: frozenset
    flow: np.ndarray
    solver: "MaxFlowSolver" = field(repr=False, default=None)


class MaxFlowSolver:
    """Dinic solver holding the residual graph for follow-up queries."""

    def __init__(self, net: FlowNetwork):
        self.net = net
        n = net.n_nodes
        self.adj: list[list[int]] = [[] for _ in range(n)]
        to: list[int] = []
        res: list[float] = []
        for a, (u, v, c) in enumerate(zip(net.tails.tolist(), net.heads.tolist(),
                                          net.caps.tolist())):
            self.adj[u].append(2 * a)
            to.append(v)
            res.append(c)
            self.adj[v].append(2 * a + 1)
            to.append(u)
            res.append(0.0)
        self.to = to
        self.res = res
        scale = float(net.caps.max()) if net.n_arcs else 0.0
        self.eps = 1e-12 * (1.0 + scale)
        self.value = 0.0

    def solve(self) -> float:
        self.value = _dinic(self.adj, self.to, self.res, self.net.source,
                            self.net.sink, self.eps)
        return self.value

    def flows(self) -> np.ndarray:
        res = np.asarray(self.res[0::2])
        f = self.net.caps - res
        f[np.abs(f) <= self.eps] = 0.0
        return f

    def min_source_side(self) -> frozenset:
        """Nodes reachable from the source in the residual graph."""
        return frozenset(_reach(self.adj, self.to, self.res, self.net.source, self.eps))

    def max_source_side(self) -> frozenset:
        """Complement of the nodes that can still reach the sink."""
        back = _reach_reverse(self.adj, self.to, self.res, self.net.sink, self.eps)
        return frozenset(set(range(self.net.n_nodes)) - back)

    def extra_flow_from(self, node: int, limit: float = float("inf")) -> float:
        """Extra flow if ``node`` were tied to the source, capped at ``limit``.

        Works on a copy of the residual graph; the solver state is unchanged.
        """
        res = list(self.res)
        return _dinic(self.adj, self.to, res, node, self.net.sink, self.eps, limit)

    def extra_flow_to(self, node: int, limit: float = float("inf")) -> float:
        """Extra flow if ``node`` were tied to the sink, capped at ``limit``.

        Equals the residual max flow from the source to ``node`` (after a
        max flow the sink is unreachable, so no such path passes it).
        """
        res = list(self.res)
        return _dinic(self.adj, self.to, res, self.net.source, node, self.eps, limit)


def _reach(adj, to, res, start, eps) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for a in adj[u]:
            v = to[a]
            if res[a] > eps and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _reach_reverse(adj, to, res, target, eps) -> set:
    # arc a: to[a ^ 1] -> to[a]; v reaches u through a when res[a] > eps
    seen = {target}
    queue = deque([target])
    while queue:
        u = queue.popleft()
        for b in adj[u]:
            a = b ^ 1
            v = to[b]
            if res[a] > eps and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _dinic(adj, to, res, s, t, eps, limit=float("inf")) -> float:
    n = len(adj)
    total = 0.0
    while total < limit:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in adj[u]:
                v = to[a]
                if level[v] < 0 and res[a] > eps:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            break
        ptr = [0] * n
        while total < limit:
            pushed = _augment(adj, to, res, level, ptr, s, t, eps, limit - total)
            if pushed <= 0.0:
                break
            total += pushed
    return total


def _augment(adj, to, res, level, ptr, s, t, eps, cap) -> float:
    """Find one s-t path in the level graph and push its bottleneck."""
    path: list[int] = []
    u = s
    while True:
        if u == t:
            push = min([cap] + [res[a] for a in path])
            for a in path:
                res[a] -= push
                res[a ^ 1] += push
            return push
        arcs = adj[u]
        while ptr[u] < len(arcs):
            a = arcs[ptr[u]]
            v = to[a]
            if res[a] > eps and level[v] == level[u] + 1:
                break
            ptr[u] += 1
        else:
            if u == s:
                return 0.0
            level[u] = -1  # dead end, prune from this phase
            a = path.pop()
            u = to[a ^ 1]
            ptr[u] += 1
            continue
        path.append(a)
        u = to[a]


def max_flow(net: FlowNetwork) -> CutResult:
    """Maximum flow with the canonical (minimal) source side of the min cut."""
    solver = MaxFlowSolver(net)
    value = solver.solve()
    return CutResult(value=value, source_side=solver.min_source_side(),
                     flow=solver.flows(), solver=solver)


def min_cut_value_bruteforce(net: FlowNetwork) -> float:
    """Minimum over all source/sink bipartitions (test oracle)."""
    others = [v for v in range(net.n_nodes) if v not in (net.source, net.sink)]
    if len(others) > BRUTE_FORCE_NODES:
        raise ValueError(f"{len(others)} non-terminal nodes exceed {BRUTE_FORCE_NODES}")
    pos = -np.ones(net.n_nodes, dtype=np.int64)
    pos[others] = np.arange(len(others))
    best = np.inf
    total = 1 << len(others)
    chunk = 1 << 15
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        side = np.zeros((len(masks), net.n_nodes), dtype=bool)
        side[:, net.source] = True
        if others:
            side[:, others] = ((masks[:, None] >> np.arange(len(others))[None, :]) & 1).astype(bool)
        crossing = side[:, net.tails] & ~side[:, net.heads]
        vals = crossing @ net.caps if net.n_arcs else np.zeros(len(masks))
        best = min(best, float(vals.min()))
    return best
