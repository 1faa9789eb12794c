"""Potts instances, labelings, objective vectors and exhaustive oracles.

Labels are 0-indexed everywhere inside the package; the text formats in
:mod:`potts_stable.io` convert to the 1-indexed convention at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

BIG_M = 1e6
BRUTE_FORCE_LIMIT = 10**7
_CHUNK = 1 << 17


class InstanceTooLarge(ValueError):
    """Raised when an exhaustive oracle is asked to enumerate too much."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """Ferromagnetic Potts instance ``(G, c, w)``.

    ``costs`` has shape ``(n, k)``, ``edges`` shape ``(m, 2)`` and ``weights``
    shape ``(m,)``.  The graph is simple and undirected; weights must be
    strictly positive (zero-weight edges carry no information and can be
    dropped with :meth:`drop_zero_weights` first).
    """

    costs: np.ndarray
    edges: np.ndarray
    weights: np.ndarray

    def __init__(self, costs, edges, weights):
        costs = np.array(costs, dtype=float)
        if costs.ndim == 1:
            costs = costs[:, None]
        edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
        weights = np.array(weights, dtype=float).reshape(-1)
        n, k = costs.shape
        if k < 1:
            raise ValueError("need at least one label")
        if not np.all(np.isfinite(costs)):
            raise ValueError("node costs must be finite (substitute big-M for 'inf')")
        if len(weights) != len(edges):
            raise ValueError(f"{len(edges)} edges but {len(weights)} weights")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            key = np.sort(edges, axis=1)
            if len(np.unique(key, axis=0)) != len(key):
                raise ValueError("duplicate edges")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("edge weights must be finite and strictly positive")
        object.__setattr__(self, "costs", _frozen(costs))
        object.__setattr__(self, "edges", _frozen(edges))
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @property
    def k(self) -> int:
        return self.costs.shape[1]

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def n_params(self) -> int:
        return self.n * self.k + self.m

    # parameter ids used by AffineExpr: costs first (row-major), then weights
    def cost_id(self, u: int, i: int) -> int:
        return u * self.k + i

    def weight_id(self, e: int) -> int:
        return self.n * self.k + e

    def params(self) -> np.ndarray:
        return np.concatenate([self.costs.ravel(), self.weights])

    def with_params(self, params: np.ndarray) -> "Instance":
        params = np.asarray(params, dtype=float)
        nk = self.n * self.k
        return Instance(params[:nk].reshape(self.n, self.k), self.edges, params[nk:])

    def replace(self, costs=None, weights=None) -> "Instance":
        return Instance(self.costs if costs is None else costs, self.edges,
                        self.weights if weights is None else weights)

    @classmethod
    def drop_zero_weights(cls, costs, edges, weights, eps: float = 0.0) -> "Instance":
        """Build an instance after removing edges with weight ``<= eps``."""
        weights = np.asarray(weights, dtype=float)
        keep = weights > eps
        return cls(costs, np.asarray(edges).reshape(-1, 2)[keep], weights[keep])

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(int(v))
            adj[v].append(int(u))
        return adj

    def __repr__(self) -> str:
        return f"Instance(n={self.n}, m={self.m}, k={self.k})"


def as_labeling(x, inst: Instance | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    if inst is not None:
        if len(x) != inst.n:
            raise ValueError(f"labeling has {len(x)} entries, instance has {inst.n} nodes")
        if len(x) and (x.min() < 0 or x.max() >= inst.k):
            raise ValueError("label out of range")
    return x


def energy(inst: Instance, x) -> float:
    """Potts energy ``sum_u c(u, x(u)) + sum_uv w(u,v) [x(u) != x(v)]``."""
    x = as_labeling(x, inst)
    node = inst.costs[np.arange(inst.n), x].sum()
    if inst.m == 0:
        return float(node)
    cut = x[inst.edges[:, 0]] != x[inst.edges[:, 1]]
    return float(node + inst.weights[cut].sum())


def cut_mask(inst: Instance, x) -> np.ndarray:
    x = as_labeling(x, inst)
    return x[inst.edges[:, 0]] != x[inst.edges[:, 1]]


def one_hot(x, k: int) -> np.ndarray:
    x = as_labeling(x)
    out = np.zeros((len(x), k))
    out[np.arange(len(x)), x] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class ObjectiveVector:
    """Objective ``theta`` with Potts edge part stored as one scalar per edge.

    The full vector has dimension ``nk + mk^2``; ``dense`` materializes it in
    the variable order used by :func:`marginal_vector`.
    """

    node: np.ndarray          # (n, k)
    edge_weights: np.ndarray  # (m,)

    @classmethod
    def from_instance(cls, inst: Instance) -> "ObjectiveVector":
        return cls(inst.costs.copy(), inst.weights.copy())

    @property
    def dimension(self) -> int:
        n, k = self.node.shape
        return n * k + len(self.edge_weights) * k * k

    def dense(self) -> np.ndarray:
        n, k = self.node.shape
        off = 1.0 - np.eye(k)
        edge = self.edge_weights[:, None, None] * off[None]
        return np.concatenate([self.node.ravel(), edge.ravel()])

    def dot(self, phi: np.ndarray) -> float:
        return float(self.dense() @ np.asarray(phi, dtype=float))

    def energy(self, edges: np.ndarray, x) -> float:
        x = as_labeling(x)
        val = self.node[np.arange(len(x)), x].sum()
        if len(edges):
            val += self.edge_weights[x[edges[:, 0]] != x[edges[:, 1]]].sum()
        return float(val)

    def __sub__(self, other: "ObjectiveVector") -> "ObjectiveVector":
        return ObjectiveVector(self.node - other.node, self.edge_weights - other.edge_weights)


def marginal_vector(inst: Instance, x) -> np.ndarray:
    """The 0/1 point of the marginal polytope identified with labeling ``x``."""
    x = as_labeling(x, inst)
    k = inst.k
    node = one_hot(x, k)
    edge = np.zeros((inst.m, k, k))
    if inst.m:
        edge[np.arange(inst.m), x[inst.edges[:, 0]], x[inst.edges[:, 1]]] = 1.0
    return np.concatenate([node.ravel(), edge.ravel()])


class AffineExpr:
    """``const + sum_j coeffs[j] * p_j`` over parameter ids ``j``."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const: float = 0.0, coeffs: Mapping[int, float] | None = None):
        self.const = float(const)
        self.coeffs: dict[int, float] = dict(coeffs) if coeffs else {}

    @classmethod
    def param(cls, pid: int, coef: float = 1.0) -> "AffineExpr":
        return cls(0.0, {pid: coef})

    def copy(self) -> "AffineExpr":
        return AffineExpr(self.const, self.coeffs)

    def iadd(self, other: "AffineExpr | float", scale: float = 1.0) -> "AffineExpr":
        """In-place ``self += scale * other``."""
        if isinstance(other, AffineExpr):
            self.const += scale * other.const
            for j, a in other.coeffs.items():
                self.coeffs[j] = self.coeffs.get(j, 0.0) + scale * a
        else:
            self.const += scale * float(other)
        return self

    def __add__(self, other):
        return self.copy().iadd(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.copy().iadd(other, -1.0)

    def __rsub__(self, other):
        return (-self).iadd(other)

    def __mul__(self, s: float):
        s = float(s)
        return AffineExpr(self.const * s, {j: a * s for j, a in self.coeffs.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def evaluate(self, params: np.ndarray) -> float:
        val = self.const
        for j, a in self.coeffs.items():
            val += a * params[j]
        return float(val)

    def is_zero(self) -> bool:
        return self.const == 0.0 and all(a == 0.0 for a in self.coeffs.values())

    def __repr__(self) -> str:
        terms = " + ".join(f"{a:g}*p{j}" for j, a in sorted(self.coeffs.items()))
        return f"AffineExpr({self.const:g}{' + ' + terms if terms else ''})"


def _labelings_chunk(start: int, stop: int, n: int, k: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), n), dtype=np.int64)
    for u in range(n - 1, -1, -1):
        out[:, u] = idx % k
        idx //= k
    return out


def iter_labelings(n: int, k: int, limit: int = BRUTE_FORCE_LIMIT) -> Iterable[np.ndarray]:
    """All ``k**n`` labelings in lexicographic order, in chunks."""
    total = k**n
    if total > limit:
        raise InstanceTooLarge(f"k^n = {k}^{n} exceeds the exhaustive limit {limit}")
    for start in range(0, total, _CHUNK):
        yield _labelings_chunk(start, min(total, start + _CHUNK), n, k)


def energies(inst: Instance, labelings: np.ndarray) -> np.ndarray:
    rows = np.arange(inst.n)
    e = inst.costs[rows[None, :], labelings].sum(axis=1)
    if inst.m:
        diff = labelings[:, inst.edges[:, 0]] != labelings[:, inst.edges[:, 1]]
        e = e + diff @ inst.weights
    return e


def brute_force_map(inst: Instance, limit: int = BRUTE_FORCE_LIMIT,
                    return_runner_up: bool = False):
    """Exhaustive MAP; ties go to the lexicographically smallest labeling.

    With ``return_runner_up`` the energy of the best labeling different from
    the returned one is appended (``inf`` when there is only one labeling).
    """
    best_e, best_x, second = np.inf, None, np.inf
    for chunk in iter_labelings(inst.n, inst.k, limit):
        e = energies(inst, chunk)
        j = int(np.argmin(e))
        if return_runner_up:
            low = np.partition(e, 1)[:2] if len(e) > 1 else e[:1]
            best_e_prev = best_e
            pool = np.sort(np.concatenate([[best_e_prev, second], low]))
            second = float(pool[1])
        if e[j] < best_e:
            best_e, best_x = float(e[j]), chunk[j].copy()
    if return_runner_up:
        return best_x, best_e, float(second)
    return best_x, best_e


def enumerate_expansions(x, alpha: int, limit: int = BRUTE_FORCE_LIMIT) -> np.ndarray:
    """All alpha-expansions of ``x`` (rows), excluding ``x`` itself."""
    x = as_labeling(x)
    free = np.flatnonzero(x != alpha)
    f = len(free)
    if 2**f > limit:
        raise InstanceTooLarge(f"2^{f} expansions exceed the limit {limit}")
    if f == 0:
        return np.empty((0, len(x)), dtype=np.int64)
    masks = np.arange(1, 2**f, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(f)[None, :]) & 1
    out = np.repeat(x[None, :], len(masks), axis=0)
    sub = out[:, free]
    sub[bits.astype(bool)] = alpha
    out[:, free] = sub
    return out


def labelings_differ(a, b) -> int:
    return int(np.count_nonzero(as_labeling(a) != as_labeling(b)))


def lex_key(x: Sequence[int]) -> tuple:
    return tuple(int(v) for v in x)
