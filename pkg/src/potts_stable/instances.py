"""Small named instances and random generators."""

from __future__ import annotations

import numpy as np

from .core import BIG_M, Instance


def triangle_instance(eps: float = 0.1, big_m: float = BIG_M, weight_scale: float = 1.0) -> Instance:
    """Triangle ``u, v, w`` that is (2,1)-expansion stable but not (2,1)-stable.

    Requires ``0 < eps < 1/3``.  Forbidden labels get cost ``big_m``.
    """
    costs = [[0.5, big_m, big_m],
             [1.0, 0.0, big_m],
             [1.0, big_m, 0.0]]
    w = (1.0 + eps) * weight_scale
    return Instance(costs, [(0, 1), (1, 2), (0, 2)], [w, w, w])


def grid_edges(rows: int, cols: int) -> np.ndarray:
    """4-connected grid edges, nodes numbered row-major."""
    idx = np.arange(rows * cols).reshape(rows, cols)
    right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return np.concatenate([right, down]).astype(np.int64)


def path_edges(n: int) -> np.ndarray:
    return np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)


def random_graph_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return np.stack([iu[keep], ju[keep]], axis=1)


def random_instance(n: int, k: int, rng: np.random.Generator, edge_prob: float = 0.5,
                    cost_range=(0.0, 3.0), weight_range=(0.2, 2.0),
                    integer: bool = False, edges=None) -> Instance:
    if edges is None:
        edges = random_graph_edges(n, edge_prob, rng)
    edges = np.asarray(edges).reshape(-1, 2)
    if integer:
        costs = rng.integers(int(cost_range[0]), int(cost_range[1]) + 1, size=(n, k)).astype(float)
        weights = rng.integers(max(1, int(weight_range[0])), int(weight_range[1]) + 1,
                               size=len(edges)).astype(float)
    else:
        costs = rng.uniform(*cost_range, size=(n, k))
        weights = rng.uniform(*weight_range, size=len(edges))
    return Instance(costs, edges, weights)


def planted_instance(n: int, k: int, rng: np.random.Generator, edges=None,
                     edge_prob: float = 0.5, gap: float = 1.0, noise: float = 0.5,
                     weight_range=(0.2, 1.0)):
    """Random instance biased towards a random planted labeling.

    Returns ``(instance, planted_labeling)``.  Larger ``gap`` relative to the
    weights makes expansion stability of the planted labeling more likely.
    """
    if edges is None:
        edges = random_graph_edges(n, edge_prob, rng)
    edges = np.asarray(edges).reshape(-1, 2)
    x = rng.integers(0, k, size=n)
    costs = gap + noise * rng.random((n, k))
    costs[np.arange(n), x] = noise * rng.random(n)
    weights = rng.uniform(*weight_range, size=len(edges))
    return Instance(costs, edges, weights), x


def block_model_instance(x_star, edges, psi: float, w_in: float = 2.0,
                         w_out: float = 0.5, slack: float = 0.1) -> Instance:
    """Block-structured instance that is (2,1,psi)-expansion stable at ``x_star``.

    Weight ``w_in`` inside clusters and ``w_out`` across.  The planted label
    costs 1 and every other label ``1 + psi + deg(u) * w_out + slack``, so
    any node that moves loses more than it can recover from the cross
    edges it uncuts.
    """
    x_star = np.asarray(x_star)
    k = max(int(x_star.max()) + 1, 2)
    n = len(x_star)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    same = x_star[edges[:, 0]] == x_star[edges[:, 1]]
    cross_deg = np.bincount(edges[~same].ravel(), minlength=n)
    costs = np.repeat((1.0 + psi + cross_deg * w_out + slack)[:, None], k, axis=1)
    costs[np.arange(n), x_star] = 1.0
    return Instance(costs, edges, np.where(same, w_in, w_out))
