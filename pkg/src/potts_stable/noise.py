"""Noisy instances around a latent stable instance, and randomized roundings.

Node noise is normal.  Edge noise is a normal truncated below at ``-w(u,v)``
whose location is shifted so that the truncated mean is exactly zero; the
support bound is enforced by rejection.  A fraction ``rho`` of the nodes
(all their labels) and ``eta`` of the edges are perturbed, chosen by seeded
sampling without replacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .config import TOL
from .core import Instance, as_labeling, one_hot
from .locallp import FractionalSolution, recovery_error, solve_local_lp

MAX_REJECTION_DRAWS = 10**6
EXHAUSTIVE_NK = 20


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float | np.ndarray = 0.0   # node-label noise scale, scalar or (n, k)
    gamma: float | np.ndarray = 0.0   # edge noise scale, scalar or (m,)
    rho: float = 1.0                  # fraction of perturbed nodes
    eta: float = 1.0                  # fraction of perturbed edges
    family: str = "truncnormal"
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.rho <= 1.0 and 0.0 <= self.eta <= 1.0):
            raise NoiseError("activation fractions must lie in [0, 1]")
        if np.any(np.asarray(self.sigma) < 0) or np.any(np.asarray(self.gamma) < 0):
            raise NoiseError("noise scales must be non-negative")
        if self.family != "truncnormal":
            raise NoiseError(f"unsupported noise family {self.family!r}")

    def to_dict(self) -> dict:
        def conv(v):
            return np.asarray(v).tolist()
        return {"sigma": conv(self.sigma), "gamma": conv(self.gamma), "rho": self.rho,
                "eta": self.eta, "family": self.family, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        sig = d.get("sigma", 0.0)
        gam = d.get("gamma", 0.0)
        return cls(sigma=np.asarray(sig, float) if isinstance(sig, list) else float(sig),
                   gamma=np.asarray(gam, float) if isinstance(gam, list) else float(gam),
                   rho=float(d.get("rho", 1.0)), eta=float(d.get("eta", 1.0)),
                   family=d.get("family", "truncnormal"), seed=int(d.get("seed", 0)))


@dataclass(frozen=True, eq=False)
class NoiseSample:
    instance: Instance
    node_active: np.ndarray    # (n,) bool
    edge_active: np.ndarray    # (m,) bool
    sigma_eff: np.ndarray      # (n, k), zero where inactive
    gamma_eff: np.ndarray      # (m,)
    edge_location: np.ndarray  # parent-normal location per edge
    edge_mean_bias: np.ndarray  # analytic mean of the edge noise after recentering
    extra: dict = field(default_factory=dict)


def truncated_mean(loc, scale, lower):
    """Mean of N(loc, scale^2) conditioned on being above ``lower`` (broadcasts)."""
    loc, scale, lower = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (loc, scale, lower)))
    safe = np.where(scale > 0, scale, 1.0)
    a = (lower - loc) / safe
    mills = np.exp(-0.5 * a * a - 0.5 * np.log(2 * np.pi) - special.log_ndtr(-a))
    out = np.where(scale > 0, loc + scale * mills, loc)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def centered_location(scale: float, lower: float) -> float:
    """Location ``mu`` with zero truncated mean on ``(lower, inf)``, ``lower < 0``."""
    if scale == 0.0:
        return 0.0
    if lower >= 0:
        raise NoiseError("truncation point must be negative")
    g = lambda mu: truncated_mean(mu, scale, lower)
    if g(0.0) <= 0.0:
        return 0.0
    lo = -scale
    for _ in range(200):
        if g(lo) < 0.0:
            break
        lo *= 2.0
    else:
        raise NoiseError("could not bracket the recentering shift")
    return float(optimize.brentq(g, lo, 0.0, xtol=1e-14 * (1.0 + scale), rtol=1e-15, maxiter=500))


def _broadcast(v, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(v, dtype=float), shape).copy()


def _active_mask(count: int, frac: float, rng) -> np.ndarray:
    mask = np.zeros(count, dtype=bool)
    chosen = rng.choice(count, size=int(np.rint(frac * count)), replace=False) if count else []
    mask[chosen] = True
    return mask


def sample_noisy(latent: Instance, spec: NoiseSpec, rng: np.random.Generator | None = None) -> NoiseSample:
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    n, k, m = latent.n, latent.k, latent.m
    sigma = _broadcast(spec.sigma, (n, k))
    gamma = _broadcast(spec.gamma, (m,))
    node_active = _active_mask(n, spec.rho, rng)
    edge_active = _active_mask(m, spec.eta, rng)
    sigma_eff = np.where(node_active[:, None], sigma, 0.0)
    gamma_eff = np.where(edge_active, gamma, 0.0)

    costs = latent.costs + rng.standard_normal((n, k)) * sigma_eff
    loc = np.zeros(m)
    bias = np.zeros(m)
    noise = np.zeros(m)
    act = np.flatnonzero(gamma_eff > 0)
    for e in act:
        loc[e] = centered_location(float(gamma_eff[e]), float(-latent.weights[e]))
    bias[act] = truncated_mean(loc[act], gamma_eff[act], -latent.weights[act])
    noise[act] = _rejection_draw(loc[act], gamma_eff[act], -latent.weights[act], rng)
    weights = latent.weights + noise
    inst = Instance(costs, latent.edges, weights)
    return NoiseSample(inst, node_active, edge_active, sigma_eff, gamma_eff, loc, bias)


def _rejection_draw(loc, scale, lower, rng) -> np.ndarray:
    """One draw per entry of N(loc, scale^2) conditioned on ``> lower``."""
    out = np.empty(len(loc))
    pending = np.arange(len(loc))
    drawn = 0
    while len(pending):
        if drawn >= MAX_REJECTION_DRAWS:
            e = pending[0]
            raise NoiseError(f"rejection sampler exceeded {MAX_REJECTION_DRAWS} draws "
                             f"(scale {scale[e]:g}, bound {lower[e]:g})")
        z = loc[pending] + scale[pending] * rng.standard_normal(len(pending))
        ok = z > lower[pending]
        out[pending[ok]] = z[ok]
        pending = pending[~ok]
        drawn += 1
    return out


def sample_noisy_instance(latent: Instance, spec: NoiseSpec) -> Instance:
    """Observed instance drawn from the generative model (deterministic in ``spec.seed``)."""
    return sample_noisy(latent, spec).instance


# ---------------------------------------------------------------------------
# roundings

def _nodes(x) -> np.ndarray:
    return x.node if isinstance(x, FractionalSolution) else np.asarray(x, dtype=float)


def eps_close_point(x, xbar, eps: float) -> np.ndarray:
    """Node part of ``eps * x + (1 - eps) * phi(xbar)``."""
    node = _nodes(x)
    return eps * node + (1.0 - eps) * one_hot(as_labeling(xbar), node.shape[1])


def eps_close_round_batch(x, xbar, eps: float, rng: np.random.Generator, size: int):
    """``size`` independent epsilon-close roundings.

    Returns ``(labelings, alphas)`` with shapes ``(size, n)`` and ``(size,)``.
    """
    node = _nodes(x)
    k = node.shape[1]
    if not 0.0 < eps < 1.0 / k:
        raise ValueError(f"eps must lie in (0, 1/k) = (0, {1.0 / k:g})")
    xbar = as_labeling(xbar)
    xp = eps_close_point(node, xbar, eps)
    alpha = rng.integers(0, k, size=size)
    r = rng.uniform(0.0, 1.0 / k, size=size)
    take = xp[:, alpha].T > r[:, None]
    out = np.where(take, alpha[:, None], xbar[None, :])
    return out, alpha


def eps_close_round(x, xbar, eps: float, seed=None) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out, _ = eps_close_round_batch(x, xbar, eps, rng, 1)
    return out[0]


def r_round_batch(node_marginals, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` R-roundings; shape ``(size, n, k)`` of 0/1 entries."""
    node = np.asarray(node_marginals, dtype=float)
    r = rng.uniform(0.0, 1.0, size=(size, 1, node.shape[1]))
    return (node[None] > r).astype(np.int8)


def r_round(node_marginals, seed=None) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return r_round_batch(node_marginals, rng, 1)[0]


# ---------------------------------------------------------------------------
# Monte Carlo validation

def dswhp_bound(sigma_eff, gamma_eff, n: int, k: int, c_const: float = 1.0) -> float:
    """``c sqrt(nk) sqrt(sum sigma^2 + (k^2/4) sum gamma^2)``."""
    return c_const * np.sqrt(n * k) * np.sqrt(np.sum(np.square(sigma_eff))
                                              + (k * k / 4.0) * np.sum(np.square(gamma_eff)))


def apmap_bound(sigma_eff, gamma_eff, n: int, k: int, psi: float, c_const: float = 1.0) -> float:
    """``(2/psi) c sqrt(nk) sqrt(sum sigma^2 + k^2 sum gamma^2)``."""
    return (2.0 / psi) * c_const * np.sqrt(n * k) * np.sqrt(np.sum(np.square(sigma_eff))
                                                            + k * k * np.sum(np.square(gamma_eff)))


def binary_deviation_sup(dc: np.ndarray, dw: np.ndarray, edges: np.ndarray) -> float:
    """Exact ``max |sum dc x + sum dw d(x)|`` over all ``x in {0,1}^{n x k}``."""
    n, k = dc.shape
    nk = n * k
    if nk > EXHAUSTIVE_NK:
        raise NoiseError(f"nk = {nk} exceeds the exhaustive limit {EXHAUSTIVE_NK}")
    flat = dc.ravel()
    shifts = np.arange(nk, dtype=np.int64)
    best = 0.0
    chunk = 1 << 16
    for start in range(0, 1 << nk, chunk):
        codes = np.arange(start, min(1 << nk, start + chunk), dtype=np.int64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int8)
        val = bits @ flat
        if len(edges):
            b3 = bits.reshape(len(codes), n, k)
            sep = 0.5 * (b3[:, edges[:, 0], :] != b3[:, edges[:, 1], :]).sum(axis=2)
            val = val + sep @ dw
        best = max(best, float(np.abs(val).max()))
    return best


def _trial_rngs(seed: int, trials: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _summary(values: np.ndarray) -> dict:
    if len(values) == 0:
        return {}
    q = np.quantile(values, [0.0, 0.5, 0.9, 1.0])
    return {"min": float(q[0]), "median": float(q[1]), "q90": float(q[2]), "max": float(q[3]),
            "mean": float(values.mean())}


def validate_dswhp(latent: Instance, spec: NoiseSpec, trials: int = 100,
                   c_const: float = 1.0) -> dict:
    """Empirical exceedance rate of the deviation bound (k^2/4 constant)."""
    if latent.n * latent.k > EXHAUSTIVE_NK:
        raise NoiseError(f"nk = {latent.n * latent.k} exceeds {EXHAUSTIVE_NK}")
    sups, bounds = [], []
    for rng in _trial_rngs(spec.seed, trials):
        s = sample_noisy(latent, spec, rng)
        dc = s.instance.costs - latent.costs
        dw = s.instance.weights - latent.weights
        sups.append(binary_deviation_sup(dc, dw, latent.edges))
        bounds.append(dswhp_bound(s.sigma_eff, s.gamma_eff, latent.n, latent.k, c_const))
    sups, bounds = np.array(sups), np.array(bounds)
    exceed = sups > bounds + TOL.flow
    return {"trials": trials, "c": c_const, "edge_constant": "k^2/4",
            "exceedances": int(exceed.sum()), "exceedance_rate": float(exceed.mean()),
            "bound": float(bounds.max(initial=0.0)), "sup": _summary(sups)}


def validate_apmap(latent: Instance, spec: NoiseSpec, psi: float, trials: int = 100,
                   c_const: float = 1.0, xbar=None, method: str = "highs") -> dict:
    """Empirical exceedance rate of the LP recovery bound (k^2 constant)."""
    from .core import brute_force_map
    from .stability import UNSTABLE, check_expansion_stability

    if psi <= 0:
        raise ValueError("psi must be positive")
    if xbar is None:
        xbar, _ = brute_force_map(latent)
    xbar = as_labeling(xbar, latent)
    report = check_expansion_stability(latent, xbar, psi)
    if report.verdict == UNSTABLE:
        raise NoiseError(f"latent instance is not (2,1,{psi:g})-expansion stable "
                         f"(margin {report.margin:.3g})")
    errors, bounds = [], []
    for rng in _trial_rngs(spec.seed, trials):
        s = sample_noisy(latent, spec, rng)
        xhat = solve_local_lp(s.instance, method=method)
        errors.append(recovery_error(xhat, xbar))
        bounds.append(apmap_bound(s.sigma_eff, s.gamma_eff, latent.n, latent.k, psi, c_const))
    errors, bounds = np.array(errors), np.array(bounds)
    exceed = errors > bounds + TOL.flow
    return {"trials": trials, "c": c_const, "psi": psi, "edge_constant": "k^2",
            "latent_verdict": report.verdict, "latent_margin": report.margin,
            "exceedances": int(exceed.sum()), "exceedance_rate": float(exceed.mean()),
            "bound": float(bounds.max(initial=0.0)), "error": _summary(errors)}
