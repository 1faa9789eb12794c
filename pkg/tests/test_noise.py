import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from potts_stable.core import Instance, brute_force_map, one_hot
from potts_stable.instances import triangle_instance, grid_edges, random_instance
from potts_stable.locallp import metric_objective, random_lstar_point
from potts_stable.noise import (NoiseError, NoiseSpec, apmap_bound, binary_deviation_sup,
                                centered_location, dswhp_bound, eps_close_point,
                                eps_close_round, eps_close_round_batch, r_round, r_round_batch,
                                sample_noisy, sample_noisy_instance, truncated_mean,
                                validate_apmap, validate_dswhp)
from potts_stable.core import ObjectiveVector
from potts_stable.repair import fallback_stable_instance

from oracles import binary_sup

N_MC = 200_000


def grid_instance(rows, cols, k, seed):
    rng = np.random.default_rng(seed)
    return random_instance(rows * cols, k, rng, edges=grid_edges(rows, cols))


# --- sampler ---------------------------------------------------------------

def test_zero_noise_identity():
    inst = grid_instance(2, 3, 3, 0)
    out = sample_noisy_instance(inst, NoiseSpec(seed=5))
    assert np.array_equal(out.costs, inst.costs)
    assert np.array_equal(out.weights, inst.weights)


def test_determinism():
    inst = grid_instance(3, 3, 2, 1)
    spec = NoiseSpec(sigma=0.5, gamma=0.3, rho=0.5, eta=0.5, seed=9)
    a, b = sample_noisy_instance(inst, spec), sample_noisy_instance(inst, spec)
    assert np.array_equal(a.costs, b.costs) and np.array_equal(a.weights, b.weights)
    c = sample_noisy_instance(inst, NoiseSpec(sigma=0.5, gamma=0.3, rho=0.5, eta=0.5, seed=10))
    assert not np.array_equal(a.costs, c.costs)


def test_activation_counts():
    inst = grid_instance(4, 4, 2, 2)
    s = sample_noisy(inst, NoiseSpec(sigma=1.0, gamma=0.1, rho=0.25, eta=0.5, seed=3))
    assert s.node_active.sum() == 4
    assert s.edge_active.sum() == inst.m // 2
    untouched = ~s.node_active
    assert np.array_equal(s.instance.costs[untouched], inst.costs[untouched])
    assert np.array_equal(s.instance.weights[~s.edge_active], inst.weights[~s.edge_active])


def test_node_noise_mean():
    sigma = 0.7
    inst = Instance(np.zeros((N_MC // 2, 2)), np.zeros((0, 2), int), [])
    d = sample_noisy_instance(inst, NoiseSpec(sigma=sigma, seed=4)).costs - inst.costs
    assert abs(d.mean()) <= 4 * sigma / np.sqrt(d.size)
    assert d.std() == pytest.approx(sigma, rel=0.01)


def test_edge_noise_recentered_mean_and_support():
    w, gamma = 0.5, 1.0
    n = 2001
    edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
    inst = Instance(np.zeros((n, 2)), edges, np.full(n - 1, w))
    draws = []
    for seed in range(50):
        s = sample_noisy(inst, NoiseSpec(gamma=gamma, seed=seed))
        assert np.all(s.instance.weights > 0)
        assert np.all(np.abs(s.edge_mean_bias) < 1e-9)
        draws.append(s.instance.weights - w)
    draws = np.concatenate(draws)
    # truncated distribution has variance below gamma^2
    assert abs(draws.mean()) <= 4 * gamma / np.sqrt(draws.size)


def test_naive_truncation_is_biased():
    assert truncated_mean(0.0, 1.0, -0.5) > 0.3
    mu = centered_location(1.0, -0.5)
    assert mu < 0
    assert truncated_mean(mu, 1.0, -0.5) == pytest.approx(0.0, abs=1e-10)
    assert centered_location(0.01, -5.0) == 0.0 or abs(centered_location(0.01, -5.0)) < 1e-12


def test_spec_validation_and_roundtrip():
    with pytest.raises(NoiseError):
        NoiseSpec(rho=1.5)
    with pytest.raises(NoiseError):
        NoiseSpec(sigma=-1.0)
    with pytest.raises(NoiseError):
        NoiseSpec(family="laplace")
    spec = NoiseSpec(sigma=0.2, gamma=0.1, rho=0.5, eta=0.25, seed=7)
    assert NoiseSpec.from_dict(spec.to_dict()) == spec


# --- epsilon-close rounding -----------------------------------------------

def test_eps_close_identity():
    xbar = np.array([0, 2, 1, 1])
    out, _ = eps_close_round_batch(one_hot(xbar, 3), xbar, 0.2, np.random.default_rng(0), 1000)
    assert np.all(out == xbar)


def test_eps_range():
    x = one_hot([0, 1], 2)
    for eps in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(ValueError):
            eps_close_round(x, [0, 1], eps, seed=0)


def _instance_and_point(seed, n=5, k=3):
    rng = np.random.default_rng(seed)
    inst = random_instance(n, k, rng, edges=np.array([[0, 1], [1, 2], [2, 3], [3, 4], [0, 2], [1, 4]]))
    x = random_lstar_point(inst, rng, concentration=0.7)
    xbar = np.array([0, 0, 1, 1, 2])
    return inst, x, xbar


def test_outputs_are_expansions():
    inst, x, xbar = _instance_and_point(1)
    out, alpha = eps_close_round_batch(x, xbar, 0.3, np.random.default_rng(2), 5000)
    ok = (out == xbar[None]) | (out == alpha[:, None])
    assert ok.all()


def test_label_probabilities():
    inst, x, xbar = _instance_and_point(3)
    eps = 0.5 / inst.k
    out, _ = eps_close_round_batch(x, xbar, eps, np.random.default_rng(4), N_MC)
    xp = eps_close_point(x, xbar, eps)
    freq = np.stack([(out == i).mean(axis=0) for i in range(inst.k)], axis=1)
    assert np.abs(freq - xp).max() <= 0.01


def test_edge_guarantees():
    inst, x, xbar = _instance_and_point(5)
    eps = 0.5 / inst.k
    out, _ = eps_close_round_batch(x, xbar, eps, np.random.default_rng(6), N_MC)
    xp = eps_close_point(x, xbar, eps)
    for u, v in inst.edges:
        d = 0.5 * np.abs(xp[u] - xp[v]).sum()
        if xbar[u] == xbar[v]:
            assert (out[:, u] != out[:, v]).mean() <= 2 * d + 0.01
        else:
            assert (out[:, u] == out[:, v]).mean() == pytest.approx(1 - d, abs=0.01)


def _potts_batch(costs, edges, weights, labels):
    n = costs.shape[0]
    unary = costs[np.arange(n)[None, :], labels].sum(axis=1)
    cut = labels[:, edges[:, 0]] != labels[:, edges[:, 1]]
    return unary + cut @ weights


def test_changed_nodes_and_adversarial_gap():
    inst, x, xbar = _instance_and_point(7)
    eps = 0.5 / inst.k
    out, _ = eps_close_round_batch(x, xbar, eps, np.random.default_rng(8), N_MC)
    # expected number of changed nodes
    bh = (out != xbar[None]).sum(axis=1).mean()
    expect = eps * 0.5 * np.abs(x.node - one_hot(xbar, inst.k)).sum()
    assert bh == pytest.approx(expect, rel=0.01)
    # adversarial-weight objective gap
    uncut = xbar[inst.edges[:, 0]] == xbar[inst.edges[:, 1]]
    w_adv = np.where(uncut, inst.weights / 2, inst.weights)
    gaps = _potts_batch(inst.costs, inst.edges, w_adv, out) - _potts_batch(
        inst.costs, inst.edges, w_adv, xbar[None])
    theta = ObjectiveVector.from_instance(inst)
    rhs = eps * (metric_objective(theta, x.node, inst.edges) - theta.energy(inst.edges, xbar))
    assert gaps.mean() <= rhs + 3 * gaps.std(ddof=1) / np.sqrt(N_MC)


# --- R rounding ------------------------------------------------------------

def test_r_round_integral_identity():
    x = one_hot([1, 0, 2], 3)
    assert np.array_equal(r_round(x, seed=0), x)


def test_r_round_half():
    node = np.full((4, 3), 0.5)
    out = r_round_batch(node, np.random.default_rng(9), N_MC)
    assert np.abs(out.mean(axis=0) - 0.5).max() <= 0.01
    assert np.all(out == out[:, :1, :])     # same threshold across nodes


def test_r_round_separation():
    rng = np.random.default_rng(10)
    node = rng.dirichlet(np.ones(3), size=4)
    out = r_round_batch(node, np.random.default_rng(11), N_MC)
    for u in range(4):
        for v in range(u + 1, 4):
            emp = (out[:, u, :] != out[:, v, :]).mean(axis=0)
            assert np.abs(emp - np.abs(node[u] - node[v])).max() <= 0.01


# --- deviation and validation ---------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_binary_sup_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(1, 4)), int(rng.integers(2, 4))
    edges = np.array([(u, v) for u in range(n) for v in range(u + 1, n)], dtype=np.int64).reshape(-1, 2)
    dc = rng.normal(size=(n, k))
    dw = rng.normal(size=len(edges))
    assert binary_deviation_sup(dc, dw, edges) == pytest.approx(binary_sup(dc, dw, edges), abs=1e-12)


def test_bound_formulas():
    assert dswhp_bound(np.zeros((2, 2)), np.zeros(1), 2, 2) == 0.0
    assert dswhp_bound(np.full((1, 2), 1.0), np.zeros(0), 1, 2) == pytest.approx(2.0)
    assert dswhp_bound(np.zeros((1, 2)), np.ones(1), 1, 2) == pytest.approx(np.sqrt(2))
    assert apmap_bound(np.zeros((1, 2)), np.ones(1), 1, 2, psi=1.0) == pytest.approx(4 * np.sqrt(2))


def test_validate_zero_noise():
    latent = triangle_instance()
    r = validate_dswhp(latent, NoiseSpec(seed=0), trials=5)
    assert r["exceedances"] == 0 and r["sup"]["max"] == 0.0
    a = validate_apmap(latent, NoiseSpec(seed=0), psi=0.05, trials=5)
    assert a["exceedances"] == 0 and a["error"]["max"] == pytest.approx(0.0, abs=1e-9)


def test_validate_dswhp_grid():
    latent = grid_instance(2, 2, 2, 12)
    r = validate_dswhp(latent, NoiseSpec(sigma=0.1, gamma=0.1, seed=13), trials=100)
    assert r["exceedance_rate"] <= 0.05


def test_validate_dswhp_triangle_edge_noise():
    latent = triangle_instance().replace(costs=triangle_instance().costs[:, :2])
    r = validate_dswhp(latent, NoiseSpec(sigma=0.0, gamma=0.05, seed=14), trials=100)
    assert r["exceedance_rate"] <= 0.05


def test_validate_dswhp_size_guard():
    with pytest.raises(NoiseError):
        validate_dswhp(grid_instance(3, 3, 3, 0), NoiseSpec(), trials=1)


def test_validate_apmap_triangle():
    r = validate_apmap(triangle_instance(), NoiseSpec(sigma=0.01, gamma=0.01, seed=15), psi=0.05, trials=100)
    assert r["exceedances"] == 0
    assert r["bound"] > 3


def test_validate_apmap_fallback_grid():
    rng = np.random.default_rng(16)
    obs = random_instance(9, 2, rng, edges=grid_edges(3, 3))
    obs = obs.replace(costs=obs.costs + 0.5)    # keeps the fallback costs away from the clamp
    target, _ = brute_force_map(obs)
    latent = fallback_stable_instance(obs, target, 0.5).instance
    r = validate_apmap(latent, NoiseSpec(sigma=0.02, gamma=0.02, seed=17), psi=0.5, trials=100,
                       xbar=target)
    assert r["exceedance_rate"] <= 0.05
    assert set(r["error"]) >= {"median", "q90", "max"}


def test_validate_apmap_rejects_unstable():
    with pytest.raises(NoiseError):
        validate_apmap(triangle_instance(), NoiseSpec(), psi=0.2, trials=1)
