import io

import numpy as np
import pytest

from potts_stable.lp import (EQ, GE, LE, LinearProgram, LpBuilder, LpSizeError, read_mps, solve,
                             verify_solution, write_mps)

from oracles import lp_vertex_enumeration

METHODS = ["highs", "simplex"]


def random_lp(rng):
    n = int(rng.integers(1, 9))
    m = int(rng.integers(1, 9))
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    rel = rng.choice([LE, EQ, GE], size=m, p=[0.6, 0.15, 0.25])
    x0 = rng.integers(0, 4, size=n)
    b = A @ x0 + np.where(rel == LE, rng.integers(0, 3, m), np.where(rel == GE, -rng.integers(0, 3, m), 0))
    c = rng.integers(-5, 6, size=n).astype(float)
    lb = np.zeros(n)
    ub = np.full(n, 10.0)
    return LinearProgram(c, A, rel, b, lb, ub)


@pytest.mark.parametrize("method", METHODS)
def test_trivial_lower_bound(method):
    sol = solve(LinearProgram([1.0], [[1.0]], [GE], [3.0], [-np.inf], [np.inf]), method=method)
    assert sol.optimal and sol.x[0] == pytest.approx(3.0) and sol.objective == pytest.approx(3.0)


@pytest.mark.parametrize("method", METHODS)
def test_simplex_edge(method):
    sol = solve(LinearProgram([-1.0, -1.0], [[1.0, 1.0]], [LE], [1.0], [0, 0], [1, 1]), method=method)
    assert sol.objective == pytest.approx(-1.0) and sol.x.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("method", METHODS)
def test_infeasible_and_unbounded(method):
    inf = LinearProgram([1.0], [[1.0], [1.0]], [LE, GE], [1.0, 2.0])
    assert solve(inf, method=method).status == "infeasible"
    unb = LinearProgram([-1.0], [[1.0]], [GE], [0.0])
    assert solve(unb, method=method).status == "unbounded"


@pytest.mark.parametrize("method", METHODS)
def test_random_vs_vertex_enumeration(method):
    rng = np.random.default_rng(10)
    for _ in range(50):
        lp = random_lp(rng)
        sol = solve(lp, method=method)
        want = lp_vertex_enumeration(lp.cost, lp.A.toarray(), lp.rel, lp.rhs, lp.lb, lp.ub)
        if want is None:
            assert sol.status == "infeasible"
            continue
        assert sol.optimal
        assert sol.objective == pytest.approx(want, abs=1e-8)
        chk = sol.checks
        assert chk["primal_infeasibility"] <= 1e-7 and chk["dual_infeasibility"] <= 1e-7
        assert chk["complementarity"] <= 1e-6
        assert chk["duality_gap"] <= 1e-6 * (1 + abs(sol.objective))


def test_backends_agree_and_deterministic():
    rng = np.random.default_rng(11)
    for _ in range(30):
        lp = random_lp(rng)
        a, b = solve(lp, method="simplex"), solve(lp, method="simplex")
        assert a.status == b.status
        if a.optimal:
            assert np.array_equal(a.x, b.x)
            assert solve(lp).objective == pytest.approx(a.objective, abs=1e-8)


def test_weak_duality_sandwich():
    rng = np.random.default_rng(12)
    done = 0
    while done < 20:
        n, m = int(rng.integers(2, 6)), int(rng.integers(1, 6))
        A = rng.uniform(0.1, 2, size=(m, n))
        lp = LinearProgram(rng.uniform(0.5, 2, n), A, [GE] * m, rng.uniform(0.5, 2, m))
        p = solve(lp)
        d = solve(lp.dual())
        if not p.optimal:
            continue
        assert d.optimal and d.objective == pytest.approx(-p.objective, abs=1e-8)
        done += 1


@pytest.mark.parametrize("method", METHODS)
def test_cost_scaling(method):
    rng = np.random.default_rng(13)
    for _ in range(20):
        lp = random_lp(rng)
        sol = solve(lp, method=method)
        if not sol.optimal:
            continue
        s = float(rng.uniform(0.5, 4))
        scaled = LinearProgram(s * lp.cost, lp.A, lp.rel, lp.rhs, lp.lb, lp.ub)
        sol2 = solve(scaled, method=method)
        assert sol2.objective == pytest.approx(s * sol.objective, abs=1e-8)
        if method == "simplex":
            assert np.allclose(sol2.x, sol.x, atol=1e-9)


def test_duals_are_sensitivities():
    lp = LinearProgram([1.0, 2.0], [[1.0, 1.0], [1.0, -1.0]], [GE, LE], [2.0, 1.0])
    for method in METHODS:
        sol = solve(lp, method=method)
        h = 1e-4
        bumped = LinearProgram(lp.cost, lp.A, lp.rel, lp.rhs + [h, 0.0])
        assert (solve(bumped).objective - sol.objective) / h == pytest.approx(sol.y[0], abs=1e-6)


def test_verify_rejects_wrong_point():
    lp = LinearProgram([1.0], [[1.0]], [GE], [3.0])
    chk = verify_solution(lp, np.array([2.0]), np.array([1.0]))
    assert not chk["ok"]


def test_size_guard():
    n = 200_000
    lp = LinearProgram(np.zeros(n), np.ones((1, n)), [LE], [1.0])
    with pytest.raises(LpSizeError):
        solve(lp)


def test_builder_roundtrip_and_mps():
    b = LpBuilder()
    x = b.add_vars(3, lb=[0, -1, 0], ub=[4, 5, np.inf], cost=[1.0, -2.0, 0.5])
    b.add_row(x[:2], [1.0, 1.0], "<=", 3.0)
    b.add_rows([0, 0, 1], [0, 2, 1], [2.0, -1.0, 1.0], ">=", [1.0, -0.5])
    b.add_row([2], [1.0], "==", 0.25)
    lp = b.build()
    assert (lp.n_vars, lp.n_rows, lp.nnz) == (3, 4, 6)
    buf = io.StringIO()
    write_mps(lp, buf)
    text = buf.getvalue()
    for line in text.splitlines():
        if line.startswith(" "):
            assert len(line) <= 61
    back = read_mps(io.StringIO(text))
    assert np.array_equal(back.A.toarray(), lp.A.toarray())
    assert np.array_equal(back.rel, lp.rel) and np.allclose(back.rhs, lp.rhs)
    assert np.array_equal(back.lb, lp.lb) and np.array_equal(back.ub, lp.ub)
    assert solve(back).objective == pytest.approx(solve(lp).objective)
    buf2 = io.StringIO()
    write_mps(back, buf2)
    assert buf2.getvalue() == text


def test_bad_inputs():
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[np.nan]], [LE], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0]], [LE], [1.0], [2.0], [1.0])
