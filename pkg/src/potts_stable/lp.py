"""Sparse general-form linear programs with primal and dual solutions.

A :class:`LinearProgram` is::

    minimize    c @ x
    subject to  A[i] @ x  (<= | == | >=)  b[i]
                lb <= x <= ub           (infinite bounds allowed)

Two backends are available.  ``"simplex"`` is the in-repo bounded revised
simplex (Dantzig pricing, Bland fallback on long degenerate streaks,
product-form basis updates with periodic refactorization).  ``"highs"``
calls :func:`scipy.optimize.linprog` and is the default for anything
beyond toy size.  Both report duals with the same convention
(``y[i] = d obj / d b[i]``) and both go through the same optimality
verification, so a failed certificate becomes ``"numerical-failure"``
rather than a wrong ``"optimal"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .config import TOL

LE, EQ, GE = -1, 0, 1
MAX_NONZEROS = 150_000
_REL_CODES = {"<=": LE, "<": LE, "L": LE, "==": EQ, "=": EQ, "E": EQ, ">=": GE, ">": GE, "G": GE}


class LpSizeError(ValueError):
    """Raised when a program exceeds the desk-scale nonzero budget."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    cost: np.ndarray
    A: sp.csr_matrix
    rel: np.ndarray   # LE / EQ / GE per row
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __init__(self, cost, A, rel, rhs, lb=None, ub=None):
        cost = np.asarray(cost, dtype=float).ravel()
        n = len(cost)
        A = sp.csr_matrix(A, dtype=float)
        if A.shape[1] != n:
            if A.shape[0] == 0:
                A = sp.csr_matrix((0, n))
            else:
                raise ValueError(f"A has {A.shape[1]} columns, cost has {n}")
        A.sum_duplicates()
        rel = np.array([_REL_CODES[r] if isinstance(r, str) else int(r) for r in rel],
                       dtype=np.int8)
        rhs = np.asarray(rhs, dtype=float).ravel()
        if not (len(rel) == len(rhs) == A.shape[0]):
            raise ValueError("row count mismatch between A, rel and rhs")
        if len(rel) and not np.isin(rel, (LE, EQ, GE)).all():
            raise ValueError("unknown row relation")
        lb = np.zeros(n) if lb is None else np.broadcast_to(np.asarray(lb, float), (n,)).copy()
        ub = np.full(n, np.inf) if ub is None else np.broadcast_to(np.asarray(ub, float), (n,)).copy()
        for name, arr in (("cost", cost), ("A", A.data), ("rhs", rhs)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb > ub):
            raise ValueError("invalid variable bounds")
        if np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise ValueError("invalid variable bounds")
        for name, val in (("cost", cost), ("A", A), ("rel", rel), ("rhs", rhs),
                          ("lb", lb), ("ub", ub)):
            object.__setattr__(self, name, val)

    @property
    def n_vars(self) -> int:
        return len(self.cost)

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.A.nnz)

    def objective(self, x) -> float:
        return float(self.cost @ x)

    def residuals(self, x) -> np.ndarray:
        """Per-row violation (>= 0), scaled by the row's infinity norm."""
        ax = self.A @ x
        viol = np.where(self.rel == LE, ax - self.rhs,
                        np.where(self.rel == GE, self.rhs - ax, np.abs(ax - self.rhs)))
        return np.maximum(viol, 0.0) / _row_scale(self.A)

    def dual(self) -> "LinearProgram":
        """Dual program (as a minimization) of a program with ``x >= 0``.

        Only defined when every lower bound is 0 and every upper bound is
        infinite; used by the weak-duality tests.
        """
        if np.any(self.lb != 0) or np.any(np.isfinite(self.ub)):
            raise ValueError("dual() needs x >= 0 without upper bounds")
        # max b@y  s.t. A^T y <= c, y_i <= 0 for LE rows, >= 0 for GE rows
        lb = np.where(self.rel == GE, 0.0, -np.inf)
        ub = np.where(self.rel == LE, 0.0, np.inf)
        return LinearProgram(-self.rhs, self.A.T.tocsr(), [LE] * self.n_vars, self.cost, lb, ub)


class LpBuilder:
    """Incremental construction of a :class:`LinearProgram`."""

    def __init__(self):
        self._cost: list[float] = []
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._rel: list[int] = []
        self._rhs: list[float] = []

    @property
    def n_vars(self) -> int:
        return len(self._cost)

    @property
    def n_rows(self) -> int:
        return len(self._rhs)

    def add_vars(self, count: int, lb=0.0, ub=np.inf, cost=0.0) -> np.ndarray:
        start = len(self._cost)
        self._cost.extend(np.broadcast_to(np.asarray(cost, float), (count,)).tolist())
        self._lb.extend(np.broadcast_to(np.asarray(lb, float), (count,)).tolist())
        self._ub.extend(np.broadcast_to(np.asarray(ub, float), (count,)).tolist())
        return np.arange(start, start + count)

    def add_row(self, cols, vals, rel, rhs: float) -> int:
        i = len(self._rhs)
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(vals, dtype=float), cols.shape)
        self._rows.extend([i] * len(cols))
        self._cols.extend(cols.tolist())
        self._vals.extend(vals.tolist())
        self._rel.append(_REL_CODES[rel] if isinstance(rel, str) else int(rel))
        self._rhs.append(float(rhs))
        return i

    def add_rows(self, row_ids, cols, vals, rel, rhs) -> np.ndarray:
        """Bulk rows from COO triplets; ``row_ids`` are local (0-based)."""
        rhs = np.asarray(rhs, dtype=float).ravel()
        start = len(self._rhs)
        self._rows.extend((np.asarray(row_ids, dtype=np.int64) + start).tolist())
        self._cols.extend(np.asarray(cols, dtype=np.int64).tolist())
        self._vals.extend(np.broadcast_to(np.asarray(vals, float), np.shape(cols)).tolist())
        code = _REL_CODES[rel] if isinstance(rel, str) else int(rel)
        self._rel.extend([code] * len(rhs))
        self._rhs.extend(rhs.tolist())
        return np.arange(start, start + len(rhs))

    def build(self) -> LinearProgram:
        n, r = len(self._cost), len(self._rhs)
        A = sp.csr_matrix((self._vals, (self._rows, self._cols)), shape=(r, n))
        return LinearProgram(self._cost, A, self._rel, self._rhs, self._lb, self._ub)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str                  # optimal | infeasible | unbounded | numerical-failure
    x: np.ndarray | None = None
    y: np.ndarray | None = None  # d obj / d rhs
    reduced_costs: np.ndarray | None = None
    objective: float = np.nan
    method: str = ""
    iterations: int = 0
    message: str = ""
    checks: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _row_scale(A: sp.csr_matrix) -> np.ndarray:
    if A.shape[0] == 0:
        return np.ones(0)
    scale = abs(A).max(axis=1).toarray().ravel()
    return np.maximum(scale, 1.0)


def verify_solution(lp: LinearProgram, x, y, tol=TOL) -> dict:
    """Optimality certificate for a primal/dual pair.

    Returns the measured primal infeasibility, dual infeasibility,
    complementarity and relative duality gap, plus ``ok``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    primal = lp.residuals(x)
    bound_viol = np.maximum(lp.lb - x, 0.0) + np.maximum(x - lp.ub, 0.0)
    p_inf = float(max(primal.max(initial=0.0), bound_viol.max(initial=0.0)))

    # dual sign constraints: LE rows y <= 0, GE rows y >= 0
    ysign = np.where(lp.rel == LE, np.maximum(y, 0.0),
                     np.where(lp.rel == GE, np.maximum(-y, 0.0), 0.0))
    d = lp.cost - lp.A.T @ y
    # d_j > 0 needs a finite lower bound, d_j < 0 a finite upper bound
    d_pos = np.where(np.isfinite(lp.lb), np.maximum(d, 0.0), 0.0)
    d_neg = np.where(np.isfinite(lp.ub), np.minimum(d, 0.0), 0.0)
    d_inf_vec = np.abs(d - d_pos - d_neg)
    cscale = 1.0 + np.abs(lp.cost).max(initial=0.0)
    d_inf = float(max(d_inf_vec.max(initial=0.0), ysign.max(initial=0.0))) / cscale

    primal_obj = float(lp.cost @ x)
    lbf = np.where(np.isfinite(lp.lb), lp.lb, 0.0)
    ubf = np.where(np.isfinite(lp.ub), lp.ub, 0.0)
    dual_obj = float(lp.rhs @ y + lbf @ d_pos + ubf @ d_neg)
    gap = abs(primal_obj - dual_obj) / (1.0 + abs(primal_obj))

    slack = lp.A @ x - lp.rhs
    comp = np.concatenate([np.abs(y * slack), np.abs(d_pos * (x - lbf)), np.abs(d_neg * (ubf - x))])
    comp_max = float(comp.max(initial=0.0)) / (1.0 + abs(primal_obj))
    ok = (p_inf <= tol.feasibility and d_inf <= tol.feasibility
          and gap <= tol.duality_gap and comp_max <= tol.complementarity)
    return {"primal_infeasibility": p_inf, "dual_infeasibility": d_inf,
            "complementarity": comp_max, "duality_gap": gap,
            "primal_objective": primal_obj, "dual_objective": dual_obj, "ok": bool(ok)}


def solve(lp: LinearProgram, method: str = "highs", tol=TOL, max_iter: int | None = None,
          check_size: bool = True) -> LpSolution:
    if check_size and lp.nnz > MAX_NONZEROS:
        raise LpSizeError(f"{lp.nnz} nonzeros exceed the limit of {MAX_NONZEROS}")
    if method == "highs":
        return _solve_highs(lp, tol)
    if method == "simplex":
        return RevisedSimplex(lp, tol, max_iter).run()
    raise ValueError(f"unknown LP method {method!r} (use 'highs' or 'simplex')")


def _finish(lp, x, y, method, iters, tol, message="") -> LpSolution:
    checks = verify_solution(lp, x, y, tol)
    d = lp.cost - lp.A.T @ y
    if not checks["ok"]:
        return LpSolution("numerical-failure", x, y, d, float(lp.cost @ x), method, iters,
                          "optimality certificate failed: " + message, checks)
    return LpSolution("optimal", x, y, d, float(lp.cost @ x), method, iters, message, checks)


def _solve_highs(lp: LinearProgram, tol) -> LpSolution:
    from scipy.optimize import linprog

    A = lp.A
    le = lp.rel == LE
    ge = lp.rel == GE
    eq = lp.rel == EQ
    ineq = le | ge
    sign = np.where(ge, -1.0, 1.0)
    A_ub = sp.diags(sign[ineq]) @ A[ineq] if ineq.any() else None
    b_ub = (sign * lp.rhs)[ineq] if ineq.any() else None
    A_eq = A[eq] if eq.any() else None
    b_eq = lp.rhs[eq] if eq.any() else None
    bounds = np.column_stack([np.where(np.isfinite(lp.lb), lp.lb, -np.inf),
                              np.where(np.isfinite(lp.ub), lp.ub, np.inf)])
    res = linprog(lp.cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs", options={"presolve": True, "primal_feasibility_tolerance": 1e-9,
                                           "dual_feasibility_tolerance": 1e-9})
    if res.status == 2:
        return LpSolution("infeasible", method="highs", message=res.message)
    if res.status == 3:
        return LpSolution("unbounded", method="highs", message=res.message)
    if res.status != 0:
        return LpSolution("numerical-failure", method="highs", message=res.message)
    y = np.zeros(lp.n_rows)
    if ineq.any():
        y[ineq] = sign[ineq] * res.ineqlin.marginals
    if eq.any():
        y[eq] = res.eqlin.marginals
    x = np.clip(res.x, lp.lb, lp.ub)
    return _finish(lp, x, y, "highs", int(res.nit), tol, res.message)


# ---------------------------------------------------------------------------
# bounded revised simplex

_AT_LB, _AT_UB, _FREE, _BASIC = 0, 1, 2, 3


class _Basis:
    """LU of the basis matrix plus product-form eta updates."""

    dense_limit = 400
    refactor_every = 64

    def __init__(self, cols: sp.csc_matrix, zero_pivot: float):
        self.m = cols.shape[0]
        self.zero_pivot = zero_pivot
        self.etas: list[tuple[int, np.ndarray]] = []
        if self.m <= self.dense_limit:
            self.lu = sla.lu_factor(cols.toarray(), check_finite=False)
            self.sparse = False
        else:
            self.lu = spla.splu(cols.tocsc(), permc_spec="COLAMD")
            self.sparse = True
        self._check()

    def _check(self):
        if self.sparse:
            u = np.abs(self.lu.U.diagonal())
        else:
            u = np.abs(np.diag(self.lu[0]))
        if self.m and (u.min() <= self.zero_pivot * max(1.0, u.max())):
            raise np.linalg.LinAlgError("singular basis")

    def _solve0(self, v, trans=False):
        if self.m == 0:
            return v.copy()
        if self.sparse:
            return self.lu.solve(v, trans="T" if trans else "N")
        return sla.lu_solve(self.lu, v, trans=1 if trans else 0, check_finite=False)

    def ftran(self, v):
        w = self._solve0(np.asarray(v, dtype=float))
        for p, eta in self.etas:
            wp = w[p] / eta[p]
            w -= wp * eta
            w[p] = wp
        return w

    def btran(self, c):
        z = np.asarray(c, dtype=float).copy()
        for p, eta in reversed(self.etas):
            zp = (z[p] - (eta @ z - eta[p] * z[p])) / eta[p]
            z[p] = zp
        return self._solve0(z, trans=True)

    def update(self, p: int, w: np.ndarray) -> bool:
        self.etas.append((p, w.copy()))
        return len(self.etas) >= self.refactor_every


class RevisedSimplex:
    """Two-phase bounded revised simplex on ``A x + s = b`` with slacks ``s``."""

    def __init__(self, lp: LinearProgram, tol=TOL, max_iter: int | None = None):
        self.lp = lp
        self.tol = tol
        m, n = lp.n_rows, lp.n_vars
        self.m, self.n = m, n
        slack_lb = np.where(lp.rel == GE, -np.inf, 0.0)
        slack_ub = np.where(lp.rel == LE, np.inf, 0.0)
        self.cols = sp.hstack([lp.A, sp.identity(m, format="csr")], format="csc")
        self.lb = np.concatenate([lp.lb, slack_lb])
        self.ub = np.concatenate([lp.ub, slack_ub])
        self.cost = np.concatenate([lp.cost, np.zeros(m)])
        self.max_iter = max_iter or 50 * (m + n) + 1000
        self.iterations = 0

    # -- helpers -----------------------------------------------------------
    def _column(self, j):
        c = self.cols[:, j]
        out = np.zeros(self.m)
        out[c.indices] = c.data
        return out

    def _factor(self):
        self.basis = _Basis(self.cols[:, self.basic], self.tol.zero_pivot)
        self._recompute_xb()

    def _recompute_xb(self):
        nb = self.state != _BASIC
        rhs = self.rhs - self.cols[:, nb] @ self.x[nb]
        self.x[self.basic] = self.basis.ftran(rhs)

    def _run_phase(self, cost) -> str:
        tol = self.tol
        degenerate = 0
        bland = False
        bland_after = 5 * (self.m + self.cols.shape[1])
        while True:
            if self.iterations >= self.max_iter:
                return "iteration-limit"
            y = self.basis.btran(cost[self.basic])
            d = cost - self.cols.T @ y
            nonbasic = self.state != _BASIC
            can_up = nonbasic & ((self.state == _AT_LB) | (self.state == _FREE))
            can_dn = nonbasic & ((self.state == _AT_UB) | (self.state == _FREE))
            fixed = self.lb == self.ub
            elig_up = can_up & ~fixed & (d < -tol.optimality)
            elig_dn = can_dn & ~fixed & (d > tol.optimality)
            score = np.where(elig_up | elig_dn, np.abs(d), 0.0)
            if not score.any():
                return "optimal"
            if bland:
                j = int(np.flatnonzero(score)[0])
            else:
                j = int(np.argmax(score))
            direction = 1.0 if elig_up[j] else -1.0
            w = self.basis.ftran(self._column(j))
            # entering moves by t*direction, basic x_B changes by -t*direction*w
            delta = -direction * w
            step = self.ub[j] - self.lb[j]
            leave = -1
            leave_to_ub = False
            piv = np.abs(w) > tol.zero_pivot * max(1.0, np.abs(w).max(initial=0.0))
            xb = self.x[self.basic]
            lbB = self.lb[self.basic]
            ubB = self.ub[self.basic]
            dec = piv & (delta < 0) & np.isfinite(lbB)
            inc = piv & (delta > 0) & np.isfinite(ubB)
            ratios = np.full(self.m, np.inf)
            ratios[dec] = np.maximum(xb[dec] - lbB[dec], 0.0) / -delta[dec]
            ratios[inc] = np.maximum(ubB[inc] - xb[inc], 0.0) / delta[inc]
            if self.m:
                rmin = ratios.min()
                if rmin < step:
                    ties = np.flatnonzero(ratios <= rmin + 1e-12 * (1.0 + rmin))
                    if bland:
                        r = ties[np.argmin(self.basic[ties])]
                    else:
                        r = ties[np.argmax(np.abs(w[ties]))]
                    leave = int(r)
                    step = ratios[r]
                    leave_to_ub = bool(inc[r])
            if not np.isfinite(step):
                return "unbounded"
            self.iterations += 1
            self.x[self.basic] = xb + step * delta
            self.x[j] += direction * step
            if step <= 1e-12:
                degenerate += 1
                if degenerate > bland_after:
                    bland = True
            else:
                degenerate = 0
                bland = False
            if leave < 0:
                # bound flip, basis unchanged
                self.state[j] = _AT_UB if direction > 0 else _AT_LB
                self.x[j] = self.ub[j] if direction > 0 else self.lb[j]
                continue
            out = self.basic[leave]
            self.x[out] = self.ub[out] if leave_to_ub else self.lb[out]
            self.state[out] = _AT_UB if leave_to_ub else _AT_LB
            self.basic[leave] = j
            self.state[j] = _BASIC
            if self.basis.update(leave, w):
                self._factor()

    # -- driver --------------------------------------------------------------
    def run(self) -> LpSolution:
        lp, m = self.lp, self.m
        N = self.cols.shape[1]
        self.rhs = lp.rhs.copy()
        x = np.where(np.isfinite(self.lb), self.lb, np.where(np.isfinite(self.ub), self.ub, 0.0))
        state = np.where(np.isfinite(self.lb), _AT_LB, np.where(np.isfinite(self.ub), _AT_UB, _FREE))
        # slacks start basic where their value is within bounds
        resid = self.rhs - lp.A @ x[: self.n]
        sl = self.n + np.arange(m)
        inside = (resid >= self.lb[sl] - self.tol.feasibility) & (resid <= self.ub[sl] + self.tol.feasibility)
        target = np.clip(resid, self.lb[sl], self.ub[sl])
        art_sign = np.sign(resid - target)
        need = ~inside
        n_art = int(need.sum())
        rows_art = np.flatnonzero(need)
        if n_art:
            art = sp.csc_matrix((art_sign[rows_art], (rows_art, np.arange(n_art))), shape=(m, n_art))
            self.cols = sp.hstack([self.cols, art], format="csc")
            self.lb = np.concatenate([self.lb, np.zeros(n_art)])
            self.ub = np.concatenate([self.ub, np.full(n_art, np.inf)])
            self.cost = np.concatenate([self.cost, np.zeros(n_art)])
        total = self.cols.shape[1]
        self.x = np.concatenate([x, np.zeros(n_art)])
        self.state = np.concatenate([state, np.full(n_art, _AT_LB)]).astype(np.int8)
        basic = sl.copy()
        basic[rows_art] = N + np.arange(n_art)
        # slacks of artificial rows sit at the nearest bound
        self.x[sl[need]] = target[need]
        self.state[sl[need]] = np.where(target[need] == self.ub[sl[need]], _AT_UB, _AT_LB)
        self.basic = basic
        self.state[basic] = _BASIC
        try:
            self._factor()
            if n_art:
                c1 = np.zeros(total)
                c1[N:] = 1.0
                status = self._run_phase(c1)
                if status != "optimal":
                    return self._fail(status)
                infeas = float(self.x[N:].sum())
                if infeas > self.tol.feasibility * (1.0 + np.abs(self.rhs).max(initial=0.0)):
                    return LpSolution("infeasible", method="simplex", iterations=self.iterations,
                                      message=f"phase 1 residual {infeas:.3g}")
                self.ub[N:] = 0.0
                self.x[N:] = 0.0
                nb_art = self.state[N:] != _BASIC
                self.state[N:][nb_art] = _AT_LB
                self._recompute_xb()
            status = self._run_phase(self.cost)
            if status != "optimal":
                return self._fail(status)
            self._factor()
            xs = np.clip(self.x[: self.n], lp.lb, lp.ub)
            y = self.basis.btran(self.cost[self.basic])
        except (np.linalg.LinAlgError, RuntimeError) as exc:
            return LpSolution("numerical-failure", method="simplex",
                              iterations=self.iterations, message=str(exc))
        return _finish(lp, xs, y, "simplex", self.iterations, self.tol)

    def _fail(self, status: str) -> LpSolution:
        if status == "unbounded":
            return LpSolution("unbounded", method="simplex", iterations=self.iterations)
        return LpSolution("numerical-failure", method="simplex", iterations=self.iterations,
                          message=status)


# ---------------------------------------------------------------------------
# fixed-format MPS
#
# Field columns (1-based): 2-3 type, 5-12 name, 15-22 name, 25-36 value,
# 40-47 name, 50-61 value.  Rows are named R0000001.., columns C0000001..,
# the objective row is COST.  Values use the most significant digits that
# fit in 12 characters.

def _num(v: float) -> str:
    for p in range(12, 0, -1):
        s = f"{v:.{p}g}"
        if len(s) <= 12:
            return s
    raise ValueError(f"cannot format {v!r} in 12 characters")


def _line(typ: str, name1: str = "", name2: str = "", val: str = "") -> str:
    return f" {typ:<2} {name1:<8}  {name2:<8}  {val:>12}".rstrip()


def write_mps(lp: LinearProgram, path_or_file, name: str = "POTTSLP") -> None:
    if lp.n_rows > 9_999_999 or lp.n_vars > 9_999_999:
        raise LpSizeError("too many rows or columns for 8-character names")
    rname = [f"R{i + 1:07d}" for i in range(lp.n_rows)]
    cname = [f"C{j + 1:07d}" for j in range(lp.n_vars)]
    out = [f"NAME          {name}", "ROWS", _line("N", "COST")]
    tag = {LE: "L", EQ: "E", GE: "G"}
    out += [_line(tag[int(r)], rname[i]) for i, r in enumerate(lp.rel)]
    out.append("COLUMNS")
    At = lp.A.tocsc()
    for j in range(lp.n_vars):
        if lp.cost[j] != 0.0:
            out.append(_line("", cname[j], "COST", _num(lp.cost[j])))
        for idx in range(At.indptr[j], At.indptr[j + 1]):
            out.append(_line("", cname[j], rname[At.indices[idx]], _num(At.data[idx])))
    out.append("RHS")
    for i in np.flatnonzero(lp.rhs):
        out.append(_line("", "RHS", rname[i], _num(lp.rhs[i])))
    out.append("BOUNDS")
    for j in range(lp.n_vars):
        lo, hi = lp.lb[j], lp.ub[j]
        if lo == hi:
            out.append(_line("FX", "BND", cname[j], _num(lo)))
            continue
        if lo == -np.inf and hi == np.inf:
            out.append(_line("FR", "BND", cname[j]))
            continue
        if lo == -np.inf:
            out.append(_line("MI", "BND", cname[j]))
        elif lo != 0.0:
            out.append(_line("LO", "BND", cname[j], _num(lo)))
        if hi != np.inf:
            out.append(_line("UP", "BND", cname[j], _num(hi)))
    out.append("ENDATA")
    text = "\n".join(out) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)


def read_mps(path_or_file) -> LinearProgram:
    """Reader for the subset written by :func:`write_mps`."""
    if hasattr(path_or_file, "read"):
        lines = path_or_file.read().splitlines()
    else:
        with open(path_or_file) as fh:
            lines = fh.read().splitlines()
    section = None
    obj_name = None
    rows: dict[str, int] = {}
    rel: list[int] = []
    cols: dict[str, int] = {}
    cost: dict[int, float] = {}
    trip: list[tuple[int, int, float]] = []
    rhs: dict[int, float] = {}
    bounds: list[tuple[str, str, float]] = []
    codes = {"L": LE, "E": EQ, "G": GE}
    for raw in lines:
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        parts = raw.split()
        if section == "ROWS":
            typ, nm = parts
            if typ == "N":
                obj_name = nm
            else:
                rows[nm] = len(rel)
                rel.append(codes[typ])
        elif section == "COLUMNS":
            cn = parts[0]
            j = cols.setdefault(cn, len(cols))
            for rn, val in zip(parts[1::2], parts[2::2]):
                if rn == obj_name:
                    cost[j] = float(val)
                else:
                    trip.append((rows[rn], j, float(val)))
        elif section == "RHS":
            for rn, val in zip(parts[1::2], parts[2::2]):
                rhs[rows[rn]] = float(val)
        elif section == "BOUNDS":
            typ, _, cn = parts[:3]
            bounds.append((typ, cn, float(parts[3]) if len(parts) > 3 else 0.0))
    for _, cn, _ in bounds:
        cols.setdefault(cn, len(cols))
    n, r = len(cols), len(rel)
    c = np.zeros(n)
    for j, v in cost.items():
        c[j] = v
    b = np.zeros(r)
    for i, v in rhs.items():
        b[i] = v
    lb, ub = np.zeros(n), np.full(n, np.inf)
    for typ, cn, v in bounds:
        j = cols[cn]
        if typ == "FX":
            lb[j] = ub[j] = v
        elif typ == "FR":
            lb[j], ub[j] = -np.inf, np.inf
        elif typ == "MI":
            lb[j] = -np.inf
        elif typ == "LO":
            lb[j] = v
        elif typ == "UP":
            ub[j] = v
        elif typ == "PL":
            ub[j] = np.inf
    if trip:
        ri, cj, vv = zip(*trip)
    else:
        ri, cj, vv = (), (), ()
    A = sp.csr_matrix((vv, (ri, cj)), shape=(r, n))
    return LinearProgram(c, A, rel, b, lb, ub)
