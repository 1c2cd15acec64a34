"""Bounded-variable revised simplex.

Rows are ``A x + s = b`` with one logical (slack) variable per row whose
bounds encode the row sense.  The basis inverse is kept dense and updated by
elementary row operations, with a fresh inverse every ``refactor_every``
pivots.  A primal basis that is infeasible for the current bounds is repaired
with the dual simplex when it is dual feasible (the usual situation after
adding a cut or tightening a bound) and with a composite phase 1 otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

INF = math.inf

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITER_LIMIT = "IterLimit"
_RESTART = "Restart"    # internal: the basis was repaired mid-phase

# nonbasic status codes
_BASIC, _LOWER, _UPPER, _FREE = 0, 1, 2, 3


class LpError(RuntimeError):
    """Numerical breakdown that a from-scratch Bland re-solve could not fix."""


def _entries(entries) -> list[tuple[int, float]]:
    if entries is None:
        return []
    if isinstance(entries, dict):
        entries = entries.items()
    return [(int(k), float(v)) for k, v in entries if v != 0.0]


class LpProblem:
    """An LP in sparse-input, dense-storage form that can grow by rows and columns."""

    def __init__(self, sense: str = "min"):
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        self.sense = sense
        self.nrows = 0
        self.ncols = 0
        self._A = np.zeros((8, 8))
        self._c = np.zeros(8)
        self._lb = np.zeros(8)
        self._ub = np.full(8, INF)
        self._rhs = np.zeros(8)
        self._rsense: list[str] = []

    # -- construction ---------------------------------------------------------
    def _grow(self, rows: int, cols: int) -> None:
        R, C = self._A.shape
        if rows <= R and cols <= C:
            return
        R2 = max(R, rows if rows <= R else max(rows, 2 * R))
        C2 = max(C, cols if cols <= C else max(cols, 2 * C))
        A = np.zeros((R2, C2))
        A[:self.nrows, :self.ncols] = self._A[:self.nrows, :self.ncols]
        self._A = A
        if C2 > C:
            self._c = np.concatenate([self._c, np.zeros(C2 - C)])
            self._lb = np.concatenate([self._lb, np.zeros(C2 - C)])
            self._ub = np.concatenate([self._ub, np.full(C2 - C, INF)])
        if R2 > R:
            self._rhs = np.concatenate([self._rhs, np.zeros(R2 - R)])

    def add_column(self, obj: float, entries=None, lb: float = 0.0, ub: float = INF) -> int:
        if lb > ub:
            raise ValueError(f"empty bound interval [{lb}, {ub}]")
        self._grow(self.nrows, self.ncols + 1)
        j = self.ncols
        self.ncols += 1
        self._c[j] = obj
        self._lb[j] = lb
        self._ub[j] = ub
        self._A[:, j] = 0.0
        for i, v in _entries(entries):
            if not 0 <= i < self.nrows:
                raise IndexError(f"row index {i} out of range")
            self._A[i, j] = v
        return j

    def add_row(self, sense: str, rhs: float, entries=None) -> int:
        sense = {"<=": "<", ">=": ">", "==": "="}.get(sense, sense)
        if sense not in ("<", ">", "="):
            raise ValueError(f"bad row sense {sense!r}")
        self._grow(self.nrows + 1, self.ncols)
        i = self.nrows
        self.nrows += 1
        self._A[i, :] = 0.0
        for j, v in _entries(entries):
            if not 0 <= j < self.ncols:
                raise IndexError(f"column index {j} out of range")
            self._A[i, j] = v
        self._rhs[i] = rhs
        self._rsense.append(sense)
        return i

    def remove_rows(self, rows) -> None:
        """Delete the given rows (indices of later rows shift down)."""
        drop = set(int(i) for i in rows)
        keep = [i for i in range(self.nrows) if i not in drop]
        A = self._A[keep]
        self._A = np.zeros_like(self._A)
        self._A[:len(keep)] = A
        self._rhs[:len(keep)] = self._rhs[keep]
        self._rsense = [self._rsense[i] for i in keep]
        self.nrows = len(keep)

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        if lb > ub:
            raise ValueError(f"empty bound interval [{lb}, {ub}]")
        self._lb[j] = lb
        self._ub[j] = ub

    def set_objective(self, j: int, value: float) -> None:
        self._c[j] = value

    def set_rhs(self, i: int, value: float) -> None:
        self._rhs[i] = value

    # -- views ----------------------------------------------------------------
    @property
    def A(self) -> np.ndarray:
        return self._A[:self.nrows, :self.ncols]

    @property
    def c(self) -> np.ndarray:
        return self._c[:self.ncols]

    @property
    def lb(self) -> np.ndarray:
        return self._lb[:self.ncols]

    @property
    def ub(self) -> np.ndarray:
        return self._ub[:self.ncols]

    @property
    def rhs(self) -> np.ndarray:
        return self._rhs[:self.nrows]

    @property
    def row_senses(self) -> list[str]:
        return list(self._rsense)

    def copy(self) -> "LpProblem":
        other = LpProblem(self.sense)
        other.nrows, other.ncols = self.nrows, self.ncols
        other._A = self._A.copy()
        other._c = self._c.copy()
        other._lb = self._lb.copy()
        other._ub = self._ub.copy()
        other._rhs = self._rhs.copy()
        other._rsense = list(self._rsense)
        return other


def dump_lp(problem: LpProblem) -> str:
    """Plain-text dump (one objective line, one line per row, bounds) for bug reports."""
    def term(v, name):
        return f"{v:+.17g} {name}"
    lines = [f"{problem.sense} " + " ".join(term(v, f"x{j}") for j, v in enumerate(problem.c) if v)]
    for i in range(problem.nrows):
        row = problem.A[i]
        lhs = " ".join(term(v, f"x{j}") for j, v in enumerate(row) if v) or "0"
        op = {"<": "<=", ">": ">=", "=": "="}[problem._rsense[i]]
        lines.append(f"r{i}: {lhs} {op} {problem.rhs[i]:.17g}")
    for j in range(problem.ncols):
        lines.append(f"bound x{j}: {problem.lb[j]:.17g} {problem.ub[j]:.17g}")
    return "\n".join(lines) + "\n"


@dataclass
class Basis:
    """Basic variables (structural j as j, slack of row i as -(i+1)) and the
    nonbasic status of every structural and slack variable."""
    head: list
    col_status: np.ndarray
    row_status: np.ndarray


def basis_without_rows(basis: Basis, rows) -> Optional[Basis]:
    """Basis for the LP with ``rows`` removed, or None unless every removed
    row has its slack basic (then the remaining basis stays nonsingular)."""
    drop = sorted(set(int(i) for i in rows))
    codes = set(basis.head)
    if any(-(i + 1) not in codes for i in drop):
        return None
    dset = set(drop)
    shift = np.zeros(len(basis.row_status) + 1, dtype=np.int64)
    for i in drop:
        shift[i + 1:] += 1
    head = []
    for c in basis.head:
        if c >= 0:
            head.append(c)
        elif (-c - 1) not in dset:
            i = -c - 1
            head.append(-(i - int(shift[i]) + 1))
    keep = [i for i in range(len(basis.row_status)) if i not in dset]
    return Basis(head, basis.col_status.copy(), basis.row_status[keep].copy())


@dataclass
class LpSolution:
    status: str
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = math.nan
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: Optional[Basis] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Simplex:
    def __init__(self, problem: LpProblem, feas_tol: float, opt_tol: float,
                 max_iter: Optional[int], refactor_every: int, bland: bool):
        self.p = problem
        m, n = problem.nrows, problem.ncols
        self.m, self.n, self.N = m, n, n + m
        self.M = np.hstack([problem.A, np.eye(m)])
        sign = 1.0 if problem.sense == "min" else -1.0
        self.sign = sign
        self.cost = np.concatenate([sign * problem.c, np.zeros(m)])
        self.b = problem.rhs.copy()
        L = np.empty(self.N)
        U = np.empty(self.N)
        L[:n] = problem.lb
        U[:n] = problem.ub
        for i, s in enumerate(problem._rsense):
            L[n + i] = 0.0 if s in "<=" else -INF
            U[n + i] = 0.0 if s in ">=" else INF
        self.L, self.U = L, U
        self.fixed = L == U
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.piv_tol = 1e-7
        self.repaired = False
        self.max_iter = max_iter if max_iter is not None else 50 * (m + n) + 100
        self.refactor_every = refactor_every
        self.bland = bland
        self.degenerate = 0
        self.iters = 0
        self.since_refactor = 0

    # -- basis handling ---------------------------------------------------------
    def _ext(self, code: int) -> int:
        return code if code >= 0 else self.n + (-code - 1)

    def _code(self, k: int) -> int:
        return k if k < self.n else -(k - self.n + 1)

    def cold_basis(self) -> None:
        self.head = np.arange(self.n, self.N)
        self.status = np.full(self.N, _BASIC, dtype=np.int8)
        for j in range(self.n):
            self.status[j] = self._default_status(j)
        self.Binv = np.eye(self.m)
        self._set_nonbasic_values()
        self.xB_recompute()

    def _default_status(self, k: int) -> int:
        if self.L[k] > -INF:
            return _LOWER
        if self.U[k] < INF:
            return _UPPER
        return _FREE

    def warm_basis(self, basis: Basis) -> bool:
        m, n = self.m, self.n
        ncs = len(basis.col_status)
        nrs = len(basis.row_status)
        if ncs > n or nrs > m or len(basis.head) != nrs:
            return False
        status = np.empty(self.N, dtype=np.int8)
        status[:ncs] = basis.col_status
        for j in range(ncs, n):
            status[j] = self._default_status(j)
        status[n:n + nrs] = basis.row_status
        status[n + nrs:] = _BASIC
        head = [self._ext(c) for c in basis.head] + list(range(n + nrs, n + m))
        head = np.asarray(head, dtype=np.int64)
        if len(set(head.tolist())) != m or np.any(status[head] != _BASIC):
            return False
        if int(np.sum(status == _BASIC)) != m:
            return False
        # statuses that no longer match the bounds
        for k in np.flatnonzero(status != _BASIC):
            s = status[k]
            if (s == _LOWER and self.L[k] == -INF) or (s == _UPPER and self.U[k] == INF) \
                    or (s == _FREE and (self.L[k] > -INF or self.U[k] < INF)):
                status[k] = self._default_status(k)
        self.head = head
        self.status = status
        try:
            self.refactor()
        except np.linalg.LinAlgError:
            return False
        self._set_nonbasic_values()
        self.xB_recompute()
        return True

    def _set_nonbasic_values(self) -> None:
        x = np.zeros(self.N)
        st = self.status
        lo = st == _LOWER
        up = st == _UPPER
        x[lo] = self.L[lo]
        x[up] = self.U[up]
        self.x = x

    def refactor(self) -> None:
        B = self.M[:, self.head]
        try:
            Binv = np.linalg.inv(B)
            if not np.all(np.isfinite(Binv)) or np.abs(Binv).max() > 1e12:
                raise np.linalg.LinAlgError("ill-conditioned basis")
        except np.linalg.LinAlgError:
            self._repair_basis()
            return
        self.Binv = Binv
        self.since_refactor = 0

    def _repair_basis(self) -> None:
        """Swap dependent basic columns for slacks of the rows they leave
        uncovered (Gram-Schmidt rank test); callers restart their phase."""
        m = self.m
        B = self.M[:, self.head]
        Q = np.zeros((m, 0))
        keep = []

        def residual(v):
            for _ in range(2):
                v = v - Q @ (Q.T @ v)
            return v

        for pos in range(m):
            col = B[:, pos]
            v = residual(col)
            nv = np.linalg.norm(v)
            if nv > 1e-9 * max(1.0, np.linalg.norm(col)):
                Q = np.hstack([Q, (v / nv)[:, None]])
                keep.append(pos)
        drop = [pos for pos in range(m) if pos not in keep]
        in_basis = set(self.head.tolist())
        fill = []
        for i in range(m):
            if len(fill) == len(drop):
                break
            if self.n + i in in_basis:
                continue
            e = np.zeros(m)
            e[i] = 1.0
            v = residual(e)
            nv = np.linalg.norm(v)
            if nv > 1e-9:
                Q = np.hstack([Q, (v / nv)[:, None]])
                fill.append(self.n + i)
        if len(fill) != len(drop):
            raise np.linalg.LinAlgError("basis repair failed")
        for pos, k in zip(drop, fill):
            out = int(self.head[pos])
            self.status[out] = self._default_status(out)
            self.head[pos] = k
            self.status[k] = _BASIC
        self.Binv = np.linalg.inv(self.M[:, self.head])
        self.since_refactor = 0
        self._set_nonbasic_values()
        self.xB_recompute()
        self.repaired = True

    def xB_recompute(self) -> None:
        x = self.x
        x[self.head] = 0.0
        rhs = self.b - self.M @ x
        x[self.head] = self.Binv @ rhs

    def basis(self) -> Basis:
        n = self.n
        return Basis([self._code(int(k)) for k in self.head],
                     self.status[:n].copy(), self.status[n:].copy())

    # -- pricing helpers ----------------------------------------------------------
    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        y = cost[self.head] @ self.Binv
        d = cost - y @ self.M
        d[self.head] = 0.0
        return d

    def _eligible(self, d: np.ndarray) -> np.ndarray:
        st = self.status
        tol = self.opt_tol
        elig = np.zeros(self.N, dtype=bool)
        elig |= (st == _LOWER) & (d < -tol)
        elig |= (st == _UPPER) & (d > tol)
        elig |= (st == _FREE) & (np.abs(d) > tol)
        elig &= ~self.fixed
        return elig

    def primal_infeasibility(self) -> np.ndarray:
        xb = self.x[self.head]
        Lb = self.L[self.head]
        Ub = self.U[self.head]
        return np.maximum(Lb - xb, 0.0) + np.maximum(xb - Ub, 0.0)

    def dual_feasible(self, d: np.ndarray) -> bool:
        return not np.any(self._eligible(d))

    # -- pivoting ---------------------------------------------------------------
    def _pivot(self, p: int, q: int, alpha: np.ndarray) -> None:
        row = self.Binv[p] / alpha[p]
        self.Binv -= np.outer(alpha, row)
        self.Binv[p] = row
        self.head[p] = q
        self.status[q] = _BASIC
        self.since_refactor += 1
        if self.since_refactor >= self.refactor_every or abs(alpha[p]) < 1e-9:
            self.refactor()
            self.xB_recompute()

    def _tick(self) -> bool:
        self.iters += 1
        return self.iters <= self.max_iter

    def primal(self, phase: int) -> str:
        """Primal simplex; phase 1 minimizes the sum of bound violations of
        basic variables.  Returns OPTIMAL/INFEASIBLE/UNBOUNDED/ITER_LIMIT
        (phase 1 returns OPTIMAL once the basis is feasible)."""
        tol = self.feas_tol
        switch_at = 3 * (self.m + self.n)
        while True:
            if phase == 1:
                xb = self.x[self.head]
                below = xb < self.L[self.head] - tol
                above = xb > self.U[self.head] + tol
                if not (below.any() or above.any()):
                    return OPTIMAL
                cost = np.zeros(self.N)
                cost[self.head[below]] = -1.0
                cost[self.head[above]] = 1.0
            else:
                cost = self.cost
            d = self.reduced_costs(cost)
            elig = self._eligible(d)
            if not elig.any():
                return INFEASIBLE if phase == 1 else OPTIMAL
            if not self._tick():
                return ITER_LIMIT
            cand = np.flatnonzero(elig)
            if self.bland or self.degenerate > switch_at:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            direction = -1.0 if (self.status[q] == _UPPER or
                                 (self.status[q] == _FREE and d[q] > 0)) else 1.0
            alpha = self.Binv @ self.M[:, q]
            rate = -direction * alpha          # d x_B / d t
            p, t, leave_bound = self._primal_ratio(rate, phase)
            flip = self.U[q] - self.L[q]
            if flip < INF and (p < 0 or flip <= t):
                # bound flip, no basis change
                self.x[q] += direction * flip
                self.x[self.head] += rate * flip
                self.status[q] = _UPPER if direction > 0 else _LOWER
                continue
            if p < 0:
                if phase == 1:
                    # cannot happen for a bounded phase-1 objective; treat as breakdown
                    raise np.linalg.LinAlgError("unbounded phase-1 ray")
                return UNBOUNDED
            # progress of the phase objective: the rate of change is |d_q|
            if t * abs(d[q]) <= 1e-11 * (1.0 + abs(float(cost @ self.x))):
                self.degenerate += 1
            leaving = int(self.head[p])
            self.x[q] += direction * t
            self.x[self.head] += rate * t
            self.x[leaving] = leave_bound
            self.status[leaving] = _LOWER if leave_bound == self.L[leaving] else _UPPER
            if self.L[leaving] == -INF and self.U[leaving] == INF:
                self.status[leaving] = _FREE
            self._pivot(p, q, alpha)
            if self.repaired:
                return _RESTART

    def _primal_ratio(self, rate: np.ndarray, phase: int):
        """Harris two-pass ratio test.  Returns (row, step, bound the leaving
        variable ends at); row -1 when no basic variable blocks."""
        tol = self.feas_tol
        ptol = self.piv_tol
        head = self.head
        xb = self.x[head]
        Lb = self.L[head]
        Ub = self.U[head]
        m = self.m
        lim_relaxed = np.full(m, INF)
        lim_exact = np.full(m, INF)
        target = np.zeros(m)
        dec = rate < -ptol
        inc = rate > ptol
        if phase == 1:
            below = xb < Lb - tol
            above = xb > Ub + tol
        else:
            below = above = np.zeros(m, dtype=bool)
        feas = ~(below | above)
        # decreasing feasible variables stop at L; infeasible-above stop at U
        sel = dec & feas & (Lb > -INF)
        lim_relaxed[sel] = (xb[sel] - Lb[sel] + tol) / -rate[sel]
        lim_exact[sel] = (xb[sel] - Lb[sel]) / -rate[sel]
        target[sel] = Lb[sel]
        sel = dec & above
        lim_relaxed[sel] = (xb[sel] - Ub[sel] + tol) / -rate[sel]
        lim_exact[sel] = (xb[sel] - Ub[sel]) / -rate[sel]
        target[sel] = Ub[sel]
        sel = inc & feas & (Ub < INF)
        lim_relaxed[sel] = (Ub[sel] - xb[sel] + tol) / rate[sel]
        lim_exact[sel] = (Ub[sel] - xb[sel]) / rate[sel]
        target[sel] = Ub[sel]
        sel = inc & below
        lim_relaxed[sel] = (Lb[sel] - xb[sel] + tol) / rate[sel]
        lim_exact[sel] = (Lb[sel] - xb[sel]) / rate[sel]
        target[sel] = Lb[sel]
        tmax = lim_relaxed.min() if m else INF
        if tmax == INF:
            return -1, INF, 0.0
        if self.bland or self.degenerate > 3 * (self.m + self.n):
            cands = np.flatnonzero(lim_exact <= lim_exact.min() + 1e-12)
            p = int(cands[np.argmin(head[cands])])
        else:
            cands = np.flatnonzero(lim_exact <= tmax)
            p = int(cands[np.argmax(np.abs(rate[cands]))])
        t = max(lim_exact[p], 0.0)
        return p, t, target[p]

    def dual(self) -> str:
        """Dual simplex from a dual-feasible basis."""
        tol = self.feas_tol
        switch_at = 3 * (self.m + self.n)
        stalls = 0
        best = -INF
        while True:
            infeas = self.primal_infeasibility()
            bland = self.bland or stalls > switch_at
            if bland:
                # smallest-index infeasible basic variable leaves
                bad = np.flatnonzero(infeas > tol)
                p = int(bad[np.argmin(self.head[bad])]) if bad.size else 0
            else:
                p = int(np.argmax(infeas)) if self.m else 0
            if self.m == 0 or infeas[p] <= tol:
                return OPTIMAL
            if not self._tick():
                return ITER_LIMIT
            k = int(self.head[p])
            xk = self.x[k]
            if xk < self.L[k]:
                target = self.L[k]
                want = 1.0       # x_k must increase
            else:
                target = self.U[k]
                want = -1.0
            d = self.reduced_costs(self.cost)
            row = self.Binv[p] @ self.M           # alpha_r over all variables
            st = self.status
            # x_k changes by -row_j * dx_j; need sign(-row_j*dx_j) == want
            nb = (st != _BASIC) & ~self.fixed
            ok_lower = (st == _LOWER) & (-row * want > self.piv_tol)   # dx_j >= 0
            ok_upper = (st == _UPPER) & (row * want > self.piv_tol)    # dx_j <= 0
            ok_free = (st == _FREE) & (np.abs(row) > self.piv_tol)
            elig = nb & (ok_lower | ok_upper | ok_free)
            if not elig.any():
                return INFEASIBLE
            cand = np.flatnonzero(elig)
            absrow = np.abs(row[cand])
            dd = np.abs(d[cand])
            ratio = dd / absrow
            if bland:
                choose = np.flatnonzero(ratio <= ratio.min() + 1e-12)
                q = int(cand[choose[0]])
            else:
                tmax = ((dd + self.opt_tol) / absrow).min()
                choose = np.flatnonzero(ratio <= tmax)
                q = int(cand[choose[np.argmax(absrow[choose])]])
            obj = float(self.cost @ self.x)
            if obj > best + 1e-11 * (1.0 + abs(best)):
                best = obj
            else:
                stalls += 1
            dxq = (xk - target) / row[q]
            alpha = self.Binv @ self.M[:, q]
            self.x[self.head] -= alpha * dxq
            self.x[q] += dxq
            self.x[k] = target
            self.status[k] = _LOWER if target == self.L[k] else _UPPER
            self._pivot(p, q, alpha)
            if self.repaired:
                return _RESTART

    def solution(self, status: str) -> LpSolution:
        n = self.n
        y = self.cost[self.head] @ self.Binv
        d = self.cost - y @ self.M
        d[self.head] = 0.0
        x = self.x[:n].copy()
        obj = float(self.p.c @ x)
        return LpSolution(status, x, self.sign * y, obj, self.sign * d[:n],
                          self.basis(), self.iters)


def solve_lp(problem: LpProblem, warm_basis: Optional[Basis] = None, *,
             feas_tol: float = 1e-7, opt_tol: float = 1e-7,
             max_iter: Optional[int] = None, refactor_every: int = 100,
             bland: bool = False) -> LpSolution:
    """Solve ``problem``; ``warm_basis`` (e.g. ``previous_solution.basis``)
    seeds the starting basis when it is still a valid basis."""
    try:
        return _solve(problem, warm_basis, feas_tol, opt_tol, max_iter,
                      refactor_every, bland)
    except np.linalg.LinAlgError:
        pass
    try:
        return _solve(problem, None, feas_tol, opt_tol, max_iter, refactor_every, True)
    except np.linalg.LinAlgError as exc:
        raise LpError(f"simplex breakdown: {exc}") from exc


def _solve(problem, warm_basis, feas_tol, opt_tol, max_iter, refactor_every, bland):
    if np.any(problem.lb > problem.ub):
        return LpSolution(INFEASIBLE)
    sx = _Simplex(problem, feas_tol, opt_tol, max_iter, refactor_every, bland)
    if sx.m == 0:
        # only bounds: each variable sits at its best bound
        x = np.where(sx.cost[:sx.n] >= 0, problem.lb, problem.ub)
        if np.any(np.isinf(x)):
            return LpSolution(UNBOUNDED)
        sx.status = np.where(sx.cost[:sx.n] >= 0, _LOWER, _UPPER).astype(np.int8)
        sx.head = np.zeros(0, dtype=np.int64)
        sx.Binv = np.zeros((0, 0))
        sx.x = x.astype(float)
        return sx.solution(OPTIMAL)
    if warm_basis is None or not sx.warm_basis(warm_basis):
        sx.cold_basis()
    for _ in range(20):
        sx.repaired = False
        out = _phases(sx, feas_tol)
        if out != _RESTART:
            return out
    raise np.linalg.LinAlgError("repeated basis repairs")


def _phases(sx: _Simplex, feas_tol: float):
    if sx.primal_infeasibility().max() > feas_tol:
        status = None
        if sx.dual_feasible(sx.reduced_costs(sx.cost)):
            status = sx.dual()
            if status == _RESTART:
                return _RESTART
            if status == INFEASIBLE:
                # confirm with phase 1 from the current basis
                status = None
        if status == ITER_LIMIT:
            return sx.solution(ITER_LIMIT)
        if status is None:
            status = sx.primal(1)
            if status == _RESTART:
                return _RESTART
            if status != OPTIMAL:
                return LpSolution(status, iterations=sx.iters)
    status = sx.primal(2)
    if status == _RESTART:
        return _RESTART
    if status == OPTIMAL:
        sx.refactor()
        sx.xB_recompute()
        if sx.repaired:
            return _RESTART
        if sx.primal_infeasibility().max() > 10 * feas_tol:
            # drift repaired by one more pass
            status = sx.primal(1)
            if status == _RESTART:
                return _RESTART
            if status != OPTIMAL:
                return LpSolution(status, iterations=sx.iters)
            status = sx.primal(2)
            if status == _RESTART:
                return _RESTART
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=sx.iters)
    return sx.solution(status)
