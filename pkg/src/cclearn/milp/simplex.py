"""Two-phase dense-tableau primal simplex.

Variables are shifted/split to nonnegative standard form, finite upper
bounds become explicit rows, and equality/>= rows receive artificial
columns. Pricing is Dantzig by default and switches permanently to Bland's
rule once a run of degenerate pivots suggests cycling.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .model import MilpModel, NumericalBreakdown, SolveResult, SolverParams, _Compiled

_PIVOT_TOL = 1e-9
_RCOST_TOL = 1e-9
_DEGENERATE_RUN_LIMIT = 300
_REFRESH_EVERY = 500


class _StdForm:
    """Bookkeeping for the original-variable -> standard-form mapping."""

    def __init__(self, n_orig: int):
        self.n_orig = n_orig
        self.fixed_value = np.full(n_orig, np.nan)
        # per original var: (kind, col, offset) where kind is one of
        # "shift" (x = offset + x'), "mirror" (x = offset - x'),
        # "split" (x = x'_col - x'_{col+1}), "fixed"
        self.mapping: list[tuple] = [None] * n_orig

    def recover(self, x_std: np.ndarray) -> np.ndarray:
        x = np.empty(self.n_orig)
        for j, entry in enumerate(self.mapping):
            kind, col, offset = entry
            if kind == "fixed":
                x[j] = offset
            elif kind == "shift":
                x[j] = offset + x_std[col]
            elif kind == "mirror":
                x[j] = offset - x_std[col]
            else:  # split
                x[j] = x_std[col] - x_std[col + 1]
        return x


def _standardize(A, senses, b, c, lo, hi):
    """Rewrite min c@x, rows (A, senses, b), lo <= x <= hi over x' >= 0.

    Returns (S, row_senses, rhs, c_std, const_shift, stdform).
    """
    m, n = A.shape
    std = _StdForm(n)
    cols: list[np.ndarray] = []
    c_std: list[float] = []
    const = 0.0
    b = b.astype(float).copy()
    extra_rows: list[tuple[np.ndarray, float]] = []  # (column-index, ub) rows x'_col <= ub

    for j in range(n):
        aj = A[:, j]
        ljo, hjo = lo[j], hi[j]
        if ljo > hjo:
            # caller guarantees lo <= hi; treat as infeasible via impossible row
            std.mapping[j] = ("fixed", -1, ljo)
            extra_rows.append((-1, -1.0))  # sentinel: 0 <= -1, infeasible
            continue
        if ljo == hjo:
            std.mapping[j] = ("fixed", -1, ljo)
            b -= aj * ljo
            const += c[j] * ljo
            continue
        if math.isfinite(ljo):
            col = len(cols)
            std.mapping[j] = ("shift", col, ljo)
            cols.append(aj.copy())
            c_std.append(c[j])
            b -= aj * ljo
            const += c[j] * ljo
            if math.isfinite(hjo):
                extra_rows.append((col, hjo - ljo))
        elif math.isfinite(hjo):
            col = len(cols)
            std.mapping[j] = ("mirror", col, hjo)
            cols.append(-aj)
            c_std.append(-c[j])
            b -= aj * hjo
            const += c[j] * hjo
        else:
            col = len(cols)
            std.mapping[j] = ("split", col, 0.0)
            cols.append(aj.copy())
            cols.append(-aj)
            c_std.append(c[j])
            c_std.append(-c[j])

    ns = len(cols)
    n_extra = len(extra_rows)
    S = np.zeros((m + n_extra, ns))
    if ns:
        S[:m, :] = np.column_stack(cols) if cols else np.zeros((m, 0))
    rhs = np.concatenate([b, np.zeros(n_extra)])
    row_senses = list(senses)
    for i, (col, ub) in enumerate(extra_rows):
        if col >= 0:
            S[m + i, col] = 1.0
        rhs[m + i] = ub
        row_senses.append("<=")
    return S, row_senses, rhs, np.array(c_std), const, std


def _simplex_core(S, row_senses, rhs, c_std, max_iter):
    """Solve min c_std @ x', S x' {<=,=,>=} rhs, x' >= 0.

    Returns (status, x_std, objective) with status optimal|infeasible|unbounded.
    """
    m, ns = S.shape
    # normalize rhs >= 0
    S = S.copy()
    rhs = rhs.copy()
    row_senses = list(row_senses)
    for i in range(m):
        if rhs[i] < 0:
            S[i] *= -1.0
            rhs[i] = -rhs[i]
            if row_senses[i] == "<=":
                row_senses[i] = ">="
            elif row_senses[i] == ">=":
                row_senses[i] = "<="

    n_le = sum(1 for s in row_senses if s == "<=")
    n_ge = sum(1 for s in row_senses if s == ">=")
    n_eq = m - n_le - n_ge
    n_slack = n_le + n_ge
    n_art = n_ge + n_eq
    n_tot = ns + n_slack + n_art

    T = np.zeros((m + 2, n_tot + 1))
    T[:m, :ns] = S
    T[:m, -1] = rhs
    basis = np.empty(m, dtype=int)
    slack_at, art_at = ns, ns + n_slack
    for i, s in enumerate(row_senses):
        if s == "<=":
            T[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif s == ">=":
            T[i, slack_at] = -1.0
            slack_at += 1
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_at += 1
        else:
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_at += 1

    c2 = np.zeros(n_tot)
    c2[:ns] = c_std
    c1 = np.zeros(n_tot)
    c1[ns + n_slack:] = 1.0

    # cost rows hold reduced costs; last entry is -(objective value)
    T[m, :n_tot] = c2
    art_rows = [i for i in range(m) if basis[i] >= ns + n_slack]
    if art_rows:
        T[m + 1, :n_tot] = c1 - T[art_rows, :n_tot].sum(axis=0)
        T[m + 1, -1] = -T[art_rows, -1].sum()
    else:
        T[m + 1, :n_tot] = c1

    allowed = np.ones(n_tot, dtype=bool)
    artificial_cols = np.zeros(n_tot, dtype=bool)
    artificial_cols[ns + n_slack:] = True

    state = {"iters": 0, "bland": False, "degen_run": 0}

    def refresh_cost_row(row, costs):
        cb = costs[basis]
        T[row, :n_tot] = costs - cb @ T[:m, :n_tot]
        T[row, -1] = -(cb @ T[:m, -1])

    def pivot_loop(cost_row, costs):
        while True:
            if state["iters"] >= max_iter:
                raise NumericalBreakdown(
                    f"simplex exceeded {max_iter} iterations (m={m}, n={n_tot})")
            r = T[cost_row, :n_tot]
            if state["bland"]:
                cand = np.flatnonzero(allowed & (r < -_RCOST_TOL))
                if cand.size == 0:
                    return "optimal"
                enter = int(cand[0])
            else:
                masked = np.where(allowed, r, np.inf)
                enter = int(np.argmin(masked))
                if masked[enter] >= -_RCOST_TOL:
                    return "optimal"
            col = T[:m, enter]
            pos = col > _PIVOT_TOL
            if not pos.any():
                return "unbounded"
            ratios = np.full(m, np.inf)
            ratios[pos] = np.maximum(T[:m, -1][pos], 0.0) / col[pos]
            best = ratios.min()
            tied = np.flatnonzero(ratios <= best + 1e-12)
            if state["bland"] and tied.size > 1:
                leave = int(tied[np.argmin(basis[tied])])
            else:
                leave = int(tied[0])
            prev_obj = T[cost_row, -1]
            piv = T[leave, enter]
            T[leave] /= piv
            colvals = T[:, enter].copy()
            colvals[leave] = 0.0
            T[:, :] -= np.outer(colvals, T[leave])
            T[:, enter] = 0.0
            T[leave, enter] = 1.0
            basis[leave] = enter
            state["iters"] += 1
            if abs(T[cost_row, -1] - prev_obj) <= 1e-13 * (1.0 + abs(prev_obj)):
                state["degen_run"] += 1
                if state["degen_run"] >= _DEGENERATE_RUN_LIMIT:
                    state["bland"] = True
            else:
                state["degen_run"] = 0
            if state["iters"] % _REFRESH_EVERY == 0:
                refresh_cost_row(m, c2)
                refresh_cost_row(m + 1, c1)

    # phase 1
    if art_rows:
        status = pivot_loop(m + 1, c1)
        if status == "unbounded":  # cannot happen: phase-1 objective bounded below by 0
            raise NumericalBreakdown("phase-1 reported unbounded")
        refresh_cost_row(m + 1, c1)
        if -T[m + 1, -1] > 1e-7:
            return "infeasible", None, math.inf
        # drive remaining basic artificials out or leave them basic at zero
        for i in range(m):
            if basis[i] >= ns + n_slack:
                row = T[i, :ns + n_slack]
                nz = np.flatnonzero(np.abs(row) > 1e-7)
                if nz.size:
                    enter = int(nz[np.argmax(np.abs(row[nz]))])
                    piv = T[i, enter]
                    T[i] /= piv
                    colvals = T[:, enter].copy()
                    colvals[i] = 0.0
                    T[:, :] -= np.outer(colvals, T[i])
                    T[:, enter] = 0.0
                    T[i, enter] = 1.0
                    basis[i] = enter
                else:
                    T[i, -1] = 0.0  # redundant row, artificial stays basic at zero
        allowed[artificial_cols] = False
        refresh_cost_row(m, c2)

    # phase 2
    state["bland"] = False
    state["degen_run"] = 0
    status = pivot_loop(m, c2)
    if status == "unbounded":
        return "unbounded", None, -math.inf
    refresh_cost_row(m, c2)
    x_std = np.zeros(n_tot)
    x_std[basis] = np.maximum(T[:m, -1], 0.0)
    if n_art and x_std[ns + n_slack:].max(initial=0.0) > 1e-7:
        return "infeasible", None, math.inf
    return "optimal", x_std[:ns], float(-T[m, -1])


def solve_arrays(A, senses, b, c, lo, hi, *, max_iter=None):
    """Minimize c@x over rows (A, senses, b) with bounds lo <= x <= hi.

    Returns (status, x, objective) in the original variable space.
    """
    m, n = A.shape
    if np.any(lo > hi):
        return "infeasible", None, math.inf
    S, row_senses, rhs, c_std, const, std = _standardize(A, senses, b, c, lo, hi)
    if max_iter is None:
        max_iter = max(20_000, 40 * (S.shape[0] + S.shape[1]))
    if S.shape[1] == 0:
        # everything fixed: check row feasibility directly
        x = std.recover(np.zeros(0))
        resid = A @ x if n else np.zeros(m)
        for i, s in enumerate(senses):
            if s == "<=" and resid[i] > b[i] + 1e-7:
                return "infeasible", None, math.inf
            if s == ">=" and resid[i] < b[i] - 1e-7:
                return "infeasible", None, math.inf
            if s == "=" and abs(resid[i] - b[i]) > 1e-7:
                return "infeasible", None, math.inf
        return "optimal", x, float(c @ x) if n else 0.0
    status, x_std, obj = _simplex_core(S, row_senses, rhs, c_std, max_iter)
    if status != "optimal":
        return status, None, obj
    x = std.recover(x_std)
    np.clip(x, lo, hi, out=x)
    return "optimal", x, float(obj + const)


def solve_lp(model: MilpModel, params: SolverParams | None = None) -> SolveResult:
    """Solve the model with integrality relaxed (binaries continuous in [0,1])."""
    params = params or SolverParams()
    comp = _Compiled(model)
    t0 = time.perf_counter()
    c = -comp.c if comp.maximize else comp.c
    status, x, obj = solve_arrays(comp.A, comp.senses, comp.b, c, comp.lo, comp.hi)
    wall = time.perf_counter() - t0
    if status != "optimal":
        if status == "unbounded" and comp.maximize:
            obj = math.inf
        return SolveResult(status=status, wall_time=wall)
    value = (-obj if comp.maximize else obj) + comp.c_const
    return SolveResult(status="optimal", objective=value, assignment=comp.assignment(x),
                       best_bound=value, nodes=0, wall_time=wall)
