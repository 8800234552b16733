"""Branch-and-bound MILP solver over LP relaxations.

Nodes are solved with the in-repo simplex. Before each LP the node runs a
bound-propagation pass (fixed-variable substitution plus activity-based
tightening on the canonical <= rows); with many inputs fixed this collapses
tree and network blocks without any pivoting. Branching is most-fractional
(ties: lowest variable index), exploration dives depth-first and falls back
to the best-bound node when a dive is pruned.
"""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from .model import MilpModel, NumericalBreakdown, SolveResult, SolverParams, _Compiled
from .simplex import solve_arrays

_INT_TOL = 1e-6
_TIGHTEN_EPS = 1e-9
_MAX_PASSES = 200


class _Propagator:
    """Activity-based bound tightening on canonical <= rows."""

    def __init__(self, comp: _Compiled, feas_tol: float):
        rows = []
        for i, sense in enumerate(comp.senses):
            a, r = comp.A[i], comp.b[i]
            if sense in ("<=", "="):
                rows.append((a, r))
            if sense in (">=", "="):
                rows.append((-a, -r))
        self.row_idx = []
        self.row_coef = []
        self.row_rhs = np.empty(len(rows))
        nvars = comp.A.shape[1]
        var_rows: list[list[int]] = [[] for _ in range(nvars)]
        for k, (a, r) in enumerate(rows):
            nz = np.flatnonzero(a)
            self.row_idx.append(nz)
            self.row_coef.append(a[nz])
            self.row_rhs[k] = r
            for j in nz:
                var_rows[j].append(k)
        self.var_rows = [np.array(v, dtype=int) for v in var_rows]
        self.binary = comp.binary_mask
        self.feas_tol = feas_tol

    def run(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        """Tighten lo/hi in place; False when some row is proven infeasible."""
        n_rows = len(self.row_idx)
        if n_rows == 0:
            return bool(np.all(lo <= hi + self.feas_tol))
        pending = set(range(n_rows))
        passes = 0
        while pending and passes < _MAX_PASSES * n_rows:
            k = pending.pop()
            passes += 1
            idx, coef, rhs = self.row_idx[k], self.row_coef[k], self.row_rhs[k]
            l, h = lo[idx], hi[idx]
            contrib = np.where(coef > 0, coef * l, coef * h)
            minact = contrib.sum()
            if minact > rhs + self.feas_tol:
                return False
            if math.isinf(minact):
                n_inf = np.count_nonzero(np.isinf(contrib))
            else:
                n_inf = 0
            for t in range(idx.size):
                cj = contrib[t]
                if n_inf > 1 or (n_inf == 1 and not math.isinf(cj)):
                    continue  # residual activity unbounded below: nothing to learn
                if n_inf == 0:
                    resid = minact - cj
                else:  # cj is the single infinite contribution
                    resid = contrib[np.arange(idx.size) != t].sum()
                a = coef[t]
                j = idx[t]
                limit = (rhs - resid) / a
                changed = False
                if a > 0:
                    cur = hi[j]
                    if math.isinf(cur):
                        changed = limit < cur
                    else:
                        changed = limit < cur - _TIGHTEN_EPS * (1.0 + abs(cur))
                    if changed:
                        hi[j] = limit
                else:
                    cur = lo[j]
                    if math.isinf(cur):
                        changed = limit > cur
                    else:
                        changed = limit > cur + _TIGHTEN_EPS * (1.0 + abs(cur))
                    if changed:
                        lo[j] = limit
                if changed:
                    if self.binary[j]:
                        if hi[j] < 1.0 - _INT_TOL:
                            hi[j] = 0.0
                        if lo[j] > _INT_TOL:
                            lo[j] = 1.0
                    if lo[j] > hi[j] + self.feas_tol:
                        return False
                    if lo[j] > hi[j]:
                        mid = 0.5 * (lo[j] + hi[j])
                        lo[j] = hi[j] = mid
                    pending.update(self.var_rows[j].tolist())
        return True


def _most_fractional(x: np.ndarray, binary_mask: np.ndarray) -> int:
    frac = np.abs(x - np.round(x))
    frac[~binary_mask] = 0.0
    if frac.max(initial=0.0) <= _INT_TOL:
        return -1
    score = np.where(binary_mask, -np.abs(frac - 0.5), -np.inf)
    best = np.flatnonzero(score == score.max())
    return int(best[0])


def solve_milp(model: MilpModel, params: SolverParams | None = None) -> SolveResult:
    """Best-bound branch-and-bound; statuses optimal/infeasible/unbounded/limits."""
    params = params or SolverParams()
    comp = _Compiled(model)
    t0 = time.perf_counter()
    c = -comp.c if comp.maximize else comp.c
    prop = _Propagator(comp, params.feas_tol)

    lo0, hi0 = comp.lo.copy(), comp.hi.copy()
    if not prop.run(lo0, hi0):
        return SolveResult(status="infeasible", nodes=0,
                           wall_time=time.perf_counter() - t0)

    incumbent = math.inf
    incumbent_x = None
    heap: list = []  # (bound, tiebreak, lo, hi)
    tie = 0
    nodes = 0
    limit_status = None
    current = (-math.inf, lo0, hi0)

    def gap_abs():
        return params.gap_tol * max(1.0, abs(incumbent))

    while True:
        if current is None:
            while heap and heap[0][0] >= incumbent - gap_abs():
                heapq.heappop(heap)
            if not heap:
                break
            bound, _, lo, hi = heapq.heappop(heap)
            current = (bound, lo, hi)
            continue
        if nodes >= params.node_limit:
            limit_status = "node_limit"
            break
        if time.perf_counter() - t0 > params.time_limit:
            limit_status = "time_limit"
            break
        _, lo, hi = current
        current = None
        status, x, obj = solve_arrays(comp.A, comp.senses, comp.b, c, lo, hi)
        nodes += 1
        if status == "infeasible":
            continue
        if status == "unbounded":
            return SolveResult(status="unbounded", nodes=nodes,
                               wall_time=time.perf_counter() - t0)
        if obj >= incumbent - gap_abs():
            continue
        j = _most_fractional(x, comp.binary_mask)
        if j < 0:
            xr = x.copy()
            bin_idx = np.flatnonzero(comp.binary_mask)
            xr[bin_idx] = np.round(xr[bin_idx])
            incumbent = obj
            incumbent_x = xr
            continue
        lo_up, hi_up = lo.copy(), hi.copy()
        lo_dn, hi_dn = lo.copy(), hi.copy()
        lo_up[j] = 1.0
        hi_dn[j] = 0.0
        up_ok = prop.run(lo_up, hi_up)
        dn_ok = prop.run(lo_dn, hi_dn)
        dive_up = x[j] >= 0.5
        first = (obj, lo_up, hi_up) if dive_up else (obj, lo_dn, hi_dn)
        second = (obj, lo_dn, hi_dn) if dive_up else (obj, lo_up, hi_up)
        first_ok = up_ok if dive_up else dn_ok
        second_ok = dn_ok if dive_up else up_ok
        if second_ok:
            tie += 1
            heapq.heappush(heap, (second[0], tie, second[1], second[2]))
        if first_ok:
            current = first

    wall = time.perf_counter() - t0
    open_bounds = [b for b, *_ in heap]
    if current is not None:
        open_bounds.append(current[0])
    if limit_status is None:
        best_bound = incumbent
    else:
        best_bound = min(open_bounds + [incumbent]) if (open_bounds or incumbent_x is not None) else -math.inf

    if incumbent_x is None:
        if limit_status is not None:
            sign = -1.0 if comp.maximize else 1.0
            return SolveResult(status=limit_status, nodes=nodes, wall_time=wall,
                               best_bound=sign * best_bound + comp.c_const
                               if math.isfinite(best_bound) else sign * best_bound)
        return SolveResult(status="infeasible", nodes=nodes, wall_time=wall)

    assignment = comp.assignment(incumbent_x)
    violations = model.check_assignment(assignment, tol=10 * params.feas_tol)
    if violations:
        raise NumericalBreakdown(f"incumbent violates {violations[:5]} beyond tolerance")
    sign = -1.0 if comp.maximize else 1.0
    return SolveResult(
        status=limit_status or "optimal",
        objective=sign * incumbent + comp.c_const,
        assignment=assignment,
        best_bound=sign * best_bound + comp.c_const,
        nodes=nodes,
        wall_time=wall,
    )
