"""LP-based branch and bound for the formulation models.

Node selection is best-bound, with depth-first dives until the first
incumbent is found.  Branching picks the most fractional integer variable
(ties by lowest id); dives follow the up-child, which is the feasible side
for the covering-style models built here.  When every objective coefficient
is integral the node bound is lifted to the next integer, so the search can
fathom nodes once the gap drops below 1; the generic fathoming rule uses an
absolute gap of 1e-6.

Nodes whose remaining fractional integers all carry zero objective weight
(the indicator variables of the formulations) are closed by a rounding
completion: pin those variables to the ceiling of their LP values and
re-solve the continuous rest.  A feasible completion matches the node bound
exactly, which both yields an incumbent and fathoms the node.

Everything is deterministic: repeated solves of the same model give the
same node count and incumbent.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from ..models import MilpModel
from .cuts import gmi_cuts
from .simplex import ArrayLp, LpResult, SolverError, lower_model, solve_lp_arrays

INT_TOL = 1e-6
GAP_TOL = 1e-6
LIFT_EPS = 1e-9
CUT_ROUNDS = 12
CUT_PER_ROUND = 40
CUT_MAX_TOTAL = 500
CUT_MIN_INTS = 25  # below this the plain tree search wins; skip cut rounds
PROBE_PAIR_CAP = 800


def _with_rows(lp: ArrayLp, rows) -> ArrayLp:
    if not rows:
        return lp
    A = np.vstack([lp.A] + [c[None, :] for c, _ in rows])
    rhs = np.concatenate([lp.rhs, np.array([r for _, r in rows])])
    senses = list(lp.senses) + [">="] * len(rows)
    return ArrayLp(
        c=lp.c, A=A, senses=senses, rhs=rhs, lb=lp.lb, ub=lp.ub, int_mask=lp.int_mask
    )


def _probe_implications(lp: ArrayLp):
    """LP probing over binary pairs sharing a row: returns implication rows
    (x_a <= y_b as a >= row) and variables provably fixed to zero.

    Sound because binaries live inside the LP region: if the LP minimum of b
    under a = 1 is strictly positive, every integer point with a = 1 has
    b = 1; if that LP is infeasible, no feasible point has a = 1 at all.
    """
    nb = lp.c.size
    binary = lp.int_mask & (lp.lb == 0.0) & (lp.ub == 1.0)
    pairs = []
    seen = set()
    for r in range(lp.A.shape[0]):
        row = lp.A[r]
        nz = np.flatnonzero(row)
        if lp.senses[r] == "=":
            continue
        geq = lp.senses[r] == ">="
        negs = [j for j in nz if binary[j] and ((row[j] < 0) == geq)]
        poss = [
            j for j in nz if binary[j] and lp.c[j] == 0.0 and ((row[j] > 0) == geq)
        ]
        for a in negs:
            for b in poss:
                if a != b and (a, b) not in seen:
                    seen.add((a, b))
                    pairs.append((a, b))
    rows = []
    fixed_zero = []
    if len(pairs) > PROBE_PAIR_CAP:
        return rows, fixed_zero
    for a, b in sorted(pairs):
        lb2 = lp.lb.copy()
        lb2[a] = 1.0
        probe_c = np.zeros(nb)
        probe_c[b] = 1.0
        probe = ArrayLp(
            c=probe_c, A=lp.A, senses=lp.senses, rhs=lp.rhs,
            lb=lb2, ub=lp.ub, int_mask=lp.int_mask,
        )
        res = solve_lp_arrays(probe)
        if res.status == "infeasible":
            fixed_zero.append(a)
        elif res.status == "optimal" and res.objective > 1e-5:
            coefs = np.zeros(nb)
            coefs[b] = 1.0
            coefs[a] = -1.0
            rows.append((coefs, 0.0))  # y_b - x_a >= 0
    return rows, fixed_zero


def _strengthen_root(lp: ArrayLp) -> ArrayLp:
    """Root bound strengthening: probing implications plus GMI cut rounds."""
    imp_rows, fixed_zero = _probe_implications(lp)
    if fixed_zero:
        ub = lp.ub.copy()
        for vid in fixed_zero:
            ub[vid] = 0.0
        lp = ArrayLp(
            c=lp.c, A=lp.A, senses=lp.senses, rhs=lp.rhs,
            lb=lp.lb, ub=ub, int_mask=lp.int_mask,
        )
    rows = list(imp_rows)
    base = lp
    cur = _with_rows(base, rows)
    if int(np.count_nonzero(lp.int_mask)) < CUT_MIN_INTS:
        return cur
    prev_obj = None
    for _ in range(CUT_ROUNDS):
        cap = {}
        res = solve_lp_arrays(cur, capture=cap)
        if res.status != "optimal":
            break
        if prev_obj is not None and res.objective - prev_obj < 1e-4 * max(
            1.0, abs(prev_obj)
        ):
            break
        prev_obj = res.objective
        new = gmi_cuts(cap, lp.int_mask, max_cuts=CUT_PER_ROUND)
        xvec = np.array([res.primal[j] for j in range(lp.c.size)])
        new = [(c, r) for c, r in new if float(c @ xvec) < r - 1e-7]
        room = CUT_MAX_TOTAL - len(rows)
        if not new or room <= 0:
            break
        rows.extend(new[:room])
        cur = _with_rows(base, rows)
    return cur


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float | None = None
    node_limit: int | None = None


@dataclass(frozen=True)
class MilpResult:
    """Tree-search outcome; primal carries the incumbent assignment."""

    status: str  # "optimal" | "infeasible" | "time_limit"
    objective: float | None
    bound: float
    nodes: int
    wall_time: float
    primal: dict[int, float] | None = None


class _Node:
    __slots__ = ("est", "parent", "deltas")

    def __init__(self, est, parent, deltas):
        self.est = est  # valid lower bound inherited from the parent LP
        self.parent = parent
        self.deltas = deltas  # {vid: (lb, ub)}


def _node_bounds(lp: ArrayLp, node: _Node):
    lb = lp.lb.copy()
    ub = lp.ub.copy()
    chain = []
    cur = node
    while cur is not None:
        chain.append(cur.deltas)
        cur = cur.parent
    for deltas in reversed(chain):
        for vid, (lo, hi) in deltas.items():
            lb[vid] = lo
            ub[vid] = hi
    return lb, ub


def solve_bb(model: MilpModel, limits: SolveLimits | None = None) -> MilpResult:
    """Exact minimum of a mixed-integer model, or the best bound at a limit."""
    limits = limits or SolveLimits()
    start = time.monotonic()
    lp = _strengthen_root(lower_model(model))
    int_vids = [int(v) for v in np.flatnonzero(lp.int_mask)]
    integral_obj = _objective_is_integral(model)

    def lift(value: float) -> float:
        if integral_obj:
            return math.ceil(value - LIFT_EPS)
        return value

    def fathomed(bound, inc) -> bool:
        if inc is None:
            return False
        if integral_obj:
            return bound > inc - 1 + 1e-9
        return bound >= inc - GAP_TOL

    inc_obj = None
    inc_primal = None
    nodes = 0
    seq = 0
    stack = [_Node(-math.inf, None, {})]
    heap = []  # (est, seq, node)
    hit_limit = False

    while stack or heap:
        if limits.time_limit is not None and time.monotonic() - start > limits.time_limit:
            hit_limit = True
            break
        if limits.node_limit is not None and nodes >= limits.node_limit:
            hit_limit = True
            break
        if inc_obj is None and stack:
            node = stack.pop()
        else:
            if stack:  # first incumbent just arrived: dive leftovers join the heap
                for leftover in stack:
                    seq += 1
                    heapq.heappush(heap, (leftover.est, seq, leftover))
                stack = []
            if not heap:
                break
            est, _, node = heapq.heappop(heap)
            if fathomed(est, inc_obj):
                continue

        lb, ub = _node_bounds(lp, node)
        res = solve_lp_arrays(lp, lb, ub)
        nodes += 1
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            raise SolverError("LP relaxation is unbounded; model is not well-formed")
        bound = lift(res.objective)
        if fathomed(bound, inc_obj):
            continue

        fractional = [
            vid
            for vid in int_vids
            if abs(res.primal[vid] - round(res.primal[vid])) > INT_TOL
        ]
        if not fractional:
            cand = round(res.objective) if integral_obj else res.objective
            if inc_obj is None or cand < inc_obj:
                inc_obj = cand
                inc_primal = res.primal
            continue

        if all(lp.c[vid] == 0.0 for vid in fractional):
            # only zero-cost indicators are fractional: their minimal integral
            # completion (ceiling) either meets the node bound or is infeasible
            comp = _fix_and_solve(lp, lb, ub, res, int_vids, mode="ceil")
            if comp is not None:
                cand = round(comp.objective) if integral_obj else comp.objective
                if inc_obj is None or cand < inc_obj:
                    inc_obj = cand
                    inc_primal = comp.primal
                if cand <= bound + GAP_TOL:
                    continue  # subtree optimum attained; node closed
        elif nodes == 1:
            for mode in ("nearest", "ceil"):
                comp = _fix_and_solve(lp, lb, ub, res, int_vids, mode=mode)
                if comp is not None:
                    cand = round(comp.objective) if integral_obj else comp.objective
                    if inc_obj is None or cand < inc_obj:
                        inc_obj = cand
                        inc_primal = comp.primal

        branch_vid, branch_val = _most_fractional(res, fractional)
        down = _Node(bound, node, {branch_vid: (lb[branch_vid], math.floor(branch_val))})
        up = _Node(bound, node, {branch_vid: (math.ceil(branch_val), ub[branch_vid])})
        if inc_obj is None:
            seq += 1
            heapq.heappush(heap, (down.est, seq, down))
            stack.append(up)  # dive up: the feasible side of covering rows
        else:
            for child in (up, down):
                if not fathomed(child.est, inc_obj):
                    seq += 1
                    heapq.heappush(heap, (child.est, seq, child))

    wall = time.monotonic() - start
    open_ests = [node.est for node in stack] + [est for est, _, _ in heap]
    if hit_limit:
        bound = min(open_ests) if open_ests else (inc_obj if inc_obj is not None else math.inf)
        if inc_obj is not None:
            bound = min(bound, inc_obj)
        return MilpResult(
            status="time_limit",
            objective=inc_obj,
            bound=bound,
            nodes=nodes,
            wall_time=wall,
            primal=inc_primal,
        )
    if inc_obj is None:
        return MilpResult(
            status="infeasible",
            objective=None,
            bound=math.inf,
            nodes=nodes,
            wall_time=wall,
        )
    return MilpResult(
        status="optimal",
        objective=inc_obj,
        bound=inc_obj,
        nodes=nodes,
        wall_time=wall,
        primal=inc_primal,
    )


def _objective_is_integral(model: MilpModel) -> bool:
    kinds = {v.vid: v.kind for v in model.variables}
    for vid, coef in model.objective:
        if coef.denominator != 1 or kinds[vid] == "continuous":
            return False
    return True


def _most_fractional(res: LpResult, fractional):
    """Fractional integer variable farthest from integrality (ties: lowest id)."""
    best_vid = None
    best_val = None
    best_dist = -1.0
    for vid in fractional:
        val = res.primal[vid]
        dist = abs(val - round(val))
        if dist > best_dist:
            best_vid, best_val, best_dist = vid, val, dist
    return best_vid, best_val


def _fix_and_solve(lp, lb, ub, res, int_vids, mode):
    """Pin integer variables to rounded LP values and re-solve the rest.

    mode "nearest" rounds to the closest integer, "ceil" rounds fractional
    values up (the feasible direction for covering constraints).  Returns an
    LpResult or None when the completion is infeasible.
    """
    lb2 = lb.copy()
    ub2 = ub.copy()
    for vid in int_vids:
        val = res.primal[vid]
        if mode == "nearest" or abs(val - round(val)) <= INT_TOL:
            v = float(round(val))
        else:
            v = float(math.ceil(val))
        v = float(np.clip(v, lb[vid], ub[vid]))
        lb2[vid] = v
        ub2[vid] = v
    fixed = solve_lp_arrays(lp, lb2, ub2)
    return fixed if fixed.status == "optimal" else None
