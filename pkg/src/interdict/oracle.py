"""Independent ground-truth solvers: subset enumeration and a weight-indexed DP.

Both solvers are deliberately separate from the MILP machinery so that every
formulation (and the greedy adversary) can be certified against them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AttackResult, InputError, Instance, Selection, robust_feasible

ENUM_MAX_N = 22
# action table is n of these, one byte per (budget, survivors, flag) state
DP_MAX_BYTES = 256_000_000

_INF = np.iinfo(np.int64).max // 4


class CapacityError(RuntimeError):
    """Requested exact solve exceeds the guarded size limits."""


@dataclass(frozen=True)
class ExactResult:
    """Outcome of an exact solve: status plus the optimum when one exists."""

    status: str  # "optimal" | "infeasible"
    best: Selection | None = None
    objective: int | None = None


def solve_enum(inst: Instance) -> ExactResult:
    """Brute force over all 2^n selections; ties go to the
    lexicographically smallest chosen vector."""
    n = inst.n
    if n > ENUM_MAX_N:
        raise CapacityError(f"enumeration guarded at n <= {ENUM_MAX_N}, got {n}")
    order = inst.weight_order()
    best_cost = None
    best_bits = None
    for mask in range(1 << n):
        bits = tuple((mask >> i) & 1 for i in range(n))
        size = 0
        cost = 0
        for i in range(n):
            if bits[i]:
                size += 1
                cost += inst.costs[i]
        if best_cost is not None and cost > best_cost:
            continue
        # greedy attack over the weight-sorted selected items
        spent = 0
        failed = 0
        for i in order:
            if bits[i]:
                if spent + inst.weights[i] > inst.budget:
                    break
                spent += inst.weights[i]
                failed += 1
        if size - failed < inst.p:
            continue
        if best_cost is None or cost < best_cost or (
            cost == best_cost and bits < best_bits
        ):
            best_cost = cost
            best_bits = bits
    if best_cost is None:
        return ExactResult(status="infeasible")
    sel = Selection.of(inst, best_bits)
    return ExactResult(status="optimal", best=sel, objective=sel.cost)


def solve_dp(inst: Instance) -> ExactResult:
    """Exact optimum via DP over items in weight-sorted order.

    State per item prefix: (attack budget spent, survivors capped at p,
    overflow flag).  Selecting an item either extends the adversary's greedy
    prefix (flag clear and it still fits the budget) or survives and sets the
    flag; the flag encodes that the greedy attack has already stopped.
    """
    n, B, p = inst.n, inst.budget, inst.p
    cells = (B + 1) * (p + 1) * 2
    if n * cells > DP_MAX_BYTES:
        raise CapacityError(
            f"DP state space {n}x{B + 1}x{p + 1}x2 exceeds the memory budget"
        )
    order = inst.weight_order()

    cost = np.full((B + 1, p + 1, 2), _INF, dtype=np.int64)
    cost[0, 0, 0] = 0
    # action codes: 0 skip, 1 attacked, 2/3 survive from (s-1, flag 0/1),
    # 4/5 survive at the survivor cap from flag 0/1
    actions = []
    for i in order:
        w, c = inst.weights[i], inst.costs[i]
        nxt = cost.copy()
        act = np.zeros((B + 1, p + 1, 2), dtype=np.uint8)

        def update(dst, cand, code):
            better = cand < nxt[dst]
            nxt[dst][better] = cand[better]
            act[dst][better] = code

        if w <= B:
            # selected and attacked: budget grows by w, flag stays clear
            update(
                (slice(w, B + 1), slice(None), 0),
                cost[: B + 1 - w, :, 0] + c,
                1,
            )
        # selected but does not fit (flag was clear): survives, sets flag
        lo = max(0, B - w + 1)
        update((slice(lo, B + 1), slice(1, p + 1), 1), cost[lo:, :p, 0] + c, 2)
        update((slice(None), slice(1, p + 1), 1), cost[:, :p, 1] + c, 3)
        # survivor count stays capped at p
        update((slice(lo, B + 1), p, 1), cost[lo:, p, 0] + c, 4)
        update((slice(None), p, 1), cost[:, p, 1] + c, 5)

        actions.append(act)
        cost = nxt

    final = cost[:, p, :]
    if final.min() >= _INF:
        return ExactResult(status="infeasible")
    flat = int(np.argmin(final))
    b, f = flat // 2, flat % 2
    s = p
    chosen = [0] * n
    for i, act in zip(reversed(order), reversed(actions)):
        code = int(act[b, s, f])
        if code == 0:
            continue
        chosen[i] = 1
        if code == 1:
            b -= inst.weights[i]
        elif code in (2, 3):
            s -= 1
            f = 0 if code == 2 else 1
        else:
            f = 0 if code == 4 else 1
    sel = Selection.of(inst, chosen)
    ok, _ = robust_feasible(inst, sel)
    assert ok, "DP reconstruction produced an infeasible selection"
    return ExactResult(status="optimal", best=sel, objective=sel.cost)


def phi_enum(inst: Instance, x: Selection) -> AttackResult:
    """Reference attack maximizer by exhaustive subset enumeration.

    Ties prefer smaller spent weight, then the lexicographically smallest
    attacked index set.
    """
    if inst.n > ENUM_MAX_N:
        raise CapacityError(f"enumeration guarded at n <= {ENUM_MAX_N}, got {inst.n}")
    if len(x.chosen) != inst.n:
        raise InputError(
            f"selection has length {len(x.chosen)}, instance has n={inst.n}"
        )
    support = x.support
    m = len(support)
    best = (0, 0, ())  # (-value, spent, indices) minimized
    best_key = (0, 0, ())
    for mask in range(1 << m):
        spent = 0
        indices = []
        for j in range(m):
            if (mask >> j) & 1:
                spent += inst.weights[support[j]]
                indices.append(support[j])
        if spent > inst.budget:
            continue
        key = (-len(indices), spent, tuple(indices))
        if key < best_key:
            best_key = key
            best = (len(indices), spent, tuple(indices))
    return AttackResult(value=best[0], attacked=best[2], spent=best[1])
