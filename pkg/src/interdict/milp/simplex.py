"""Two-phase primal simplex on a dense tableau, with variable upper bounds.

Upper bounds are handled by the classic complementing trick: a variable that
moves to its upper bound is substituted by u - x, so every nonbasic variable
sits at zero and the tableau algebra stays textbook.  Pivoting is Dantzig
pricing with a permanent switch to Bland's rule after 1000 degenerate steps.
All tie-breaks are by lowest index, so the pivot sequence is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dger

from ..core import InputError
from ..models import CONTINUOUS, MilpModel

PIVOT_TOL = 1e-12  # hard floor on pivot magnitude
COEF_TOL = 1e-9  # below this a tableau entry counts as zero
RATIO_TOL = 1e-7  # ratio-test entries below this are too unstable to pivot on
REDCOST_TOL = 1e-9
FEAS_TOL = 1e-7  # phase-1 objective above this means infeasible
VERIFY_TOL = 1e-6  # relative residual that counts as numerical failure
MAX_PIVOTS = 200_000
BLAND_AFTER = 1000  # degenerate pivots before switching rules


class SolverError(RuntimeError):
    """Numerical failure or iteration blow-up inside the simplex."""


@dataclass(frozen=True)
class LpResult:
    """LP outcome; primal maps variable id to value when optimal."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float | None = None
    primal: dict[int, float] | None = None
    pivots: int = 0


@dataclass
class ArrayLp:
    """Dense-array view of a MilpModel used by the simplex and the tree search."""

    c: np.ndarray
    A: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray  # +inf for unbounded
    int_mask: np.ndarray  # True where the variable must be integral


def lower_model(model: MilpModel) -> ArrayLp:
    """Flatten a MilpModel into dense float arrays (exact data, one copy)."""
    ncols = len(model.variables)
    for pos, v in enumerate(model.variables):
        if v.vid != pos:
            raise InputError("variable ids must be dense and ordered")
    c = np.zeros(ncols)
    for vid, coef in model.objective:
        c[vid] += float(coef)
    lb = np.array([float(v.lb) for v in model.variables])
    ub = np.array(
        [math.inf if v.ub is None else float(v.ub) for v in model.variables]
    )
    A = np.zeros((len(model.constraints), ncols))
    rhs = np.zeros(len(model.constraints))
    senses = []
    for r, con in enumerate(model.constraints):
        for vid, coef in con.coeffs:
            A[r, vid] += float(coef)
        rhs[r] = float(con.rhs)
        senses.append(con.sense)
    int_mask = np.array([v.kind != CONTINUOUS for v in model.variables])
    return ArrayLp(c=c, A=A, senses=senses, rhs=rhs, lb=lb, ub=ub, int_mask=int_mask)


def solve_lp(model: MilpModel) -> LpResult:
    """Solve the LP relaxation of a model (integrality dropped)."""
    return solve_lp_arrays(lower_model(model))


def solve_lp_arrays(lp: ArrayLp, lb=None, ub=None, capture: dict | None = None) -> LpResult:
    """Solve min c'x s.t. Ax {<=,>=,=} rhs, lb <= x <= ub on raw arrays.

    ``lb``/``ub`` override the model bounds (used by branch and bound).
    When ``capture`` is a dict, the final tableau state is stored in it
    (consumed by the Gomory cut generator).
    """
    lb = lp.lb if lb is None else lb
    ub = lp.ub if ub is None else ub
    if not np.all(np.isfinite(lb)):
        raise SolverError("variables must have finite lower bounds")
    if np.any(ub - lb < -1e-12):
        return LpResult(status="infeasible")

    nstruct = lp.c.size
    room = ub - lb  # upper bounds in the shifted space
    b = lp.rhs - lp.A @ lb

    # presolve: drop empty rows, checking them for trivial infeasibility
    keep = []
    for r in range(lp.A.shape[0]):
        row = lp.A[r]
        if np.any(np.abs(row) > COEF_TOL):
            keep.append(r)
            continue
        s = lp.senses[r]
        if (
            (s == "<=" and b[r] < -FEAS_TOL)
            or (s == ">=" and b[r] > FEAS_TOL)
            or (s == "=" and abs(b[r]) > FEAS_TOL)
        ):
            return LpResult(status="infeasible")
    A = lp.A[keep].copy()
    b = b[keep].copy()
    senses = [lp.senses[r] for r in keep]
    m = A.shape[0]

    # normalize to b >= 0 so slacks/artificials give a feasible start
    for r in range(m):
        if b[r] < 0:
            A[r] = -A[r]
            b[r] = -b[r]
            senses[r] = {"<=": ">=", ">=": "<=", "=": "="}[senses[r]]

    # equilibrate rows to unit max coefficient (conditioning)
    if m:
        scale = np.maximum(np.abs(A).max(axis=1), 1e-8)
        A /= scale[:, None]
        b /= scale

    nslack = sum(1 for s in senses if s != "=")
    nart = sum(1 for s in senses if s != "<=")
    ntot = nstruct + nslack + nart
    T = np.zeros((m + 1, ntot + 1))
    T[:m, :nstruct] = A
    T[:m, -1] = b
    roomfull = np.full(ntot, math.inf)
    roomfull[:nstruct] = room
    art_start = nstruct + nslack
    basis = np.empty(m, dtype=int)
    si = nstruct
    ai = art_start
    for r in range(m):
        if senses[r] == "<=":
            T[r, si] = 1.0
            basis[r] = si
            si += 1
        elif senses[r] == ">=":
            T[r, si] = -1.0
            si += 1
            T[r, ai] = 1.0
            basis[r] = ai
            ai += 1
        else:
            T[r, ai] = 1.0
            basis[r] = ai
            ai += 1

    flipped = np.zeros(ntot, dtype=bool)
    eligible = roomfull > PIVOT_TOL
    pivots = 0
    if capture is not None:
        # initial rows define every slack/artificial column over structurals
        capture.update(
            A0=T[:m, :ntot].copy(), b0=b.copy(), senses0=list(senses),
            nstruct=nstruct, art_start=art_start, lb=lb.copy(), ub=ub.copy(),
        )

    # phase 1: minimize the artificial sum
    if nart:
        T[m, :] = 0.0
        T[m, art_start:ntot] = 1.0
        for r in range(m):
            if basis[r] >= art_start:
                T[m, :] -= T[r, :]
                T[m, basis[r]] = 0.0
        status, pivots = _iterate(
            T, basis, roomfull, flipped, eligible, art_start, pivots
        )
        if status == "unbounded":
            raise SolverError("phase 1 reported unbounded (cannot happen)")
        if -T[m, -1] > FEAS_TOL:
            return LpResult(status="infeasible", pivots=pivots)
        T, basis, m = _purge_artificials(T, basis, m, art_start)

    # phase 2: real objective, artificial columns frozen
    cext = np.zeros(ntot)
    cext[:nstruct] = lp.c
    cobj = np.where(flipped, -cext, cext)
    T[m, :] = 0.0
    T[m, :ntot] = cobj
    for r in range(m):
        cb = cobj[basis[r]]
        if cb != 0.0:
            T[m, :] -= cb * T[r, :]
            T[m, basis[r]] = 0.0
    eligible &= np.arange(ntot) < art_start
    status, pivots = _iterate(T, basis, roomfull, flipped, eligible, art_start, pivots)
    if status == "unbounded":
        return LpResult(status="unbounded", pivots=pivots)

    xt = np.zeros(ntot)
    xt[basis] = T[:m, -1]
    xt = np.where(flipped, roomfull - xt, xt)
    x = lb + np.clip(xt[:nstruct], 0.0, room)
    _verify(lp, x)
    obj = float(lp.c @ x)
    primal = {j: float(x[j]) for j in range(nstruct)}
    if capture is not None:
        capture.update(
            T=T, basis=basis.copy(), flipped=flipped.copy(), room=roomfull.copy()
        )
    return LpResult(status="optimal", objective=obj, primal=primal, pivots=pivots)


def _verify(lp: ArrayLp, x):
    """Reject solutions whose constraint residuals exceed the failure level."""
    if lp.A.shape[0] == 0:
        return
    resid = lp.A @ x - lp.rhs
    denom = 1.0 + np.abs(lp.rhs)
    worst = 0.0
    for r, s in enumerate(lp.senses):
        if s == "<=":
            worst = max(worst, resid[r] / denom[r])
        elif s == ">=":
            worst = max(worst, -resid[r] / denom[r])
        else:
            worst = max(worst, abs(resid[r]) / denom[r])
    if worst > VERIFY_TOL:
        raise SolverError(
            f"solution verification failed: relative residual {worst:.3e}"
        )


def _rank1_update(T, leave, j):
    """In-place pivot elimination: T -= col_j * row_leave (row already scaled)."""
    colj = T[:, j].copy()
    colj[leave] = 0.0
    dger(-1.0, T[leave], colj, a=T.T, overwrite_a=1)
    T[:, j] = 0.0
    T[leave, j] = 1.0


def _ratio_test(col, rhs, basis, roomfull, m, tol, bland, j):
    """Smallest blocking step for entering column j; (-1, room_j) means flip."""
    limit = np.full(m, math.inf)
    pos = col > tol
    limit[pos] = rhs[pos] / col[pos]
    neg = col < -tol
    caps = roomfull[basis]
    capped = neg & np.isfinite(caps)
    limit[capped] = (caps[capped] - rhs[capped]) / (-col[capped])
    np.maximum(limit, 0.0, out=limit)
    rmin = float(limit.min()) if m else math.inf

    leave = -1
    tstar = roomfull[j]  # bound-flip step wins ties
    if rmin < tstar:
        tstar = rmin
        tied = np.flatnonzero(limit == rmin)
        if bland:
            leave = int(tied[np.argmin(basis[tied])])
        else:
            leave = int(tied[np.argmax(np.abs(col[tied]))])
    return leave, tstar


def _iterate(T, basis, roomfull, flipped, eligible, art_start, pivots):
    """Run simplex pivots until optimal or unbounded; returns (status, pivots).

    Pricing is devex (reference weights, deterministic first-index ties) with
    a permanent switch to Bland's rule after 1000 degenerate steps.
    """
    m = T.shape[0] - 1
    ntot = T.shape[1] - 1
    degenerate = 0
    bland = False
    left_basis = np.zeros(ntot, dtype=bool)
    gamma = np.ones(ntot)  # devex reference weights
    while True:
        if pivots >= MAX_PIVOTS:
            raise SolverError(f"simplex exceeded {MAX_PIVOTS} pivots")
        d = T[m, :ntot]
        mask = eligible & ~left_basis & (d < -REDCOST_TOL)
        mask[basis] = False
        cand = np.flatnonzero(mask)
        if cand.size == 0:
            return "optimal", pivots
        if bland:
            j = int(cand[0])
        else:
            dj = d[cand]
            j = int(cand[np.argmax(dj * dj / gamma[cand])])

        col = T[:m, j]
        rhs = T[:m, -1]
        leave, tstar = _ratio_test(col, rhs, basis, roomfull, m, RATIO_TOL, bland, j)
        if not math.isfinite(tstar):
            # nothing above the stable threshold blocks; allow tiny pivots
            # before declaring the column a ray
            leave, tstar = _ratio_test(
                col, rhs, basis, roomfull, m, PIVOT_TOL, bland, j
            )
            if not math.isfinite(tstar):
                return "unbounded", pivots
        if tstar < PIVOT_TOL:
            degenerate += 1
            if degenerate >= BLAND_AFTER:
                bland = True

        if leave < 0:
            # entering variable flips to its upper bound; basis unchanged
            u = roomfull[j]
            T[:, -1] -= T[:, j] * u
            T[:, j] = -T[:, j]
            flipped[j] = not flipped[j]
            pivots += 1
            continue

        out = basis[leave]
        if col[leave] < 0:
            # leaving variable exits at its upper bound: substitute u - x for
            # it (its own unit entry is negated twice, so it stays +1)
            u = roomfull[out]
            T[leave, :] = -T[leave, :]
            T[leave, -1] += u
            T[leave, out] = -T[leave, out]
            flipped[out] = not flipped[out]
        piv = T[leave, j]
        if abs(piv) < PIVOT_TOL:
            raise SolverError(f"pivot {piv:.3e} below tolerance {PIVOT_TOL}")
        T[leave, :] /= piv
        _rank1_update(T, leave, j)
        if not bland:
            ge = gamma[j]
            row = T[leave, :ntot]
            np.maximum(gamma, row * row * ge, out=gamma)
            gamma[out] = max(1.0, ge / (piv * piv))
            if gamma.max() > 1e12:
                gamma[:] = 1.0  # new reference framework
        if out >= art_start:
            left_basis[out] = True
        basis[leave] = j
        pivots += 1


def _purge_artificials(T, basis, m, art_start):
    """Pivot basic artificials out after phase 1; drop redundant rows."""
    drop = []
    for r in range(m):
        if basis[r] < art_start:
            continue
        row = T[r, :art_start]
        nz = np.flatnonzero(np.abs(row) > RATIO_TOL)
        if nz.size == 0:
            drop.append(r)
            continue
        j = int(nz[0])
        T[r, :] /= T[r, j]
        _rank1_update(T, r, j)
        basis[r] = j
    if drop:
        keep = [r for r in range(m) if r not in set(drop)]
        T = np.vstack([T[keep], T[m : m + 1]])
        basis = basis[keep]
        m = len(keep)
    return T, basis, m
