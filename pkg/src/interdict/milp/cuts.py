"""Gomory mixed-integer cuts extracted from an optimal dense tableau.

Cuts are derived in the solver's complemented/shifted space (every nonbasic
variable sits at zero there) and translated back to original variable space
so they can join the row system globally.  Slack columns are substituted
through their defining rows; artificial columns are identically zero at
feasible points and are dropped.  Validity safeguards: cuts with extreme
coefficient ranges are rejected, tiny positive coefficients are dropped
with an rhs compensation, and every rhs is relaxed by a small epsilon so
floating-point error cannot cut off integer points.
"""

from __future__ import annotations

import math

import numpy as np

F0_MIN = 0.05  # basic fractionality window worth cutting on
RANGE_MAX = 1e5  # max coefficient dynamic range
DROP_TOL = 1e-11
RHS_RELAX = 1e-7


def gmi_cuts(capture: dict, int_mask, max_cuts: int = 50):
    """Generate GMI rows (coefs, rhs) with sense >= from a captured tableau."""
    T = capture["T"]
    basis = capture["basis"]
    flipped = capture["flipped"]
    room = capture["room"]
    A0 = capture["A0"]
    b0 = capture["b0"]
    nstruct = capture["nstruct"]
    art_start = capture["art_start"]
    lb = capture["lb"]
    ub = capture["ub"]

    m = T.shape[0] - 1
    ntot = T.shape[1] - 1
    # slack/artificial column -> defining row
    col_row = {}
    for j in range(nstruct, ntot):
        rows = np.flatnonzero(np.abs(A0[:, j]) > 0.5)
        if rows.size == 1:
            col_row[j] = int(rows[0])

    integral = np.zeros(ntot, dtype=bool)
    integral[:nstruct] = int_mask

    # rank candidate rows by how central the fractional part is
    cand = []
    for i in range(m):
        v = int(basis[i])
        if v >= nstruct or not int_mask[v]:
            continue
        f0 = T[i, -1] - math.floor(T[i, -1])
        if F0_MIN < f0 < 1.0 - F0_MIN:
            cand.append((-min(f0, 1 - f0), i, f0))
    cand.sort()

    cuts = []
    for _, i, f0 in cand[:max_cuts]:
        row = T[i, :ntot]
        ratio = f0 / (1.0 - f0)
        coefs = np.zeros(nstruct)
        rhs = f0
        ok = True
        basic_set = set(int(b) for b in basis)
        for j in range(ntot):
            a = row[j]
            if j in basic_set or abs(a) < DROP_TOL:
                continue
            if integral[j]:
                fj = a - math.floor(a)
                gamma = fj if fj <= f0 else ratio * (1.0 - fj)
            else:
                gamma = a if a > 0 else ratio * (-a)
            if gamma < DROP_TOL:
                continue
            if j < nstruct:
                if flipped[j]:
                    coefs[j] -= gamma
                    rhs -= gamma * ub[j]
                else:
                    coefs[j] += gamma
                    rhs += gamma * lb[j]
            elif j < art_start:
                r = col_row.get(j)
                if r is None:
                    ok = False
                    break
                sigma = A0[r, j]  # +1 slack, -1 surplus
                arow = A0[r, :nstruct]
                # s = sigma * (b0_r - arow . (x - lb)) over structural columns
                coefs -= gamma * sigma * arow
                rhs -= gamma * sigma * (b0[r] + float(arow @ lb))
            # artificial columns are zero at every feasible point: drop

        if not ok:
            continue
        mags = np.abs(coefs[np.abs(coefs) > DROP_TOL])
        if mags.size == 0:
            continue
        if mags.max() / mags.min() > RANGE_MAX or mags.max() > 1e9:
            continue
        # drop numerically tiny entries, compensating the rhs where needed
        small = (np.abs(coefs) > 0) & (np.abs(coefs) < mags.max() * 1e-10)
        if np.any(small):
            pos = small & (coefs > 0)
            if np.any(pos & ~np.isfinite(ub)):
                continue
            rhs -= float(np.sum(coefs[pos] * ub[pos]))
            coefs[small] = 0.0
        rhs -= RHS_RELAX * max(1.0, abs(rhs))
        top = mags.max()
        cuts.append((coefs / top, rhs / top))  # unit max coefficient
    return cuts
