import math
import random
from fractions import Fraction

import numpy as np
import pytest

from interdict.core import Instance
from interdict.milp import SolverError, solve_lp
from interdict.milp.simplex import ArrayLp, lower_model, solve_lp_arrays
from interdict.models import CONTINUOUS, LinearConstraint, MilpModel, Variable, build_model

DEMO = Instance(costs=(2, 3, 4, 5), weights=(3, 7, 4, 10), budget=10, p=1)


def lp_of(c, A, senses, rhs, lb=None, ub=None):
    n = len(c)
    return ArrayLp(
        c=np.array(c, dtype=float),
        A=np.array(A, dtype=float).reshape(len(senses), n),
        senses=list(senses),
        rhs=np.array(rhs, dtype=float),
        lb=np.zeros(n) if lb is None else np.array(lb, dtype=float),
        ub=np.full(n, math.inf) if ub is None else np.array(ub, dtype=float),
        int_mask=np.zeros(n, dtype=bool),
    )


def cover_greedy(costs, weights, target):
    """Fractional covering optimum: fill cheapest cost-per-weight first."""
    items = sorted(range(len(costs)), key=lambda i: (costs[i] / weights[i], i))
    total = 0.0
    need = target
    for i in items:
        take = min(1.0, need / weights[i])
        total += take * costs[i]
        need -= take * weights[i]
        if need <= 1e-12:
            break
    return total


class TestSolveLp:
    def test_cover_relaxation_demo(self):
        expected = cover_greedy(DEMO.costs, DEMO.weights, DEMO.budget + 1)
        assert expected == pytest.approx(5.0, abs=1e-12)
        res = solve_lp(build_model(DEMO, "IP1"))
        assert res.status == "optimal"
        assert res.objective == pytest.approx(5.0, abs=1e-9)
        assert res.primal[1] == pytest.approx(1.0, abs=1e-9)
        assert res.primal[3] == pytest.approx(0.4, abs=1e-9)

    def test_empty_model(self):
        model = MilpModel(
            formulation="EMPTY", variables=(), constraints=(), objective=(),
            item_map=(),
        )
        res = solve_lp(model)
        assert res.status == "optimal" and res.objective == 0.0

    def test_no_constraints_box_minimum(self):
        v = [
            Variable(vid=0, name="a", kind=CONTINUOUS, lb=Fraction(0),
                     ub=Fraction(2), role="aux"),
            Variable(vid=1, name="b", kind=CONTINUOUS, lb=Fraction(0),
                     ub=Fraction(3), role="aux"),
        ]
        model = MilpModel(
            formulation="BOX", variables=tuple(v), constraints=(),
            objective=((0, Fraction(1)), (1, Fraction(-2))), item_map=(),
        )
        res = solve_lp(model)
        assert res.objective == pytest.approx(-6.0)
        assert res.primal == {0: 0.0, 1: 3.0}

    def test_infeasible_bounds_pair(self):
        lp = lp_of([1.0], [[1.0], [1.0]], [">=", "<="], [1.0, 0.0], ub=[5.0])
        assert solve_lp_arrays(lp).status == "infeasible"

    def test_unbounded(self):
        lp = lp_of([-1.0, 0.0], [[1.0, -1.0]], ["<="], [2.0])
        assert solve_lp_arrays(lp).status == "unbounded"

    def test_equality_system(self):
        # x + y = 2, x - y = 0 -> x = y = 1
        lp = lp_of([1.0, 1.0], [[1, 1], [1, -1]], ["=", "="], [2.0, 0.0])
        res = solve_lp_arrays(lp)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(2.0, abs=1e-9)

    def test_redundant_row_is_harmless(self):
        lp = lp_of([1.0, 1.0], [[1, 1], [2, 2]], ["=", "="], [2.0, 4.0])
        res = solve_lp_arrays(lp)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(2.0, abs=1e-9)

    def test_empty_row_infeasible(self):
        lp = lp_of([1.0], [[1.0], [0.0]], ["<=", ">="], [5.0, 3.0])
        assert solve_lp_arrays(lp).status == "infeasible"

    def test_deterministic_pivot_sequence(self):
        m = build_model(DEMO, "IP2")
        a = solve_lp(m)
        b = solve_lp(m)
        assert a.pivots == b.pivots
        assert a.objective == b.objective
        assert a.primal == b.primal


class TestRandomLpsWithKnownOptima:
    def test_constructed_optimal_bases(self):
        rng = random.Random(1234)
        checked = 0
        while checked < 100:
            m = rng.randint(2, 6)
            n = m + rng.randint(1, 6)
            A = np.array(
                [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)],
                dtype=float,
            )
            cols = list(range(n))
            rng.shuffle(cols)
            basis = cols[:m]
            if abs(np.linalg.det(A[:, basis])) < 1e-6:
                continue
            xstar = np.zeros(n)
            for j in basis:
                xstar[j] = rng.randint(1, 9)
            b = A @ xstar
            y = np.array([rng.randint(-3, 3) for _ in range(m)], dtype=float)
            s = np.zeros(n)
            for j in cols[m:]:
                s[j] = rng.randint(0, 5)
            c = A.T @ y + s
            lp = lp_of(c, A, ["="] * m, b)
            res = solve_lp_arrays(lp)
            assert res.status == "optimal"
            assert res.objective == pytest.approx(float(c @ xstar), abs=1e-9)
            checked += 1


class TestResultQuality:
    @pytest.mark.parametrize("tag", ("IP1", "IP2", "IP3", "IP4", "IP5"))
    def test_constraints_satisfied_tightly(self, tag):
        m = build_model(DEMO, tag)
        lp = lower_model(m)
        res = solve_lp(m)
        x = np.array([res.primal[j] for j in range(lp.c.size)])
        resid = lp.A @ x - lp.rhs
        for r, sense in enumerate(lp.senses):
            if sense == "<=":
                assert resid[r] <= 1e-9 * (1 + abs(lp.rhs[r]))
            elif sense == ">=":
                assert resid[r] >= -1e-9 * (1 + abs(lp.rhs[r]))
            else:
                assert abs(resid[r]) <= 1e-9 * (1 + abs(lp.rhs[r]))
        assert np.all(x >= lp.lb - 1e-12)
        assert np.all(x <= np.where(np.isinf(lp.ub), np.inf, lp.ub) + 1e-12)

    def test_pivot_floor_error_message(self):
        with pytest.raises(SolverError):
            lp = lp_of([1.0], [[1.0]], [">="], [1.0])
            bad = ArrayLp(
                c=lp.c, A=lp.A, senses=lp.senses, rhs=lp.rhs,
                lb=np.array([-math.inf]), ub=lp.ub, int_mask=lp.int_mask,
            )
            solve_lp_arrays(bad)
