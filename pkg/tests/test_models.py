import random
from fractions import Fraction

import pytest

from interdict.core import Instance, Selection, robust_feasible
from interdict.instgen import GenSpec, generate
from interdict.milp import solve_bb, solve_lp
from interdict.models import (
    FORMULATIONS,
    AssumptionViolation,
    ExtractionError,
    UnsupportedFormulation,
    build_model,
    extract_selection,
    model_size,
    normalize_formulation,
    phi_lambda_lp,
)
from interdict.oracle import phi_enum, solve_dp

DEMO = Instance(costs=(2, 3, 4, 5), weights=(3, 7, 4, 10), budget=10, p=1)


def closed_forms(n):
    """Variables/constraints added by each formulation, as closed formulas."""
    return {
        "IP1": (0, 0, 0),
        "IP2": ((n * n + 3 * n) // 2 + 1, 0, n * n + 2 * n),
        "IP3": ((n * n + n) // 2 + 1, n, n * n + 3 * n),
        "IP4": (n * n + n, n, n * n + n),
        "IP5": (0, n, n),
    }


class TestBuildModel:
    def test_ip1_demo_single_cover_row(self):
        m = build_model(DEMO, "IP1")
        assert len(m.constraints) == 1
        con = m.constraints[0]
        assert con.sense == ">=" and con.rhs == 11
        assert [(vid, int(c)) for vid, c in con.coeffs] == [
            (0, 3), (1, 7), (2, 4), (3, 10),
        ]
        assert [(vid, int(c)) for vid, c in m.objective] == [
            (0, 2), (1, 3), (2, 4), (3, 5),
        ]

    def test_ip1_requires_p_equal_one(self):
        inst = Instance(costs=(1, 1, 1), weights=(1, 1, 1), budget=2, p=2)
        with pytest.raises(UnsupportedFormulation):
            build_model(inst, "IP1")

    @pytest.mark.parametrize("tag", FORMULATIONS)
    def test_unattackable_item_rejected(self, tag):
        inst = Instance(costs=(1, 1), weights=(3, 12), budget=10, p=1)
        with pytest.raises(AssumptionViolation):
            build_model(inst, tag)

    def test_unknown_tag(self):
        from interdict.core import InputError

        with pytest.raises(InputError):
            build_model(DEMO, "ip9")

    def test_tag_normalization(self):
        assert normalize_formulation("ip-3") == "IP3"
        assert build_model(DEMO, "ip2").formulation == "IP2"

    @pytest.mark.parametrize("tag", ("IP2", "IP3", "IP5"))
    def test_sorted_item_map(self, tag):
        m = build_model(DEMO, tag)
        # weight order with index tie-break: items 1, 3, 2, 4 (1-based)
        assert [item for _, item in m.item_map] == [0, 2, 1, 3]

    @pytest.mark.parametrize("tag", ("IP1", "IP4"))
    def test_original_item_order(self, tag):
        m = build_model(DEMO, tag)
        assert [item for _, item in m.item_map] == [0, 1, 2, 3]

    def test_big_m_is_budget_plus_one(self):
        m = build_model(DEMO, "IP5")
        rows = [c for c in m.constraints[1:]]
        coefs = {vid: coef for vid, coef in rows[0].coeffs}
        y_vid = next(v.vid for v in m.variables if v.name == "y1")
        assert coefs[y_vid] == DEMO.budget + 1

    def test_variable_ids_dense_and_binary_x(self):
        for tag in FORMULATIONS:
            m = build_model(DEMO, tag)
            for pos, v in enumerate(m.variables):
                assert v.vid == pos
            for vid, _ in m.item_map:
                v = m.variables[vid]
                assert v.kind == "binary" and (v.lb, v.ub) == (0, 1)


class TestModelSize:
    @pytest.mark.parametrize("n", (5, 10, 50))
    @pytest.mark.parametrize("tag", FORMULATIONS)
    def test_closed_forms(self, n, tag):
        inst = Instance(
            costs=(3,) * n, weights=(2,) * n, budget=2 * n, p=1
        )
        report = model_size(build_model(inst, tag))
        cont, disc, cons = closed_forms(n)[tag]
        assert report.continuous_added == cont
        assert report.discrete_added == disc
        assert report.constraints_added == cons

    def test_ip2_n10_example(self):
        inst = Instance(costs=(1,) * 10, weights=(1,) * 10, budget=10, p=1)
        report = model_size(build_model(inst, "IP2"))
        assert (report.continuous_added, report.discrete_added,
                report.constraints_added) == (66, 0, 120)

    def test_ip5_n10_example(self):
        inst = Instance(costs=(1,) * 10, weights=(1,) * 10, budget=10, p=1)
        report = model_size(build_model(inst, "IP5"))
        assert (report.continuous_added, report.discrete_added,
                report.constraints_added) == (0, 10, 10)


class TestPhiLambdaLp:
    def test_demo_value(self):
        assert phi_lambda_lp(DEMO, Selection.of(DEMO, (1, 1, 1, 0))) == pytest.approx(
            2.0, abs=1e-7
        )

    def test_empty_selection(self):
        assert phi_lambda_lp(DEMO, Selection.of(DEMO, (0, 0, 0, 0))) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_matches_enumeration(self):
        rng = random.Random(31)
        done = 0
        idx = 0
        while done < 40:
            inst = generate(GenSpec(generator="gen1", n=8, p=1, seed=31), index=idx)
            idx += 1
            if not inst.all_attackable:
                continue
            x = Selection.of(inst, [rng.randint(0, 1) for _ in range(inst.n)])
            expected = phi_enum(inst, x).value
            assert phi_lambda_lp(inst, x) == pytest.approx(expected, abs=1e-7)
            done += 1

    def test_requires_attackable_items(self):
        inst = Instance(costs=(1, 1), weights=(3, 12), budget=10, p=1)
        with pytest.raises(AssumptionViolation):
            phi_lambda_lp(inst, Selection.of(inst, (1, 1)))


class TestExtractSelection:
    def test_maps_sorted_solution_back(self):
        m = build_model(DEMO, "IP5")
        # select sorted positions 1 and 4 -> original items 1 and 4 (1-based)
        assignment = {vid: 0.0 for vid in range(len(m.variables))}
        x_vids = m.x_vids()
        assignment[x_vids[0]] = 1.0
        assignment[x_vids[3]] = 1.0
        sel = extract_selection(m, assignment)
        assert sel.chosen == (1, 0, 0, 1)
        assert sel.cost == 7 and sel.size == 2

    def test_all_zero_assignment(self):
        m = build_model(DEMO, "IP1")
        sel = extract_selection(m, {})
        assert sel.chosen == (0, 0, 0, 0) and sel.cost == 0 and sel.size == 0

    def test_solver_optimum_demo(self):
        m = build_model(DEMO, "IP5")
        res = solve_bb(m)
        sel = extract_selection(m, res.primal)
        assert sel.cost == 7
        assert robust_feasible(DEMO, sel)[0]

    def test_fractional_rejected(self):
        m = build_model(DEMO, "IP1")
        with pytest.raises(ExtractionError):
            extract_selection(m, {0: 0.4})

    def test_near_integral_tolerated(self):
        m = build_model(DEMO, "IP1")
        sel = extract_selection(m, {0: 1.0 - 5e-7, 1: 3e-7})
        assert sel.chosen[0] == 1 and sel.chosen[1] == 0


class TestFormulationEquivalence:
    @pytest.mark.parametrize("tag", FORMULATIONS)
    def test_demo_optimum(self, tag):
        res = solve_bb(build_model(DEMO, tag))
        assert res.status == "optimal" and res.objective == 7

    def test_lp_bound_below_integer_optimum(self):
        for tag in FORMULATIONS:
            m = build_model(DEMO, tag)
            lp = solve_lp(m)
            assert lp.status == "optimal"
            assert lp.objective <= 7 + 1e-9

    def test_permutation_invariance(self):
        rng = random.Random(13)
        inst = generate(GenSpec(generator="gen1", n=8, p=2, seed=8), index=2)
        perm = list(range(inst.n))
        rng.shuffle(perm)
        shuffled = Instance(
            costs=tuple(inst.costs[i] for i in perm),
            weights=tuple(inst.weights[i] for i in perm),
            budget=inst.budget,
            p=inst.p,
        )
        assert solve_dp(inst).objective == solve_dp(shuffled).objective
        if inst.all_attackable:
            for tag in ("IP2", "IP3", "IP4", "IP5"):
                a = solve_bb(build_model(inst, tag)).objective
                b = solve_bb(build_model(shuffled, tag)).objective
                assert a == b == solve_dp(inst).objective

    def test_exact_rational_coefficients(self):
        m = build_model(DEMO, "IP3")
        ratio_rows = m.constraints[-DEMO.n:]
        seen = set()
        for con in ratio_rows:
            for _, coef in con.coeffs:
                assert isinstance(coef, Fraction)
                seen.add(coef.denominator)
        assert DEMO.budget + 1 in seen  # exact ratio coefficients, no floats
