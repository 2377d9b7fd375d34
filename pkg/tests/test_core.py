import itertools
import json
import math
import random

import pytest

from interdict.core import (
    InputError,
    Instance,
    Provenance,
    SchemaError,
    Selection,
    instance_from_json,
    instance_to_json,
    min_attack_weight,
    phi,
    robust_feasible,
)

# 4-item running example: optimum 7 via items {1,4} or {2,3} (1-based)
DEMO = Instance(costs=(2, 3, 4, 5), weights=(3, 7, 4, 10), budget=10, p=1)


def brute_max_attack(inst, x):
    """Independent maximizer: try every subset of the selected items."""
    best = (0, 0, ())
    for r in range(len(x.support) + 1):
        for combo in itertools.combinations(x.support, r):
            spent = sum(inst.weights[i] for i in combo)
            if spent <= inst.budget and (len(combo), -spent) > (best[0], -best[1]):
                best = (len(combo), spent, combo)
    return best


def random_instance(rng, n):
    costs = [rng.randint(1, 100) for _ in range(n)]
    weights = [rng.randint(1, 100) for _ in range(n)]
    budget = max(sum(weights) // 4, 1)
    return Instance(costs=costs, weights=weights, budget=budget, p=1)


class TestPhi:
    def test_demo_three_items(self):
        res = phi(DEMO, Selection.of(DEMO, (1, 1, 1, 0)))
        assert res.value == 2
        assert res.attacked == (0, 2)
        assert res.spent == 7

    def test_empty_selection(self):
        res = phi(DEMO, Selection.of(DEMO, (0, 0, 0, 0)))
        assert res == type(res)(value=0, attacked=(), spent=0)

    def test_two_heavy_items(self):
        res = phi(DEMO, Selection.of(DEMO, (1, 0, 0, 1)))
        assert res.value == 1
        assert res.attacked == (0,)
        assert res.spent == 3

    def test_length_mismatch(self):
        other = Instance(costs=(1, 1), weights=(1, 1), budget=1, p=1)
        x = Selection.of(other, (1, 0))
        with pytest.raises(InputError):
            phi(DEMO, x)

    def test_greedy_matches_enumeration(self):
        rng = random.Random(2024)
        for _ in range(150):
            n = rng.randint(1, 12)
            inst = random_instance(rng, n)
            x = Selection.of(inst, [rng.randint(0, 1) for _ in range(n)])
            res = phi(inst, x)
            best_value, best_spent, _ = brute_max_attack(inst, x)
            assert res.value == best_value
            assert res.spent <= inst.budget
            assert set(res.attacked) <= set(x.support)

    def test_monotone_in_selection(self):
        rng = random.Random(7)
        for _ in range(60):
            n = rng.randint(2, 10)
            inst = random_instance(rng, n)
            bits = [rng.randint(0, 1) for _ in range(n)]
            zeros = [i for i, b in enumerate(bits) if b == 0]
            if not zeros:
                continue
            grown = list(bits)
            grown[rng.choice(zeros)] = 1
            before = phi(inst, Selection.of(inst, bits)).value
            after = phi(inst, Selection.of(inst, grown)).value
            assert after >= before

    def test_attack_is_maximal_weight_prefix(self):
        rng = random.Random(99)
        for _ in range(60):
            n = rng.randint(1, 10)
            inst = random_instance(rng, n)
            x = Selection.of(inst, [rng.randint(0, 1) for _ in range(n)])
            res = phi(inst, x)
            order = sorted(x.support, key=lambda i: (inst.weights[i], i))
            k = len(res.attacked)
            assert sorted(res.attacked) == sorted(order[:k])
            assert sum(inst.weights[i] for i in order[:k]) <= inst.budget
            if k < len(order):
                over = sum(inst.weights[i] for i in order[: k + 1])
                assert over > inst.budget


class TestMinAttackWeight:
    def test_two_cheapest(self):
        x = Selection.of(DEMO, (1, 1, 1, 0))
        expected = min(
            sum(DEMO.weights[i] for i in combo)
            for combo in itertools.combinations(x.support, 2)
        )
        assert expected == 7
        assert min_attack_weight(DEMO, x, 2) == 7

    def test_three_cheapest(self):
        x = Selection.of(DEMO, (1, 1, 1, 0))
        expected = min(
            sum(DEMO.weights[i] for i in combo)
            for combo in itertools.combinations(x.support, 3)
        )
        assert expected == 14
        assert min_attack_weight(DEMO, x, 3) == 14

    def test_not_enough_items_is_infinite(self):
        x = Selection.of(DEMO, (1, 0, 0, 1))
        assert min_attack_weight(DEMO, x, 3) == math.inf

    @pytest.mark.parametrize("k", [0, 5, -1])
    def test_k_out_of_range(self, k):
        x = Selection.of(DEMO, (1, 1, 1, 0))
        with pytest.raises(InputError):
            min_attack_weight(DEMO, x, k)


class TestRobustFeasible:
    def test_demo_feasible(self):
        ok, witness = robust_feasible(DEMO, Selection.of(DEMO, (1, 1, 1, 0)))
        assert ok and witness is None

    def test_demo_infeasible_with_witness(self):
        x = Selection.of(DEMO, (1, 0, 1, 0))
        value, spent, _ = brute_max_attack(DEMO, x)
        assert value == 2 and spent == 7  # both selected items can fail
        ok, witness = robust_feasible(DEMO, x)
        assert not ok
        assert witness.attacked == (0, 2)
        assert witness.spent == 7

    def test_empty_selection_infeasible(self):
        ok, witness = robust_feasible(DEMO, Selection.of(DEMO, (0, 0, 0, 0)))
        assert not ok
        assert witness.value == 0


class TestTypes:
    def test_selection_recomputes_cost_and_size(self):
        x = Selection.of(DEMO, (1, 0, 0, 1))
        assert x.cost == 7 and x.size == 2 and x.support == (0, 3)

    def test_selection_rejects_non_binary(self):
        with pytest.raises(InputError):
            Selection.of(DEMO, (1, 2, 0, 0))
        with pytest.raises(InputError):
            Selection.of(DEMO, (1, 0, 0))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(costs=(), weights=(), budget=1, p=1),
            dict(costs=(1, 2), weights=(1,), budget=1, p=1),
            dict(costs=(0, 2), weights=(1, 1), budget=1, p=1),
            dict(costs=(1, 2), weights=(1, 0), budget=1, p=1),
            dict(costs=(1, 2), weights=(1, 1), budget=-1, p=1),
            dict(costs=(1, 2), weights=(1, 1), budget=1, p=0),
            dict(costs=(1, 2), weights=(1, 1), budget=1, p=3),
            dict(costs=(1, 2.5), weights=(1, 1), budget=1, p=1),
        ],
    )
    def test_instance_invariants(self, kwargs):
        with pytest.raises(InputError):
            Instance(**kwargs)

    def test_attackable_flags(self):
        inst = Instance(costs=(1, 1), weights=(3, 12), budget=10, p=1)
        assert inst.attackable(0) and not inst.attackable(1)
        assert not inst.all_attackable
        assert DEMO.all_attackable

    def test_weight_order_breaks_ties_by_index(self):
        inst = Instance(costs=(1, 1, 1), weights=(5, 3, 3), budget=10, p=1)
        assert inst.weight_order() == [1, 2, 0]


class TestJsonCodec:
    def test_round_trip(self):
        inst = Instance(
            costs=(2, 3, 4, 5),
            weights=(3, 7, 4, 10),
            budget=10,
            p=1,
            meta=Provenance(generator="gen1", seed=42, index=3, rejections=1),
        )
        again = instance_from_json(instance_to_json(inst))
        assert again == inst

    def test_round_trip_without_meta(self):
        again = instance_from_json(instance_to_json(DEMO))
        assert again == DEMO

    def test_field_order_is_fixed(self):
        doc = instance_to_json(DEMO)
        keys = list(json.loads(doc).keys())
        assert keys == ["n", "p", "costs", "weights", "budget"]

    def test_unknown_field_rejected(self):
        doc = json.loads(instance_to_json(DEMO))
        doc["extra"] = 1
        with pytest.raises(SchemaError):
            instance_from_json(json.dumps(doc))

    def test_unknown_meta_field_rejected(self):
        text = (
            '{"n": 1, "p": 1, "costs": [1], "weights": [1], "budget": 1,'
            ' "meta": {"generator": "gen1", "seed": 0, "note": "x"}}'
        )
        with pytest.raises(SchemaError):
            instance_from_json(text)

    def test_p_larger_than_n_rejected(self):
        text = '{"n": 2, "p": 3, "costs": [1, 1], "weights": [1, 1], "budget": 1}'
        with pytest.raises(SchemaError):
            instance_from_json(text)

    def test_length_mismatch_rejected(self):
        text = '{"n": 3, "p": 1, "costs": [1, 1], "weights": [1, 1, 1], "budget": 1}'
        with pytest.raises(SchemaError):
            instance_from_json(text)

    def test_bool_is_not_an_int(self):
        text = '{"n": 1, "p": true, "costs": [1], "weights": [1], "budget": 1}'
        with pytest.raises(SchemaError):
            instance_from_json(text)

    def test_malformed_json(self):
        with pytest.raises(SchemaError):
            instance_from_json("{not json")
