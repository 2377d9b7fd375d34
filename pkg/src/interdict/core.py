"""Domain types and the greedy adversary for selection under budgeted interdiction.

An instance consists of n items with positive integer costs c_i and
interdiction weights w_i, an adversary budget B and a survival requirement p.
The adversary may fail ("attack") any set of selected items whose total
weight stays within B; a selection is robust-feasible when at least p
selected items survive the worst attack.

Item indices are 0-based throughout the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


class InputError(ValueError):
    """Caller-supplied data violates an operation's contract."""


class SchemaError(InputError):
    """An instance document does not match the JSON schema."""


def _as_int(value, what):
    # bool is an int subclass; JSON true/false must not pass as 0/1
    if type(value) is not int:
        raise InputError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class Provenance:
    """Generator name, base seed and batch position of a generated instance."""

    generator: str
    seed: int
    index: int = 0
    rejections: int = 0


@dataclass(frozen=True)
class Instance:
    """Problem data: item costs, interdiction weights, budget and requirement.

    Invariants enforced at construction: all costs and weights are integers
    >= 1, budget >= 0, and 1 <= p <= n.  Items with w_i > budget are legal
    here (the greedy adversary simply cannot afford them) but are rejected
    by the model builders, which assume every item is attackable.
    """

    costs: tuple[int, ...]
    weights: tuple[int, ...]
    budget: int
    p: int
    meta: Provenance | None = None

    def __post_init__(self):
        object.__setattr__(self, "costs", tuple(self.costs))
        object.__setattr__(self, "weights", tuple(self.weights))
        n = len(self.costs)
        if n < 1:
            raise InputError("instance needs at least one item")
        if len(self.weights) != n:
            raise InputError(
                f"costs and weights differ in length ({n} vs {len(self.weights)})"
            )
        for i, c in enumerate(self.costs):
            if _as_int(c, f"cost[{i}]") < 1:
                raise InputError(f"cost[{i}] must be >= 1, got {c}")
        for i, w in enumerate(self.weights):
            if _as_int(w, f"weight[{i}]") < 1:
                raise InputError(f"weight[{i}] must be >= 1, got {w}")
        if _as_int(self.budget, "budget") < 0:
            raise InputError(f"budget must be >= 0, got {self.budget}")
        if not 1 <= _as_int(self.p, "p") <= n:
            raise InputError(f"p must lie in [1, {n}], got {self.p}")

    @property
    def n(self) -> int:
        return len(self.costs)

    def attackable(self, i: int) -> bool:
        """True when item i fits the adversary budget on its own."""
        return self.weights[i] <= self.budget

    @property
    def all_attackable(self) -> bool:
        return all(w <= self.budget for w in self.weights)

    def weight_order(self) -> list[int]:
        """Item indices sorted by weight non-decreasing, ties by index."""
        return sorted(range(self.n), key=lambda i: (self.weights[i], i))


@dataclass(frozen=True)
class Selection:
    """A binary item selection; cost and size are derived, never trusted."""

    chosen: tuple[int, ...]
    cost: int
    size: int

    @classmethod
    def of(cls, inst: Instance, bits) -> "Selection":
        """Build a Selection for ``inst``, recomputing cost and size."""
        chosen = tuple(int(b) for b in bits)
        if len(chosen) != inst.n:
            raise InputError(
                f"selection has length {len(chosen)}, instance has n={inst.n}"
            )
        if any(b not in (0, 1) for b in chosen):
            raise InputError("selection entries must be 0 or 1")
        cost = sum(c * b for c, b in zip(inst.costs, chosen))
        return cls(chosen=chosen, cost=cost, size=sum(chosen))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.chosen) if b)


@dataclass(frozen=True)
class AttackResult:
    """The adversary's optimum: number of failed items, which ones, and cost."""

    value: int
    attacked: tuple[int, ...]
    spent: int


def phi(inst: Instance, x: Selection) -> AttackResult:
    """Maximum number of selected items the adversary can fail within budget.

    Greedy and exact: selected items are taken in non-decreasing weight order
    (ties by index) while the cumulative weight stays within the budget; the
    attacked set is always a maximal prefix of that order.
    """
    if len(x.chosen) != inst.n:
        raise InputError(
            f"selection has length {len(x.chosen)}, instance has n={inst.n}"
        )
    order = sorted(x.support, key=lambda i: (inst.weights[i], i))
    attacked = []
    spent = 0
    for i in order:
        if spent + inst.weights[i] > inst.budget:
            break
        spent += inst.weights[i]
        attacked.append(i)
    attacked.sort()
    return AttackResult(value=len(attacked), attacked=tuple(attacked), spent=spent)


def min_attack_weight(inst: Instance, x: Selection, k: int):
    """Smallest budget that suffices to fail at least k selected items.

    Returns ``math.inf`` when fewer than k items are selected.
    """
    if not 1 <= _as_int(k, "k") <= inst.n:
        raise InputError(f"k must lie in [1, {inst.n}], got {k}")
    if x.size < k:
        return math.inf
    weights = sorted(inst.weights[i] for i in x.support)
    return sum(weights[:k])


def robust_feasible(inst: Instance, x: Selection):
    """Check size(x) - phi(x) >= p; on failure return the attack as witness."""
    attack = phi(inst, x)
    ok = x.size - attack.value >= inst.p
    return ok, (None if ok else attack)


# --- instance JSON document -------------------------------------------------
#
# {"n": int, "p": int, "costs": [int], "weights": [int], "budget": int,
#  "meta": {"generator": str, "seed": uint64, "index": int, "rejections": int}}
#
# meta is optional, as are its index/rejections entries; everything else is
# required and unknown fields are rejected.

_TOP_KEYS = ("n", "p", "costs", "weights", "budget", "meta")
_META_REQUIRED = ("generator", "seed")
_META_OPTIONAL = ("index", "rejections")


def instance_to_json(inst: Instance) -> str:
    """Canonical single-line JSON encoding (deterministic byte-for-byte)."""
    doc = {
        "n": inst.n,
        "p": inst.p,
        "costs": list(inst.costs),
        "weights": list(inst.weights),
        "budget": inst.budget,
    }
    if inst.meta is not None:
        doc["meta"] = {
            "generator": inst.meta.generator,
            "seed": inst.meta.seed,
            "index": inst.meta.index,
            "rejections": inst.meta.rejections,
        }
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def _schema_int(obj, key, where):
    if key not in obj:
        raise SchemaError(f"{where} is missing required field '{key}'")
    value = obj[key]
    if type(value) is not int:
        raise SchemaError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def instance_from_json(text: str) -> Instance:
    """Parse and validate the canonical instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be a JSON object")
    unknown = set(doc) - set(_TOP_KEYS)
    if unknown:
        raise SchemaError(f"unknown fields: {sorted(unknown)}")

    n = _schema_int(doc, "n", "instance")
    p = _schema_int(doc, "p", "instance")
    budget = _schema_int(doc, "budget", "instance")
    for key in ("costs", "weights"):
        if key not in doc:
            raise SchemaError(f"instance is missing required field '{key}'")
        arr = doc[key]
        if not isinstance(arr, list) or any(type(v) is not int for v in arr):
            raise SchemaError(f"instance.{key} must be a list of integers")
        if len(arr) != n:
            raise SchemaError(f"instance.{key} has length {len(arr)}, n={n}")

    meta = None
    if "meta" in doc:
        raw = doc["meta"]
        if not isinstance(raw, dict):
            raise SchemaError("instance.meta must be an object")
        unknown = set(raw) - set(_META_REQUIRED) - set(_META_OPTIONAL)
        if unknown:
            raise SchemaError(f"unknown meta fields: {sorted(unknown)}")
        if "generator" not in raw or not isinstance(raw["generator"], str):
            raise SchemaError("instance.meta.generator must be a string")
        seed = _schema_int(raw, "seed", "meta")
        if not 0 <= seed < 2**64:
            raise SchemaError(f"meta.seed must be a uint64, got {seed}")
        index = _schema_int(raw, "index", "meta") if "index" in raw else 0
        rejections = (
            _schema_int(raw, "rejections", "meta") if "rejections" in raw else 0
        )
        meta = Provenance(
            generator=raw["generator"], seed=seed, index=index, rejections=rejections
        )

    try:
        return Instance(
            costs=tuple(doc["costs"]),
            weights=tuple(doc["weights"]),
            budget=budget,
            p=p,
            meta=meta,
        )
    except InputError as exc:
        raise SchemaError(f"invariant violation: {exc}") from exc
