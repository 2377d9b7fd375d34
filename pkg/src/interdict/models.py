"""Compact MILP formulations of the robust selection problem.

Five builders produce solver-agnostic models over an ``Instance``:

* IP1 -- weight-cover model, valid only for p = 1.
* IP2 -- LP-duality model of the prefix-attack program, linearized with
  products mu[i][k] = alpha[k] * x[i].
* IP3 -- budget-ratio model with integer rounding variables y[k] and
  linearization variables z[i][k].
* IP4 -- indicator model driven by the minimum weight needed to attack at
  least k items, dualized and big-M'd with coefficient B + 1.
* IP5 -- indicator model exploiting that the adversary attacks selected
  items in weight order; one binary y[k] per item, nothing else.

IP2, IP3 and IP5 are built over items re-sorted by non-decreasing weight
(ties by index); ``item_map`` maps every x-variable back to the original
item index.  Naming is fixed so exports are diffable: decision variables
``x{j}`` (1-based model position), auxiliaries ``beta``, ``alpha{k}``,
``mu{i}_{k}``, ``y{k}``, ``z{i}_{k}``, ``beta{k}_{i}``; constraints are
``c1, c2, ...`` in construction order with the cardinality-type row first.

All coefficients are exact rationals (``fractions.Fraction``); instance
data is integral, so every derived coefficient is exact as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import InputError, Instance, Selection

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"

FORMULATIONS = ("IP1", "IP2", "IP3", "IP4", "IP5")


class UnsupportedFormulation(InputError):
    """Formulation not applicable to this instance (IP1 needs p = 1)."""


class AssumptionViolation(InputError):
    """Instance breaks the modeling assumption w_i <= B for every item."""


class ExtractionError(RuntimeError):
    """A binary variable's value is not integral within tolerance."""


@dataclass(frozen=True)
class Variable:
    vid: int
    name: str
    kind: str
    lb: Fraction
    ub: Fraction | None  # None means +infinity
    role: str


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    coeffs: tuple[tuple[int, Fraction], ...]
    sense: str  # "<=", ">=", "="
    rhs: Fraction


@dataclass(frozen=True)
class MilpModel:
    """Solver-agnostic mixed-integer program (objective sense: minimize)."""

    formulation: str
    variables: tuple[Variable, ...]
    constraints: tuple[LinearConstraint, ...]
    objective: tuple[tuple[int, Fraction], ...]
    item_map: tuple[tuple[int, int], ...]  # (vid, original item index)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def x_vids(self) -> tuple[int, ...]:
        return tuple(vid for vid, _ in self.item_map)


@dataclass(frozen=True)
class SizeReport:
    """Variables/constraints added beyond the nominal selection model."""

    continuous_added: int
    discrete_added: int
    constraints_added: int


class _Builder:
    def __init__(self, tag: str):
        self.tag = tag
        self.variables: list[Variable] = []
        self.constraints: list[LinearConstraint] = []

    def var(self, name, kind, lb=0, ub=None, role="aux") -> int:
        vid = len(self.variables)
        self.variables.append(
            Variable(
                vid=vid,
                name=name,
                kind=kind,
                lb=Fraction(lb),
                ub=None if ub is None else Fraction(ub),
                role=role,
            )
        )
        return vid

    def con(self, coeffs, sense, rhs):
        name = f"c{len(self.constraints) + 1}"
        self.constraints.append(
            LinearConstraint(
                name=name,
                coeffs=tuple((vid, Fraction(c)) for vid, c in coeffs if c != 0),
                sense=sense,
                rhs=Fraction(rhs),
            )
        )

    def finish(self, objective, item_map) -> MilpModel:
        return MilpModel(
            formulation=self.tag,
            variables=tuple(self.variables),
            constraints=tuple(self.constraints),
            objective=tuple((vid, Fraction(c)) for vid, c in objective),
            item_map=tuple(item_map),
        )


def normalize_formulation(kind: str) -> str:
    """Map 'ip1', 'IP-1', 'IP1' and friends to the canonical tag."""
    tag = str(kind).upper().replace("-", "").replace("_", "")
    if tag not in FORMULATIONS:
        raise InputError(f"unknown formulation {kind!r}; expected one of {FORMULATIONS}")
    return tag


def _add_items(b: _Builder, n: int) -> list[int]:
    return [b.var(f"x{pos + 1}", BINARY, lb=0, ub=1, role="x") for pos in range(n)]


def build_model(inst: Instance, kind: str) -> MilpModel:
    """Construct the requested formulation; items must satisfy w_i <= B."""
    tag = normalize_formulation(kind)
    bad = [i for i in range(inst.n) if inst.weights[i] > inst.budget]
    if bad:
        raise AssumptionViolation(
            f"items {bad} have weight above the budget {inst.budget}; "
            "the formulations assume every item is attackable"
        )
    if tag == "IP1" and inst.p != 1:
        raise UnsupportedFormulation(f"IP1 requires p=1, instance has p={inst.p}")
    return _BUILDERS[tag](inst)


def _build_ip1(inst: Instance) -> MilpModel:
    # pack weight strictly beyond the budget; at least one item then survives
    b = _Builder("IP1")
    n = inst.n
    order = list(range(n))
    x = _add_items(b, n)
    b.con([(x[i], inst.weights[i]) for i in order], ">=", inst.budget + 1)
    objective = [(x[i], inst.costs[i]) for i in order]
    return b.finish(objective, [(x[i], i) for i in order])


def _build_ip2(inst: Instance) -> MilpModel:
    b = _Builder("IP2")
    order = inst.weight_order()
    n, B = inst.n, inst.budget
    w = [inst.weights[i] for i in order]
    c = [inst.costs[i] for i in order]
    x = _add_items(b, n)
    beta = b.var("beta", CONTINUOUS, lb=0, role="beta")
    alpha = [b.var(f"alpha{k + 1}", CONTINUOUS, lb=0, role="alpha") for k in range(n)]
    mu = {}
    for k in range(n):
        for i in range(k + 1):
            mu[i, k] = b.var(f"mu{i + 1}_{k + 1}", CONTINUOUS, lb=0, role="mu")

    b.con([(xj, 1) for xj in x] + [(beta, -1)], ">=", inst.p)
    for k in range(n):
        coeffs = [(mu[i, k], w[i]) for i in range(k + 1)]
        coeffs += [(x[i], -1) for i in range(k + 1)]
        coeffs += [(alpha[k], -B), (beta, 1)]
        b.con(coeffs, ">=", 0)
    for k in range(n):
        for i in range(k + 1):
            b.con([(mu[i, k], 1), (x[i], -(k + 1))], "<=", 0)
    for k in range(n):
        for i in range(k + 1):
            b.con([(mu[i, k], 1), (alpha[k], -1)], "<=", 0)

    objective = [(x[j], c[j]) for j in range(n)]
    return b.finish(objective, [(x[j], order[j]) for j in range(n)])


def _build_ip3(inst: Instance) -> MilpModel:
    # The rounding variables y_k may reach 1 only when the selected prefix
    # weight strictly exceeds the budget.  With integer weights that is
    # floor(prefix / (B+1)) >= 1; dividing by B itself would also allow
    # y_k = 1 when the prefix weighs exactly B, i.e. when the adversary can
    # still afford the attack, and the model would under-protect.
    b = _Builder("IP3")
    order = inst.weight_order()
    n, div = inst.n, inst.budget + 1
    w = [inst.weights[i] for i in order]
    c = [inst.costs[i] for i in order]
    ratio_cap = sum(inst.weights) // div  # floor over all items
    x = _add_items(b, n)
    alpha = b.var("alpha", CONTINUOUS, lb=0, role="alpha")
    y = [b.var(f"y{k + 1}", INTEGER, lb=0, ub=ratio_cap, role="y") for k in range(n)]
    z = {}
    for k in range(n):
        for i in range(k + 1):
            z[i, k] = b.var(f"z{i + 1}_{k + 1}", CONTINUOUS, lb=0, role="z")

    b.con([(xj, 1) for xj in x] + [(alpha, -1)], ">=", inst.p)
    for k in range(n):
        coeffs = [(x[i], 1) for i in range(k + 1)]
        coeffs += [(z[i, k], -1) for i in range(k + 1)]
        coeffs += [(alpha, -1)]
        b.con(coeffs, "<=", 0)
    for k in range(n):
        for i in range(k + 1):
            b.con([(z[i, k], 1), (y[k], -1)], "<=", 0)
    for k in range(n):
        for i in range(k + 1):
            b.con([(z[i, k], 1), (x[i], -ratio_cap)], "<=", 0)
    for k in range(n):
        coeffs = [(y[k], 1)]
        coeffs += [(x[i], Fraction(-w[i], div)) for i in range(k + 1)]
        b.con(coeffs, "<=", 0)

    objective = [(x[j], c[j]) for j in range(n)]
    return b.finish(objective, [(x[j], order[j]) for j in range(n)])


def _build_ip4(inst: Instance) -> MilpModel:
    b = _Builder("IP4")
    order = list(range(inst.n))
    n, B = inst.n, inst.budget
    x = _add_items(b, n)
    y = [b.var(f"y{k + 1}", BINARY, lb=0, ub=1, role="y") for k in range(n)]
    alpha = [b.var(f"alpha{k + 1}", CONTINUOUS, lb=0, role="alpha") for k in range(n)]
    beta = {}
    for k in range(n):
        for i in range(n):
            beta[k, i] = b.var(f"beta{k + 1}_{i + 1}", CONTINUOUS, lb=0, role="beta")

    b.con([(xi, 1) for xi in x] + [(yk, -1) for yk in y], ">=", inst.p)
    for k in range(n):
        coeffs = [(y[k], B + 1), (alpha[k], k + 1)]
        coeffs += [(beta[k, i], -1) for i in range(n)]
        b.con(coeffs, ">=", B + 1)
    for k in range(n):
        for i in range(n):
            b.con(
                [(alpha[k], 1), (beta[k, i], -1), (x[i], B + 1)],
                "<=",
                inst.weights[i] + B + 1,
            )

    objective = [(x[i], inst.costs[i]) for i in order]
    return b.finish(objective, [(x[i], i) for i in order])


def _build_ip5(inst: Instance) -> MilpModel:
    b = _Builder("IP5")
    order = inst.weight_order()
    n, B = inst.n, inst.budget
    w = [inst.weights[i] for i in order]
    c = [inst.costs[i] for i in order]
    x = _add_items(b, n)
    y = [b.var(f"y{k + 1}", BINARY, lb=0, ub=1, role="y") for k in range(n)]

    b.con([(xj, 1) for xj in x] + [(yk, -1) for yk in y], ">=", inst.p)
    for k in range(n):
        # (B+1)(1 - x_k + y_k) >= B + 1 - sum_{i<=k} w_i x_i, rearranged
        coeffs = [(x[i], w[i]) for i in range(k)]
        coeffs += [(x[k], w[k] - (B + 1)), (y[k], B + 1)]
        b.con(coeffs, ">=", 0)

    objective = [(x[j], c[j]) for j in range(n)]
    return b.finish(objective, [(x[j], order[j]) for j in range(n)])


_BUILDERS = {
    "IP1": _build_ip1,
    "IP2": _build_ip2,
    "IP3": _build_ip3,
    "IP4": _build_ip4,
    "IP5": _build_ip5,
}


def model_size(m: MilpModel) -> SizeReport:
    """Count additions beyond the nominal model (x variables and the
    cardinality-type row, which is always c1, are excluded)."""
    cont = sum(1 for v in m.variables if v.kind == CONTINUOUS)
    disc = sum(1 for v in m.variables if v.role != "x" and v.kind != CONTINUOUS)
    return SizeReport(
        continuous_added=cont,
        discrete_added=disc,
        constraints_added=len(m.constraints) - 1,
    )


def phi_lambda_lp(inst: Instance, x: Selection) -> float:
    """Value of the relaxed prefix-attack program for a fixed selection.

    Builds the LP over lambda[k] (attack the first k sorted items) and solves
    it with the in-repo simplex; equals the greedy attack value exactly.
    """
    if len(x.chosen) != inst.n:
        raise InputError(
            f"selection has length {len(x.chosen)}, instance has n={inst.n}"
        )
    if not inst.all_attackable:
        raise AssumptionViolation(
            "the relaxed attack program assumes w_i <= B for every item"
        )
    from .milp import solve_lp

    b = _Builder("PHI_LAMBDA")
    order = inst.weight_order()
    n, B = inst.n, inst.budget
    lam = [b.var(f"lam{k + 1}", CONTINUOUS, lb=0, role="lambda") for k in range(n)]
    prefw = 0
    cnt = 0
    objective = []
    for k in range(n):
        item = order[k]
        prefw += inst.weights[item] * x.chosen[item]
        cnt += x.chosen[item]
        b.con([(lam[k], prefw - B)], "<=", 0)
        objective.append((lam[k], -cnt))  # container minimizes
    b.con([(lam[k], 1) for k in range(n)], "<=", 1)
    model = b.finish(objective, [])
    res = solve_lp(model)
    return -res.objective


def extract_selection(m: MilpModel, assignment, tol: float = 1e-6) -> Selection:
    """Round the x-variables of a solver assignment back to original item order."""
    n = len(m.item_map)
    chosen = [0] * n
    for vid, item in m.item_map:
        val = float(assignment.get(vid, 0.0))
        bit = round(val)
        if bit not in (0, 1) or abs(val - bit) > tol:
            raise ExtractionError(
                f"variable {m.variables[vid].name} is not binary: {val}"
            )
        chosen[item] = bit
    obj = {vid: coef for vid, coef in m.objective}
    cost = sum(obj.get(vid, Fraction(0)) * chosen[item] for vid, item in m.item_map)
    return Selection(chosen=tuple(chosen), cost=int(cost), size=sum(chosen))
