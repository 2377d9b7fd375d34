"""Deterministic instance generation and persistence.

Two random families plus a reduction-based hard family:

* gen1 -- costs and weights independent uniform on {1, ..., 100}.
* gen2 -- weights coupled to costs: w_i uniform on
  {max(1, c_i - 5), ..., min(100, c_i + 5)}.
* partition -- c = w = a for a random even-sum vector a, budget = half-sum
  minus one; for p = 1 the optimum is at most the half-sum exactly when the
  partition instance is a yes-instance.

For gen1/gen2 the budget is floor(sum(w) / 4).  Every instance is drawn
from its own PCG64 substream keyed by (generator, n, p, seed, index,
attempt), so generation is reproducible item-for-item and parallel-safe.
Instances violating the modeling assumption w_i <= budget are redrawn from
the next substream (up to a cap; tiny n may make the assumption
unsatisfiable, in which case the last draw is returned and only the
oracle-side solvers apply to it).  The rejection count lands in meta.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import InputError, Instance, Provenance, instance_from_json, instance_to_json

GENERATORS = ("gen1", "gen2", "partition")
_GEN_CODE = {"gen1": 1, "gen2": 2, "partition": 3}
MAX_REDRAWS = 64


@dataclass(frozen=True)
class GenSpec:
    """What to generate: family, size, requirement and base seed."""

    generator: str
    n: int
    p: int
    seed: int

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InputError(
                f"unknown generator {self.generator!r}; expected one of {GENERATORS}"
            )
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.p <= self.n:
            raise InputError(f"p must lie in [1, {self.n}], got {self.p}")
        if not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a uint64, got {self.seed}")


@dataclass(frozen=True)
class PartitionSpec:
    """Positive integers with an even total, as used by the hardness reduction."""

    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.a) < 1:
            raise InputError("partition data needs at least one integer")
        if any(type(v) is not int or v < 1 for v in self.a):
            raise InputError("partition entries must be positive integers")
        if sum(self.a) % 2 != 0:
            raise InputError(f"partition total {sum(self.a)} is odd; half-sum not integral")

    @property
    def half_sum(self) -> int:
        return sum(self.a) // 2


def _rng(spec: GenSpec, index: int, attempt: int) -> np.random.Generator:
    key = [_GEN_CODE[spec.generator], spec.n, spec.p, spec.seed, index, attempt]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def _draw(spec: GenSpec, rng: np.random.Generator):
    n = spec.n
    if spec.generator == "gen1":
        costs = rng.integers(1, 101, size=n)
        weights = rng.integers(1, 101, size=n)
    elif spec.generator == "gen2":
        costs = rng.integers(1, 101, size=n)
        weights = rng.integers(
            np.maximum(1, costs - 5), np.minimum(100, costs + 5) + 1
        )
    else:  # partition
        a = rng.integers(1, 101, size=n)
        if int(a.sum()) % 2 != 0:
            return None  # redraw: half-sum must be integral
        total = int(a.sum())
        return [int(v) for v in a], [int(v) for v in a], total // 2 - 1
    budget = int(weights.sum()) // 4
    return [int(v) for v in costs], [int(v) for v in weights], budget


def generate(spec: GenSpec, index: int = 0) -> Instance:
    """Deterministic instance for (spec, index)."""
    last = None
    last_attempt = 0
    for attempt in range(MAX_REDRAWS + 1):
        drawn = _draw(spec, _rng(spec, index, attempt))
        if drawn is None:
            continue  # odd partition total; half-sum must be integral
        last = drawn
        last_attempt = attempt
        if max(drawn[1]) <= drawn[2]:
            break
    if last is None:
        raise InputError("no even partition total in 65 draws (vanishing odds)")
    costs, weights, budget = last
    meta = Provenance(
        generator=spec.generator, seed=spec.seed, index=index, rejections=last_attempt
    )
    return Instance(costs=costs, weights=weights, budget=budget, p=spec.p, meta=meta)


def from_partition(ps: PartitionSpec, p: int = 1) -> Instance:
    """Hard-family construction: costs = weights = a, budget = half-sum - 1."""
    return Instance(costs=ps.a, weights=ps.a, budget=ps.half_sum - 1, p=p)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(instance_to_json(inst))


def load_instance(path) -> Instance:
    return instance_from_json(Path(path).read_text())


def instance_id(spec: GenSpec, index: int) -> str:
    return f"{spec.generator}-n{spec.n}-p{spec.p}-s{spec.seed}-i{index:03d}"
