"""Experiment harness: LP-bound dominance, timing sweeps, performance profiles.

The harness emits plot-ready CSV; rendering is left to external tools.
All numeric output uses '.' as decimal separator and the literal "inf" for
infinity.  LP lower bounds are compared with a strictness tolerance of
1e-7: values closer than that count as ties, not strict dominance.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import InputError, Instance
from .instgen import GenSpec, generate, instance_id
from .milp import SolveLimits, solve_bb, solve_lp
from .milp.simplex import SolverError
from .models import build_model, normalize_formulation

LB_TIE_TOL = 1e-7
MIN_TIME = 1e-9  # clamp so performance ratios never divide by zero


@dataclass(frozen=True)
class RunRecord:
    """One (instance, model) solve outcome; wall_time is inf when unsolved."""

    instance_id: str
    generator: str
    n: int
    p: int
    seed: int
    model: str
    status: str  # "optimal" | "infeasible" | "time_limit" | "error"
    objective: float | None
    bound: float | None
    wall_time: float
    nodes: int


@dataclass(frozen=True)
class DominanceTable:
    """counts[(r, c)] = instances where model r's LP bound strictly beats c's."""

    models: tuple[str, ...]
    counts: dict
    total: int
    excluded: int

    def count(self, row: str, col: str) -> int:
        return self.counts.get((row, col), 0)

    def row_pct(self, row: str):
        """Row average in percent; None when undefined (single model, no data)."""
        others = [m for m in self.models if m != row]
        if not others or self.total == 0:
            return None
        wins = sum(self.counts.get((row, c), 0) for c in others)
        return 100.0 * wins / (len(others) * self.total)


@dataclass(frozen=True)
class ProfileCurve:
    """Sampled performance-profile curves k_s(tau) on a shared tau grid."""

    taus: tuple[float, ...]
    models: tuple[str, ...]
    values: dict  # model -> tuple of k_s(tau)


@dataclass(frozen=True)
class Batch:
    spec: GenSpec
    count: int


@dataclass(frozen=True)
class Manifest:
    batches: tuple[Batch, ...]
    models: tuple[str, ...]
    time_limit: float | None = None
    node_limit: int | None = None


def run_lb_experiment(
    generator: str, n: int, p: int, count: int, models, seed: int = 0
) -> DominanceTable:
    """Pairwise strict-dominance counts of LP relaxation bounds.

    Instances that fail to build or solve are excluded entirely and counted
    in ``excluded``.
    """
    tags = tuple(normalize_formulation(m) for m in models)
    if "IP1" in tags and p != 1:
        raise InputError("IP1 joins the LP-bound comparison only when p=1")
    counts = {(r, c): 0 for r in tags for c in tags if r != c}
    total = 0
    excluded = 0
    for idx in range(count):
        inst = generate(GenSpec(generator=generator, n=n, p=p, seed=seed), index=idx)
        values = {}
        try:
            for tag in tags:
                res = solve_lp(build_model(inst, tag))
                if res.status != "optimal":
                    raise SolverError(f"LP status {res.status} for {tag}")
                values[tag] = res.objective
        except (InputError, SolverError):
            excluded += 1
            continue
        total += 1
        for r in tags:
            for c in tags:
                if r != c and values[r] > values[c] + LB_TIE_TOL:
                    counts[(r, c)] += 1
    return DominanceTable(models=tags, counts=counts, total=total, excluded=excluded)


def _run_one(iid: str, inst: Instance, tag: str, limits: SolveLimits) -> RunRecord:
    meta = inst.meta
    base = dict(
        instance_id=iid,
        generator=meta.generator if meta else "",
        n=inst.n,
        p=inst.p,
        seed=meta.seed if meta else 0,
        model=tag,
    )
    try:
        res = solve_bb(build_model(inst, tag), limits)
    except Exception:
        return RunRecord(
            status="error", objective=None, bound=None, wall_time=math.inf,
            nodes=0, **base,
        )
    solved = res.status in ("optimal", "infeasible")
    return RunRecord(
        status=res.status,
        objective=None if res.objective is None else float(res.objective),
        bound=None if math.isinf(res.bound) else float(res.bound),
        wall_time=max(res.wall_time, MIN_TIME) if solved else math.inf,
        nodes=res.nodes,
        **base,
    )


def run_timing_experiment(manifest: Manifest, workers: int = 1) -> list[RunRecord]:
    """One RunRecord per (instance, model), in deterministic manifest order."""
    tags = tuple(normalize_formulation(m) for m in manifest.models)
    for batch in manifest.batches:
        if "IP1" in tags and batch.spec.p != 1:
            raise InputError(
                f"manifest requests IP1 on a p={batch.spec.p} batch; IP1 needs p=1"
            )
    limits = SolveLimits(
        time_limit=manifest.time_limit, node_limit=manifest.node_limit
    )
    tasks = []
    for batch in manifest.batches:
        for idx in range(batch.count):
            inst = generate(batch.spec, index=idx)
            iid = instance_id(batch.spec, idx)
            for tag in tags:
                tasks.append((iid, inst, tag, limits))
    if workers <= 1:
        return [_run_one(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, *task) for task in tasks]
        return [f.result() for f in futures]


def performance_profile(records, taus=None) -> ProfileCurve:
    """Evaluate k_s(tau) = |{k : t_ks / min_s t_ks <= tau}| / |K| on a grid."""
    if taus is None:
        taus = np.geomspace(1.0, 100.0, 200)
    taus = tuple(float(t) for t in taus)
    instances = []
    models = []
    times = {}
    for rec in records:
        if rec.instance_id not in instances:
            instances.append(rec.instance_id)
        if rec.model not in models:
            models.append(rec.model)
        key = (rec.instance_id, rec.model)
        if key in times:
            raise InputError(f"duplicate record for {key}")
        times[key] = rec.wall_time
    missing = [
        (k, s) for k in instances for s in models if (k, s) not in times
    ]
    if missing:
        raise InputError(f"records do not cover the full grid; missing {missing[:3]}")
    if not instances:
        raise InputError("no records given")

    ratios = {s: [] for s in models}
    for k in instances:
        finite = [times[(k, s)] for s in models if math.isfinite(times[(k, s)])]
        best = max(min(finite), MIN_TIME) if finite else None
        for s in models:
            t = times[(k, s)]
            if best is None or math.isinf(t):
                ratios[s].append(math.inf)  # contributes 0 to every tau
            else:
                ratios[s].append(t / best)
    nk = len(instances)
    values = {
        s: tuple(sum(1 for r in ratios[s] if r <= t) / nk for t in taus)
        for s in models
    }
    return ProfileCurve(taus=taus, models=tuple(models), values=values)


def default_workers() -> int:
    """Worker-pool size: INTERDICT_THREADS, else physical cores minus one."""
    env = os.environ.get("INTERDICT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"INTERDICT_THREADS must be an integer, got {env!r}") from exc
    try:
        import psutil

        cores = psutil.cpu_count(logical=False)
    except Exception:
        cores = None
    cores = cores or os.cpu_count() or 1
    return max(1, cores - 1)


# --- manifest and CSV plumbing ----------------------------------------------


def parse_manifest(doc: dict) -> Manifest:
    if not isinstance(doc, dict):
        raise InputError("manifest must be a JSON object")
    unknown = set(doc) - {"batches", "models", "time_limit", "node_limit"}
    if unknown:
        raise InputError(f"unknown manifest fields: {sorted(unknown)}")
    if "batches" not in doc or "models" not in doc:
        raise InputError("manifest needs 'batches' and 'models'")
    batches = []
    for raw in doc["batches"]:
        unknown = set(raw) - {"generator", "n", "p", "seed", "count"}
        if unknown:
            raise InputError(f"unknown batch fields: {sorted(unknown)}")
        spec = GenSpec(
            generator=raw.get("generator", "gen1"),
            n=raw["n"],
            p=raw["p"],
            seed=raw.get("seed", 0),
        )
        count = raw.get("count", 1)
        if not isinstance(count, int) or count < 1:
            raise InputError(f"batch count must be a positive integer, got {count!r}")
        batches.append(Batch(spec=spec, count=count))
    models = tuple(normalize_formulation(m) for m in doc["models"])
    time_limit = doc.get("time_limit")
    node_limit = doc.get("node_limit")
    if time_limit is not None and not isinstance(time_limit, (int, float)):
        raise InputError("time_limit must be a number or null")
    if node_limit is not None and not isinstance(node_limit, int):
        raise InputError("node_limit must be an integer or null")
    return Manifest(
        batches=tuple(batches),
        models=models,
        time_limit=None if time_limit is None else float(time_limit),
        node_limit=node_limit,
    )


def load_manifest(path) -> Manifest:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed manifest JSON: {exc}") from exc
    return parse_manifest(doc)


def _num(value) -> str:
    if value is None:
        return ""
    v = float(value)
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return repr(v)


RESULTS_COLUMNS = (
    "instance_id", "generator", "n", "p", "seed", "model",
    "status", "objective", "bound", "wall_time_s", "nodes",
)


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(RESULTS_COLUMNS)
        for r in records:
            out.writerow(
                [
                    r.instance_id, r.generator, r.n, r.p, r.seed, r.model,
                    r.status, _num(r.objective), _num(r.bound),
                    _num(r.wall_time), r.nodes,
                ]
            )


def read_records_csv(path) -> list[RunRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RESULTS_COLUMNS:
            raise InputError(f"unexpected results.csv header: {reader.fieldnames}")
        for row in reader:
            records.append(
                RunRecord(
                    instance_id=row["instance_id"],
                    generator=row["generator"],
                    n=int(row["n"]),
                    p=int(row["p"]),
                    seed=int(row["seed"]),
                    model=row["model"],
                    status=row["status"],
                    objective=float(row["objective"]) if row["objective"] else None,
                    bound=float(row["bound"]) if row["bound"] else None,
                    wall_time=float(row["wall_time_s"]),
                    nodes=int(row["nodes"]),
                )
            )
    return records


def write_profile_csv(curve: ProfileCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["model", "tau", "k_s"])
        for model in curve.models:
            for tau, val in zip(curve.taus, curve.values[model]):
                out.writerow([model, repr(tau), repr(val)])


def write_dominance_csv(table: DominanceTable, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["row_model", "col_model", "count", "row_pct"])
        for r in table.models:
            pct = table.row_pct(r)
            for c in table.models:
                if r != c:
                    out.writerow([r, c, table.count(r, c), _num(pct)])
