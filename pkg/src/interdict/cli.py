"""Command-line front end: generation, solving, oracle checks, export, benchmarks.

Exit codes: 0 success, 1 infeasible reported by solve, 2 usage error,
3 solver or capacity error, 4 oracle disagreement.  Diagnostics go to
stderr; machine-readable output goes to stdout or to files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import bench
from .core import InputError, Selection, phi, robust_feasible
from .instgen import GENERATORS, GenSpec, generate, instance_id, load_instance, save_instance
from .milp import SolveLimits, SolverError, export, solve_bb
from .models import ExtractionError, build_model, extract_selection
from .oracle import CapacityError, ExactResult, solve_dp, solve_enum

MODEL_CHOICES = ("ip1", "ip2", "ip3", "ip4", "ip5")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interdict",
        description="Exact solvers for min-cost selection under budgeted interdiction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instances deterministically")
    gen.add_argument("--generator", required=True, choices=GENERATORS)
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--p", required=True, type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", required=True, help="output directory")

    solve = sub.add_parser("solve", help="solve one instance with one method")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--model", required=True, choices=MODEL_CHOICES + ("dp", "enum"))
    solve.add_argument("--time-limit", type=float, default=None)
    solve.add_argument("--json", action="store_true")

    phi_cmd = sub.add_parser("phi", help="evaluate the adversary for a fixed selection")
    phi_cmd.add_argument("--instance", required=True)
    phi_cmd.add_argument("--x", required=True, help="bitstring, first char = item 1")

    oracle_cmd = sub.add_parser("oracle", help="cross-check dp, enum and the models")
    oracle_cmd.add_argument("--instance", required=True)
    oracle_cmd.add_argument("--time-limit", type=float, default=None)

    exp = sub.add_parser("export", help="write a model to an .lp or .mps file")
    exp.add_argument("--instance", required=True)
    exp.add_argument("--model", required=True, choices=MODEL_CHOICES)
    exp.add_argument("--format", required=True, choices=("lp", "mps"))
    exp.add_argument("--out", required=True)

    blb = sub.add_parser("bench-lb", help="LP-bound dominance tables from a manifest")
    blb.add_argument("--manifest", required=True)
    blb.add_argument("--out", required=True, help="output directory")

    bt = sub.add_parser("bench-time", help="timing sweep from a manifest")
    bt.add_argument("--manifest", required=True)
    bt.add_argument("--out", required=True, help="output directory")

    prof = sub.add_parser("profile", help="performance profile from results.csv")
    prof.add_argument("--records", required=True)
    prof.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "phi": _cmd_phi,
        "oracle": _cmd_oracle,
        "export": _cmd_export,
        "bench-lb": _cmd_bench_lb,
        "bench-time": _cmd_bench_time,
        "profile": _cmd_profile,
    }[args.command]
    try:
        return handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, SolverError, ExtractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def console_main():
    sys.exit(main())


def _cmd_gen(args) -> int:
    spec = GenSpec(generator=args.generator, n=args.n, p=args.p, seed=args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for idx in range(args.count):
        inst = generate(spec, index=idx)
        path = outdir / f"{instance_id(spec, idx)}.json"
        save_instance(inst, path)
        print(path)
    return 0


def _parse_bits(text: str, n: int) -> tuple[int, ...]:
    bits = text.strip()
    if len(bits) != n or any(ch not in "01" for ch in bits):
        raise InputError(f"--x must be a {n}-character bitstring of 0/1, got {text!r}")
    return tuple(int(ch) for ch in bits)


def _items_1based(chosen) -> list[int]:
    return [i + 1 for i, b in enumerate(chosen) if b]


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    started = time.monotonic()
    bound = nodes = None
    if args.model in ("dp", "enum"):
        res = solve_dp(inst) if args.model == "dp" else solve_enum(inst)
        status = res.status
        objective = res.objective
        chosen = res.best.chosen if res.best else None
        if status == "optimal":
            bound = objective
    else:
        model = build_model(inst, args.model)
        res = solve_bb(model, SolveLimits(time_limit=args.time_limit))
        status = res.status
        bound = res.bound
        nodes = res.nodes
        objective = None
        chosen = None
        if res.primal is not None:
            sel = extract_selection(model, res.primal)
            objective = sel.cost
            chosen = sel.chosen
    wall = time.monotonic() - started

    if args.json:
        doc = {
            "status": status,
            "objective": objective,
            "bound": bound,
            "nodes": nodes,
            "wall_time_s": wall,
            "chosen_bits": None if chosen is None else "".join(map(str, chosen)),
            "chosen_items": None if chosen is None else _items_1based(chosen),
        }
        print(json.dumps(doc))
    else:
        print(f"status {status}")
        if objective is not None:
            print(f"objective {objective}")
        if chosen is not None:
            print("chosen " + " ".join(map(str, _items_1based(chosen))))
        if bound is not None:
            print(f"bound {bound}")
        if nodes is not None:
            print(f"nodes {nodes}")
    return 1 if status == "infeasible" else 0


def _cmd_phi(args) -> int:
    inst = load_instance(args.instance)
    sel = Selection.of(inst, _parse_bits(args.x, inst.n))
    attack = phi(inst, sel)
    print(f"value {attack.value}")
    print("attacked " + " ".join(str(i + 1) for i in attack.attacked))
    print(f"spent {attack.spent}")
    return 0


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    outcomes = {}
    outcomes["dp"] = solve_dp(inst)
    if inst.n <= 22:
        outcomes["enum"] = solve_enum(inst)
    if inst.all_attackable:
        tags = [t for t in MODEL_CHOICES if t != "ip1" or inst.p == 1]
        for tag in tags:
            model = build_model(inst, tag)
            res = solve_bb(model, SolveLimits(time_limit=args.time_limit))
            if res.status == "time_limit":
                print(f"error: {tag} hit the time limit", file=sys.stderr)
                return 3
            if res.status == "optimal":
                sel = extract_selection(model, res.primal)
                outcomes[tag] = ExactResult(status="optimal", best=sel, objective=sel.cost)
            else:
                outcomes[tag] = ExactResult(status=res.status)

    for name, res in outcomes.items():
        obj = "" if res.objective is None else f" {res.objective}"
        print(f"{name} {res.status}{obj}")

    statuses = {res.status for res in outcomes.values()}
    objectives = {res.objective for res in outcomes.values()}
    disagree = len(statuses) > 1 or len(objectives) > 1
    for res in outcomes.values():
        if res.best is not None:
            ok, _ = robust_feasible(inst, res.best)
            disagree = disagree or not ok or res.best.cost != res.objective
    if disagree:
        print("error: oracle disagreement detected", file=sys.stderr)
        return 4
    print("agree")
    return 0


def _cmd_export(args) -> int:
    inst = load_instance(args.instance)
    model = build_model(inst, args.model)
    fmt = {"lp": "lp_text", "mps": "mps"}[args.format]
    out = Path(args.out)
    out.write_bytes(export(model, fmt))
    print(out)
    return 0


def _batch_label(spec: GenSpec) -> str:
    return f"{spec.generator}-n{spec.n}-p{spec.p}-s{spec.seed}"


def _cmd_bench_lb(args) -> int:
    manifest = bench.load_manifest(args.manifest)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for batch in manifest.batches:
        spec = batch.spec
        table = bench.run_lb_experiment(
            generator=spec.generator,
            n=spec.n,
            p=spec.p,
            count=batch.count,
            models=manifest.models,
            seed=spec.seed,
        )
        path = outdir / f"dominance-{_batch_label(spec)}.csv"
        bench.write_dominance_csv(table, path)
        print(path)
    return 0


def _cmd_bench_time(args) -> int:
    manifest = bench.load_manifest(args.manifest)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    records = bench.run_timing_experiment(manifest, workers=bench.default_workers())
    path = outdir / "results.csv"
    bench.write_records_csv(records, path)
    print(path)
    return 0


def _cmd_profile(args) -> int:
    records = bench.read_records_csv(args.records)
    curve = bench.performance_profile(records)
    bench.write_profile_csv(curve, args.out)
    print(args.out)
    return 0


if __name__ == "__main__":
    console_main()
