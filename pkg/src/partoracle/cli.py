"""Command-line harness: instance generation, partitioning, oracle queries,
equivalence checks, the tester, approximations, query benchmarks and the
acceptance suite. Each subcommand writes ``telemetry.jsonl`` and
``summary.csv`` into ``--out`` and exits 1 if an asserted invariant failed."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import harness
from .applications import PROBLEMS, approx_config, approx_opt, test_planarity, tester_config
from .config import ConfigError, RunConfig
from .generators import KINDS, GeneratorError
from .global_partition import global_run
from .graph import GraphParseError, Partition, dump_graph, validate_partition
from .oracle import PartitionOracle, oracle_partition


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}")
    if not vals or any(not 0 < e <= 1 for e in vals):
        raise argparse.ArgumentTypeError("epsilon values must lie in (0, 1]")
    return vals


def _config(args, eps: float, d: int, seed: int) -> RunConfig:
    return RunConfig.create(eps, d, seed=seed, mode=args.mode, k=args.k)


def _graph(args, seed: int | None = None):
    return harness.load_or_generate(args.input, args.kind, args.n, args.d, args.seed if seed is None else seed)


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(fn, items))


def cmd_generate(args, out):
    g = _graph(args)
    path = os.path.join(out, "graph.txt")
    with open(path, "w") as fh:
        fh.write(dump_graph(g))
    row = {"kind": args.kind or "file", "n": g.n, "m": g.m, "d": g.d, "seed": args.seed, "path": path}
    return [row], [row], []


def _partition_trial(job):
    args, seed = job
    g = _graph(args, seed if args.input is None and args.kind != "grid" else None)
    eps = args.eps[0]
    cfg = _config(args, eps, g.d, seed)
    run = global_run(g, cfg)
    verdict = validate_partition(g, run.partition, eps, cfg.k_final)
    issues = harness.structural_violations(g, run.partition.parts, cfg.k_final) + run.weight_violations(g.n, breakup=False)
    return g.n, cfg, run, verdict, issues


def cmd_partition(args, out):
    seeds = [args.seed + i for i in range(args.seeds)]
    tele, rows, bad = [], [], []
    for (n, cfg, run, verdict, issues), seed in zip(_map(_partition_trial, [(args, s) for s in seeds], args.jobs), seeds):
        tele += [json.loads(r.to_json()) | {"seed": seed} for r in run.rounds]
        text = json.dumps(json.loads(run.partition.to_json()), sort_keys=True, separators=(",", ":"))
        name = "partition.json" if len(seeds) == 1 else f"partition_seed{seed}.json"
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text + "\n")
        if Partition.from_json(text) != run.partition:
            issues.append("partition file does not round-trip")
        bad += [f"seed {seed}: {m}" for m in issues]
        rows.append(
            {
                "seed": seed,
                "n": n,
                "eps": cfg.epsilon,
                "ell": cfg.ell,
                "k": cfg.k,
                "parts": len(run.partition),
                "cut": run.cut,
                "cut_per_n": run.cut / n if n else 0.0,
                "cut_ok": verdict.cut <= cfg.epsilon * n,
                "final_splits": run.final_splits,
                "breakup_over_budget": len(run.weight_violations(n)),
                "success_rate": run.success_rate(),
            }
        )
    return tele, rows, bad


def cmd_oracle(args, out):
    g = _graph(args)
    cfg = _config(args, args.eps[0], g.d, args.seed)
    o = PartitionOracle.for_graph(g, cfg)
    vertices = [int(x) for x in args.vertices.split(",")] if args.vertices else range(g.n)
    tele, bad, seen = [], [], set()
    for v in vertices:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range [0, {g.n})")
        p = o.query(v)
        seen.add(p)
        tele.append({"vertex": v, "part": list(p.members), "probes": o.last_query_probes})
    bad += harness.structural_violations(g, seen, cfg.k_final)
    stats = o.stats()
    if stats["max_query_probes"] > stats["q_bound"]:
        bad.append(f"query used {stats['max_query_probes']} probes > Q^ell = {stats['q_bound']}")
    stats.pop("q_bound")
    return tele, [stats], bad


def cmd_equivalence(args, out):
    tele, rows, bad = [], [], []
    for i in range(args.seeds):
        seed = args.seed + i
        g = _graph(args, seed if args.input is None and args.kind != "grid" else None)
        cfg = _config(args, args.eps[0], g.d, seed)
        ref = global_run(g, cfg).partition
        got = oracle_partition(PartitionOracle.for_graph(g, cfg))
        match = got == ref
        tele.append({"seed": seed, "n": g.n, "match": match, "parts": len(ref)})
        if not match:
            bad.append(f"seed {seed}: oracle partition differs from the global run")
    matches = sum(t["match"] for t in tele)
    rows.append({"runs": args.seeds, "matches": matches, "report": f"{matches}/{args.seeds} exact matches"})
    print(rows[0]["report"])
    return tele, rows, bad


def cmd_test(args, out):
    tele, rows = [], []
    for i in range(args.seeds):
        seed = args.seed + i
        g = _graph(args, seed if args.input is None and args.kind != "grid" else None)
        eps = args.eps[0]
        o = PartitionOracle.for_graph(g, tester_config(eps, g.d, seed=seed, mode=args.mode, k=args.k))
        v = test_planarity(o, eps, seed=seed)
        tele.append({"seed": seed, "decision": v.decision} | v.evidence)
        rows.append({"seed": seed, "decision": v.decision, "cut_estimate": v.evidence["cut_estimate"], "threshold": v.evidence["threshold"]})
    return tele, rows, []


def cmd_approx(args, out):
    tele, rows = [], []
    problems = PROBLEMS if args.problem == "all" else (args.problem,)
    for i in range(args.seeds):
        seed = args.seed + i
        g = _graph(args, seed if args.input is None and args.kind != "grid" else None)
        eps = args.eps[0]
        o = PartitionOracle.for_graph(g, approx_config(eps, g.d, seed=seed, mode=args.mode, k=args.k))
        for p in problems:
            r = approx_opt(o, p, eps, args.budget, seed=seed)
            row = {"seed": seed, "problem": p, "n": g.n, "estimate": r.estimate, "sample": r.sample_size}
            if args.exact:
                from .applications import exact_small_solver

                row["exact"] = exact_small_solver(g, p).size
            tele.append(row)
            rows.append(row)
    return tele, rows, []


def cmd_bench(args, out):
    g = _graph(args)
    rows = harness.bench_sweep(g, args.eps, seed=args.seed, probes_per_eps=args.samples, k=args.k)
    bad = [f"eps {r['eps']}: probes exceed Q^ell" for r in rows if not r["within_bound"]]
    return rows, rows, bad


def cmd_accept(args, out):
    from .acceptance import run_all

    selected = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(selected)
    tele, rows, bad = [], [], []
    for r in results:
        print(r.line())
        tele.append({"criterion": r.number, "name": r.name, "passed": r.passed, "summary": r.summary, "seconds": r.seconds, "details": r.details})
        rows.append({"criterion": r.number, "name": r.name, "passed": r.passed, "summary": r.summary})
        if not r.passed:
            bad.append(f"criterion {r.number} failed: {r.summary}")
    return tele, rows, bad


COMMANDS = {
    "generate": cmd_generate,
    "partition": cmd_partition,
    "oracle": cmd_oracle,
    "equivalence": cmd_equivalence,
    "test": cmd_test,
    "approx": cmd_approx,
    "bench": cmd_bench,
    "accept": cmd_accept,
}

DEFAULT_EPS = {"bench": "0.5,0.25,0.125"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="graph file (header 'n=<int> [d=<int>]' then one 'u v' edge per line)")
    common.add_argument("--kind", choices=KINDS, help="generate the instance instead of reading --input")
    common.add_argument("--n", type=int, help="vertex count for --kind")
    common.add_argument("--eps", type=_eps_list, help="epsilon, or a comma list for bench")
    common.add_argument("--d", type=int, help="degree bound")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to run")
    common.add_argument("--mode", choices=("theory", "practical"), default="practical")
    common.add_argument("--k", type=int, help="practical part-size cap override")
    common.add_argument("--out", default="out", help="report directory")
    common.add_argument("--jobs", type=int, default=1, help="parallel trials")
    p = argparse.ArgumentParser(prog="partoracle", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "oracle":
            sp.add_argument("--vertices", help="comma list of vertices to query (default: all)")
        if name == "approx":
            sp.add_argument("--problem", choices=(*PROBLEMS, "all"), default="all")
            sp.add_argument("--budget", type=int, help="sample size")
            sp.add_argument("--exact", action="store_true", help="also solve the whole graph exactly")
        if name == "bench":
            sp.add_argument("--samples", type=int, default=3, help="cold single-query samples per epsilon")
        if name == "accept":
            sp.add_argument("--only", help="comma list of criterion numbers")
    return p


def _usage(msg: str) -> int:
    print(f"partoracle: error: {msg}", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.eps is None:
        args.eps = _eps_list(DEFAULT_EPS.get(args.command, "0.3"))
    if args.seeds < 1 or args.jobs < 1 or (args.k is not None and args.k < 1) or (args.d is not None and args.d < 1):
        return _usage("--seeds, --jobs, --k and --d must be positive")
    if args.command not in ("accept",) and not args.input and not (args.kind and args.n):
        return _usage("either --input or both --kind and --n are required")
    out = harness.ensure_dir(args.out)
    try:
        tele, rows, bad = COMMANDS[args.command](args, out)
    except (GraphParseError, GeneratorError, ConfigError, FileNotFoundError, ValueError) as exc:
        return _usage(str(exc))
    harness.write_jsonl(os.path.join(out, "telemetry.jsonl"), tele)
    harness.write_csv(os.path.join(out, "summary.csv"), rows)
    if bad:
        with open(os.path.join(out, "violations.txt"), "w") as fh:
            fh.write("\n".join(bad) + "\n")
        print(f"{len(bad)} invariant violation(s):", file=sys.stderr)
        for line in bad[:20]:
            print("  " + line, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
