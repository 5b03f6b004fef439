"""Experiment drivers shared by the CLI and the acceptance suite."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import RunConfig
from .generators import GeneratorSpec, generate, grid, random_triangulation, tree_union
from .global_partition import global_run
from .graph import BoundedDegreeGraph, is_connected_subset
from .oracle import PartitionOracle, oracle_partition, query_bound
from .separator import separator_set


def structural_violations(g: BoundedDegreeGraph, parts, k_final: int) -> list[str]:
    adj = g.adjacency()
    out = []
    for p in parts:
        members = p.members if hasattr(p, "members") else tuple(p)
        if len(members) > k_final:
            out.append(f"part at {members[0]} has {len(members)} > k_final={k_final} vertices")
        if not is_connected_subset(adj, members):
            out.append(f"part at {members[0]} is disconnected")
    return out


@dataclass
class EquivalenceCase:
    label: str
    n: int
    seed: int
    match: bool
    parts: int
    cut: int
    breakups: int = 0
    final_splits: int = 0


def equivalence_instances(count: int, max_n: int = 200, base_seed: int = 0):
    """(label, graph, config) triples cycling through triangulations, grids and
    tree unions. Small size caps exercise breakups; every other capped case
    sets k_final = 2k so the final refinement fires as well."""
    rng = np.random.default_rng(base_seed)
    side_choices = [(r, c) for r in range(4, 15) for c in range(4, 15) if r * c <= max_n]
    for i in range(count):
        seed = base_seed + i
        fam = i % 3
        if fam == 0:
            n = int(rng.integers(20, max_n + 1))
            g, label = random_triangulation(n, 8, seed), f"tri{n}"
        elif fam == 1:
            r, c = side_choices[int(rng.integers(len(side_choices)))]
            g, label = grid(r, c), f"grid{r}x{c}"
        else:
            n = int(rng.integers(20, max_n + 1))
            g, label = tree_union(n, 6, seed), f"trees{n}"
        k = (6, 12, 32, None)[i % 4]
        eps = (0.3, 0.5)[i % 2]
        ell = None if k is None else 5 + i % 4
        k_final = 2 * k if k is not None and i % 8 < 4 else None
        yield label, g, RunConfig.create(eps, g.d, seed=seed, k=k, ell=ell, k_final=k_final)


def equivalence_suite(count: int, max_n: int = 200, base_seed: int = 0) -> list[EquivalenceCase]:
    out = []
    for label, g, cfg in equivalence_instances(count, max_n, base_seed):
        ref = global_run(g, cfg)
        got = oracle_partition(PartitionOracle.for_graph(g, cfg))
        breakups = sum(r.breakups for r in ref.rounds)
        out.append(EquivalenceCase(label, g.n, cfg.seed, got == ref.partition, len(got), ref.cut, breakups, ref.final_splits))
    return out


def growth_exponent(xs, ys) -> tuple[float, float]:
    """Fit y = a + b * x**alpha by least squares over a grid of alpha.

    Returns (alpha, b). A flat series (b <= 0) grows not at all.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    best = (math.inf, 0.0, 0.0)
    for alpha in np.arange(0.25, 8.0001, 0.05):
        a_mat = np.column_stack([np.ones_like(x), x**alpha])
        coef, *_ = np.linalg.lstsq(a_mat, y, rcond=None)
        sse = float(np.sum((a_mat @ coef - y) ** 2))
        if sse < best[0] - 1e-12:
            best = (sse, float(alpha), float(coef[1]))
    return best[1], best[2]


def bench_sweep(g: BoundedDegreeGraph, epsilons, seed: int = 0, probes_per_eps: int = 3, k: int | None = None, sample_seed: int = 0):
    """Per epsilon: the largest single-query probe count over fresh oracles,
    the largest per-query count over a full query sequence, and Q^ell."""
    rows = []
    rng = np.random.default_rng(sample_seed)
    starts = [int(v) for v in rng.integers(0, g.n, probes_per_eps)]
    for eps in epsilons:
        cfg = RunConfig.create(eps, g.d, seed=seed, k=k)
        cold = 0
        for v in starts:
            o = PartitionOracle.for_graph(g, cfg)
            o.query(v)
            cold = max(cold, o.max_query_probes)
        o = PartitionOracle.for_graph(g, cfg)
        for v in range(g.n):
            o.query(v)
        qb = query_bound(cfg.d, cfg.k, cfg.ell)
        rows.append(
            {
                "eps": eps,
                "ell": cfg.ell,
                "k": cfg.k,
                "max_cold_query_probes": cold,
                "max_query_probes": o.max_query_probes,
                "total_probes": o.access.counter.neighbor_probes,
                "log10_q_bound": math.log10(qb),
                "within_bound": max(cold, o.max_query_probes) <= qb,
            }
        )
    return rows


def separator_ratios(sides, betas, h: int = 5, rect: bool = False):
    """|S| / (h^1.5 sqrt(n/beta)) for grids with uniform weights."""
    out = []
    shapes = [(s, s) for s in sides]
    if rect:
        shapes += [(s, 2 * s) for s in sides if 2 * s * s <= 10_000] + [(50, 200), (25, 400)]
    for r, c in shapes:
        g = grid(r, c)
        adj = {v: list(nb) for v, nb in enumerate(g.adjacency())}
        w = {v: Fraction(1, g.n) for v in adj}
        for beta in betas:
            s = separator_set(adj, w, beta)
            heavy = _heaviest_left(adj, s, g.n)
            out.append(
                {
                    "rows": r,
                    "cols": c,
                    "n": g.n,
                    "beta": str(beta),
                    "size": len(s),
                    "ratio": len(s) / (h**1.5 * math.sqrt(g.n / beta)),
                    "max_weight": str(heavy),
                    "weight_ok": heavy <= beta,
                }
            )
    return out


def _heaviest_left(adj, removed, n) -> Fraction:
    pool = set(adj) - set(removed)
    best = 0
    while pool:
        s = pool.pop()
        stack, size = [s], 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in pool:
                    pool.discard(y)
                    stack.append(y)
                    size += 1
        best = max(best, size)
    return Fraction(best, n)


def write_jsonl(path: str, records) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write((r if isinstance(r, str) else json.dumps(r, separators=(",", ":"))) + "\n")


def write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def load_or_generate(input_path: str | None, kind: str | None, n: int | None, d: int | None, seed: int) -> BoundedDegreeGraph:
    from .graph import load_graph

    if input_path:
        with open(input_path) as fh:
            return load_graph(fh.read(), d)
    if not kind or not n:
        raise ValueError("either --input or both --kind and --n are required")
    return generate(GeneratorSpec(kind, n, d, seed))


__all__ = [
    "bench_sweep",
    "equivalence_suite",
    "growth_exponent",
    "separator_ratios",
    "structural_violations",
]
