"""The ten acceptance checks, each returning a :class:`CriterionResult`.

Every check is deterministic: instance generators, run seeds and sample
seeds are fixed, so a rerun reproduces the same report.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .applications import (
    PROBLEMS,
    approx_config,
    approx_opt,
    exact_small_solver,
    test_planarity,
    tester_config,
)
from .config import RunConfig
from .generators import grid, random_regular, random_triangulation, tree_union
from .global_partition import global_run
from .graph import BoundedDegreeGraph
from .harness import (
    bench_sweep,
    equivalence_instances,
    equivalence_suite,
    growth_exponent,
    separator_ratios,
    structural_violations,
)
from .oracle import PartitionOracle, oracle_partition, query_bound

GATE = 2 / 3


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] C{self.number} {self.name}: {self.summary} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def c1_equivalence(count: int = 100) -> CriterionResult:
    cases = equivalence_suite(count, max_n=200, base_seed=0)
    ok = sum(c.match for c in cases)
    bad = [f"{c.label}/seed{c.seed}" for c in cases if not c.match]
    cover = f"{sum(c.breakups > 0 for c in cases)} with breakups, {sum(c.final_splits > 0 for c in cases)} with final splits"
    return CriterionResult(1, "oracle/global equivalence", ok == count, f"{ok}/{count} identical ({cover})", {"mismatches": bad})


def _fuzz_graph(rng: np.random.Generator, i: int) -> BoundedDegreeGraph:
    kind = i % 5
    if kind == 0:
        # K5 plus random extra vertices and edges
        n = int(rng.integers(5, 40))
        d = int(rng.integers(4, 8))
        edges = {(a, b) for a in range(5) for b in range(a + 1, 5)}
        return _random_fill(rng, n, d, edges, int(rng.integers(n, 3 * n)))
    if kind == 1:
        d = int(rng.integers(3, 6))
        n = int(rng.integers(d + 1, 60))
        if n * d % 2:
            n += 1
        return random_regular(n, d, int(rng.integers(1 << 30)))
    if kind == 2:
        # disjoint union of a grid, a tree union and isolated vertices
        r, c = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        a = grid(r, c)
        b = tree_union(int(rng.integers(1, 25)), 4, int(rng.integers(1 << 30)))
        iso = int(rng.integers(0, 4))
        off = a.n
        edges = list(a.edges()) + [(u + off, v + off) for u, v in b.edges()]
        return BoundedDegreeGraph(a.n + b.n + iso, 4, edges)
    if kind == 3:
        n = int(rng.integers(3, 80))
        return random_triangulation(n, int(rng.integers(3, 9)), int(rng.integers(1 << 30)))
    n = int(rng.integers(1, 50))
    d = int(rng.integers(1, 7))
    return _random_fill(rng, n, d, set(), int(rng.integers(0, 2 * n + 1)))


def _random_fill(rng, n, d, edges, tries) -> BoundedDegreeGraph:
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    d = max(d, max(deg, default=0))
    for _ in range(tries):
        a, b = (int(x) for x in rng.integers(0, n, 2))
        e = (min(a, b), max(a, b))
        if a != b and e not in edges and deg[a] < d and deg[b] < d:
            edges.add(e)
            deg[a] += 1
            deg[b] += 1
    return BoundedDegreeGraph(n, d, sorted(edges))


@_timed
def c2_structural(count: int = 1000, seed: int = 2) -> CriterionResult:
    rng = np.random.default_rng(seed)
    violations = []
    for i in range(count):
        g = _fuzz_graph(rng, i)
        k = int(rng.integers(1, 16))
        kf = int(rng.integers(1, 3 * k + 2))
        ell = int(rng.integers(1, 9))
        eps = float(rng.choice([0.1, 0.25, 0.5, 1.0]))
        cfg = RunConfig.create(eps, g.d, seed=int(rng.integers(1 << 31)), k=k, k_final=kf, ell=ell)
        part = oracle_partition(PartitionOracle.for_graph(g, cfg))
        for msg in structural_violations(g, part.parts, cfg.k_final):
            violations.append(f"graph {i}: {msg}")
    return CriterionResult(2, "structural contract", not violations, f"{len(violations)} violations over {count} graphs", {"violations": violations[:20]})


@_timed
def c3_order_invariance(count: int = 20, perms: int = 3) -> CriterionResult:
    rng = np.random.default_rng(3)
    differing = []
    for label, g, cfg in equivalence_instances(count, max_n=200, base_seed=1000):
        ref = oracle_partition(PartitionOracle.for_graph(g, cfg))
        for p in range(perms):
            order = rng.permutation(g.n).tolist()
            if oracle_partition(PartitionOracle.for_graph(g, cfg), order) != ref:
                differing.append(f"{label}/seed{cfg.seed}/perm{p}")
    return CriterionResult(3, "query-order invariance", not differing, f"{count * perms - len(differing)}/{count * perms} identical", {"differing": differing})


def planar_runs(family: str, epsilon: float, seeds: int = 30, n: int = 10_000):
    """Global runs on the 100x100 grid (run seed varies) or on n-vertex
    triangulations (instance seed = run seed)."""
    side = math.isqrt(n)
    g_grid = grid(side, side) if family == "grid" else None
    for s in range(seeds):
        g = g_grid if g_grid is not None else random_triangulation(n, 8, s)
        cfg = RunConfig.create(epsilon, g.d, seed=s)
        yield g, global_run(g, cfg)


def _planar_suite(seeds: int):
    out = {}
    for fam in ("grid", "triangulation"):
        for eps in (0.3, 0.5):
            t0 = time.perf_counter()
            rows = []
            for g, run in planar_runs(fam, eps, seeds):
                rows.append((run.cut / g.n, run.cut <= eps * g.n, run.weight_violations(g.n), run.success_rate(), sum(r.breakups for r in run.rounds)))
            out[(fam, eps)] = (rows, time.perf_counter() - t0)
    return out


_SUITE_CACHE: dict = {}


def _suite(seeds: int):
    if seeds not in _SUITE_CACHE:
        _SUITE_CACHE[seeds] = _planar_suite(seeds)
    return _SUITE_CACHE[seeds]


@_timed
def c4_cut_quality(seeds: int = 30) -> CriterionResult:
    suite = _suite(seeds)
    ok = True
    parts, details = [], {}
    for (fam, eps), (rows, secs) in suite.items():
        rate = sum(r[1] for r in rows) / len(rows)
        worst = max(r[0] for r in rows)
        passed = rate >= GATE
        ok &= passed
        parts.append(f"{fam}@{eps}: {rate:.2f}")
        details[f"{fam}@{eps}"] = {"pass_rate": rate, "max_cut_per_n": worst, "mean_cut_per_n": float(np.mean([r[0] for r in rows])), "seconds": secs}
    return CriterionResult(4, "cut quality on planar instances", ok, "rate cut<=eps*n " + ", ".join(parts), details)


@_timed
def c5_weight_accounting(seeds: int = 30) -> CriterionResult:
    suite = _suite(seeds)
    violations = []
    rates = []
    breakups = 0
    for (fam, eps), (rows, _) in suite.items():
        for s, r in enumerate(rows):
            violations += [f"{fam}@{eps} seed {s}: {m}" for m in r[2]]
            rates.append(r[3])
            breakups += r[4]
    return CriterionResult(
        5,
        "per-round weight accounting",
        not violations,
        f"{len(violations)} violations; {breakups} breakups; mean successful-round rate {np.mean(rates):.2f}",
        {"violations": violations[:20]},
    )


@_timed
def c6_query_bound(side: int = 60, epsilons=(0.5, 0.35, 0.25, 0.175, 0.125)) -> CriterionResult:
    g = grid(side, side)
    rows = bench_sweep(g, epsilons, seed=0, probes_per_eps=3)
    within = all(r["within_bound"] for r in rows)
    x = [math.log(1 / r["eps"]) for r in rows]
    y = [math.log(max(r["max_cold_query_probes"], r["max_query_probes"])) for r in rows]
    flat = max(y) - min(y) <= math.log(2)
    alpha, b = growth_exponent(x, y)
    trend_ok = flat or b <= 0 or alpha <= 2
    # Q^ell conformance on small instances where the bound is not astronomically loose
    small = []
    for s in range(10):
        h = random_triangulation(120, 6, s)
        cfg = RunConfig.create(0.5, h.d, seed=s, k=8, ell=3)
        o = PartitionOracle.for_graph(h, cfg)
        for v in range(h.n):
            o.query(v)
        qb = query_bound(cfg.d, cfg.k, cfg.ell)
        cold = PartitionOracle.for_graph(h, cfg)
        cold.query(s)
        small.append(max(o.max_query_probes, cold.max_query_probes) <= qb)
    ok = within and all(small) and trend_ok
    summary = f"bound held {'yes' if within and all(small) else 'no'}; trend {'flat' if flat else f'alpha={alpha:.2f}'}"
    return CriterionResult(6, "query-bound conformance", ok, summary, {"sweep": rows, "alpha": alpha, "b": b, "flat": flat})


CALIBRATION_SIDES = tuple(range(5, 41, 2))
CALIBRATION_MARGIN = 1.25


def calibrate_c_sep(betas=(Fraction(1, 2), Fraction(1, 8))) -> float:
    """Largest observed |S| / (h^1.5 sqrt(n/beta)) over odd-sided square grids
    5..39, times a 1.25 margin, rounded up to two decimals."""
    ratios = [r["ratio"] for r in separator_ratios(CALIBRATION_SIDES, betas)]
    return math.ceil(CALIBRATION_MARGIN * max(ratios) * 100) / 100


@_timed
def c7_separator() -> CriterionResult:
    betas = (Fraction(1, 2), Fraction(1, 8))
    c_sep = calibrate_c_sep(betas)
    rows = separator_ratios(range(10, 101, 10), betas, rect=True)
    weight_bad = [r for r in rows if not r["weight_ok"]]
    within = sum(r["ratio"] <= c_sep for r in rows) / len(rows)
    ok = not weight_bad and within >= 0.95
    return CriterionResult(
        7,
        "separator contract",
        ok,
        f"{len(weight_bad)} weight violations; size bound held in {within:.0%} of {len(rows)} calls with c_sep={c_sep}",
        {"c_sep": c_sep, "calibration_sides": list(CALIBRATION_SIDES), "margin": CALIBRATION_MARGIN, "max_ratio": max(r["ratio"] for r in rows)},
    )


def small_planar_instances(count: int = 20):
    for i in range(count):
        if i % 2:
            r = 3 + i % 5
            yield f"grid{r}x{60 // r}", grid(r, 60 // r)
        else:
            n = 20 + (7 * i) % 41
            yield f"tri{n}", random_triangulation(n, 6, 500 + i)


@_timed
def c8_approximation(count: int = 20, epsilon: float = 0.25) -> CriterionResult:
    hits = {p: 0 for p in PROBLEMS}
    errs = {p: [] for p in PROBLEMS}
    t_exact = 0.0
    for i, (_, g) in enumerate(small_planar_instances(count)):
        cfg = approx_config(epsilon, g.d, seed=i)
        o = PartitionOracle.for_graph(g, cfg)
        for p in PROBLEMS:
            t0 = time.perf_counter()
            opt = exact_small_solver(g, p).size
            t_exact += time.perf_counter() - t0
            est = approx_opt(o, p, epsilon, seed=i).estimate
            errs[p].append(abs(est - opt) / g.n)
            hits[p] += abs(est - opt) <= epsilon * g.n
    rates = {p: hits[p] / count for p in PROBLEMS}
    ok = all(r >= GATE for r in rates.values()) and t_exact < 30
    return CriterionResult(
        8,
        "approximation quality",
        ok,
        ", ".join(f"{p} {rates[p]:.2f}" for p in PROBLEMS) + f"; exact solver {t_exact:.1f}s",
        {"rates": rates, "max_err_per_n": {p: max(errs[p]) for p in PROBLEMS}},
    )


@_timed
def c9_tester(runs: int = 30, n: int = 10_000) -> CriterionResult:
    side = math.isqrt(n)
    accepted = 0
    planar_cut = []
    g_grid = grid(side, side)
    for s in range(runs):
        g = g_grid if s % 2 == 0 else random_triangulation(n, 8, 700 + s)
        o = PartitionOracle.for_graph(g, tester_config(0.3, g.d, seed=s))
        v = test_planarity(o, 0.3, seed=s)
        accepted += v.accepted
        planar_cut.append(v.evidence["cut_estimate"] / v.evidence["threshold"])
    rejected = 0
    for s in range(runs):
        g = random_regular(n, 3, 900 + s)
        o = PartitionOracle.for_graph(g, tester_config(0.1, g.d, seed=s))
        rejected += not test_planarity(o, 0.1, seed=s).accepted
    acc_rate, rej_rate = accepted / runs, rejected / runs
    return CriterionResult(
        9,
        "tester discrimination",
        acc_rate >= GATE and rej_rate >= GATE,
        f"planar accepted {acc_rate:.2f}, 3-regular rejected {rej_rate:.2f}",
        {"planar_cut_over_threshold_max": max(planar_cut)},
    )


@_timed
def c10_memo_economy(instances: int = 6) -> CriterionResult:
    bad = []
    for label, g, cfg in equivalence_instances(instances, base_seed=2000):
        o = PartitionOracle.for_graph(g, cfg)
        first = [o.query(v) for v in range(g.n)]
        probes = o.access.counter.neighbor_probes
        second = [o.query(v) for v in range(g.n)]
        extra = o.access.counter.neighbor_probes - probes
        if extra or any(a.members != b.members for a, b in zip(first, second)):
            bad.append(f"{label}: {extra} extra probes")
    g = grid(100, 100)
    o = PartitionOracle.for_graph(g, RunConfig.create(0.3, 4, seed=1))
    first = [o.query(v).members for v in range(g.n)]
    probes = o.access.counter.neighbor_probes
    second = [o.query(v).members for v in range(g.n)]
    if o.access.counter.neighbor_probes != probes or first != second:
        bad.append("grid100x100")
    return CriterionResult(10, "memo economy", not bad, f"{instances + 1 - len(bad)}/{instances + 1} instances reused the memo fully", {"bad": bad})


CRITERIA = (
    c1_equivalence,
    c2_structural,
    c3_order_invariance,
    c4_cut_quality,
    c5_weight_accounting,
    c6_query_bound,
    c7_separator,
    c8_approximation,
    c9_tester,
    c10_memo_economy,
)


def run_all(selected=None) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if selected is None or i in selected:
            out.append(fn())
    return out
