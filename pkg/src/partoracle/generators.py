"""Seeded instance families: grids, bounded-degree triangulations, random
regular graphs and unions of bounded-degree trees."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import BoundedDegreeGraph

KINDS = ("grid", "random_triangulation", "random_regular", "tree_union")


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    d: int | None = None
    seed: int = 0
    rows: int | None = None


def grid(rows: int, cols: int) -> BoundedDegreeGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    edges.sort()
    return BoundedDegreeGraph(rows * cols, 4 if rows > 1 and cols > 1 else 2, edges)


def random_triangulation(n: int, d: int = 8, seed: int = 0) -> BoundedDegreeGraph:
    """Delaunay triangulation of n uniform points, thinned to max degree d by
    dropping the longest edges at overfull vertices."""
    from scipy.spatial import Delaunay

    if n < 3:
        edges = [(0, 1)] if n == 2 and d >= 1 else []
        return BoundedDegreeGraph(n, d, edges)
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            u, v = int(u), int(v)
            edges.add((min(u, v), max(u, v)))
    length = {e: float(np.hypot(*(pts[e[0]] - pts[e[1]]))) for e in edges}
    inc: dict[int, set] = {v: set() for v in range(n)}
    for e in edges:
        inc[e[0]].add(e)
        inc[e[1]].add(e)
    for v in range(n):
        while len(inc[v]) > d:
            e = max(inc[v], key=lambda x: (length[x], x))
            inc[e[0]].discard(e)
            inc[e[1]].discard(e)
            edges.discard(e)
    return BoundedDegreeGraph(n, d, sorted(edges))


def random_regular(n: int, d: int = 3, seed: int = 0) -> BoundedDegreeGraph:
    import networkx as nx

    if n * d % 2 or d >= n:
        raise GeneratorError(f"no simple {d}-regular graph on {n} vertices")
    g = nx.random_regular_graph(d, n, seed=seed)
    return BoundedDegreeGraph(n, d, sorted((min(u, v), max(u, v)) for u, v in g.edges()))


def tree_union(n: int, d: int = 4, seed: int = 0, trees: int = 2) -> BoundedDegreeGraph:
    """Union of ``trees`` random spanning trees, each with max degree d // trees."""
    cap = d // trees
    if cap < 2 and n > 2:
        raise GeneratorError(f"d={d} too small for {trees} trees of max degree >= 2")
    rng = np.random.default_rng(seed)
    edges = set()
    for _ in range(trees):
        perm = rng.permutation(n)
        deg = np.zeros(n, dtype=int)
        open_ = [int(perm[0])] if n else []
        for x in perm[1:]:
            j = int(rng.integers(len(open_)))
            p = open_[j]
            edges.add((min(p, int(x)), max(p, int(x))))
            deg[p] += 1
            deg[x] += 1
            if deg[p] >= cap:
                open_[j] = open_[-1]
                open_.pop()
            if deg[x] < cap:
                open_.append(int(x))
    return BoundedDegreeGraph(n, d, sorted(edges))


def generate(spec: GeneratorSpec) -> BoundedDegreeGraph:
    if spec.n < 1:
        raise GeneratorError("n must be >= 1")
    if spec.kind == "grid":
        rows = spec.rows or math.isqrt(spec.n)
        if spec.n % rows:
            raise GeneratorError(f"grid with {rows} rows cannot hold n={spec.n} vertices")
        return grid(rows, spec.n // rows)
    if spec.kind == "random_triangulation":
        return random_triangulation(spec.n, spec.d or 8, spec.seed)
    if spec.kind == "random_regular":
        return random_regular(spec.n, spec.d or 3, spec.seed)
    if spec.kind == "tree_union":
        return tree_union(spec.n, spec.d or 4, spec.seed)
    raise GeneratorError(f"unknown generator kind {spec.kind!r}; expected one of {KINDS}")
