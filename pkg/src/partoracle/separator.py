"""Vertex separators and small-part partitions of connected subgraphs.

Subgraphs are passed as adjacency mappings ``{v: neighbors}``; neighbors
outside the mapping's key set are ignored, so callers may hand in base
incidence lists unfiltered. Every routine here is a pure function of the
vertex set, the induced edges and its parameters: vertex ids are visited in
ascending order and no randomness is involved. The partition oracle relies
on that to rebuild exactly the parts the global algorithm produced.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import Component

log = logging.getLogger(__name__)

THEORY = "theory"
PRACTICAL = "practical"


@dataclass(frozen=True)
class SeparatorConfig:
    """Separator constants.

    ``c2`` defaults to ``c_sep**2 * h**3``, the value obtained by plugging
    the separator bound into the hyperfinite construction. ``k_cap`` bounds
    part sizes in practical mode only.
    """

    h: int = 5
    c_sep: float = 1.0
    c2: float | None = None
    mode: str = PRACTICAL
    k_cap: int = 4096

    def __post_init__(self):
        if self.c2 is None:
            object.__setattr__(self, "c2", self.c_sep**2 * self.h**3)
        if self.c_sep <= 0:
            raise ValueError("c_sep must be positive")
        if self.c2 <= 1:
            raise ValueError("c2 must be > 1")
        if self.mode not in (THEORY, PRACTICAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k_cap < 1:
            raise ValueError("k_cap must be >= 1")

    def theory_k(self, gamma: float, d: int) -> int:
        return math.ceil(self.c2 * d * d / (gamma * gamma))

    def k_of(self, gamma: float, d: int) -> int:
        """Size bound for hyperfinite parts at distortion gamma."""
        k = self.theory_k(gamma, d)
        return k if self.mode == THEORY else min(k, self.k_cap)

    def separator_bound(self, n: int, beta: float) -> float:
        return self.c_sep * self.h**1.5 * math.sqrt(n / beta)


def _restrict(adj: Mapping[int, Iterable[int]]) -> dict[int, list[int]]:
    keys = adj.keys()
    return {v: sorted(u for u in adj[v] if u in keys and u != v) for v in sorted(keys)}


def _components(adj: dict[int, list[int]], vertices: Iterable[int], removed: set[int] = frozenset()) -> list[list[int]]:
    """Connected components of the subgraph induced by ``vertices - removed``,
    each sorted, listed in order of their smallest vertex."""
    pool = set(vertices) - removed
    out = []
    for s in sorted(pool):
        if s not in pool:
            continue
        pool.discard(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in pool:
                    pool.discard(y)
                    comp.append(y)
                    queue.append(y)
        comp.sort()
        out.append(comp)
    return out


def _bfs_levels(adj: dict[int, list[int]], root: int, inside: set[int]) -> list[list[int]]:
    levels = [[root]]
    seen = {root}
    while True:
        nxt = []
        for x in levels[-1]:
            for y in adj[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            return levels
        levels.append(nxt)


def _peripheral_levels(adj, comp: list[int], inside: set[int]) -> list[list[int]]:
    levels = _bfs_levels(adj, comp[0], inside)
    for _ in range(4):
        cand = min(levels[-1])
        nxt = _bfs_levels(adj, cand, inside)
        if len(nxt) < len(levels):
            break
        grew = len(nxt) > len(levels)
        levels = nxt
        if not grew:
            break
    return levels


def _level_cut(levels: list[list[int]], weight, limit) -> list[int]:
    """Pick the BFS level to remove.

    Prefer the smallest level leaving both sides within ``limit``; if no
    level does, minimize |level| / min(weight before, weight after).
    """
    lw = [sum(weight(v) for v in lev) for lev in levels]
    total = sum(lw)
    fitting = None
    best = None
    before = 0
    for j, lev in enumerate(levels):
        after = total - before - lw[j]
        lo = min(before, after)
        if lo > 0:
            if before <= limit and after <= limit and (fitting is None or len(lev) < len(levels[fitting])):
                fitting = j
            # compare len/lo exactly: a/b < c/e  <=>  a*e < c*b
            if best is None or len(lev) * best[1] < best[0] * lo:
                best = (len(lev), lo, j)
        before += lw[j]
    if fitting is not None:
        return list(levels[fitting])
    if best is None:
        # no level splits the component into two weighted sides
        return list(levels[0])
    return list(levels[best[2]])


def _separate(adj: dict[int, list[int]], vertices: list[int], weight, limit) -> set[int]:
    separator: set[int] = set()
    stack = _components(adj, vertices)
    stack.reverse()
    while stack:
        comp = stack.pop()
        if sum(weight(v) for v in comp) <= limit:
            continue
        if len(comp) == 1:
            separator.add(comp[0])
            continue
        inside = set(comp)
        cut = _level_cut(_peripheral_levels(adj, comp, inside), weight, limit)
        separator.update(cut)
        pieces = _components(adj, comp, set(cut))
        stack.extend(reversed(pieces))
    return separator


def separator_set(
    adj: Mapping[int, Iterable[int]],
    weights: Mapping[int, float | Fraction],
    beta: float | Fraction,
) -> set[int]:
    """Vertices whose removal leaves no component heavier than ``beta``.

    ``weights`` must be non-negative and sum to one: exactly when given as
    ints/Fractions, within 1e-9 otherwise.
    """
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    g = _restrict(adj)
    if set(weights) != set(g):
        raise ValueError("weights must cover exactly the subgraph's vertices")
    vals = list(weights.values())
    if any(w < 0 for w in vals):
        raise ValueError("weights must be non-negative")
    total = sum(vals)
    exact = all(isinstance(w, (int, Fraction)) for w in vals)
    if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
        raise ValueError(f"weights must sum to 1, got {total}")
    return _separate(g, list(g), weights.__getitem__, beta)


def tree_chop(adj: Mapping[int, Iterable[int]], k: int) -> list[Component]:
    """Carve a BFS spanning forest into connected pieces of at most k vertices.

    Trees are rooted at their minimum id with children discovered in id
    order. Bottom-up, a vertex keeps its children's leftover subtrees until
    the total exceeds k, then the largest leftovers (larger id first on
    ties) are cut off as parts.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = _restrict(adj)
    parts: list[Component] = []
    for comp in _components(g, g):
        inside = set(comp)
        parent = {comp[0]: None}
        order = [comp[0]]
        for x in order:
            for y in g[x]:
                if y in inside and y not in parent:
                    parent[y] = x
                    order.append(y)
        children: dict[int, list[int]] = {v: [] for v in comp}
        for v in order[1:]:
            children[parent[v]].append(v)
        residual: dict[int, list[int]] = {}
        for v in reversed(order):
            kids = sorted(children[v], key=lambda c: (len(residual[c]), c), reverse=True)
            size = 1 + sum(len(residual[c]) for c in kids)
            for c in kids:
                if size <= k:
                    break
                parts.append(Component.of(residual.pop(c)))
                size -= len(parts[-1])
            members = [v]
            for c in kids:
                if c in residual:
                    members.extend(residual.pop(c))
            residual[v] = members
        parts.append(Component.of(residual.pop(comp[0])))
    parts.sort()
    return parts


def _absorb_separator(g: dict[int, list[int]], pieces: list[list[int]], separator: set[int], k: int) -> list[Component]:
    """Turn separator vertices back into part members where size allows.

    Each separator vertex joins the adjacent part it shares most edges with
    (larger max id on ties) if that part has room; vertices that cannot join
    anything seed new parts that later separator vertices may join.
    """
    label: dict[int, int] = {}
    members: list[list[int]] = []
    for p in pieces:
        for v in p:
            label[v] = len(members)
        members.append(list(p))
    pending = sorted(separator)
    while pending:
        progress = True
        while progress:
            progress = False
            rest = []
            for s in pending:
                counts: dict[int, int] = {}
                for u in g[s]:
                    lab = label.get(u)
                    if lab is not None and len(members[lab]) < k:
                        counts[lab] = counts.get(lab, 0) + 1
                if counts:
                    lab = max(counts, key=lambda x: (counts[x], max(members[x])))
                    label[s] = lab
                    members[lab].append(s)
                    progress = True
                else:
                    rest.append(s)
            pending = rest
        if pending:
            s = pending.pop(0)
            label[s] = len(members)
            members.append([s])
    return sorted(Component.of(m) for m in members)


def hyperfinite_partition(
    adj: Mapping[int, Iterable[int]],
    gamma: float,
    d: int,
    cfg: SeparatorConfig,
    k: int | None = None,
) -> list[Component]:
    """Split a subgraph into connected parts of size at most ``k``.

    ``k`` defaults to ``cfg.k_of(gamma, d)``. Uses a separator with uniform
    weights and threshold k/|V|, returns separator vertices to neighbouring
    parts where they fit, and falls back to :func:`tree_chop` when the
    separator is larger than the configured bound allows.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if k is None:
        k = cfg.k_of(gamma, d)
    g = _restrict(adj)
    n = len(g)
    if n == 0:
        return []
    if n <= k:
        return [Component.of(c) for c in _components(g, g)]
    sep = _separate(g, list(g), lambda v: 1, k)
    bound = cfg.separator_bound(n, k / n)
    if len(sep) > bound:
        if cfg.mode == THEORY:
            log.error("separator of size %d exceeds bound %.1f on %d vertices", len(sep), bound, n)
        else:
            log.warning("separator of size %d exceeds bound %.1f on %d vertices", len(sep), bound, n)
        return tree_chop(g, k)
    pieces = _components(g, g, sep)
    return _absorb_separator(g, pieces, sep, k)


def cut_edges(adj: Mapping[int, Iterable[int]], parts: Iterable[Component]) -> int:
    """Number of induced edges running between different parts."""
    g = _restrict(adj)
    label = {v: i for i, p in enumerate(parts) for v in p.members}
    return sum(1 for v in g for u in g[v] if v < u and label[v] != label[u])
