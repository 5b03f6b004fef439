"""Local emulation of the global partitioner.

A query for v resolves the component of v after every round, touching only
the part of the graph needed to decide the merges around it. Coins come
from :func:`partoracle.config.coin`, so answers are a pure function of
(graph, config); the memo below only saves work.
"""

from __future__ import annotations

import math
import threading

from .config import ConfigError, RunConfig, coin
from .graph import BoundedDegreeGraph, Component, GraphAccess
from .separator import hyperfinite_partition


def query_bound(d: int, k: int, ell: int) -> int:
    """Q^ell from Q^1 = d^2 and Q^i = d^2 k^2 (1 + Q^{i-1})."""
    q = d * d
    step = d * d * k * k
    for _ in range(2, ell + 1):
        q = step + step * q
    return q


class PartitionOracle:
    """Answers g_P(v) for the partition the global run would output.

    The memo maps (round, anchor) to the resolved component, with a
    per-round index from vertex to anchor, plus heaviest-edge targets and
    the incidence lists already probed. Entries are written once.
    """

    def __init__(self, access: GraphAccess, config: RunConfig):
        if not math.isclose(config.gamma, config.epsilon / (3 * config.ell), rel_tol=1e-12):
            raise ConfigError("gamma must equal epsilon/(3*ell)")
        if access.d > config.d:
            raise ConfigError(f"graph degree bound {access.d} exceeds configured d={config.d}")
        self.access = access
        self.config = config
        ell = config.ell
        self._nbrs: dict[int, tuple[int, ...]] = {}
        self._comps: list[dict[int, Component]] = [{} for _ in range(ell + 1)]
        self._anchor: list[dict[int, int]] = [{} for _ in range(ell + 1)]
        self._heavy: list[dict[int, Component | None]] = [{} for _ in range(ell + 1)]
        self._final: dict[int, Component] = {}
        self._lock = threading.RLock()
        self.queries = 0
        self.max_query_probes = 0
        self.last_query_probes = 0

    @classmethod
    def for_graph(cls, g: BoundedDegreeGraph, config: RunConfig) -> PartitionOracle:
        return cls(g.access(), config)

    def _neighbors(self, v: int) -> tuple[int, ...]:
        nb = self._nbrs.get(v)
        if nb is None:
            nb = tuple(self.access.neighbors(v))
            self._nbrs[v] = nb
        return nb

    def _store(self, i: int, parts) -> None:
        comps, anchors = self._comps[i], self._anchor[i]
        for p in parts:
            comps.setdefault(p.max_id, p)
            for x in p.members:
                anchors[x] = p.max_id

    def component_at(self, v: int, i: int) -> Component:
        """C^i(v), the component holding v after round i."""
        if not 0 <= i <= self.config.ell:
            raise ValueError(f"round {i} outside [0, {self.config.ell}]")
        if i == 0:
            return Component((v,))
        with self._lock:
            j = i
            while j > 0 and v not in self._anchor[j]:
                j -= 1
            for r in range(j + 1, i + 1):
                self._resolve(v, r)
            return self._comps[i][self._anchor[i][v]]

    def _heaviest(self, c: Component, lvl: int) -> Component | None:
        """Target of c's heaviest edge among round-``lvl`` components."""
        memo = self._heavy[lvl]
        if c.max_id in memo:
            return memo[c.max_id]
        inside = set(c.members)
        weight: dict[int, int] = {}
        found: dict[int, Component] = {}
        for x in c.members:
            for u in self._neighbors(x):
                if u in inside:
                    continue
                cu = self.component_at(u, lvl)
                weight[cu.max_id] = weight.get(cu.max_id, 0) + 1
                found[cu.max_id] = cu
        best = max(weight, key=lambda a: (weight[a], a)) if weight else None
        target = found[best] if best is not None else None
        memo[c.max_id] = target
        return target

    def _star(self, centre: Component, i: int) -> Component:
        """The Tails centre together with every Heads neighbour pointing at it."""
        lvl = i - 1
        seed = self.config.seed
        inside = set(centre.members)
        members = list(centre.members)
        seen = set()
        for x in centre.members:
            for u in self._neighbors(x):
                if u in inside:
                    continue
                cu = self.component_at(u, lvl)
                if cu.max_id in seen:
                    continue
                seen.add(cu.max_id)
                if coin(seed, i, cu.max_id):
                    t = self._heaviest(cu, lvl)
                    if t is not None and t.max_id == centre.max_id:
                        members.extend(cu.members)
        return Component.of(members)

    def _resolve(self, v: int, i: int) -> None:
        cfg = self.config
        c = self._comps[i - 1][self._anchor[i - 1][v]] if i > 1 else Component((v,))
        if coin(cfg.seed, i, c.max_id):
            t = self._heaviest(c, i - 1)
            centre = t if t is not None and not coin(cfg.seed, i, t.max_id) else None
        else:
            centre = c
        if centre is None:
            self._store(i, [c])
            return
        merged = self._star(centre, i)
        if len(merged) > cfg.k:
            # every edge inside the merged component has been probed already
            adj = {x: self._neighbors(x) for x in merged.members}
            parts = hyperfinite_partition(adj, cfg.gamma, cfg.d, cfg.sep, k=cfg.k)
        else:
            parts = [merged]
        self._store(i, parts)

    def query(self, v: int) -> Component:
        """g_P(v): v's part after the final refinement."""
        if not 0 <= v < self.access.n:
            raise IndexError(f"vertex {v} out of range [0, {self.access.n})")
        with self._lock:
            before = self.access.counter.neighbor_probes
            part = self._final.get(v)
            if part is None:
                part = self._query(v)
            spent = self.access.counter.neighbor_probes - before
            self.queries += 1
            self.last_query_probes = spent
            self.max_query_probes = max(self.max_query_probes, spent)
            return part

    def _query(self, v: int) -> Component:
        cfg = self.config
        c = self.component_at(v, cfg.ell)
        if cfg.needs_final_split(len(c)):
            adj = {x: self._neighbors(x) for x in c.members}
            parts = hyperfinite_partition(adj, cfg.epsilon, cfg.d, cfg.sep, k=cfg.k_final)
        else:
            parts = [c]
        for p in parts:
            for x in p.members:
                self._final[x] = p
        return self._final[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        """v's incidence list, probed through the counted handle on first use."""
        with self._lock:
            return self._neighbors(v)

    def memo_size(self) -> int:
        return sum(len(c) for c in self._comps) + len(self._final)

    def stats(self) -> dict:
        cfg = self.config
        qb = query_bound(cfg.d, cfg.k, cfg.ell)
        out = self.access.counter.snapshot()
        out.update(
            queries=self.queries,
            max_query_probes=self.max_query_probes,
            memo_size=self.memo_size(),
            q_bound=qb,
            log10_q_bound=math.log10(qb) if qb > 0 else float("-inf"),
        )
        return out


def oracle_new(access: GraphAccess, config: RunConfig) -> PartitionOracle:
    return PartitionOracle(access, config)


def oracle_query(state: PartitionOracle, v: int) -> Component:
    return state.query(v)


def component_at(state: PartitionOracle, v: int, i: int) -> Component:
    return state.component_at(v, i)


def query_stats(state: PartitionOracle) -> dict:
    return state.stats()


def oracle_partition(state: PartitionOracle, order=None):
    """Query every vertex (in ``order`` if given) and collect the partition."""
    from .graph import Partition

    n = state.access.n
    seq = range(n) if order is None else order
    parts = {}
    for v in seq:
        p = state.query(v)
        parts[p.min_id] = p.members
    return Partition(n, parts.values())
