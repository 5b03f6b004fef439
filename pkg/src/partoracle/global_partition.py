"""Whole-graph iterative star contraction with size-triggered breakup.

``global_run`` is the reference the local oracle must reproduce. The
round-level functions operating on :class:`ContractedGraph` spell out the
same steps one at a time and are used to cross-check it on small inputs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import RunConfig, coin
from .graph import BoundedDegreeGraph, Component, ContractedGraph, GraphAccess, Partition, contract
from .separator import SeparatorConfig, hyperfinite_partition


@dataclass
class RoundRecord:
    round: int
    w_before: int
    w_after_contract: int
    w_after_breakup: int
    merges: int
    breakups: int
    successful: bool
    components: int
    breakup_increase: int = 0
    gamma_n: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


@dataclass
class GlobalRun:
    partition: Partition
    rounds: list[RoundRecord]
    final_splits: int
    w_before_final: int
    cut: int
    probes: int = 0
    config: RunConfig | None = field(default=None, repr=False)

    def weight_violations(self, n: int, breakup: bool = True) -> list[str]:
        """Rounds where contraction raised the weight or (if ``breakup``)
        breakup added more than gamma*n. Only the first is unconditional."""
        out = []
        for r in self.rounds:
            if r.w_after_contract > r.w_before:
                out.append(f"round {r.round}: contraction raised weight {r.w_before} -> {r.w_after_contract}")
            if breakup and r.breakup_increase > r.gamma_n + 1e-9:
                out.append(f"round {r.round}: breakup added {r.breakup_increase} > gamma*n = {r.gamma_n:.3f}")
        return out

    def success_rate(self) -> float:
        return sum(r.successful for r in self.rounds) / len(self.rounds) if self.rounds else 0.0


def _read_graph(access: GraphAccess) -> tuple[list[list[int]], np.ndarray, np.ndarray]:
    adj = [access.neighbors(v) for v in range(access.n)]
    eu = [u for u in range(access.n) for v in adj[u] if u < v]
    ev = [v for u in range(access.n) for v in adj[u] if u < v]
    return adj, np.asarray(eu, dtype=np.int64), np.asarray(ev, dtype=np.int64)


def _cut_weight(label: np.ndarray, eu: np.ndarray, ev: np.ndarray) -> int:
    return int(np.count_nonzero(label[eu] != label[ev])) if eu.size else 0


def _canonical(label: np.ndarray) -> np.ndarray:
    # relabel components by first appearance, i.e. by their smallest member
    _, first, inv = np.unique(label, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv.reshape(-1)]


def _members_of(label: np.ndarray, ncomp: int) -> list[np.ndarray]:
    order = np.argsort(label, kind="stable")
    bounds = np.searchsorted(label[order], np.arange(ncomp + 1))
    return [order[bounds[c]:bounds[c + 1]] for c in range(ncomp)]


def _split_large(label, adj, limit, gamma, d, sep: SeparatorConfig, k):
    """Break every component with more than ``limit`` vertices with the
    hyperfinite partition; returns (new labels, number broken)."""
    ncomp = int(label.max()) + 1 if label.size else 0
    sizes = np.bincount(label, minlength=ncomp)
    big = np.flatnonzero(sizes > limit)
    if big.size == 0:
        return label, 0
    label = label.copy()
    members = _members_of(label, ncomp)
    nxt = ncomp
    for c in big:
        vs = members[c].tolist()
        parts = hyperfinite_partition({v: adj[v] for v in vs}, gamma, d, sep, k=k)
        for p in parts[1:]:
            label[list(p.members)] = nxt
            nxt += 1
    return _canonical(label), int(big.size)


def global_run(g: BoundedDegreeGraph, config: RunConfig, access: GraphAccess | None = None) -> GlobalRun:
    """Run all rounds of contraction and breakup, then the final refinement."""
    access = access or g.access()
    adj, eu, ev = _read_graph(access)
    n = g.n
    label = np.arange(n, dtype=np.int64)
    rounds = []
    shrink = 1 - 1 / (8 * config.c1)
    for i in range(1, config.ell + 1):
        ncomp = int(label.max()) + 1 if n else 0
        anchor = np.full(ncomp, -1, dtype=np.int64)
        np.maximum.at(anchor, label, np.arange(n, dtype=np.int64))
        w_before = _cut_weight(label, eu, ev)
        heads = np.fromiter((coin(config.seed, i, int(a)) for a in anchor), dtype=bool, count=ncomp)
        root = np.arange(ncomp, dtype=np.int64)
        if w_before:
            cu, cv = label[eu], label[ev]
            mask = cu != cv
            a = np.minimum(cu[mask], cv[mask])
            b = np.maximum(cu[mask], cv[mask])
            keys, w = np.unique(a * ncomp + b, return_counts=True)
            a, b = keys // ncomp, keys % ncomp
            src = np.concatenate([a, b])
            dst = np.concatenate([b, a])
            ww = np.concatenate([w, w])
            # heaviest incident edge; ties go to the neighbour with the larger anchor
            order = np.lexsort((anchor[dst], ww, src))
            s_sorted = src[order]
            last = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
            sel_src = s_sorted[last]
            sel_dst = dst[order][last]
            go = heads[sel_src] & ~heads[sel_dst]
            root[sel_src[go]] = sel_dst[go]
            merges = int(np.count_nonzero(go))
        else:
            merges = 0
        label = _canonical(root[label])
        w_contract = _cut_weight(label, eu, ev)
        label, broken = _split_large(label, adj, config.k, config.gamma, config.d, config.sep, config.k)
        w_break = _cut_weight(label, eu, ev)
        rounds.append(
            RoundRecord(
                round=i,
                w_before=w_before,
                w_after_contract=w_contract,
                w_after_breakup=w_break,
                merges=merges,
                breakups=broken,
                successful=w_contract <= shrink * w_before,
                components=int(label.max()) + 1 if n else 0,
                breakup_increase=w_break - w_contract,
                gamma_n=config.gamma * n,
            )
        )
    w_final_before = _cut_weight(label, eu, ev)
    trigger = config.k_final // 3  # size > k_final/3  <=>  size > floor(k_final/3) for integers
    label, final_splits = _split_large(label, adj, trigger, config.epsilon, config.d, config.sep, config.k_final)
    ncomp = int(label.max()) + 1 if n else 0
    parts = [m.tolist() for m in _members_of(label, ncomp)]
    partition = Partition(n, parts)
    return GlobalRun(
        partition=partition,
        rounds=rounds,
        final_splits=final_splits,
        w_before_final=w_final_before,
        cut=_cut_weight(label, eu, ev),
        probes=access.counter.neighbor_probes,
        config=config,
    )


def run_global(g: BoundedDegreeGraph, config: RunConfig) -> Partition:
    return global_run(g, config).partition


# Round-level reference steps on explicit contracted graphs.


def initial_contracted(g: BoundedDegreeGraph) -> ContractedGraph:
    """G^0: singleton components, unit weights."""
    return ContractedGraph([Component((v,)) for v in range(g.n)], {e: 1 for e in g.edges()})


def _neighbour_weights(gc: ContractedGraph) -> list[dict[int, int]]:
    nb: list[dict[int, int]] = [{} for _ in gc.components]
    for (a, b), w in gc.weights.items():
        nb[a][b] = w
        nb[b][a] = w
    return nb


def heaviest_incident_edge(gc: ContractedGraph, c: int, _nb=None) -> tuple[int, int] | None:
    """Max-weight edge at component index c; equal weights go to the neighbour
    containing the largest vertex id. None if c is isolated."""
    nb = (_nb or _neighbour_weights(gc))[c]
    if not nb:
        return None
    best = max(nb, key=lambda j: (nb[j], gc.components[j].max_id))
    return (c, best)


def _regroup(gc: ContractedGraph, groups: list[list[int]]) -> ContractedGraph:
    comps = [Component.of(v for j in grp for v in gc.components[j].members) for grp in groups]
    order = sorted(range(len(comps)), key=lambda x: comps[x].min_id)
    where = {}
    for new, old in enumerate(order):
        for j in groups[old]:
            where[j] = new
    weights: dict[tuple[int, int], int] = {}
    for (a, b), w in gc.weights.items():
        x, y = where[a], where[b]
        if x != y:
            key = (x, y) if x < y else (y, x)
            weights[key] = weights.get(key, 0) + w
    return ContractedGraph([comps[o] for o in order], weights)


def star_contraction_round(gc: ContractedGraph, i: int, seed: int) -> tuple[ContractedGraph, list[list[int]]]:
    """Heads components merge along their heaviest edge into Tails neighbours.

    Returns the contracted graph and the merge groups (indices into
    ``gc.components``; each group's first entry is its Tails centre).
    """
    nb = _neighbour_weights(gc)
    heads = [coin(seed, i, c.max_id) for c in gc.components]
    satellites: dict[int, list[int]] = {}
    merged = set()
    for c in range(len(gc.components)):
        if not heads[c]:
            continue
        edge = heaviest_incident_edge(gc, c, nb)
        if edge is not None and not heads[edge[1]]:
            satellites.setdefault(edge[1], []).append(c)
            merged.add(c)
    groups = []
    for c in range(len(gc.components)):
        if c in merged:
            continue
        groups.append([c] + satellites.get(c, []))
    return _regroup(gc, groups), groups


def breakup_round(
    g: BoundedDegreeGraph, gc: ContractedGraph, gamma: float, sep: SeparatorConfig, d: int | None = None, k: int | None = None
) -> ContractedGraph:
    """Replace every component larger than k by its hyperfinite partition."""
    d = g.d if d is None else d
    k = sep.k_of(gamma, d) if k is None else k
    if not gc.components:
        return ContractedGraph([], {})
    adj = g.adjacency()
    parts: list[Component] = []
    for c in gc.components:
        if len(c) > k:
            parts.extend(hyperfinite_partition({v: adj[v] for v in c.members}, gamma, d, sep, k=k))
        else:
            parts.append(c)
    return contract(g, Partition(g.n, [p.members for p in parts]))
