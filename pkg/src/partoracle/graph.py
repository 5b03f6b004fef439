"""Bounded-degree graphs, query-counted access, contraction and partitions.

Vertex ids are dense integers ``0..n-1``; their natural order is the
tie-breaking order used everywhere else in the package.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class GraphParseError(ValueError):
    """Raised when an edge-list document is malformed."""

    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        self.line_no = line_no
        self.line = line
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}" + (f" ({line!r})" if line else ""))


class PartitionError(ValueError):
    """A partition does not satisfy a structural precondition."""


@dataclass
class QueryCounter:
    neighbor_probes: int = 0
    touched: set = field(default_factory=set)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def distinct_vertices_touched(self) -> int:
        return len(self.touched)

    def charge(self, v: int) -> None:
        with self._lock:
            self.neighbor_probes += 1
            self.touched.add(v)

    def snapshot(self) -> dict:
        return {
            "neighbor_probes": self.neighbor_probes,
            "distinct_vertices_touched": len(self.touched),
        }


class BoundedDegreeGraph:
    """Immutable simple graph with ordered incidence lists of length <= d.

    Incidence order is the order in which edges were given to the
    constructor. Reading the lists is only possible through a
    :class:`GraphAccess` handle (see :meth:`access`), which charges every
    probe to a :class:`QueryCounter`.
    """

    def __init__(self, n: int, d: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("n must be non-negative")
        if d < 0:
            raise ValueError("d must be non-negative")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            _check_edge(n, d, u, v, seen, adj)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.d = d
        self._adj: tuple[tuple[int, ...], ...] = tuple(tuple(a) for a in adj)
        self._m = len(seen)

    @property
    def m(self) -> int:
        return self._m

    def __repr__(self) -> str:
        return f"BoundedDegreeGraph(n={self.n}, d={self.d}, m={self.m})"

    def access(self) -> GraphAccess:
        """A fresh query-counted handle onto this graph."""
        return GraphAccess(self)

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(min, max)`` pairs, sorted lexicographically."""
        out = [(u, v) for u in range(self.n) for v in self._adj[u] if u < v]
        out.sort()
        return out

    def edge_arrays(self):
        import numpy as np

        e = self.edges()
        if not e:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.asarray(e, dtype=np.int64)
        return arr[:, 0].copy(), arr[:, 1].copy()

    def induced_adjacency(self, vertices: Iterable[int]) -> dict[int, list[int]]:
        vs = set(vertices)
        return {v: sorted(u for u in self._adj[v] if u in vs) for v in sorted(vs)}

    def adjacency(self) -> list[tuple[int, ...]]:
        return list(self._adj)


def _check_edge(n, d, u, v, seen, adj, line_no=None, line=None):
    if not (0 <= u < n and 0 <= v < n):
        raise GraphParseError(f"vertex id out of range for n={n}", line_no, line)
    if u == v:
        raise GraphParseError(f"self-loop at vertex {u}", line_no, line)
    key = (u, v) if u < v else (v, u)
    if key in seen:
        raise GraphParseError(f"duplicate edge {key}", line_no, line)
    if len(adj[u]) >= d or len(adj[v]) >= d:
        bad = u if len(adj[u]) >= d else v
        raise GraphParseError(f"degree of vertex {bad} exceeds d={d}", line_no, line)
    seen.add(key)


class GraphAccess:
    """Query-counted view of a graph: the only way to read incidence lists."""

    def __init__(self, graph: BoundedDegreeGraph, counter: QueryCounter | None = None):
        self.graph = graph
        self.counter = counter if counter is not None else QueryCounter()

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def d(self) -> int:
        return self.graph.d

    def neighbor(self, v: int, i: int) -> int | None:
        """The i-th neighbor of v (1-based), or None if deg(v) < i."""
        if not 0 <= v < self.graph.n:
            raise IndexError(f"vertex {v} out of range [0, {self.graph.n})")
        if not 1 <= i <= max(self.graph.d, 1):
            raise IndexError(f"neighbor index {i} out of range [1, {self.graph.d}]")
        self.counter.charge(v)
        lst = self.graph._adj[v]
        return lst[i - 1] if i <= len(lst) else None

    def neighbors(self, v: int) -> list[int]:
        """Probe v's list in order until the absent marker (or d entries)."""
        out = []
        for i in range(1, self.graph.d + 1):
            u = self.neighbor(v, i)
            if u is None:
                break
            out.append(u)
        return out


def neighbor(access: GraphAccess, v: int, i: int) -> int | None:
    return access.neighbor(v, i)


def load_graph(text: str, d: int | None = None) -> BoundedDegreeGraph:
    """Parse an edge-list document.

    The header is ``n=<int>`` optionally followed by ``d=<int>``; then one
    ``u v`` pair per line. ``;`` also separates lines, ``#`` starts a
    comment. An explicit ``d`` argument overrides the header value; with
    neither, d is the maximum degree.
    """
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        for chunk in raw.split(";"):
            s = chunk.split("#", 1)[0].strip()
            if s:
                lines.append((no, s))
    if not lines:
        raise GraphParseError("empty document: missing 'n=<int>' header")
    no, header = lines[0]
    fields = {}
    for tok in header.split():
        key, sep, val = tok.partition("=")
        if not sep or key not in ("n", "d"):
            raise GraphParseError("bad header, expected 'n=<int> [d=<int>]'", no, header)
        try:
            fields[key] = int(val)
        except ValueError:
            raise GraphParseError(f"non-integer {key}", no, header) from None
    if "n" not in fields or fields["n"] < 0:
        raise GraphParseError("header must declare n >= 0", no, header)
    n = fields["n"]
    pairs = []
    for no, s in lines[1:]:
        toks = s.split()
        if len(toks) != 2:
            raise GraphParseError("expected 'u v'", no, s)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphParseError("non-integer vertex id", no, s) from None
        pairs.append((no, s, u, v))
    if d is None:
        d = fields.get("d")
    if d is None:
        deg = [0] * n
        for _, _, u, v in pairs:
            if 0 <= u < n and 0 <= v < n:
                deg[u] += 1
                deg[v] += 1
        d = max(deg, default=0)
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for no, s, u, v in pairs:
        _check_edge(n, d, u, v, seen, adj, no, s)
        adj[u].append(v)
        adj[v].append(u)
    return BoundedDegreeGraph(n, d, [(u, v) for _, _, u, v in pairs])


def dump_graph(g: BoundedDegreeGraph) -> str:
    """Canonical serialization: header, then edges sorted by (min, max)."""
    lines = [f"n={g.n} d={g.d}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, order=True)
class Component:
    """A set of base vertices, stored as a sorted tuple."""

    members: tuple[int, ...]

    @classmethod
    def of(cls, vertices: Iterable[int]) -> Component:
        return cls(tuple(sorted(set(vertices))))

    @property
    def max_id(self) -> int:
        return self.members[-1]

    @property
    def min_id(self) -> int:
        return self.members[0]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, v: object) -> bool:
        return v in self.members


class Partition:
    """Disjoint cover of ``range(n)`` by components; ``part_of[v]`` is g_P(v)."""

    def __init__(self, n: int, parts: Iterable[Iterable[int]]):
        comps = sorted(Component.of(p) for p in parts)
        part_of = [-1] * n
        for idx, c in enumerate(comps):
            if not c.members:
                raise PartitionError("empty part")
            for v in c.members:
                if not 0 <= v < n:
                    raise PartitionError(f"vertex {v} out of range")
                if part_of[v] != -1:
                    raise PartitionError(f"vertex {v} appears in two parts")
                part_of[v] = idx
        missing = [v for v in range(n) if part_of[v] == -1]
        if missing:
            raise PartitionError(f"vertices not covered: {missing[:10]}")
        self.n = n
        self.parts: list[Component] = comps
        self.part_of: list[int] = part_of

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(n, ([v] for v in range(n)))

    def part(self, v: int) -> Component:
        return self.parts[self.part_of[v]]

    def __len__(self) -> int:
        return len(self.parts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Partition) and self.n == other.n and self.parts == other.parts

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, parts={len(self.parts)})"

    def to_json(self) -> str:
        return json.dumps({"parts": [list(c.members) for c in self.parts]}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, n: int | None = None) -> Partition:
        doc = json.loads(text)
        parts = doc["parts"]
        if n is None:
            n = sum(len(p) for p in parts)
        return cls(n, parts)


@dataclass
class ContractedGraph:
    """G/P: one vertex per component, integer weights equal to cut sizes."""

    components: list[Component]
    weights: dict[tuple[int, int], int]

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    def incident(self, c: int) -> dict[int, int]:
        out = {}
        for (a, b), w in self.weights.items():
            if a == c:
                out[b] = w
            elif b == c:
                out[a] = w
        return out


def is_connected_subset(adj: Mapping[int, Sequence[int]] | Sequence[Sequence[int]], vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    if not vs:
        return False
    start = min(vs)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in vs and y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(vs)


def contract(g: BoundedDegreeGraph, p: Partition) -> ContractedGraph:
    adj = g._adj
    for c in p.parts:
        if not is_connected_subset(adj, c.members):
            raise PartitionError(f"part with min id {c.min_id} is not connected")
    weights: dict[tuple[int, int], int] = defaultdict(int)
    for u, v in g.edges():
        a, b = p.part_of[u], p.part_of[v]
        if a != b:
            weights[(a, b) if a < b else (b, a)] += 1
    return ContractedGraph(list(p.parts), dict(weights))


def cut_size(g: BoundedDegreeGraph, p: Partition) -> int:
    po = p.part_of
    return sum(1 for u, v in g.edges() if po[u] != po[v])


@dataclass
class Violation:
    condition: str  # "size" | "connectivity" | "cut"
    detail: str
    witnesses: list = field(default_factory=list)


@dataclass
class PartitionVerdict:
    valid: bool
    violations: list[Violation]
    cut: int

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}


def validate_partition(g: BoundedDegreeGraph, p: Partition, epsilon: float, k: int) -> PartitionVerdict:
    """Check size <= k, connectivity, and cut <= epsilon * n."""
    violations = []
    big = [c.members for c in p.parts if len(c) > k]
    if big:
        violations.append(Violation("size", f"{len(big)} part(s) larger than k={k}", big))
    disconnected = [c.members for c in p.parts if not is_connected_subset(g._adj, c.members)]
    if disconnected:
        violations.append(Violation("connectivity", f"{len(disconnected)} disconnected part(s)", disconnected))
    cut = cut_size(g, p)
    if cut > epsilon * g.n:
        violations.append(Violation("cut", f"cut {cut} > {epsilon} * {g.n} = {epsilon * g.n:g}", [cut]))
    return PartitionVerdict(not violations, violations, cut)
