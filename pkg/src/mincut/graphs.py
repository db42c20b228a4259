"""Core graph representation, contraction, cut evaluation, and the
exhaustive brute-force mincut oracle used by every test suite.

Vertices are dense 0-based integers.  Weights are positive integers and
all cut arithmetic is exact.  Graphs are immutable after construction;
every mutation constructs a new graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .config import get_config


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    pass


class MalformedHeaderError(ParseError):
    pass


class DuplicateDeclarationError(ParseError):
    pass


class WeightOutOfRangeError(ParseError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected multigraph with positive integer edge weights."""

    n: int
    edges: tuple[tuple[int, int, int], ...]
    terminals: Optional[frozenset[int]] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        w_max = get_config().w_max
        for (u, v, w) in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (1 <= w <= w_max):
                raise WeightOutOfRangeError(f"weight {w} outside [1, {w_max}]")
        if self.terminals is not None:
            bad = [t for t in self.terminals if not (0 <= t < self.n)]
            if bad:
                raise GraphError(f"terminals out of range: {bad}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def total_weight(self) -> int:
        return sum(w for (_, _, w) in self.edges)

    def max_weight(self) -> int:
        return max((w for (_, _, w) in self.edges), default=1)

    def adjacency(self) -> list[list[tuple[int, int, int]]]:
        """Per-vertex list of (neighbor, weight, edge_index)."""
        adj = self._cache.get("adj")
        if adj is None:
            adj = [[] for _ in range(self.n)]
            for i, (u, v, w) in enumerate(self.edges):
                adj[u].append((v, w, i))
                adj[v].append((u, w, i))
            self._cache["adj"] = adj
        return adj

    def degree_weight(self, v: int) -> int:
        return sum(w for (_, w, _) in self.adjacency()[v])

    def connected_components(self) -> list[frozenset[int]]:
        seen = [False] * self.n
        comps = []
        adj = self.adjacency()
        for s in range(self.n):
            if seen[s]:
                continue
            stack, comp = [s], []
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                for (y, _, _) in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.connected_components()) == 1

    def induced(self, keep: Iterable[int]) -> tuple["WeightedGraph", dict[int, int]]:
        """Induced subgraph on ``keep``; returns (graph, old->new id map)."""
        keep_sorted = sorted(set(keep))
        remap = {v: i for i, v in enumerate(keep_sorted)}
        edges = tuple(
            (remap[u], remap[v], w)
            for (u, v, w) in self.edges
            if u in remap and v in remap
        )
        return WeightedGraph(len(keep_sorted), edges), remap

    def cut_values_all(self) -> np.ndarray:
        """Vector of cut values for every subset mask of V (exact int64).

        Index ``mask`` holds w(partial S) for S = set bits of mask.  Only
        valid for n <= oracle limit.
        """
        vals = self._cache.get("cutvals")
        if vals is None:
            limit = get_config().oracle_limit
            if self.n > limit:
                raise GraphError(f"cut enumeration limited to n <= {limit}")
            masks = np.arange(1 << self.n, dtype=np.int64)
            vals = np.zeros(1 << self.n, dtype=np.int64)
            for (u, v, w) in self.edges:
                crossing = ((masks >> u) ^ (masks >> v)) & 1
                vals += w * crossing
            self._cache["cutvals"] = vals
        return vals


@dataclass(frozen=True)
class ContractionMap:
    """Maps each contracted-graph vertex to the original vertices it holds."""

    origin: tuple[frozenset[int], ...]

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.origin[v]

    def side_preimage(self, side: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for v in side:
            out |= self.origin[v]
        return frozenset(out)


def cut_value(g: WeightedGraph, s: Iterable[int]) -> int:
    s = frozenset(s)
    if not s:
        raise GraphError("cut side is empty")
    if len(s) >= g.n:
        raise GraphError("cut side is the whole vertex set")
    return sum(w for (u, v, w) in g.edges if (u in s) != (v in s))


def boundary_edges(g: WeightedGraph, s: Iterable[int]) -> list[tuple[int, int, int]]:
    s = frozenset(s)
    return [(u, v, w) for (u, v, w) in g.edges if (u in s) != (v in s)]


def contract(
    g: WeightedGraph, parts: Sequence[Iterable[int]]
) -> tuple[WeightedGraph, ContractionMap]:
    """Contract each part into one vertex; parallel edges merge by weight sum.

    Vertices outside all parts stay singletons.  New ids are assigned by
    ascending minimum original id of each origin set.
    """
    owner: dict[int, int] = {}
    part_sets = []
    for i, p in enumerate(parts):
        ps = frozenset(p)
        if not ps:
            raise GraphError("empty part")
        for v in ps:
            if not (0 <= v < g.n):
                raise GraphError(f"part vertex {v} out of range")
            if v in owner:
                raise GraphError(f"overlapping parts at vertex {v}")
            owner[v] = i
        part_sets.append(ps)

    groups: list[frozenset[int]] = list(part_sets)
    groups.extend(frozenset([v]) for v in range(g.n) if v not in owner)
    groups.sort(key=min)
    new_id = {}
    for i, gset in enumerate(groups):
        for v in gset:
            new_id[v] = i

    weight: dict[tuple[int, int], int] = {}
    for (u, v, w) in g.edges:
        a, b = new_id[u], new_id[v]
        if a == b:
            continue
        if a > b:
            a, b = b, a
        weight[(a, b)] = weight.get((a, b), 0) + w
    edges = tuple((a, b, w) for (a, b), w in sorted(weight.items()))
    return WeightedGraph(len(groups), edges), ContractionMap(tuple(groups))


def merge_parallel(g: WeightedGraph) -> WeightedGraph:
    """Simple graph with parallel edges merged by weight summation; cut
    values are unchanged."""
    weight: dict[tuple[int, int], int] = {}
    for (u, v, w) in g.edges:
        k = (u, v) if u < v else (v, u)
        weight[k] = weight.get(k, 0) + w
    edges = tuple((a, b, w) for (a, b), w in sorted(weight.items()))
    if edges == g.edges:
        return g
    return WeightedGraph(g.n, edges, g.terminals)


def parse_graph(text: str | bytes) -> WeightedGraph:
    """Parse the edge-list format: "p <n> <m>", then m lines "e <u> <v> <w>"
    (1-based), optional "t <u>" terminal lines, '#' comments ignored."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = m = None
    edges: list[tuple[int, int, int]] = []
    terminals: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "p":
            if n is not None:
                raise DuplicateDeclarationError(f"line {lineno}: second header")
            if len(fields) != 3:
                raise MalformedHeaderError(f"line {lineno}: expected 'p <n> <m>'")
            try:
                n, m = int(fields[1]), int(fields[2])
            except ValueError:
                raise MalformedHeaderError(f"line {lineno}: non-integer header") from None
            if n < 1 or m < 0:
                raise MalformedHeaderError(f"line {lineno}: bad sizes n={n} m={m}")
        elif tag == "e":
            if n is None:
                raise MalformedHeaderError(f"line {lineno}: edge before header")
            if len(fields) != 4:
                raise ParseError(f"line {lineno}: expected 'e <u> <v> <w>'")
            try:
                u, v, w = int(fields[1]), int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer edge") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"line {lineno}: endpoint out of range")
            if u == v:
                raise ParseError(f"line {lineno}: self-loop")
            if not (1 <= w <= get_config().w_max):
                raise WeightOutOfRangeError(f"line {lineno}: weight {w}")
            edges.append((u - 1, v - 1, w))
        elif tag == "t":
            if n is None:
                raise MalformedHeaderError(f"line {lineno}: terminal before header")
            if len(fields) != 2:
                raise ParseError(f"line {lineno}: expected 't <u>'")
            t = int(fields[1])
            if not (1 <= t <= n):
                raise ParseError(f"line {lineno}: terminal out of range")
            terminals.add(t - 1)
        else:
            raise ParseError(f"line {lineno}: unknown tag {tag!r}")
    if n is None:
        raise MalformedHeaderError("missing 'p' header")
    if m != len(edges):
        raise MalformedHeaderError(f"declared {m} edges, found {len(edges)}")
    return WeightedGraph(n, tuple(edges), frozenset(terminals) or None)


def serialize_graph(g: WeightedGraph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1} {w}" for (u, v, w) in g.edges]
    if g.terminals:
        lines += [f"t {t + 1}" for t in sorted(g.terminals)]
    return "\n".join(lines) + "\n"


class ConnectivityMatrix:
    """All-pairs mincut values plus per-pair mincut enumeration, computed by
    exhaustive enumeration of the 2^(n-1)-1 bipartitions."""

    def __init__(self, g: WeightedGraph):
        limit = get_config().oracle_limit
        if g.n > limit:
            raise GraphError(f"oracle limited to n <= {limit} vertices, got {g.n}")
        self.g = g
        self.n = g.n
        cutvals = g.cut_values_all()
        n = g.n
        lam = np.zeros((n, n), dtype=np.int64)
        masks = np.arange(1 << n, dtype=np.int64)
        self._cutvals = cutvals
        self._masks = masks
        for s in range(n):
            bit_s = (masks >> s) & 1
            for t in range(s + 1, n):
                sep = bit_s != ((masks >> t) & 1)
                lam[s, t] = lam[t, s] = cutvals[sep].min()
        self.values = lam

    def value(self, s: int, t: int) -> int:
        return int(self.values[s, t])

    def lambda_of_set(self, u: Iterable[int]) -> int:
        u = sorted(set(u))
        if len(u) < 2:
            raise GraphError("lambda(U) needs at least two vertices")
        return min(self.value(a, b) for i, a in enumerate(u) for b in u[i + 1 :])

    def mincut_sides(self, s: int, t: int) -> list[frozenset[int]]:
        """All s-side sets of (s,t)-mincuts, sorted by (size, lexicographic)."""
        lam = self.values[s, t]
        sep = (((self._masks >> s) & 1) == 1) & (((self._masks >> t) & 1) == 0)
        hit = np.nonzero(sep & (self._cutvals == lam))[0]
        sides = [frozenset(np.nonzero([(m >> v) & 1 for v in range(self.n)])[0].tolist()) for m in hit]
        sides.sort(key=lambda fs: (len(fs), sorted(fs)))
        return sides

    def minimal_mincut(self, s: int, t: int) -> frozenset[int]:
        """The unique vertex-minimal s-side (s,t)-mincut."""
        return self.mincut_sides(s, t)[0]

    def tau_component(self, r: int, tau: int, u: Iterable[int]) -> frozenset[int]:
        """tau-connected component of r restricted to terminal set u."""
        uset = set(u)
        return frozenset(x for x in uset if x == r or self.values[r, x] >= tau)

    def kcc_partition(self, k: int) -> list[frozenset[int]]:
        """Partition of V where u,v share a part iff lambda(u,v) >= k."""
        seen = set()
        parts = []
        for v in range(self.n):
            if v in seen:
                continue
            part = {v} | {x for x in range(self.n) if x != v and self.values[v, x] >= k}
            seen |= part
            parts.append(frozenset(part))
        return parts


def oracle_all_pairs_mincut(g: WeightedGraph) -> ConnectivityMatrix:
    cached = g._cache.get("oracle")
    if cached is None:
        cached = ConnectivityMatrix(g)
        g._cache["oracle"] = cached
    return cached
