"""Deterministic maximum-flow / minimal-mincut engine (Dinic with exact
integer capacities) and the isolating-cuts procedure.  This is the only
place pairwise flow problems are solved."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import GraphError, WeightedGraph, cut_value


@dataclass(frozen=True)
class MinCutResult:
    """Exact mincut value and the unique vertex-minimal source-side set."""

    value: int
    s_side: frozenset[int]


class _Dinic:
    """Classic Dinic on an explicit residual edge list (pairs of arcs)."""

    __slots__ = ("n", "to", "cap", "head")

    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.head: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, c_uv: int, c_vu: int) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c_uv)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(c_vu)

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        to, cap, head = self.to, self.cap, self.head
        while stack:
            x = stack.pop()
            for ei in head[x]:
                if cap[ei] > 0 and to[ei] not in seen:
                    seen.add(to[ei])
                    stack.append(to[ei])
        return seen


def _dinic_maxflow(net: _Dinic, s: int, t: int) -> int:
    """BFS/DFS phases; simple recursive-free implementation."""
    to, cap, head = net.to, net.cap, net.head
    n = net.n
    total = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = [s]
        for x in queue:
            for ei in head[x]:
                y = to[ei]
                if cap[ei] > 0 and level[y] < 0:
                    level[y] = level[x] + 1
                    queue.append(y)
        if level[t] < 0:
            return total
        it = [0] * n
        stack_v = [s]
        stack_e: list[int] = []
        while stack_v:
            x = stack_v[-1]
            if x == t:
                aug = min(cap[ei] for ei in stack_e)
                total += aug
                cut_at = None
                for i, ei in enumerate(stack_e):
                    cap[ei] -= aug
                    cap[ei ^ 1] += aug
                    if cap[ei] == 0 and cut_at is None:
                        cut_at = i
                del stack_v[cut_at + 1 :]
                del stack_e[cut_at:]
                continue
            found = False
            while it[x] < len(head[x]):
                ei = head[x][it[x]]
                y = to[ei]
                if cap[ei] > 0 and level[y] == level[x] + 1:
                    stack_v.append(y)
                    stack_e.append(ei)
                    found = True
                    break
                it[x] += 1
            if not found:
                level[x] = -1
                stack_v.pop()
                if stack_e:
                    stack_e.pop()


def max_flow_mincut(
    g: WeightedGraph, sources: Iterable[int], sinks: Iterable[int]
) -> MinCutResult:
    """Exact mincut between merged sources and merged sinks.  ``s_side`` is
    the unique vertex-minimal source-side mincut (residual-reachable set)."""
    src = frozenset(sources)
    snk = frozenset(sinks)
    if not src or not snk:
        raise GraphError("sources and sinks must be nonempty")
    if src & snk:
        raise GraphError("sources and sinks overlap")

    n = g.n
    s_node, t_node = n, n + 1
    net = _Dinic(n + 2)
    INF_CAP = g.total_weight() + 1
    for (u, v, w) in g.edges:
        net.add_edge(u, v, w, w)
    for u in src:
        net.add_edge(s_node, u, INF_CAP, 0)
    for v in snk:
        net.add_edge(v, t_node, INF_CAP, 0)
    value = _dinic_maxflow(net, s_node, t_node)
    reach = net.reachable(s_node)
    s_side = frozenset(v for v in reach if v < n)
    return MinCutResult(value, s_side)


def pair_mincut(g: WeightedGraph, s: int, t: int) -> MinCutResult:
    return max_flow_mincut(g, (s,), (t,))


def isolating_cuts(
    g: WeightedGraph, groups: Sequence[Iterable[int]]
) -> list[MinCutResult]:
    """For disjoint groups U_1..U_h returns, per group, the vertex-minimal
    (U_i, union of the others)-mincut.  The returned cuts are pairwise
    disjoint.

    Construction: ceil(log2 h) bipartition maxflows over the bits of the
    group indices, then one maxflow per group inside its oriented
    intersection region (the rest contracted to a single sink).
    """
    gs = [frozenset(x) for x in groups]
    if len(gs) < 2:
        raise GraphError("need at least 2 groups")
    seen: set[int] = set()
    for x in gs:
        if not x:
            raise GraphError("empty group")
        if x & seen:
            raise GraphError("groups overlap")
        seen |= x

    h = len(gs)
    n_bits = max(1, (h - 1).bit_length())
    # region[v] bit pattern consistency: start with all vertices allowed in
    # every group's region, then intersect oriented bit-cut sides.
    in_region = [set(range(g.n)) for _ in range(h)]
    for b in range(n_bits):
        ones = [i for i in range(h) if (i >> b) & 1]
        zeros = [i for i in range(h) if not (i >> b) & 1]
        if not ones or not zeros:
            continue
        src = frozenset().union(*(gs[i] for i in ones))
        snk = frozenset().union(*(gs[i] for i in zeros))
        res = max_flow_mincut(g, src, snk)
        side = res.s_side
        for i in ones:
            in_region[i] &= side
        for i in zeros:
            in_region[i] -= side

    results: list[MinCutResult] = []
    for i, group in enumerate(gs):
        region = in_region[i]
        assert group <= region, "bit cuts separated a group from itself"
        outside = [v for v in range(g.n) if v not in region]
        if not outside:
            # degenerate: the group's region is everything (h==1 impossible
            # here); fall back to a direct maxflow against the other groups
            rest = frozenset().union(*(gs[j] for j in range(h) if j != i))
            results.append(max_flow_mincut(g, group, rest))
            continue
        # contract V \ region to a single sink vertex
        order = sorted(region)
        remap = {v: k for k, v in enumerate(order)}
        t_id = len(order)
        wmap: dict[tuple[int, int], int] = {}
        for (u, v, w) in g.edges:
            a = remap.get(u, t_id)
            b = remap.get(v, t_id)
            if a == b:
                continue
            if a > b:
                a, b = b, a
            wmap[(a, b)] = wmap.get((a, b), 0) + w
        sub = WeightedGraph(t_id + 1, tuple((a, b, w) for (a, b), w in sorted(wmap.items())))
        res = max_flow_mincut(sub, frozenset(remap[v] for v in group), (t_id,))
        results.append(MinCutResult(res.value, frozenset(order[v] for v in res.s_side)))

    for i in range(h):
        for j in range(i + 1, h):
            assert not (results[i].s_side & results[j].s_side), "isolating cuts overlap"
    return results
