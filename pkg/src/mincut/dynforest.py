"""Augmented dynamic forest: maintains a forest M, the terminal Steiner
subgraph M^U inside a solid subgraph R, per-edge value accumulators with
congestion thresholds, and an emitted update stream for the sparsifier.

Two views are kept: S (all of M, rooted, with evert/parent/highest/
global-LCA) and R (the solid edges).  Solid/dashed is semantic state:
between update batches, if the terminals are connected in M, then M^U is
exactly one connected component of R and every other component is a path
free of terminals.  Link and Cut restore that property via Splice and
Expose; the number of splices over k updates is O(k log n) and is
counted explicitly.

Desk-scale implementation note: S and R are plain parent/adjacency maps
with O(n) operations rather than balanced path structures; the emitted
stream, splice counts, and all semantics are identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional


class ForestError(ValueError):
    pass


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class ForestUpdate:
    kind: str  # "link" | "cut"
    u: int
    v: int
    weight: int = 1
    length: object = 1
    threshold: object = math.inf


@dataclass
class _EdgeRec:
    weight: int
    length: object
    threshold: object
    solid: bool = False
    dval: object = 0


class DynamicForest:
    """Forest M over vertices 0..n-1 with terminal set U."""

    def __init__(self, n: int, terminals: Iterable[int]):
        self.n = n
        self.terminals = frozenset(terminals)
        if any(not (0 <= t < n) for t in self.terminals):
            raise ForestError("terminal out of range")
        self.parent: list[Optional[int]] = [None] * n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.solid_adj: list[set[int]] = [set() for _ in range(n)]
        self.edges: dict[tuple[int, int], _EdgeRec] = {}
        self.emitted: list[tuple] = []  # ("insert"|"delete", u, v, tick) | ("addvalue", delta, tick)
        self._congested: set[tuple[int, int]] = set()
        self.ops = 0       # links + cuts
        self.splices = 0
        self.everts = 0
        self.exposes = 0

    # ---- S structure primitives -------------------------------------

    def s_root(self, u: int) -> int:
        while self.parent[u] is not None:
            u = self.parent[u]
        return u

    def s_evert(self, u: int) -> None:
        self.everts += 1
        path = [u]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        for child, par in zip(path, path[1:]):
            self.parent[par] = child
        self.parent[u] = None

    def s_parent(self, u: int) -> Optional[int]:
        return self.parent[u]

    def s_highest(self, u: int) -> int:
        """Last vertex on the u-to-root path reachable via solid edges."""
        x = u
        while self.parent[x] is not None and self._rec(x, self.parent[x]).solid:
            x = self.parent[x]
        return x

    def s_link(self, u: int, v: int) -> None:
        assert self.parent[u] is None, "link endpoint must be a root"
        self.parent[u] = v
        self.adj[u].add(v)
        self.adj[v].add(u)

    def s_cut(self, u: int, v: int) -> None:
        if self.parent[u] == v:
            self.parent[u] = None
        elif self.parent[v] == u:
            self.parent[v] = None
        else:
            raise ForestError(f"({u},{v}) is not a tree edge")
        self.adj[u].discard(v)
        self.adj[v].discard(u)

    def _tree_vertices(self, u: int) -> list[int]:
        seen = {u}
        stack = [u]
        out = [u]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
                    out.append(y)
        return out

    def s_global_lca(self, u: int) -> Optional[int]:
        """LCA of all terminals in u's tree w.r.t. the current root."""
        tree = self._tree_vertices(u)
        terms = [t for t in tree if t in self.terminals]
        if not terms:
            return None
        root = self.s_root(u)
        # subtree terminal counts via one DFS from the root
        cnt = {x: 0 for x in tree}
        order: list[int] = []
        par = {root: None}
        stack = [root]
        while stack:
            x = stack.pop()
            order.append(x)
            for y in self.adj[x]:
                if y != par[x]:
                    par[y] = x
                    stack.append(y)
        for x in reversed(order):
            if x in self.terminals:
                cnt[x] += 1
            p = par[x]
            if p is not None:
                cnt[p] += cnt[x]
        k = len(terms)
        x = root
        while x not in self.terminals:
            kids = [y for y in self.adj[x] if par.get(y) == x and cnt[y] == k]
            if len(kids) != 1:
                break
            # descend only if no terminal mass stays at x itself
            x = kids[0]
        return x

    # ---- solid/dashed conversions ------------------------------------

    def _rec(self, u: int, v: int) -> _EdgeRec:
        return self.edges[edge_key(u, v)]

    def _tick(self) -> int:
        return len(self.emitted)

    def _convert_solid(self, u: int, v: int) -> None:
        rec = self._rec(u, v)
        assert not rec.solid, f"({u},{v}) already solid"
        rec.solid = True
        self.solid_adj[u].add(v)
        self.solid_adj[v].add(u)
        self.emitted.append(("insert", u, v, self._tick()))

    def _convert_dashed(self, u: int, v: int) -> None:
        rec = self._rec(u, v)
        assert rec.solid, f"({u},{v}) already dashed"
        rec.solid = False
        self.solid_adj[u].discard(v)
        self.solid_adj[v].discard(u)
        self.emitted.append(("delete", u, v, self._tick()))

    # ---- Splice / Expose ---------------------------------------------

    def _get_some_incident_edges(self, v: int, cap: int = 10) -> list[int]:
        out = sorted(self.solid_adj[v])
        return out[:cap]

    def _splice(self, u: int) -> None:
        v = self.parent[u]
        assert v is not None and u == self.s_highest(u)
        if self.s_highest(v) != self.s_root(v):
            entering_v = [
                x for x in self._get_some_incident_edges(v) if self.parent[x] == v
            ]
            assert len(entering_v) <= 2, "more than 2 solid edges entering splice point"
            for x in entering_v:
                self._convert_dashed(x, v)
            h = self.s_highest(v)
            if h != v:
                # child of h on the v-to-h tree path
                keep = v
                while self.parent[keep] != h:
                    keep = self.parent[keep]
                entering_h = [
                    x
                    for x in self._get_some_incident_edges(h)
                    if self.parent[x] == h and x != keep
                ]
                assert len(entering_h) <= 2, "more than 2 solid edges entering highest"
                for x in entering_h:
                    self._convert_dashed(x, h)
        self._convert_solid(u, v)
        self.splices += 1

    def _expose(self, u: int) -> None:
        self.exposes += 1
        while self.s_highest(u) != self.s_root(u):
            self._splice(self.s_highest(u))

    # ---- Link / Cut ----------------------------------------------------

    def link(self, upd: ForestUpdate) -> None:
        u, v = upd.u, upd.v
        key = edge_key(u, v)
        if key in self.edges:
            raise ForestError(f"edge ({u},{v}) already present")
        if self.s_root(u) == self.s_root(v):
            raise ForestError(f"link ({u},{v}) would create a cycle")
        self.ops += 1
        self.s_evert(u)
        u2 = self.s_global_lca(u)
        self.s_evert(v)
        v2 = self.s_global_lca(v)
        self.edges[key] = _EdgeRec(upd.weight, upd.length, upd.threshold)
        self.s_link(u, v)
        if u2 is not None and v2 is not None:
            self.s_evert(u2)
            self._expose(v2)

    def cut(self, u: int, v: int) -> None:
        key = edge_key(u, v)
        rec = self.edges.get(key)
        if rec is None:
            raise ForestError(f"edge ({u},{v}) not present")
        self.ops += 1
        if rec.solid:
            self._convert_dashed(u, v)
        self.s_evert(u)
        self.s_cut(u, v)
        del self.edges[key]
        self._congested.discard(key)
        u2 = self.s_global_lca(u)
        self.s_evert(v)
        v2 = self.s_global_lca(v)
        if u2 is not None and v2 is not None:
            if u2 != u:
                self.s_evert(u)
                p = self.parent[u2]
                self._convert_dashed(u2, p)
            if v2 != v:
                self.s_evert(v)
                p = self.parent[v2]
                self._convert_dashed(v2, p)

    def apply_batch(self, batch: Iterable[ForestUpdate]) -> int:
        before = len(self.emitted)
        for upd in batch:
            if upd.kind == "link":
                self.link(upd)
            elif upd.kind == "cut":
                self.cut(upd.u, upd.v)
            else:
                raise ForestError(f"unknown update kind {upd.kind!r}")
        return len(self.emitted) - before

    # ---- Steiner-component queries -------------------------------------

    def terminals_connected(self) -> bool:
        terms = sorted(self.terminals)
        if len(terms) <= 1:
            return True
        root = self.s_root(terms[0])
        return all(self.s_root(t) == root for t in terms[1:])

    def steiner_component_edges(self) -> frozenset[tuple[int, int]]:
        """Edges of the R-component holding the terminals (== M^U edges)."""
        if len(self.terminals) <= 1:
            return frozenset()
        if not self.terminals_connected():
            raise ForestError("terminals not connected in M")
        start = min(self.terminals)
        seen = {start}
        stack = [start]
        out: set[tuple[int, int]] = set()
        while stack:
            x = stack.pop()
            for y in self.solid_adj[x]:
                out.add(edge_key(x, y))
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(out)

    def add_value_on_steiner_tree(self, delta) -> None:
        if len(self.terminals) <= 1:
            return
        for key in self.steiner_component_edges():
            rec = self.edges[key]
            rec.dval = rec.dval + delta
            if rec.dval >= rec.threshold:
                self._congested.add(key)
        self.emitted.append(("addvalue", delta, self._tick()))

    def get_congested_edge(self) -> Optional[tuple[int, int]]:
        if not self._congested:
            return None
        return min(self._congested)

    def get_value(self, u: int, v: int):
        return self._rec(u, v).dval

    def reset_value(self, u: int, v: int) -> None:
        rec = self._rec(u, v)
        rec.dval = 0
        self._congested.discard(edge_key(u, v))

    def steiner_tree_stats(self):
        """(total length, min weight) over M^U; (0, inf) when |U| <= 1."""
        edges = self.steiner_component_edges()
        if not edges:
            return (0, math.inf)
        total = 0
        min_w = math.inf
        for key in edges:
            rec = self.edges[key]
            total = total + rec.length
            min_w = min(min_w, rec.weight)
        return (total, min_w)

    # ---- snapshots and invariant checks ---------------------------------

    def snapshot_adjacency(self) -> list[set[int]]:
        return [set(s) for s in self.adj]

    def solid_components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps = []
        for v in range(self.n):
            if v in seen or not self.solid_adj[v]:
                continue
            comp = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in self.solid_adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(comp)
        return comps

    def check_property(self) -> None:
        """Assert the structural invariant: each R-component is a component
        of M^U or a terminal-free path."""
        mu = naive_steiner_subtree(self.snapshot_adjacency(), self.terminals)
        mu_comps: dict[int, set[tuple[int, int]]] = {}
        # group M^U edges into components by vertex
        parent: dict[int, int] = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for (a, b) in mu:
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            parent[find(a)] = find(b)
        groups: dict[int, set[tuple[int, int]]] = {}
        for (a, b) in mu:
            groups.setdefault(find(a), set()).add((a, b))

        for comp in self.solid_components():
            comp_edges = {
                edge_key(x, y) for x in comp for y in self.solid_adj[x]
            }
            if any(v in self.terminals for v in comp):
                assert comp_edges in groups.values(), (
                    "terminal-bearing R-component is not an M^U component"
                )
            else:
                # must be a simple path: all degrees <= 2, #edges == #verts-1
                degs = [len(self.solid_adj[x] & comp) for x in comp]
                assert all(d <= 2 for d in degs) and sum(degs) == 2 * (len(comp) - 1), (
                    "terminal-free R-component is not a path"
                )


def naive_steiner_subtree(
    adjacency: list[set[int]], terminals: Iterable[int]
) -> frozenset[tuple[int, int]]:
    """Reference M^U: edges on a path between two terminals, by repeated
    leaf pruning of each tree of the forest."""
    terms = set(terminals)
    deg = [len(s) for s in adjacency]
    alive = [bool(s) for s in adjacency]
    adj = [set(s) for s in adjacency]
    queue = [v for v in range(len(adj)) if alive[v] and deg[v] <= 1 and v not in terms]
    while queue:
        v = queue.pop()
        alive[v] = False
        for y in adj[v]:
            adj[y].discard(v)
            deg[y] -= 1
            if deg[y] <= 1 and y not in terms and alive[y]:
                queue.append(y)
        adj[v].clear()
        deg[v] = 0
    out = set()
    for v in range(len(adj)):
        for y in adj[v]:
            if v < y:
                out.add((v, y))
    return frozenset(out)
