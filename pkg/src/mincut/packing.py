"""Multiplicative-weights packing of terminal-spanning subgraphs.

Each iteration asks a static 2-approximate minimum-length Steiner-tree
oracle (shortest paths from a super-source over the terminals, MST of the
terminal closure, mapped back to graph edges) for a tree under the current
length function, credits the tree with the minimum edge weight on it, and
raises lengths of edges whose accumulated credit crosses w(e)/4.  The run
terminates once the weighted total length reaches 1 and the recorded
credits, scaled down by log((1+eps)^2/delta)/eps, form a feasible packing
of value at least lambda(U)/(4+Theta(eps)).

The packing is implicit: entries reference ticks of the forest operation
log, and the update stream emitted by the dynamic forest (solid-edge
insertions/deletions plus value events) is the wire format the sparsifier
consumes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .config import get_config
from .dyadic import F_BITS, LENGTH_BITS, LENGTH_ONE, exp_up_fixed, ln_up, nth_root_floor
from .dynforest import DynamicForest, ForestUpdate, edge_key
from .graphs import GraphError, WeightedGraph, merge_parallel


class PackingError(ValueError):
    pass


@dataclass
class LengthFunction:
    """Per-edge positive dyadic lengths: length(i) = mantissa[i] / 2**LENGTH_BITS."""

    mantissa: list[int]

    def __getitem__(self, i: int) -> int:
        return self.mantissa[i]

    def as_fraction(self, i: int) -> Fraction:
        return Fraction(self.mantissa[i], LENGTH_ONE)


@dataclass(frozen=True)
class SteinerPacking:
    """Implicit packing: (tick, raw value) entries over the op log, and the
    scale divisor applied on output.  val(H) = raw / scale."""

    entries: tuple[tuple[int, int], ...]
    scale: Fraction
    alpha: int = 1

    def value(self) -> Fraction:
        return Fraction(sum(v for (_, v) in self.entries)) / self.scale


@dataclass
class PackingRun:
    packing: SteinerPacking
    op_log: tuple[tuple[str, int, int], ...]  # ("link"|"cut", u, v)
    stream: tuple[tuple, ...]  # forest-emitted events incl. value additions
    lengths: LengthFunction
    iterations: int
    terminals: frozenset[int]
    graph: WeightedGraph  # parallel edges merged


def delta_init(m: int, eps: Fraction) -> Fraction:
    """Dyadic upper bound on delta = (2m)^(-1/eps)."""
    p, q = eps.numerator, eps.denominator
    # (2m)^(q/p): delta = 1 / that; round the root down so delta rounds up
    root = nth_root_floor((2 * m) ** q, p)
    return Fraction(-(-LENGTH_ONE // root), LENGTH_ONE)


def packing_scale(m: int, eps: Fraction) -> Fraction:
    """Upper bound on log((1+eps)^2 / delta) / eps with delta = (2m)^(-1/eps)."""
    ln_term = 2 * ln_up(1 + eps) + ln_up(Fraction(2 * m)) / eps
    return ln_term / eps


def _mehlhorn_tree(
    g: WeightedGraph, lengths: Sequence[int], terminals: frozenset[int]
) -> frozenset[int]:
    """Edge-index set of a deterministic 2-approximate minimum-length
    terminal-spanning tree (Mehlhorn's construction)."""
    n = g.n
    adj = g.adjacency()
    INF = None
    dist: list[Optional[int]] = [None] * n
    source: list[int] = [-1] * n
    via: list[int] = [-1] * n  # edge index to parent on the shortest path
    heap = []
    for t in sorted(terminals):
        dist[t] = 0
        source[t] = t
        heapq.heappush(heap, (0, t, t, -1))
    while heap:
        (d, s, v, ei) = heapq.heappop(heap)
        if (d, s) != (dist[v], source[v]):
            continue
        for (y, w, i) in adj[v]:
            nd = d + lengths[i]
            if dist[y] is None or (nd, source[v]) < (dist[y], source[y]):
                dist[y] = nd
                source[y] = source[v]
                via[y] = i
                heapq.heappush(heap, (nd, source[v], y, i))
    if any(dist[v] is None for v in terminals):
        raise PackingError("terminals not connected")

    # terminal closure: best bridging edge per terminal pair
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for i, (u, v, w) in enumerate(g.edges):
        su, sv = source[u], source[v]
        if su < 0 or sv < 0 or su == sv:
            continue
        a, b = (su, sv) if su < sv else (sv, su)
        cand = (dist[u] + lengths[i] + dist[v], i)
        if (a, b) not in best or cand < best[(a, b)]:
            best[(a, b)] = cand
    # Kruskal over the closure
    parent = {t: t for t in terminals}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen: set[int] = set()
    for (length, i), (a, b) in sorted(
        ((cand, pair) for pair, cand in best.items()), key=lambda t: (t[0][0], t[0][1])
    ):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[ra] = rb
        # unroll the bridging edge to a path between the two source terminals
        chosen.add(i)
        (u, v, _) = g.edges[i]
        for end in (u, v):
            x = end
            while x != source[x]:
                chosen.add(via[x])
                (a2, b2, _) = g.edges[via[x]]
                x = a2 if b2 == x else b2
    if len({find(t) for t in terminals}) != 1:
        raise PackingError("terminal closure not connected")

    # the union of shortest paths may contain cycles; take a minimum-length
    # spanning tree of it and prune non-terminal leaves
    sub_edges = sorted(chosen, key=lambda i: (lengths[i], i))
    parent2 = {}

    def find2(x: int) -> int:
        while parent2.setdefault(x, x) != x:
            parent2[x] = parent2[parent2[x]]
            x = parent2[x]
        return x

    tree: set[int] = set()
    deg: dict[int, list[int]] = {}
    for i in sub_edges:
        (u, v, _) = g.edges[i]
        ru, rv = find2(u), find2(v)
        if ru == rv:
            continue
        parent2[ru] = rv
        tree.add(i)
        deg.setdefault(u, []).append(i)
        deg.setdefault(v, []).append(i)
    # leaf-prune non-terminals
    changed = True
    while changed:
        changed = False
        for v, inc in list(deg.items()):
            live = [i for i in inc if i in tree]
            if len(live) == 1 and v not in terminals:
                tree.discard(live[0])
                changed = True
                deg[v] = []
    return frozenset(tree)


def min_length_steiner_subgraph(
    g: WeightedGraph, lengths: LengthFunction | Sequence[int], terminals: Iterable[int]
) -> frozenset[int]:
    """Deterministic (2)-approximate minimum-length terminal-spanning tree;
    returns edge indices."""
    terms = frozenset(terminals)
    if len(terms) < 2:
        raise PackingError("need at least two terminals")
    mant = lengths.mantissa if isinstance(lengths, LengthFunction) else list(lengths)
    return _mehlhorn_tree(g, mant, terms)


def pack_steiner_subgraphs(
    g: WeightedGraph, terminals: Iterable[int], eps: Fraction
) -> PackingRun:
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise PackingError("eps must be in (0,1)")
    terms = frozenset(terminals)
    if len(terms) < 2:
        raise PackingError("need at least two terminals")
    g = merge_parallel(g)
    m = g.m
    if m == 0:
        raise PackingError("graph has no edges")

    delta = delta_init(m, eps)
    # mantissa = ceil(delta * 2^bits / w)
    lengths = LengthFunction(
        [
            -((-delta.numerator * LENGTH_ONE) // (delta.denominator * w))
            for (u, v, w) in g.edges
        ]
    )

    forest = DynamicForest(g.n, terms)
    key_to_idx = {}
    for i, (u, v, w) in enumerate(g.edges):
        key_to_idx.setdefault(edge_key(u, v), i)

    sigma = sum(w * lengths[i] for i, (u, v, w) in enumerate(g.edges))
    entries: list[tuple[int, int]] = []
    op_log: list[tuple[str, int, int]] = []
    current: frozenset[int] = frozenset()
    cur_keys: dict[tuple[int, int], int] = {}

    it = 0
    wmax = g.max_weight()
    budget = int(m * (float(ln_up(Fraction(wmax) * (1 + eps) / delta)) / float(eps) + 2)) + 16
    while sigma < LENGTH_ONE:
        it += 1
        if it > budget:
            raise AssertionError("packing loop exceeded its iteration budget")
        tree = _mehlhorn_tree(g, lengths.mantissa, terms)
        # diff against the forest
        cuts = sorted(current - tree)
        links = sorted(tree - current)
        batch = []
        for i in cuts:
            (u, v, w) = g.edges[i]
            batch.append(ForestUpdate("cut", u, v))
            op_log.append(("cut", u, v))
            del cur_keys[edge_key(u, v)]
        for i in links:
            (u, v, w) = g.edges[i]
            batch.append(
                ForestUpdate("link", u, v, weight=w, length=lengths[i], threshold=Fraction(w, 4))
            )
            op_log.append(("link", u, v))
            cur_keys[edge_key(u, v)] = i
        forest.apply_batch(batch)
        current = tree

        v_val = forest.steiner_tree_stats()[1]  # min weight on M^U, alpha = 1
        assert v_val is not None and v_val > 0
        entries.append((len(op_log), int(v_val)))
        forest.add_value_on_steiner_tree(int(v_val))

        while True:
            ek = forest.get_congested_edge()
            if ek is None:
                break
            x = forest.get_value(*ek)
            forest.reset_value(*ek)
            i = cur_keys.get(ek)
            if i is None:
                i = key_to_idx[ek]
            (u, v, w) = g.edges[i]
            q = eps * Fraction(int(x), w)
            factor = exp_up_fixed(q.numerator, q.denominator)
            old = lengths.mantissa[i]
            new = -((-old * factor) >> F_BITS)
            lengths.mantissa[i] = new
            sigma += w * (new - old)
        # post-drain bracket: every accumulator is strictly below w/4, so the
        # exact length exceeds the tracked one by at most exp(eps/4) <= 1+eps
        for ek2, i2 in cur_keys.items():
            rec = forest.edges[ek2]
            assert rec.dval < rec.threshold

    scale = packing_scale(m, eps)
    packing = SteinerPacking(tuple(entries), scale)
    return PackingRun(
        packing,
        tuple(op_log),
        tuple(forest.emitted),
        lengths,
        it,
        terms,
        g,
    )


@dataclass(frozen=True)
class PackingAudit:
    feasible: bool
    value: Fraction
    edge_loads: tuple[Fraction, ...]
    trees_checked: int
    violations: tuple[str, ...]


def audit_packing(
    g: WeightedGraph, packing: SteinerPacking, op_log: Sequence[tuple[str, int, int]],
    terminals: Iterable[int],
) -> PackingAudit:
    """Replay the op log, reconstruct every packed tree explicitly, check
    feasibility exactly and compute the scaled packing value."""
    g = merge_parallel(g)
    terms = frozenset(terminals)
    load = [Fraction(0)] * g.m
    key_to_idx: dict[tuple[int, int], int] = {}
    for i, (u, v, w) in enumerate(g.edges):
        key_to_idx.setdefault(edge_key(u, v), i)

    violations: list[str] = []
    edge_set: set[tuple[int, int]] = set()
    pos = 0
    checked = 0
    for (tick, raw) in sorted(packing.entries):
        while pos < tick:
            if pos >= len(op_log):
                raise PackingError("op log shorter than packing ticks")
            kind, u, v = op_log[pos]
            k = edge_key(u, v)
            if kind == "link":
                if k in edge_set:
                    raise PackingError("corrupt log: duplicate link")
                edge_set.add(k)
            elif kind == "cut":
                if k not in edge_set:
                    raise PackingError("corrupt log: cut of absent edge")
                edge_set.discard(k)
            else:
                raise PackingError(f"corrupt log: bad op {kind!r}")
            pos += 1
        # the tree at this tick must span the terminals
        checked += 1
        adj: dict[int, set[int]] = {}
        for (a, b) in edge_set:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        if terms:
            start = min(terms)
            seen = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in adj.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if not terms <= seen:
                violations.append(f"entry at tick {tick}: tree does not span terminals")
        val = Fraction(raw) / packing.scale
        for k in edge_set:
            load[key_to_idx[k]] += val

    feasible = True
    for i, (u, v, w) in enumerate(g.edges):
        if load[i] > w:
            feasible = False
            violations.append(f"edge {i} overloaded: {load[i]} > {w}")
    if any("does not span" in s for s in violations):
        feasible = False
    return PackingAudit(feasible, packing.value(), tuple(load), checked, tuple(violations))
