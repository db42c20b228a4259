"""Terminal vertex sparsifier extracted from the packing stream, the
unweighted skeleton graph, spanning-tree packing, and 16-respecting guide
trees.

The sparsifier consumes the dynamic-forest update stream: Euler tours of
the solid trees are contracted to the cyclic sequence of terminal
occurrences, every value event credits each consecutive-occurrence pair
with half the tree value, and the per-pair totals scaled by the packing
divisor form the graph G' on the terminals.  G' then yields a skeleton
multigraph whose tree packing is the guide-tree set.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import get_config
from .graphs import GraphError, WeightedGraph, merge_parallel
from .packing import PackingRun, pack_steiner_subgraphs


class SparsifierError(ValueError):
    pass


def euler_tour(adj: dict[int, set[int]], root: int) -> list[int]:
    """Occurrence sequence of the tree containing root: cyclic, length
    2(size-1); deterministic via sorted children."""
    # iterative DFS emitting the vertex on entry and after each child
    seq: list[int] = [root]
    it_stack = [(root, None, iter(sorted(adj.get(root, ()))))]
    while it_stack:
        v, par, it = it_stack[-1]
        advanced = False
        for c in it:
            if c == par:
                continue
            seq.append(c)
            it_stack.append((c, v, iter(sorted(adj.get(c, ())))))
            advanced = True
            break
        if not advanced:
            it_stack.pop()
            if it_stack:
                seq.append(it_stack[-1][0])
    if len(seq) > 1:
        seq.pop()  # close the cycle: last equals first
    return seq


class EulerTourTracker:
    """Maintains solid adjacency from the update stream and the contracted
    cycle C (multiset of consecutive terminal-occurrence pairs)."""

    def __init__(self, n: int, terminals: frozenset[int]):
        self.n = n
        self.terminals = terminals
        self.adj: dict[int, set[int]] = {}
        self.totals: Counter[tuple[int, int]] = Counter()  # raw value units

    def c_multiset(self) -> Counter[tuple[int, int]]:
        """Contracted cycles of all solid trees: normalized terminal pairs."""
        out: Counter[tuple[int, int]] = Counter()
        seen: set[int] = set()
        for v in sorted(self.adj):
            if v in seen or not self.adj[v]:
                continue
            comp = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            tour = euler_tour(self.adj, min(comp))
            occ = [x for x in tour if x in self.terminals]
            if len(occ) < 2:
                continue
            for a, b in zip(occ, occ[1:] + occ[:1]):
                if a != b:
                    out[(a, b) if a < b else (b, a)] += 1
        return out

    def apply(self, event: tuple) -> None:
        kind = event[0]
        if kind == "insert":
            _, u, v, _ = event
            self.adj.setdefault(u, set()).add(v)
            self.adj.setdefault(v, set()).add(u)
        elif kind == "delete":
            _, u, v, _ = event
            self.adj[u].discard(v)
            self.adj[v].discard(u)
        elif kind == "addvalue":
            _, delta, _ = event
            for pair, cnt in self.c_multiset().items():
                self.totals[pair] += cnt * int(delta)
        else:
            raise SparsifierError(f"unknown stream event {kind!r}")


@dataclass(frozen=True)
class VertexSparsifier:
    """Graph G' on the terminal set with exact rational weights
    raw/(2*scale); cut arithmetic is done on the integer raw weights."""

    terminals: tuple[int, ...]  # sorted original ids
    raw_edges: tuple[tuple[int, int, int], ...]  # (i, j, raw) over terminal indices
    scale: Fraction  # packing divisor D

    @property
    def k(self) -> int:
        return len(self.terminals)

    def weight(self, raw: int) -> Fraction:
        return Fraction(raw) / (2 * self.scale)

    def edge_weights(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, self.weight(r)) for (i, j, r) in self.raw_edges]

    def raw_cut_values(self) -> np.ndarray:
        k = self.k
        masks = np.arange(1 << k, dtype=np.int64)
        vals = np.zeros(1 << k, dtype=np.int64)
        for (i, j, r) in self.raw_edges:
            crossing = ((masks >> i) ^ (masks >> j)) & 1
            vals += r * crossing
        return vals

    def lambda_raw(self) -> int:
        vals = self.raw_cut_values()
        interior = vals[1 : (1 << self.k) - 1]
        return int(min(interior)) if len(interior) else 0

    def lambda_min(self) -> Fraction:
        """Global mincut value of G' (exact)."""
        return self.weight(self.lambda_raw())

    def projected_cut_raw(self, a_side: Iterable[int]) -> int:
        """Raw weight of edges between A-side and B-side terminal indices."""
        aset = set(a_side)
        return sum(r for (i, j, r) in self.raw_edges if (i in aset) != (j in aset))


def extract_vertex_sparsifier(
    g: WeightedGraph, terminals: Iterable[int], eps: Fraction | None = None
) -> VertexSparsifier:
    cfg = get_config()
    eps = Fraction(eps) if eps is not None else cfg.pack_eps
    terms = frozenset(terminals)
    if len(terms) < 2:
        raise SparsifierError("need at least two terminals")
    run = pack_steiner_subgraphs(g, terms, eps)
    return sparsifier_from_run(run)


def sparsifier_from_run(run: PackingRun) -> VertexSparsifier:
    tracker = EulerTourTracker(run.graph.n, run.terminals)
    for event in run.stream:
        tracker.apply(event)
    order = sorted(run.terminals)
    idx = {t: i for i, t in enumerate(order)}
    edges = tuple(
        (idx[a], idx[b], raw)
        for (a, b), raw in sorted(tracker.totals.items())
        if raw > 0
    )
    return VertexSparsifier(tuple(order), edges, run.packing.scale)


@dataclass(frozen=True)
class SkeletonGraph:
    """Unweighted multigraph H on the terminals with scaling weight W:
    W * |cut in H| approximates cuts of G' near its mincut."""

    terminals: tuple[int, ...]
    multi_edges: tuple[tuple[int, int, int], ...]  # (i, j, multiplicity)
    w_skel: Fraction
    lambda_h: int

    def cut_cardinalities(self) -> np.ndarray:
        k = len(self.terminals)
        masks = np.arange(1 << k, dtype=np.int64)
        vals = np.zeros(1 << k, dtype=np.int64)
        for (i, j, mult) in self.multi_edges:
            vals += mult * (((masks >> i) ^ (masks >> j)) & 1)
        return vals


def build_skeleton(
    sp: VertexSparsifier, c: Fraction | None = None, eps: Fraction | None = None
) -> SkeletonGraph:
    cfg = get_config()
    c = Fraction(c) if c is not None else cfg.skeleton_c
    eps = Fraction(eps) if eps is not None else cfg.skeleton_eps
    lam_raw = sp.lambda_raw()
    if lam_raw <= 0:
        raise SparsifierError("sparsifier is disconnected")
    m_prime = len(sp.raw_edges)

    # exact unit splitting when all weights are integral and small
    weights = sp.edge_weights()
    if all(q.denominator == 1 for (_, _, q) in weights):
        lam = sp.lambda_min()
        if lam <= cfg.skeleton_lambda_cap:
            multi = tuple((i, j, int(q)) for (i, j, q) in weights if q > 0)
            lam_h = _multigraph_mincut(len(sp.terminals), multi)
            return SkeletonGraph(sp.terminals, multi, Fraction(1), lam_h)

    # scale and round down: W = eps * lambda(G') / m'; floor rounding makes
    # W*|cut_H| <= w(cut_G') exact and >= (1 - eps) lambda for every cut
    multi = []
    for (i, j, raw) in sp.raw_edges:
        mult = (raw * m_prime * eps.denominator) // (eps.numerator * lam_raw)
        if mult > 0:
            multi.append((i, j, int(mult)))
    multi = tuple(multi)
    lam_h = _multigraph_mincut(len(sp.terminals), multi)
    w_skel = eps * sp.weight(lam_raw) / m_prime
    return SkeletonGraph(sp.terminals, multi, w_skel, lam_h)


def _multigraph_mincut(k: int, multi: Sequence[tuple[int, int, int]]) -> int:
    if k < 2:
        return 0
    masks = np.arange(1 << k, dtype=np.int64)
    vals = np.zeros(1 << k, dtype=np.int64)
    for (i, j, mult) in multi:
        vals += mult * (((masks >> i) ^ (masks >> j)) & 1)
    interior = vals[1 : (1 << k) - 1]
    return int(interior.min()) if len(interior) else 0


@dataclass(frozen=True)
class TreePacking:
    trees: tuple[frozenset[tuple[int, int]], ...]  # edges over terminal indices
    values: tuple[Fraction, ...]

    def total_value(self) -> Fraction:
        return sum(self.values, Fraction(0))


def tree_packing(h: SkeletonGraph) -> TreePacking:
    """Feasible spanning-tree packing of H with value >= lambda_H / 2.

    Greedy bottleneck extraction at unit granularity, halving the unit and
    restarting whenever the target is not reached.
    """
    k = len(h.terminals)
    target = Fraction(h.lambda_h, 2)
    if k < 2 or h.lambda_h == 0:
        raise SparsifierError("skeleton disconnected")
    base = {(i, j): Fraction(m) for (i, j, m) in h.multi_edges}

    unit = Fraction(1)
    for _ in range(8):
        residual = dict(base)
        packed: dict[frozenset[tuple[int, int]], Fraction] = {}
        total = Fraction(0)
        while total < target:
            tree = _bottleneck_tree(k, residual, unit)
            if tree is None:
                break
            for e in tree:
                residual[e] -= unit
            packed[tree] = packed.get(tree, Fraction(0)) + unit
            total += unit
        if total >= target:
            trees = tuple(sorted(packed, key=sorted))
            return TreePacking(trees, tuple(packed[t] for t in trees))
        unit /= 2
    raise AssertionError("tree packing failed to reach lambda_H/2")


def _bottleneck_tree(
    k: int, residual: dict[tuple[int, int], Fraction], unit: Fraction
) -> Optional[frozenset[tuple[int, int]]]:
    """Max-bottleneck spanning tree among edges with residual >= unit."""
    usable = [(r, e) for e, r in residual.items() if r >= unit]
    usable.sort(key=lambda t: (-t[0], t[1]))
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for (r, e) in usable:
        a, b = find(e[0]), find(e[1])
        if a == b:
            continue
        parent[a] = b
        chosen.append(e)
        if len(chosen) == k - 1:
            return frozenset(chosen)
    return None


@dataclass(frozen=True)
class GuideTreeSet:
    """Trees over the original terminal ids; for any target whose mincut
    from the source is near the terminal mincut, some tree crosses some
    optimal cut at most k_respect times."""

    trees: tuple[frozenset[tuple[int, int]], ...]
    values: tuple[Fraction, ...]
    terminals: tuple[int, ...]
    k_respect: int = 16


def guide_trees(
    g: WeightedGraph,
    terminals: Iterable[int],
    s: int,
    eps: Fraction | None = None,
) -> GuideTreeSet:
    cfg = get_config()
    eps = Fraction(eps) if eps is not None else cfg.guide_eps
    terms = frozenset(terminals)
    if s not in terms:
        raise SparsifierError("source must be a terminal")
    if len(terms) < 2:
        raise SparsifierError("need at least two terminals")
    cache = g._cache.setdefault("guide_trees", {})
    key = (terms, eps)
    hit = cache.get(key)
    if hit is not None:
        return hit

    sp = extract_vertex_sparsifier(g, terms, eps)
    h = build_skeleton(sp)
    packing = tree_packing(h)
    order = sp.terminals
    trees = tuple(
        frozenset(
            (order[i], order[j]) if order[i] < order[j] else (order[j], order[i])
            for (i, j) in t
        )
        for t in packing.trees
    )
    out = GuideTreeSet(trees, packing.values, order)
    cache[key] = out
    return out
