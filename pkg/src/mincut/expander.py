"""Demand-weighted expander decomposition with a materialized witness flow.

A cut S is phi-expanding w.r.t. demand d if w(boundary S) >= phi *
min(d(S), d(V-S)).  ``expander_decompose`` partitions V so that every
cluster is phi-expanding on its induced subgraph and a feasible witness
flow exists that routes, for each vertex, its cluster-boundary weight to
demand sinks, with measured congestion/absorption factor gamma.

Structure: an inner deterministic partitioner produces connected
(6*phi)-expanding pieces (exhaustive sparsest-cut below the enumeration
limit, a BFS prefix sweep above it), pieces are grouped into a
bipartition (A, B), B is trimmed by one exact max-flow, and the
algorithm recurses on the remainder.  Per-level trim guarantees
(demand removed <= d(V)/6, trimmed side stays an expander) are recorded
and asserted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import get_config
from .flow import _Dinic, _dinic_maxflow
from .graphs import GraphError, WeightedGraph


Demand = Sequence[int]


def terminal_demand(g: WeightedGraph, terminals: Iterable[int]) -> tuple[int, ...]:
    t = set(terminals)
    return tuple(1 if v in t else 0 for v in range(g.n))


def _demand_vec(g: WeightedGraph, d: Demand | Mapping[int, int]) -> tuple[int, ...]:
    if isinstance(d, Mapping):
        vec = tuple(int(d.get(v, 0)) for v in range(g.n))
    else:
        vec = tuple(int(x) for x in d)
        if len(vec) != g.n:
            raise GraphError("demand vector length mismatch")
    if any(x < 0 for x in vec):
        raise GraphError("negative demand")
    return vec


def verify_expander(g: WeightedGraph, phi: Fraction, d: Demand) -> bool:
    """Exhaustive check that every cut is phi-expanding w.r.t. d (n <= 14)."""
    dvec = _demand_vec(g, d)
    phi = Fraction(phi)
    if g.n <= 1:
        return True
    cutvals = g.cut_values_all()
    masks = np.arange(1 << g.n, dtype=np.int64)
    dS = np.zeros(1 << g.n, dtype=np.int64)
    for v, dv in enumerate(dvec):
        if dv:
            dS += dv * ((masks >> v) & 1)
    total = int(sum(dvec))
    mind = np.minimum(dS, total - dS)
    interior = np.ones(1 << g.n, dtype=bool)
    interior[0] = interior[(1 << g.n) - 1] = False
    lhs = cutvals[interior] * phi.denominator
    rhs = mind[interior] * phi.numerator
    return bool(np.all(lhs >= rhs))


@dataclass(frozen=True)
class TrimRecord:
    level: int
    region_demand: int
    removed_demand: int
    trimmed_was_certified: bool
    b_side: frozenset[int]
    b_prime: frozenset[int]

    def within_budget(self) -> bool:
        return 6 * self.removed_demand <= self.region_demand


@dataclass(frozen=True)
class WitnessFlow:
    """Feasible routing of cluster-boundary mass to demand sinks.

    ``edge_flow[i]`` is the signed flow on g.edges[i] (positive u->v),
    ``absorbed[v]`` the sink mass at v; units are exact Fractions.
    """

    edge_flow: tuple[Fraction, ...]
    absorbed: tuple[Fraction, ...]
    gamma: int

    def validate(
        self,
        g: WeightedGraph,
        phi: Fraction,
        dvec: tuple[int, ...],
        source: Sequence[int],
    ) -> None:
        net = [Fraction(0)] * g.n
        for i, (u, v, w) in enumerate(g.edges):
            f = self.edge_flow[i]
            if abs(f) > self.gamma * w:
                raise AssertionError(f"edge {i} congestion {f} > {self.gamma * w}")
            net[u] -= f
            net[v] += f
        for v in range(g.n):
            if self.absorbed[v] > phi * self.gamma * dvec[v]:
                raise AssertionError(f"vertex {v} over-absorbs")
            if self.absorbed[v] < 0:
                raise AssertionError("negative absorption")
            # conservation: source + inflow == absorbed
            if source[v] + net[v] != self.absorbed[v]:
                raise AssertionError(
                    f"conservation fails at {v}: {source[v]} + {net[v]} != {self.absorbed[v]}"
                )


@dataclass(frozen=True)
class ExpanderDecomposition:
    clusters: tuple[frozenset[int], ...]
    phi: Fraction
    gamma: int
    alpha: Fraction
    witness: WitnessFlow
    trim_log: tuple[TrimRecord, ...]

    def cluster_of(self, v: int) -> frozenset[int]:
        for c in self.clusters:
            if v in c:
                return c
        raise KeyError(v)


def _induced_cutvals(g: WeightedGraph, region: list[int]):
    """Cut values and demand sums over all subsets of ``region`` (<= limit)."""
    idx = {v: i for i, v in enumerate(region)}
    k = len(region)
    masks = np.arange(1 << k, dtype=np.int64)
    vals = np.zeros(1 << k, dtype=np.int64)
    for (u, v, w) in g.edges:
        if u in idx and v in idx:
            vals += w * (((masks >> idx[u]) ^ (masks >> idx[v])) & 1)
    return masks, vals


def _sparsest_cut_enum(
    g: WeightedGraph, region: list[int], dvec: tuple[int, ...], phi: Fraction
) -> frozenset[int] | None:
    """None if every cut of g[region] is phi-expanding w.r.t. d|region,
    otherwise the minimum-ratio violating cut (deterministic tie-break)."""
    k = len(region)
    masks, vals = _induced_cutvals(g, region)
    dS = np.zeros(1 << k, dtype=np.int64)
    for i, v in enumerate(region):
        if dvec[v]:
            dS += dvec[v] * ((masks >> i) & 1)
    total = int(sum(dvec[v] for v in region))
    mind = np.minimum(dS, total - dS)
    ok = np.ones(1 << k, dtype=bool)
    ok[0] = ok[(1 << k) - 1] = False
    violating = ok & (vals * phi.denominator < mind * phi.numerator)
    if not violating.any():
        return None
    idxs = np.nonzero(violating)[0]
    # minimum ratio w(dS)/mind, tie-break smaller mask
    best = min(idxs, key=lambda m: (Fraction(int(vals[m]), int(mind[m])), int(m)))
    return frozenset(region[i] for i in range(k) if (int(best) >> i) & 1)


def _sweep_cut(
    g: WeightedGraph, region: list[int], dvec: tuple[int, ...], phi: Fraction
) -> frozenset[int] | None:
    """Deterministic BFS prefix sweep for regions above the enumeration
    limit; returns a violating prefix cut or None if the sweep certifies
    nothing below phi."""
    region_set = set(region)
    adj = g.adjacency()
    total = sum(dvec[v] for v in region)
    best_cut: frozenset[int] | None = None
    best_ratio: Fraction | None = None
    for start in sorted(region):
        order = [start]
        seen = {start}
        queue = [start]
        while queue:
            x = queue.pop(0)
            for (y, _, _) in sorted(adj[x]):
                if y in region_set and y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
        cut_w = 0
        d_pref = 0
        pref: set[int] = set()
        for v in order[:-1]:
            for (y, w, _) in adj[v]:
                if y not in region_set:
                    continue
                cut_w += -w if y in pref else w
            pref.add(v)
            d_pref += dvec[v]
            mind = min(d_pref, total - d_pref)
            if mind == 0:
                continue
            ratio = Fraction(cut_w, mind)
            if ratio < phi and (best_ratio is None or ratio < best_ratio):
                best_ratio = ratio
                best_cut = frozenset(pref)
    return best_cut


def _partition_pieces(
    g: WeightedGraph, region: frozenset[int], dvec: tuple[int, ...], phi: Fraction
) -> list[tuple[frozenset[int], bool]]:
    """Split region into connected pieces, each phi-expanding w.r.t. its
    induced demand (certified exactly when small enough to enumerate).
    Returns (piece, certified) pairs."""
    limit = get_config().oracle_limit
    out: list[tuple[frozenset[int], bool]] = []
    stack = [region]
    adj = g.adjacency()
    while stack:
        part = stack.pop()
        # connected components first
        comps: list[frozenset[int]] = []
        left = set(part)
        while left:
            s = min(left)
            comp = {s}
            q = [s]
            while q:
                x = q.pop()
                for (y, _, _) in adj[x]:
                    if y in left and y not in comp:
                        comp.add(y)
                        q.append(y)
            left -= comp
            comps.append(frozenset(comp))
        if len(comps) > 1:
            stack.extend(comps)
            continue
        comp = comps[0]
        if len(comp) == 1 or sum(dvec[v] for v in comp) == 0:
            out.append((comp, True))
            continue
        region_list = sorted(comp)
        if len(comp) <= limit:
            cut = _sparsest_cut_enum(g, region_list, dvec, phi)
            certified = True
        else:
            cut = _sweep_cut(g, region_list, dvec, phi)
            certified = False
        if cut is None:
            out.append((comp, certified))
        else:
            stack.append(cut)
            stack.append(comp - cut)
    return out


def _boundary_to(g: WeightedGraph, inside: frozenset[int], of: frozenset[int]) -> dict[int, int]:
    """For each v in ``of``, total weight of its edges leaving ``inside``."""
    out = {v: 0 for v in of}
    for (u, v, w) in g.edges:
        if u in of and v not in inside:
            out[u] += w
        if v in of and u not in inside:
            out[v] += w
    return out


def _trim(
    g: WeightedGraph,
    comp: frozenset[int],
    b_side: frozenset[int],
    dvec: tuple[int, ...],
    phi: Fraction,
    alpha: Fraction,
) -> frozenset[int]:
    """One trimming max-flow on G[B]; returns B' = B minus the cut side.

    Source edges carry w(E({v}, comp - B)) / (12 alpha), sinks phi/2 *
    d(v); everything is scaled to stay integral.
    """
    blist = sorted(b_side)
    idx = {v: i for i, v in enumerate(blist)}
    nb = len(blist)
    s_node, t_node = nb, nb + 1
    src_w = _boundary_to(g, b_side, b_side)
    scale_f = Fraction(12) * alpha
    # common integer scale: 12*alpha for sources, phi/2 for sinks
    denom = (scale_f.denominator * scale_f.numerator * 2 * phi.denominator)
    net = _Dinic(nb + 2)

    def scaled(x: Fraction) -> int:
        y = x * denom
        assert y.denominator == 1
        return y.numerator

    for (u, v, w) in g.edges:
        if u in idx and v in idx:
            c = scaled(Fraction(w))
            net.add_edge(idx[u], idx[v], c, c)
    for v in blist:
        if src_w[v]:
            net.add_edge(s_node, idx[v], scaled(Fraction(src_w[v]) / scale_f), 0)
        if dvec[v]:
            net.add_edge(idx[v], t_node, scaled(Fraction(phi, 2) * dvec[v]), 0)
    _dinic_maxflow(net, s_node, t_node)
    reach = net.reachable(s_node)
    cut_side = frozenset(blist[i] for i in reach if i < nb)
    return b_side - cut_side


def expander_decompose(
    g: WeightedGraph, phi: Fraction | int, d: Demand | Mapping[int, int]
) -> ExpanderDecomposition:
    phi = Fraction(phi)
    if phi <= 0:
        raise GraphError("phi must be positive")
    dvec = _demand_vec(g, d)
    cfg = get_config()
    # pieces are certified at phi itself; a trimmed side is re-verified (or
    # recursed on) below, so emitted small clusters are always phi-expanding
    inner_phi = phi

    clusters: list[frozenset[int]] = []
    trims: list[TrimRecord] = []
    total_crossing = 0

    def dsum(vs: Iterable[int]) -> int:
        return sum(dvec[v] for v in vs)

    def recurse(region: frozenset[int], depth: int) -> None:
        if not region:
            return
        if depth > 4 * max(2, (g.n * max(1, g.max_weight())).bit_length()) + 8:
            raise AssertionError("expander decomposition recursion too deep")
        pieces = _partition_pieces(g, region, dvec, inner_phi)
        if len(pieces) == 1:
            clusters.append(pieces[0][0])
            return
        if all(len(p) == 1 for (p, _) in pieces):
            clusters.extend(p for (p, _) in pieces)
            return
        dV = dsum(region)
        if dV == 0:
            clusters.extend(p for (p, _) in pieces)
            return
        # group pieces into a bipartition (A, B)
        big = [(p, cert) for (p, cert) in pieces if 2 * dsum(p) > dV]
        if big:
            b_piece, b_certified = big[0]
            b_side = b_piece
            single_b = True
        else:
            order = sorted(pieces, key=lambda pc: (-dsum(pc[0]), min(pc[0])))
            a_set: set[int] = set()
            taken = 0
            d_a = 0
            while 4 * d_a < dV:
                a_set |= order[taken][0]
                d_a += dsum(order[taken][0])
                taken += 1
            b_side = region - frozenset(a_set)
            rest = [pc for pc in order[taken:]]
            single_b = len(rest) == 1
            b_certified = single_b and rest[0][1]
        assert b_side and b_side != region, "degenerate bipartition"
        crossing = sum(
            w for (u, v, w) in g.edges
            if (u in region and v in region) and ((u in b_side) != (v in b_side))
        )
        alpha = max(Fraction(1), Fraction(crossing) / (phi * dV))
        b_prime = _trim(g, region, b_side, dvec, phi, alpha)
        removed = dsum(b_side - b_prime)
        rec = TrimRecord(depth, dV, removed, b_certified, b_side, b_prime)
        trims.append(rec)
        assert rec.within_budget(), f"trim removed {removed} > d(V)/6 of {dV}"
        assert b_prime, "trim emptied B"
        a_prime = region - b_prime
        if single_b:
            # B was one certified piece: trimming keeps it an expander
            ok = True
            if len(b_prime) <= cfg.oracle_limit:
                sub, remap = g.induced(b_prime)
                ok = verify_expander(sub, phi, tuple(dvec[v] for v in sorted(b_prime)))
            if ok:
                clusters.append(b_prime)
            else:
                recurse(b_prime, depth + 1)
            recurse(a_prime, depth + 1)
        else:
            recurse(b_prime, depth + 1)
            recurse(a_prime, depth + 1)

    for comp in g.connected_components():
        recurse(comp, 0)

    clusters.sort(key=min)
    cluster_of = {}
    for c in clusters:
        for v in c:
            cluster_of[v] = c
    source = [0] * g.n
    for (u, v, w) in g.edges:
        if cluster_of[u] is not cluster_of[v]:
            source[u] += w
            source[v] += w
            total_crossing += w

    witness = _solve_witness(g, phi, dvec, source)
    d_total = sum(dvec)
    alpha_measured = (
        Fraction(total_crossing) / (phi * d_total) if d_total and total_crossing else Fraction(0)
    )
    deco = ExpanderDecomposition(
        tuple(clusters), phi, witness.gamma, alpha_measured, witness, tuple(trims)
    )
    witness.validate(g, phi, dvec, source)
    nW = max(2, g.n * max(1, g.max_weight()))
    ceiling = cfg.gamma_ceiling_factor * max(1.0, np.log2(nW)) ** 2
    assert witness.gamma <= ceiling, f"measured gamma {witness.gamma} above ceiling"
    return deco


def _solve_witness(
    g: WeightedGraph, phi: Fraction, dvec: tuple[int, ...], source: Sequence[int]
) -> WitnessFlow:
    """Smallest doubling gamma whose flow problem (edge caps gamma*w,
    sinks gamma*phi*d) routes all boundary mass; exact arithmetic."""
    need = sum(source)
    if need == 0:
        zero = Fraction(0)
        return WitnessFlow(
            tuple(zero for _ in g.edges), tuple(zero for _ in range(g.n)), 1
        )
    denom = phi.denominator
    gamma = 1
    while True:
        net = _Dinic(g.n + 2)
        s_node, t_node = g.n, g.n + 1
        edge_arcs = []
        for (u, v, w) in g.edges:
            cap = gamma * w * denom
            edge_arcs.append(len(net.to))
            net.add_edge(u, v, cap, cap)
        sink_arcs = {}
        for v in range(g.n):
            if source[v]:
                net.add_edge(s_node, v, source[v] * denom, 0)
            if dvec[v]:
                sink_arcs[v] = len(net.to)
                net.add_edge(v, t_node, gamma * phi.numerator * dvec[v], 0)
        flow = _dinic_maxflow(net, s_node, t_node)
        if flow == need * denom:
            edge_flow = []
            for i, (u, v, w) in enumerate(g.edges):
                ai = edge_arcs[i]
                cap0 = gamma * w * denom
                edge_flow.append(Fraction(cap0 - net.cap[ai], denom))
            absorbed = []
            for v in range(g.n):
                if v in sink_arcs:
                    ai = sink_arcs[v]
                    cap0 = gamma * phi.numerator * dvec[v]
                    absorbed.append(Fraction(cap0 - net.cap[ai], denom))
                else:
                    absorbed.append(Fraction(0))
            return WitnessFlow(tuple(edge_flow), tuple(absorbed), gamma)
        gamma *= 2
        if gamma > 2**40:
            raise AssertionError("witness flow infeasible at any reasonable gamma")
