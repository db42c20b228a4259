"""Named small graphs and the seeded random-graph generator used by tests
and by the CLI verify corpus.  The only randomness in the whole package
lives here, behind explicit seeds."""

from __future__ import annotations

import random

from .graphs import WeightedGraph

# dumbbell vertex names: left triangle 0,1,2 = (a,b,c), right 3,4,5 = (a,b,c)
DUMBBELL_L = {"a": 0, "b": 1, "c": 2}
DUMBBELL_R = {"a": 3, "b": 4, "c": 5}


def p3() -> WeightedGraph:
    """Path a-b-c with weights 1 and 2 (vertices 0,1,2)."""
    return WeightedGraph(3, ((0, 1, 1), (1, 2, 2)))


def k4_unit() -> WeightedGraph:
    edges = tuple((u, v, 1) for u in range(4) for v in range(u + 1, 4))
    return WeightedGraph(4, edges)


def triangle_unit() -> WeightedGraph:
    return WeightedGraph(3, ((0, 1, 1), (0, 2, 1), (1, 2, 1)))


def star4() -> WeightedGraph:
    """Star with center 0 and three unit leaves 1,2,3."""
    return WeightedGraph(4, ((0, 1, 1), (0, 2, 1), (0, 3, 1)))


def dumbbell() -> WeightedGraph:
    """Two unit triangles joined by a unit bridge between the two a-vertices."""
    edges = (
        (0, 1, 1), (0, 2, 1), (1, 2, 1),
        (3, 4, 1), (3, 5, 1), (4, 5, 1),
        (0, 3, 1),
    )
    return WeightedGraph(6, edges)


def c4(weights=(1, 1, 1, 1)) -> WeightedGraph:
    a, b, c, d = weights
    return WeightedGraph(4, ((0, 1, a), (1, 2, b), (2, 3, c), (3, 0, d)))


def two_vertex(w: int = 10) -> WeightedGraph:
    return WeightedGraph(2, ((0, 1, w),))


def p3_pendant() -> WeightedGraph:
    """Path a-b-c (weights 2) with a unit pendant d on b."""
    return WeightedGraph(4, ((0, 1, 2), (1, 2, 2), (1, 3, 1)))


def named_fixtures() -> dict[str, WeightedGraph]:
    return {
        "p3": p3(),
        "k4": k4_unit(),
        "triangle": triangle_unit(),
        "star4": star4(),
        "dumbbell": dumbbell(),
        "c4": c4(),
        "c4_skewed": c4((1, 1, 1, 10)),
        "two_vertex": two_vertex(),
        "p3_pendant": p3_pendant(),
    }


def random_connected_graph(
    seed: int, n_max: int = 12, m_max: int = 30, w_max: int = 16, n_min: int = 2
) -> WeightedGraph:
    """Deterministic connected multigraph: random spanning tree + extra edges."""
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    edges: list[tuple[int, int, int]] = []
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u = order[i]
        v = order[rng.randrange(i)]
        edges.append((min(u, v), max(u, v), rng.randint(1, w_max)))
    extra = rng.randint(0, max(0, min(m_max, 2 * n) - (n - 1)))
    for _ in range(extra):
        u, v = rng.sample(range(n), 2)
        edges.append((min(u, v), max(u, v), rng.randint(1, w_max)))
    return WeightedGraph(n, tuple(edges))


def corpus(count: int, base_seed: int = 1000, **kw) -> list[WeightedGraph]:
    return [random_connected_graph(base_seed + i, **kw) for i in range(count)]
