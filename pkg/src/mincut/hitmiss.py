"""Deterministic hit-and-miss hash families and the pair-separation
corollary used for derandomized sampling.

A family over ground set [N] with parameters (a, b) contains, for every
pair of disjoint sets A, B with |A| <= a and |B| <= b, some 0/1 function
h with h = 0 on A and h = 1 on B.

Construction: modular hashing composed with subset selectors.  Stage 1
collects the primes up to (and including) the first prime >= N; any two
distinct elements of [N] differ by less than N, so that last prime is
injective on every subset, and smaller primes supply compact functions.
Stage 2 emits, for each prime p and each residue set T of size <= b, the
function x -> [x mod p in T].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import ceil, log2


class HitMissError(ValueError):
    pass


def _primes_through_first_geq(n: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while True:
        if all(candidate % p for p in primes):
            primes.append(candidate)
            if candidate >= n:
                return primes
        candidate += 1


@dataclass(frozen=True)
class HitMissFunction:
    p: int
    residues: frozenset[int]

    def __call__(self, x: int) -> int:
        return 1 if x % self.p in self.residues else 0


@dataclass(frozen=True)
class HitMissFamily:
    ground_size: int
    a: int
    b: int
    functions: tuple[HitMissFunction, ...]
    # recorded constant C of the size assertion |family| <= (a*log2 N)^(C*b)
    size_constant: float = 2.0

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)

    def witness(self, miss: frozenset[int], hit: frozenset[int]) -> HitMissFunction | None:
        """A function that is 0 on ``miss`` and 1 on ``hit``, if one exists.

        Constructive: for each prime in ascending order, the selector of
        hit's residues is a family member whenever it has at most b
        residues; the largest prime is injective on miss | hit, so for
        admissible (miss, hit) the search always succeeds.
        """
        primes = sorted({fn.p for fn in self.functions})
        for p in primes:
            T = frozenset(x % p for x in hit)
            if not T or len(T) > self.b:
                continue
            if any(x % p in T for x in miss):
                continue
            return HitMissFunction(p, T)
        return None

    def serialize(self) -> bytes:
        rows = [f"{self.ground_size} {self.a} {self.b}"]
        rows += [
            f"{fn.p}:{','.join(map(str, sorted(fn.residues)))}" for fn in self.functions
        ]
        return "\n".join(rows).encode("ascii")


def hit_and_miss_family(n: int, a: int, b: int) -> HitMissFamily:
    """Family over [n] covering all disjoint (A, B), |A| <= a, |B| <= b."""
    if b > 4:
        raise HitMissError("hit-set sizes above 4 unsupported")
    if b > a:
        raise HitMissError("require b <= a")
    if n < a + b:
        raise HitMissError("require n >= a + b")
    primes = _primes_through_first_geq(n)
    functions: list[HitMissFunction] = []
    for p in primes:
        for size in range(1, min(b, p) + 1):
            for T in combinations(range(p), size):
                functions.append(HitMissFunction(p, frozenset(T)))
    return HitMissFamily(n, a, b, tuple(functions))


def family_size_bound(n: int, a: int, b: int, c: float = 2.0) -> float:
    return (a * max(1.0, log2(n))) ** (c * b)


def pair_separation_family(n: int) -> list[frozenset[int]]:
    """<= 2*ceil(log2 n) subsets of [n] such that every ordered pair (x, y),
    x != y, has a set containing x and excluding y.  Binary-bit selectors."""
    if n < 1:
        raise HitMissError("need n >= 1")
    if n == 1:
        return []
    bits = ceil(log2(n)) if n > 1 else 1
    out: list[frozenset[int]] = []
    for j in range(bits):
        ones = frozenset(i for i in range(n) if (i >> j) & 1)
        zeros = frozenset(i for i in range(n) if not (i >> j) & 1)
        if ones:
            out.append(ones)
        if zeros:
            out.append(zeros)
    return out
