"""Directed-rounding fixed-point helpers for the length bookkeeping of the
packing loop.  Lengths are integer mantissas over a global power-of-two
denominator; exp and ln are evaluated as upper bounds so that length
updates stay deterministic and monotone."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

# global fixed-point scale for length mantissas: length = mantissa / 2**LENGTH_BITS
LENGTH_BITS = 320
LENGTH_ONE = 1 << LENGTH_BITS

# working precision of exp/ln evaluations
F_BITS = 128
_F_BITS = F_BITS
_F_ONE = 1 << _F_BITS


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@lru_cache(maxsize=65536)
def exp_up_fixed(q_num: int, q_den: int) -> int:
    """Integer E with e^(q_num/q_den) <= E / 2**_F_BITS, tight to ~2^-120.

    Requires 0 <= q <= 4.  Taylor series with per-term ceil rounding and an
    explicit tail bound.
    """
    assert q_num >= 0 and q_den > 0
    assert q_num <= 4 * q_den, "exp_up_fixed argument out of supported range"
    term = _F_ONE
    total = _F_ONE
    k = 1
    while term > 0:
        term = _ceil_div(term * q_num, q_den * k)
        total += term
        k += 1
        if k > 500:
            raise AssertionError("exp series failed to converge")
        if term <= 1 and k * q_den > 2 * q_num:
            # remaining tail is dominated by a geometric series with ratio
            # q/k <= 1/2; bounded by 2 * current term + 1
            total += 2 * term + 1
            break
    return total


def exp_up(q: Fraction) -> Fraction:
    return Fraction(exp_up_fixed(q.numerator, q.denominator), _F_ONE)


@lru_cache(maxsize=4096)
def _ln_up_core(num: int, den: int) -> Fraction:
    """Upper bound on ln(num/den) for 1 <= num/den <= 2, via the atanh
    series with per-term ceil rounding."""
    z = Fraction(num - den, num + den)  # in [0, 1/3]
    zn, zd = z.numerator, z.denominator
    acc = 0  # scaled by _F_ONE
    pw_n, pw_d = zn, zd  # z^(2k+1) as a fraction
    k = 0
    while True:
        term = _ceil_div(pw_n * _F_ONE, pw_d * (2 * k + 1))
        acc += term
        if term <= 1:
            acc += 2 * term + 1  # tail: z^2 <= 1/9, geometric
            break
        pw_n *= zn * zn
        pw_d *= zd * zd
        k += 1
        if k > 300:
            raise AssertionError("ln series failed to converge")
    return Fraction(2 * acc, _F_ONE)


_LN2_UP = None


def ln2_up() -> Fraction:
    global _LN2_UP
    if _LN2_UP is None:
        _LN2_UP = _ln_up_core(2, 1)
    return _LN2_UP


def ln_up(x: Fraction) -> Fraction:
    """Upper bound on ln(x) for x >= 1."""
    x = Fraction(x)
    assert x >= 1
    j = 0
    while x > 2:
        x /= 2
        j += 1
    return _ln_up_core(x.numerator, x.denominator) + j * ln2_up()


def nth_root_floor(x: int, p: int) -> int:
    """floor(x ** (1/p)) by Newton iteration on integers."""
    if x < 0 or p <= 0:
        raise ValueError
    if x in (0, 1) or p == 1:
        return x
    r = 1 << (x.bit_length() // p + 1)
    while True:
        nr = ((p - 1) * r + x // r ** (p - 1)) // p
        if nr >= r:
            break
        r = nr
    while r ** p > x:
        r -= 1
    return r
