"""Finite sets of multiples as periodic subsets of the integers.

Densities are exact rationals throughout; floats appear only in reports.
A PeriodicSet stores its primitive divisor list, never a residue bitmap:
periods grow super-exponentially along filtrations, so bitmaps are only
materialized below the sieve limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from . import family as fam
from .arith import lcm_all, primitivize
from .errors import TermExplosion

IE_WIDTH_LIMIT = 24
SIEVE_LIMIT = 10**7


@dataclass(frozen=True)
class PeriodicSet:
    """The union of arithmetic progressions a*Z over a primitive divisor list."""

    divisors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "divisors", primitivize(self.divisors))

    @property
    def period(self) -> int:
        return lcm_all(self.divisors)

    def contains(self, n: int) -> bool:
        return any(n % a == 0 for a in self.divisors)

    def is_everything(self) -> bool:
        return bool(self.divisors) and self.divisors[0] == 1

    def __str__(self):
        return "M" + str(set(self.divisors) or "{}")


@dataclass(frozen=True)
class Block:
    """A finite 0/1 word placed on the integer interval [offset, offset+len)."""

    offset: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0/1")

    def __len__(self):
        return len(self.bits)

    def positions(self) -> range:
        return range(self.offset, self.offset + len(self.bits))

    def value_at(self, i: int) -> int:
        if i not in self.positions():
            raise IndexError(f"position {i} outside block window")
        return self.bits[i - self.offset]

    def dominates(self, other: "Block") -> bool:
        """Pointwise >=, on identical windows."""
        if self.offset != other.offset or len(self) != len(other):
            raise ValueError("blocks must share a window")
        return all(a >= b for a, b in zip(self.bits, other.bits))

    # serialization: "offset;bit*run,bit*run,..." run-length encoding
    def to_rle(self) -> str:
        runs = []
        i = 0
        while i < len(self.bits):
            j = i
            while j < len(self.bits) and self.bits[j] == self.bits[i]:
                j += 1
            runs.append(f"{self.bits[i]}*{j - i}")
            i = j
        return f"{self.offset};" + ",".join(runs)

    @classmethod
    def from_rle(cls, text: str) -> "Block":
        head, _, body = text.partition(";")
        bits: list[int] = []
        if body:
            for run in body.split(","):
                bit, _, count = run.partition("*")
                bits.extend([int(bit)] * int(count))
        return cls(int(head), tuple(bits))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["index", "bit"])
        for i, b in zip(self.positions(), self.bits):
            writer.writerow([i, b])
        return buf.getvalue()


@lru_cache(maxsize=65536)
def _union_density(divisors: tuple[int, ...]) -> Fraction:
    # divisors are primitive and sorted; peel the largest element a:
    #   d(M union aZ) = d(M) + (1 - d(M'))/a,  M' = {r/gcd(r,a)} primitivized.
    # This expands to the inclusion-exclusion sum with absorbed subsets pruned.
    if not divisors:
        return Fraction(0)
    if divisors[0] == 1:
        return Fraction(1)
    a = divisors[-1]
    rest = divisors[:-1]
    reduced = primitivize(r // math.gcd(r, a) for r in rest)
    return _union_density(rest) + (1 - _union_density(reduced)) / a


def _sieve_count(divisors: tuple[int, ...], period: int) -> int:
    hit = bytearray(period)
    for a in divisors:
        hit[::a] = bytearray([1]) * len(hit[::a])
    return sum(hit)


def density(
    M: PeriodicSet,
    ie_width_limit: int = IE_WIDTH_LIMIT,
    sieve_limit: int = SIEVE_LIMIT,
) -> Fraction:
    """Exact natural density of M, equal to |M / periodZ| / period."""
    if not M.divisors:
        return Fraction(0)
    if len(M.divisors) <= ie_width_limit:
        return _union_density(M.divisors)
    if M.period <= sieve_limit:
        return Fraction(_sieve_count(M.divisors, M.period), M.period)
    raise TermExplosion(
        f"{len(M.divisors)} divisors with period {M.period}: beyond width and sieve limits"
    )


def difference_density(
    M: PeriodicSet,
    M2: PeriodicSet,
    ie_width_limit: int = IE_WIDTH_LIMIT,
    sieve_limit: int = SIEVE_LIMIT,
) -> Fraction:
    """Exact density of M minus M2 (no containment assumed): d(M) - d(M and M2)."""
    inter = PeriodicSet(
        tuple(math.lcm(a, b) for a in M.divisors for b in M2.divisors)
    )
    return density(M, ie_width_limit, sieve_limit) - density(
        inter, ie_width_limit, sieve_limit
    )


def indicator_window(B: fam.BFamily, lo: int, hi: int) -> Block:
    """The indicator of the B-free integers on [lo, hi] (the sequence eta).

    Exact: bit i-lo is 1 iff no member of B divides i.  Wide windows use a
    range sieve over the members up to max|i| (a divisor of n != 0 is <= |n|);
    narrow ones test positions directly.
    """
    if lo > hi:
        raise ValueError("lo must be <= hi")
    width = hi - lo + 1
    if width <= 2048:
        bits = tuple(0 if fam.divides_member(B, i) else 1 for i in range(lo, hi + 1))
        return Block(lo, bits)
    bound = max(abs(lo), abs(hi), 1)
    bits_arr = bytearray([1]) * width
    for b in fam.enumerate_upto(B, bound):
        first = lo + (-lo) % b
        for i in range(first, hi + 1, b):
            bits_arr[i - lo] = 0
    if lo <= 0 <= hi:
        bits_arr[-lo] = 0  # 0 is a multiple of everything
    return Block(lo, tuple(bits_arr))


def periodic_window(M: PeriodicSet, lo: int, hi: int) -> Block:
    """Indicator of the complement of M (the A-free integers) on [lo, hi]."""
    if lo > hi:
        raise ValueError("lo must be <= hi")
    bits = tuple(0 if M.contains(i) else 1 for i in range(lo, hi + 1))
    return Block(lo, bits)
