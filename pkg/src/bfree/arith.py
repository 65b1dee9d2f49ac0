"""Exact integer arithmetic: CRT solving, deterministic primality,
desk-scale factorization, and prime search in arithmetic progressions.

All functions are pure and operate on unbounded Python integers; hot paths
assume machine-word size behind explicit ceiling checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CeilingExceeded, Incompatible, SearchExhausted

FACTOR_CEILING = 2**63
PRIME_SEARCH_CEILING = 10**8

# Deterministic Miller-Rabin witness set: the primes up to 37 certify every
# n < 3317044064679887385961981 (~3.3e24, beyond 2^81), per Sorenson-Webster.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PRIMALITY_CEILING = 3317044064679887385961981


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, by a sieve of Eratosthenes."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, flag in enumerate(sieve) if flag]


_SMALL_PRIMES = primes_upto(1000)


def is_prime(n: int) -> bool:
    """Deterministic primality below ~3.3e24 (Miller-Rabin, fixed witnesses)."""
    if n >= _PRIMALITY_CEILING:
        raise CeilingExceeded(f"primality only deterministic below {_PRIMALITY_CEILING}, got {n}")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def lcm_all(values: Iterable[int]) -> int:
    """lcm over an iterable; 1 for the empty iterable."""
    result = 1
    for v in values:
        result = math.lcm(result, v)
    return result


def primitivize(values: Iterable[int]) -> tuple[int, ...]:
    """Sorted, duplicate-free subset with no element dividing another.

    Keeps the divisibility-minimal elements; the generated set of multiples
    is unchanged.
    """
    kept: list[int] = []
    for v in sorted(set(values)):
        if v < 1:
            raise ValueError(f"positive integers required, got {v}")
        if not any(v % d == 0 for d in kept):
            kept.append(v)
    return tuple(kept)


@dataclass(frozen=True)
class Congruence:
    """x == residue (mod modulus); residue stored normalized into [0, modulus)."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds_for(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def __str__(self):
        return f"{self.residue} mod {self.modulus}"


def _merge(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    # Merge two compatible congruences into one mod lcm(m1, m2).
    g, s, _ = _xgcd(m1, m2)
    diff = r2 - r1
    assert diff % g == 0
    m = m1 // g * m2
    r = (r1 + (diff // g) * s % (m2 // g) * m1) % m
    return r, m


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def crt_solve(congruences: Sequence[Congruence]) -> Congruence:
    """Solve a simultaneous congruence system over possibly non-coprime moduli.

    Returns the unique solution mod lcm of the moduli.  Raises
    :class:`Incompatible` naming a violating pair when two constraints clash
    (residues disagree mod the pairwise gcd); pairwise compatibility is
    sufficient for global solvability.
    """
    if not congruences:
        raise ValueError("empty congruence system")
    n = len(congruences)
    for i in range(n):
        for j in range(i + 1, n):
            ci, cj = congruences[i], congruences[j]
            g = math.gcd(ci.modulus, cj.modulus)
            if (ci.residue - cj.residue) % g != 0:
                raise Incompatible((ci, cj))
    r, m = congruences[0].residue, congruences[0].modulus
    for c in congruences[1:]:
        r, m = _merge(r, m, c.residue, c.modulus)
    return Congruence(r, m)


@dataclass(frozen=True)
class Factorization:
    """value = prod(p^e); primes strictly increasing, each certified prime."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def max_prime(self) -> int:
        """Largest prime factor; 0 for value 1."""
        return self.factors[-1][0] if self.factors else 0

    def exponent_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def divisors(self) -> list[int]:
        """All positive divisors, sorted."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def _pollard_rho(n: int) -> int:
    # Brent's cycle variant with a deterministic parameter sweep,
    # so repeated runs factor identically.
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x, y, d = 2, 2, 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho parameter sweep exhausted for {n}")  # pragma: no cover


def factor(n: int, ceiling: int = FACTOR_CEILING) -> Factorization:
    """Complete prime factorization of n >= 1 below the ceiling."""
    if n < 1:
        raise ValueError(f"factor() needs n >= 1, got {n}")
    if n > ceiling:
        raise CeilingExceeded(f"{n} exceeds factorization ceiling {ceiling}")
    counts: dict[int, int] = {}
    rest = n
    for p in _SMALL_PRIMES:
        if p * p > rest:
            break
        while rest % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rest //= p
    stack = [rest] if rest > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return Factorization(n, tuple(sorted(counts.items())))


def lcm_factorization(values: Iterable[int], ceiling: int = FACTOR_CEILING) -> dict[int, int]:
    """Prime factorization of lcm(values) as {prime: exponent}.

    Factors each value individually, so the lcm itself may exceed the
    factorization ceiling.
    """
    out: dict[int, int] = {}
    for v in values:
        for p, e in factor(v, ceiling).factors:
            if out.get(p, 0) < e:
                out[p] = e
    return out


def divisors_from_factorization(fac: dict[int, int]) -> list[int]:
    """All divisors of the number prod(p^e), sorted."""
    divs = [1]
    for p, e in sorted(fac.items()):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def next_prime_in_ap(
    a: int,
    m: int,
    lower: int,
    avoid: int = 1,
    ceiling: int = PRIME_SEARCH_CEILING,
) -> int:
    """Smallest prime p == a (mod m) with p > lower and gcd(p, avoid) = 1.

    Dirichlet guarantees existence when gcd(a, m) = 1 but gives no usable
    bound, so the scan stops at `ceiling` and raises SearchExhausted.
    """
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if math.gcd(a, m) != 1:
        raise ValueError(f"gcd({a}, {m}) != 1: the progression holds at most one prime")
    if avoid < 1:
        raise ValueError(f"avoid must be >= 1, got {avoid}")
    x = max(lower + 1, 2)
    x += (a - x) % m
    while x <= ceiling:
        if x > lower and math.gcd(x, avoid) == 1 and is_prime(x):
            return x
        x += m
    raise SearchExhausted(
        f"no prime == {a} (mod {m}) above {lower} coprime to {avoid} below {ceiling}"
    )
