"""Shared fixtures: the catalog families and independent membership oracles."""

from __future__ import annotations

from pathlib import Path

import pytest

from bfree.family import ExplicitFinite, FiniteUnion, ScaledPrimes

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def b2():
    return ExplicitFinite((2,), label="b2")


@pytest.fixture(scope="session")
def finite():
    return ExplicitFinite((6, 10, 15), label="finite-6-10-15")


@pytest.fixture(scope="session")
def squares():
    """Squares of primes: the complement of the squarefree numbers."""
    return ScaledPrimes(scale=1, exponent=2, label="squares-of-primes")


@pytest.fixture(scope="session")
def twop():
    """2p over the odd primes."""
    return ScaledPrimes(scale=2, exponent=1, residue=1, modulus=2, label="two-odd-primes")


@pytest.fixture(scope="session")
def union15():
    """{15} joined with 2p: nontrivial B_0, B* = {2, 15}."""
    return FiniteUnion(
        (
            ExplicitFinite((15,)),
            ScaledPrimes(scale=2, exponent=1, residue=1, modulus=2),
        ),
        label="union15",
    )


@pytest.fixture(scope="session")
def catalog(b2, finite, squares, twop, union15):
    return [b2, finite, squares, twop, union15]


def oracle_hit(label: str, n: int) -> bool:
    """Independent divisibility oracles, one hand-written per catalog family.

    Used to cross-check divides_member / indicator_window without sharing a
    code path with the library.
    """
    n = abs(n)
    if label == "b2":
        return n % 2 == 0
    if label == "finite-6-10-15":
        return n % 6 == 0 or n % 10 == 0 or n % 15 == 0
    if label == "squares-of-primes":
        if n == 0:
            return True
        d = 2
        while d * d <= n:
            if n % (d * d) == 0:
                return True
            d += 1
        return False
    if label == "two-odd-primes":
        # 2p | n for an odd prime p iff n is even with an odd prime factor,
        # i.e. n is even and not a power of two
        if n == 0:
            return True
        return n % 2 == 0 and (n & (n - 1)) != 0
    if label == "union15":
        return oracle_hit("two-odd-primes", n) or n % 15 == 0
    raise KeyError(label)
