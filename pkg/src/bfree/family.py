"""Input families B: explicit finite sets, scaled prime powers, finite unions.

Every family kind supports exact membership, enumeration, gcd-image and
spectrum queries.  Infinite families additionally declare coprime
certificates (scale n with an infinite pairwise coprime generator c_j such
that n*c_j lies in the family); certificates are declared by the kind and
machine-audited, never discovered by search.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .arith import FACTOR_CEILING, factor, is_prime, next_prime_in_ap, primes_upto
from .errors import CertificateAuditFailure, EnumerationCeiling

SPECTRUM_CEILING = 10**12
UNION_PRIMITIVITY_DEPTH = 10**4
DEFAULT_AUDIT_DEPTH = 25


@dataclass(frozen=True)
class ExplicitFinite:
    """A finite set given by its sorted element list."""

    elements: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ValueError("empty family")
        if elems[0] < 1:
            raise ValueError("elements must be positive")
        if 1 in elems and elems != (1,):
            raise ValueError("a family containing 1 must be exactly {1}")
        for i, a in enumerate(elems):
            for b in elems[i + 1 :]:
                if b % a == 0:
                    raise ValueError(f"not primitive: {a} divides {b}")


@dataclass(frozen=True)
class ScaledPrimes:
    """The infinite family {scale * p^exponent : p prime allowed}.

    A prime is allowed when p == residue (mod modulus), gcd(p, coprime_to)=1,
    and p is not in the finite exclusion list.  Structurally primitive:
    distinct allowed primes give incomparable elements.
    """

    scale: int = 1
    exponent: int = 1
    residue: int = 0
    modulus: int = 1
    coprime_to: int = 1
    exclude: tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.scale < 1 or self.exponent < 1 or self.modulus < 1 or self.coprime_to < 1:
            raise ValueError("scale, exponent, modulus, coprime_to must be >= 1")
        if not 0 <= self.residue < self.modulus:
            raise ValueError("residue must lie in [0, modulus)")
        if self.modulus > 1 and math.gcd(self.residue, self.modulus) != 1:
            raise ValueError(
                "residue class shares a factor with the modulus: at most one prime in it"
            )
        object.__setattr__(self, "exclude", tuple(sorted(set(self.exclude))))
        for p in self.exclude:
            if not is_prime(p):
                raise ValueError(f"excluded value {p} is not prime")

    def allows(self, p: int) -> bool:
        """Does the prime predicate admit p?  (p is assumed prime.)"""
        return (
            p % self.modulus == self.residue % self.modulus
            and math.gcd(p, self.coprime_to) == 1
            and p not in self.exclude
        )

    def allowed_primes_upto(self, limit: int) -> list[int]:
        return [p for p in primes_upto(limit) if self.allows(p)]

    def nth_allowed_primes(self, count: int) -> list[int]:
        """The first `count` allowed primes, ascending."""
        out: list[int] = []
        p = 1
        avoid = self.coprime_to * math.prod(self.exclude) if self.exclude else self.coprime_to
        while len(out) < count:
            p = next_prime_in_ap(self.residue, self.modulus, p, avoid=avoid)
            out.append(p)
        return out


@dataclass(frozen=True)
class FiniteUnion:
    """Union of branch families; cross-branch primitivity checked to depth."""

    branches: tuple["BFamily", ...]
    label: str = ""
    primitivity_depth: int = field(default=UNION_PRIMITIVITY_DEPTH, compare=False)

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError("a union needs at least two branches")
        object.__setattr__(self, "branches", tuple(self.branches))
        depth = self.primitivity_depth
        listed = [enumerate_upto(br, depth) for br in self.branches]
        for i in range(len(listed)):
            for j in range(len(listed)):
                if i == j:
                    continue
                small = set(listed[i])
                for b in listed[j]:
                    for a in small:
                        if a != b and b % a == 0:
                            raise ValueError(
                                f"union not primitive to depth {depth}: {a} divides {b}"
                            )
                        if a == b:
                            raise ValueError(f"branches overlap at {b}")


BFamily = Union[ExplicitFinite, ScaledPrimes, FiniteUnion]


@dataclass(frozen=True)
class CoprimeCertificate:
    """Scale n with a generator of pairwise coprime c_j > 1, n*c_j in B.

    The generator is structural: c_j = p^exponent over the allowed primes of
    the declaring ScaledPrimes branch, ascending.  `audit_depth` terms are
    machine-verified by :func:`audit_certificate`.
    """

    scale: int
    exponent: int
    residue: int
    modulus: int
    coprime_to: int
    exclude: tuple[int, ...]
    audit_depth: int = DEFAULT_AUDIT_DEPTH

    def _branch(self) -> ScaledPrimes:
        return ScaledPrimes(
            scale=self.scale,
            exponent=self.exponent,
            residue=self.residue,
            modulus=self.modulus,
            coprime_to=self.coprime_to,
            exclude=self.exclude,
        )

    def terms(self, count: int) -> list[int]:
        """First `count` generator elements c_j = p^exponent."""
        return [p**self.exponent for p in self._branch().nth_allowed_primes(count)]

    def term_coprime_to(self, avoid: int, lower: int = 1) -> int:
        """Least generator element p^exponent with p coprime to `avoid`, p > lower."""
        br = self._branch()
        total_avoid = avoid * br.coprime_to
        for q in br.exclude:
            total_avoid *= q
        p = next_prime_in_ap(br.residue, br.modulus, lower, avoid=total_avoid)
        return p**br.exponent


def audit_certificate(B: BFamily, cert: CoprimeCertificate) -> None:
    """Verify the first audit_depth terms: >1, pairwise coprime, members of B."""
    terms = cert.terms(cert.audit_depth)
    for idx, c in enumerate(terms):
        if c <= 1:
            raise CertificateAuditFailure(cert.scale, idx, f"term {c} <= 1")
        if not contains(B, cert.scale * c):
            raise CertificateAuditFailure(
                cert.scale, idx, f"{cert.scale}*{c} not a member of the family"
            )
        for jdx in range(idx):
            if math.gcd(terms[jdx], c) != 1:
                raise CertificateAuditFailure(
                    cert.scale, idx, f"terms {terms[jdx]} and {c} share a factor"
                )


# ---------------------------------------------------------------------------
# queries


def enumerate_upto(B: BFamily, bound: int) -> list[int]:
    """Sorted, duplicate-free list of the elements of B in [1, bound]."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if isinstance(B, ExplicitFinite):
        return [b for b in B.elements if b <= bound]
    if isinstance(B, ScaledPrimes):
        if bound < B.scale * 2**B.exponent:
            return []
        # scale * p^e <= bound  <=>  p <= (bound/scale)^(1/e)
        plimit = _iroot(bound // B.scale, B.exponent)
        return [B.scale * p**B.exponent for p in B.allowed_primes_upto(plimit)]
    out: set[int] = set()
    for br in B.branches:
        out.update(enumerate_upto(br, bound))
    return sorted(out)


def _iroot(n: int, k: int) -> int:
    """Largest r with r^k <= n (n >= 0, k >= 1)."""
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1 or n < 2:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def contains(B: BFamily, m: int) -> bool:
    """Exact membership m in B."""
    if m < 1:
        return False
    if isinstance(B, ExplicitFinite):
        return m in B.elements
    if isinstance(B, ScaledPrimes):
        if m % B.scale:
            return False
        rest = m // B.scale
        p = _iroot(rest, B.exponent)
        return p**B.exponent == rest and p > 1 and is_prime(p) and B.allows(p)
    return any(contains(br, m) for br in B.branches)


def divides_member(B: BFamily, n: int, ceiling: int = FACTOR_CEILING) -> bool:
    """True iff some b in B divides n.  n = 0 is divisible by everything."""
    if n == 0:
        return True
    n = abs(n)
    if isinstance(B, ExplicitFinite):
        return any(n % b == 0 for b in B.elements)
    if isinstance(B, ScaledPrimes):
        if n % B.scale:
            return False
        fac = factor(n, ceiling)
        return any(
            B.allows(q) and n % (B.scale * q**B.exponent) == 0
            for q in fac.primes()
        )
    return any(divides_member(br, n, ceiling) for br in B.branches)


def least_divisor_member(B: BFamily, n: int, ceiling: int = FACTOR_CEILING) -> int | None:
    """Smallest b in B with b | n, or None.  n = 0 gives the least element."""
    if n == 0:
        return min_element(B)
    n = abs(n)
    if isinstance(B, ExplicitFinite):
        hits = [b for b in B.elements if n % b == 0]
        return min(hits) if hits else None
    if isinstance(B, ScaledPrimes):
        if n % B.scale:
            return None
        hits = [
            B.scale * q**B.exponent
            for q in factor(n, ceiling).primes()
            if B.allows(q) and n % (B.scale * q**B.exponent) == 0
        ]
        return min(hits) if hits else None
    hits = [least_divisor_member(br, n, ceiling) for br in B.branches]
    hits = [h for h in hits if h is not None]
    return min(hits) if hits else None


def min_element(B: BFamily) -> int:
    if isinstance(B, ExplicitFinite):
        return B.elements[0]
    if isinstance(B, ScaledPrimes):
        return B.scale * B.nth_allowed_primes(1)[0] ** B.exponent
    return min(min_element(br) for br in B.branches)


def is_finite(B: BFamily) -> bool:
    if isinstance(B, ExplicitFinite):
        return True
    if isinstance(B, ScaledPrimes):
        return False
    return all(is_finite(br) for br in B.branches)


def spectrum_bounded(B: BFamily, n: int, ceiling: int = SPECTRUM_CEILING) -> list[int]:
    """The finite set of members all of whose prime factors are <= n.

    A primitive set with finite spectrum is finite, so the result is always
    a complete list.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(B, ExplicitFinite):
        return [b for b in B.elements if b == 1 or factor(b).max_prime() <= n]
    if isinstance(B, ScaledPrimes):
        if B.scale > 1 and factor(B.scale).max_prime() > n:
            return []
        if B.scale * n**B.exponent > ceiling:
            raise EnumerationCeiling(
                f"structural bound {B.scale}*{n}^{B.exponent} exceeds ceiling {ceiling}"
            )
        return [B.scale * p**B.exponent for p in B.allowed_primes_upto(n)]
    out: set[int] = set()
    for br in B.branches:
        out.update(spectrum_bounded(br, n, ceiling))
    return sorted(out)


def gcd_image(B: BFamily, L: int, L_primes: tuple[int, ...] | None = None) -> set[int]:
    """The exact image {gcd(b, L) : b in B} for L >= 1.

    Pass `L_primes` (the primes dividing L) when L itself is too large to
    factor, e.g. an lcm along a filtration known through its members.
    """
    return set(gcd_image_witnesses(B, L, L_primes).keys())


def gcd_image_witnesses(
    B: BFamily, L: int, L_primes: tuple[int, ...] | None = None
) -> dict[int, int]:
    """gcd-image values mapped to one witnessing member each.

    For a ScaledPrimes family the image is finite by case analysis: one value
    per allowed prime dividing L, plus the generic value gcd(scale, L)
    realized by any allowed prime not dividing L (such primes always exist).
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if isinstance(B, ExplicitFinite):
        out: dict[int, int] = {}
        for b in B.elements:
            out.setdefault(math.gcd(b, L), b)
        return out
    if isinstance(B, ScaledPrimes):
        out = {}
        if L_primes is None:
            L_primes = factor(L).primes()
        for q in L_primes:
            if B.allows(q):
                b = B.scale * q**B.exponent
                out.setdefault(math.gcd(b, L), b)
        out.setdefault(math.gcd(B.scale, L), _generic_witness(B, L, L_primes))
        return out
    out = {}
    for br in B.branches:
        for value, witness in gcd_image_witnesses(br, L, L_primes).items():
            out.setdefault(value, witness)
    return out


def _generic_witness(B: ScaledPrimes, L: int, L_primes: tuple[int, ...] | None = None) -> int:
    """A member scale*p^e with p not dividing L."""
    avoid = (math.prod(L_primes) if L_primes is not None else L) * B.coprime_to
    for q in B.exclude:
        avoid *= q
    p = next_prime_in_ap(B.residue, B.modulus, 1, avoid=avoid)
    return B.scale * p**B.exponent


def coprime_certificates(
    B: BFamily, audit_depth: int = DEFAULT_AUDIT_DEPTH, audit: bool = True
) -> list[CoprimeCertificate]:
    """All certificates the family kind declares, one per scale, audited.

    ExplicitFinite declares none (a finite set has no infinite subset);
    ScaledPrimes declares its scale; a union concatenates branch certificates
    and merges duplicates by scale.
    """
    certs: dict[int, CoprimeCertificate] = {}
    for branch in _scaled_branches(B):
        if branch.scale not in certs:
            certs[branch.scale] = CoprimeCertificate(
                scale=branch.scale,
                exponent=branch.exponent,
                residue=branch.residue,
                modulus=branch.modulus,
                coprime_to=branch.coprime_to,
                exclude=branch.exclude,
                audit_depth=audit_depth,
            )
    result = [certs[s] for s in sorted(certs)]
    if audit:
        for cert in result:
            audit_certificate(B, cert)
    return result


def _scaled_branches(B: BFamily) -> list[ScaledPrimes]:
    if isinstance(B, ExplicitFinite):
        return []
    if isinstance(B, ScaledPrimes):
        return [B]
    out: list[ScaledPrimes] = []
    for br in B.branches:
        out.extend(_scaled_branches(br))
    return out


def members_dividing(B: BFamily, lcm_fac: dict[int, int]) -> list[int]:
    """All members of B dividing the number with prime factorization lcm_fac.

    Structural, so the number itself (typically an lcm along a filtration)
    may be far beyond the factorization ceiling.
    """

    def val(n: int, fac: dict[int, int]) -> bool:
        for p, e in factor(n).factors:
            if fac.get(p, 0) < e:
                return False
        return True

    if isinstance(B, ExplicitFinite):
        return [b for b in B.elements if val(b, lcm_fac)]
    if isinstance(B, ScaledPrimes):
        if not val(B.scale, lcm_fac):
            return []
        scale_fac = dict(factor(B.scale).factors)
        out = []
        for q, avail in lcm_fac.items():
            if B.allows(q) and is_prime(q) and scale_fac.get(q, 0) + B.exponent <= avail:
                out.append(B.scale * q**B.exponent)
        return sorted(out)
    merged: set[int] = set()
    for br in B.branches:
        merged.update(members_dividing(br, lcm_fac))
    return sorted(merged)


def discover_certificates(
    B: BFamily, max_scale: int = 20, depth: int = 10, bound: int = 10**5
) -> list[tuple[int, list[int]]]:
    """Diagnostic search for pairwise coprime element families sharing a scale.

    Greedy over the enumeration of B up to `bound`; returns (scale, c-list)
    pairs reaching `depth`.  Evidence only: never feeds the structural
    pipeline, which uses declared certificates exclusively.
    """
    elems = enumerate_upto(B, bound)
    found = []
    for n in range(1, max_scale + 1):
        chosen: list[int] = []
        for b in elems:
            if b % n:
                continue
            c = b // n
            if c <= 1:
                continue
            if all(math.gcd(c, c0) == 1 for c0 in chosen):
                chosen.append(c)
                if len(chosen) >= depth:
                    break
        if len(chosen) >= depth:
            found.append((n, chosen))
    return found


# ---------------------------------------------------------------------------
# serialization (family spec files: TOML in, JSON in/out)


def family_to_dict(B: BFamily) -> dict:
    if isinstance(B, ExplicitFinite):
        return {"kind": "explicit", "elements": list(B.elements), "label": B.label}
    if isinstance(B, ScaledPrimes):
        return {
            "kind": "scaled_primes",
            "scale": B.scale,
            "exponent": B.exponent,
            "residue": B.residue,
            "modulus": B.modulus,
            "coprime_to": B.coprime_to,
            "exclude": list(B.exclude),
            "label": B.label,
        }
    return {
        "kind": "union",
        "branches": [family_to_dict(br) for br in B.branches],
        "label": B.label,
    }


def family_from_dict(data: dict) -> BFamily:
    kind = data.get("kind")
    label = data.get("label", "")
    if kind == "explicit":
        return ExplicitFinite(tuple(data["elements"]), label=label)
    if kind == "scaled_primes":
        return ScaledPrimes(
            scale=data.get("scale", 1),
            exponent=data.get("exponent", 1),
            residue=data.get("residue", 0),
            modulus=data.get("modulus", 1),
            coprime_to=data.get("coprime_to", 1),
            exclude=tuple(data.get("exclude", ())),
            label=label,
        )
    if kind == "union":
        return FiniteUnion(
            tuple(family_from_dict(br) for br in data["branches"]), label=label
        )
    raise ValueError(f"unknown family kind: {kind!r}")


def dumps_family(B: BFamily) -> str:
    return json.dumps(family_to_dict(B), indent=2, sort_keys=True)


def load_family(path: str | Path) -> BFamily:
    """Load a family spec file; .toml parsed as TOML, everything else as JSON."""
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # Python 3.11+
        except ImportError:
            import tomli as tomllib
        data = tomllib.loads(raw.decode())
    else:
        data = json.loads(raw.decode())
    return family_from_dict(data)


def family_hash(B: BFamily) -> str:
    """Stable short hash of the canonical serialization, for report headers."""
    import hashlib

    return hashlib.sha256(dumps_family(B).encode()).hexdigest()[:16]
