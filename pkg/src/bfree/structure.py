"""The structural pipeline: gcd-image sets A_S, the scale set A_inf, the
derived family B* and its free set E, plus density-style diagnostics
(proximality, tautness at a truncation, light-tail bounds, Davenport-Erdos
approximants).

A_inf is computed from the certificates the family kind declares, never from
its raw limit definition (a Pi-2 statement); the raw definition is instead
spot-checked, see :func:`spot_check_a_infinity`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .window import RegularityVerdict

from . import family as fam
from .arith import factor, lcm_all, lcm_factorization, primitivize
from .errors import CertificateMissing
from .periodic import SIEVE_LIMIT, PeriodicSet, density

STANDARD_THRESHOLDS = (10, 30, 100, 300, 1000)


@dataclass(frozen=True)
class Filtration:
    """A strictly increasing chain of finite subsets of the family."""

    chain: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        chain = tuple(tuple(sorted(set(s))) for s in self.chain)
        object.__setattr__(self, "chain", chain)
        if not chain:
            raise ValueError("empty filtration")
        for s in chain:
            if not s:
                raise ValueError("filtration sets must be nonempty")
        for a, b in zip(chain, chain[1:]):
            if not set(a) < set(b):
                raise ValueError(f"chain not strictly increasing: {a} then {b}")

    def __iter__(self):
        return iter(self.chain)

    def __len__(self):
        return len(self.chain)


def filtration_for(B: fam.BFamily, chain: Sequence[Sequence[int]]) -> Filtration:
    """Build a filtration, verifying every element is a member of B."""
    for s in chain:
        for b in s:
            if not fam.contains(B, b):
                raise ValueError(f"{b} is not a member of the family")
    return Filtration(tuple(tuple(s) for s in chain))


def standard_filtration(
    B: fam.BFamily,
    thresholds: Sequence[int] = STANDARD_THRESHOLDS,
    lcm_cap: int | None = SIEVE_LIMIT,
) -> Filtration:
    """Default chain S_j = (members <= threshold_j), capped at the sieve limit."""
    chain: list[tuple[int, ...]] = []
    for t in thresholds:
        s = tuple(fam.enumerate_upto(B, t))
        if not s or (chain and s == chain[-1]):
            continue
        if lcm_cap is not None and lcm_all(s) > lcm_cap:
            break
        chain.append(s)
    if not chain:
        raise ValueError("no nonempty filtration set below the thresholds")
    return Filtration(tuple(chain))


# ---------------------------------------------------------------------------
# A_S / A_inf / B* / E


def a_s(B: fam.BFamily, S: Sequence[int]) -> tuple[tuple[int, ...], PeriodicSet]:
    """The primitivized gcd-image A_S = {gcd(b, lcm(S)) : b in B} and its
    set of multiples."""
    S = tuple(sorted(set(S)))
    if not S:
        raise ValueError("S must be nonempty")
    for b in S:
        if not fam.contains(B, b):
            raise ValueError(f"{b} is not a member of the family")
    return _a_s_cached(B, S)


@lru_cache(maxsize=4096)
def _a_s_cached(B: fam.BFamily, S: tuple[int, ...]) -> tuple[tuple[int, ...], PeriodicSet]:
    # lcm(S) is known through its members, so its prime support comes from
    # factoring each member; the lcm itself may exceed the factor ceiling
    lf = lcm_factorization(S)
    L = math.prod(p**e for p, e in lf.items())
    image = fam.gcd_image(B, L, tuple(sorted(lf)))
    prim = primitivize(image)
    return prim, PeriodicSet(prim)


@lru_cache(maxsize=None)
def a_infinity(B: fam.BFamily) -> tuple[fam.CoprimeCertificate, ...]:
    """The scales that admit an audited coprime certificate.

    For the supported family kinds this is exactly the set of scales n with
    an infinite pairwise coprime C such that n*C lies in B.
    """
    return tuple(fam.coprime_certificates(B))


def a_infinity_scales(B: fam.BFamily) -> tuple[int, ...]:
    return tuple(c.scale for c in a_infinity(B))


def proximal(B: fam.BFamily) -> bool:
    """True iff B contains an infinite pairwise coprime subset (scale 1)."""
    return 1 in a_infinity_scales(B)


def _remove_multiples(B: fam.BFamily, scales: tuple[int, ...]) -> fam.BFamily | None:
    # B minus the multiples of the given scales, staying inside the catalog.
    if isinstance(B, fam.ExplicitFinite):
        kept = tuple(
            b for b in B.elements if not any(b % a == 0 for a in scales)
        )
        return fam.ExplicitFinite(kept, label=B.label) if kept else None
    if isinstance(B, fam.ScaledPrimes):
        extra_excludes: set[int] = set()
        for a in scales:
            rest = a // math.gcd(a, B.scale)
            if rest == 1:
                return None  # a divides every member
            # a | scale*p^e iff rest | p^e iff rest = q^k with k <= e and p = q
            rf = factor(rest).factors
            if len(rf) == 1:
                q, k = rf[0]
                if k <= B.exponent and B.allows(q):
                    extra_excludes.add(q)
        if not extra_excludes:
            return B
        return fam.ScaledPrimes(
            scale=B.scale,
            exponent=B.exponent,
            residue=B.residue,
            modulus=B.modulus,
            coprime_to=B.coprime_to,
            exclude=tuple(sorted(set(B.exclude) | extra_excludes)),
            label=B.label,
        )
    pieces = [_remove_multiples(br, scales) for br in B.branches]
    pieces = [p for p in pieces if p is not None]
    if not pieces:
        return None
    if len(pieces) == 1:
        return pieces[0]
    return fam.FiniteUnion(tuple(pieces), label=B.label)


def b_zero(B: fam.BFamily) -> fam.BFamily | None:
    """B_0 = B minus the multiples of A_inf; None when empty."""
    scales = a_infinity_scales(B)
    if not scales:
        return B
    return _remove_multiples(B, scales)


@lru_cache(maxsize=None)
def b_star(B: fam.BFamily) -> fam.BFamily:
    """B* = B_0 union prim(A_inf); primitive, with F_{B*} = E."""
    scales = a_infinity_scales(B)
    if not scales:
        return B
    prim_scales = primitivize(scales)
    zero = b_zero(B)
    star_label = "B* of " + (getattr(B, "label", "") or "family")
    prim_piece = fam.ExplicitFinite(prim_scales, label=star_label)
    if zero is None:
        return prim_piece
    if isinstance(zero, fam.ExplicitFinite):
        return fam.ExplicitFinite(zero.elements + prim_scales, label=star_label)
    return fam.FiniteUnion((prim_piece, zero), label=star_label)


def e_member(B: fam.BFamily, n: int) -> bool:
    """Membership in E = F_{B*}, the free set of the derived family."""
    return not fam.divides_member(b_star(B), n)


def m_bstar_restricted(B: fam.BFamily, S: Sequence[int]) -> PeriodicSet:
    """The periodic set generated by the members of B* dividing lcm(S)."""
    S = tuple(sorted(set(S)))
    for b in S:
        if not fam.contains(B, b):
            raise ValueError(f"{b} is not a member of the family")
    return _m_bstar_restricted_cached(B, S)


@lru_cache(maxsize=4096)
def _m_bstar_restricted_cached(B: fam.BFamily, S: tuple[int, ...]) -> PeriodicSet:
    lf = lcm_factorization(S)
    return PeriodicSet(tuple(fam.members_dividing(b_star(B), lf)))


def spot_check_a_infinity(
    B: fam.BFamily, scale: int, S: Sequence[int]
) -> tuple[int, ...]:
    """Exhibit S' containing S with scale in A_{S'} minus S'.

    This is the constructive content of the limit definition of A_inf: pick a
    certificate element c coprime to lcm(S u {scale*c0}) and verify
    gcd(lcm(S'), scale*c) recovers the scale.  Returns the witnessing S'.
    """
    certs = {c.scale: c for c in a_infinity(B)}
    if scale not in certs:
        raise CertificateMissing(f"no declared certificate at scale {scale}")
    cert = certs[scale]
    c0 = cert.terms(1)[0]
    s_prime = tuple(sorted(set(S) | {scale * c0}))
    L = lcm_all(s_prime)
    c = cert.term_coprime_to(L)
    b = scale * c
    if math.gcd(L, b) != scale:
        raise AssertionError("certificate element does not recover the scale")
    if b in s_prime or scale in s_prime:
        raise AssertionError("scale not outside S'")
    return s_prime


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class TautVerdict:
    truncation: int
    is_taut: bool
    violator: int | None
    exact: bool  # True when B is finite and the truncation covers it


def taut_to_depth(B: fam.BFamily, K: int) -> TautVerdict:
    """Check d(M_{B_K minus {b}}) < d(M_{B_K}) for the truncation B_K.

    Exact periodic densities; for finite B with K >= max(B) the logarithmic
    density agrees with the periodic one, so the verdict is exact rather than
    "at truncation K".
    """
    b_k = tuple(fam.enumerate_upto(B, K))
    if not b_k:
        raise ValueError(f"no members below {K}")
    full = density(PeriodicSet(b_k))
    for b in b_k:
        rest = tuple(x for x in b_k if x != b)
        if density(PeriodicSet(rest)) >= full:
            return TautVerdict(K, False, b, fam.is_finite(B) and _covers(B, K))
    return TautVerdict(K, True, None, fam.is_finite(B) and _covers(B, K))


def _covers(B: fam.BFamily, K: int) -> bool:
    if isinstance(B, fam.ExplicitFinite):
        return K >= B.elements[-1]
    if isinstance(B, fam.FiniteUnion):
        return all(_covers(br, K) for br in B.branches)
    return False


@dataclass(frozen=True)
class LightTailsBound:
    """Harmonic upper bound on the upper density of {b in B : b > cutoff}.

    enumerated_sum covers members in (cutoff, enumerated_to]; analytic_tail
    bounds the rest via a p-series comparison when the kind admits one.
    A small total certifies light-tails consistency; `conclusive` is False
    when the harmonic tail diverges (exponent-1 rule families), in which case
    only the partial sum is reported.
    """

    cutoff: int
    enumerated_to: int
    enumerated_sum: Fraction
    analytic_tail: Fraction | None
    conclusive: bool

    @property
    def bound(self) -> Fraction | None:
        if not self.conclusive:
            return None
        return self.enumerated_sum + (self.analytic_tail or Fraction(0))


def light_tails_bound(
    B: fam.BFamily, K: int, enumerate_to: int | None = None
) -> LightTailsBound:
    enumerate_to = max(enumerate_to or 10 * K, K)
    tail = [b for b in fam.enumerate_upto(B, enumerate_to) if b > K]
    partial = sum((Fraction(1, b) for b in tail), Fraction(0))
    analytic, conclusive = _analytic_tail(B, enumerate_to)
    return LightTailsBound(K, enumerate_to, partial, analytic, conclusive)


def _analytic_tail(B: fam.BFamily, beyond: int) -> tuple[Fraction | None, bool]:
    if isinstance(B, fam.ExplicitFinite):
        heavy = [b for b in B.elements if b > beyond]
        return sum((Fraction(1, b) for b in heavy), Fraction(0)), True
    if isinstance(B, fam.ScaledPrimes):
        if B.exponent == 1:
            return None, False
        # members n*p^e > beyond: sum 1/(n p^e) < (1/n) * x^(1-e)/(e-1),
        # x the largest integer with n*x^e <= beyond
        x = max(fam._iroot(beyond // B.scale, B.exponent), 1)
        return Fraction(1, B.scale * (B.exponent - 1) * x ** (B.exponent - 1)), True
    parts = [_analytic_tail(br, beyond) for br in B.branches]
    if all(ok for _, ok in parts):
        return sum((t for t, _ in parts), Fraction(0)), True
    return None, False


def davenport_erdos_delta(
    B: fam.BFamily, filtration: Filtration
) -> tuple[Fraction, ...]:
    """Densities of the truncation multiples M_{S_j}: a nondecreasing sequence
    whose supremum approaches the logarithmic density of M_B from below."""
    for s in filtration:
        for b in s:
            if not fam.contains(B, b):
                raise ValueError(f"{b} is not a member of the family")
    terms = tuple(density(PeriodicSet(s)) for s in filtration)
    for a, b in zip(terms, terms[1:]):
        if b < a:
            raise AssertionError("truncation densities must be nondecreasing")
    return terms


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class StructureReport:
    family: dict
    a_s_chain: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (S_j, A_Sj)
    a_inf: tuple[dict, ...]
    b_zero: dict | None
    b_star: dict
    e_description: str
    proximal: bool
    taut: TautVerdict
    light_tails: LightTailsBound
    regularity: "RegularityVerdict"

    def to_json_dict(self) -> dict:
        def rat(x: Fraction | None):
            if x is None:
                return None
            return {"num": str(x.numerator), "den": str(x.denominator)}

        reg = self.regularity
        return {
            "family": self.family,
            "a_s_chain": [
                {"support": list(s), "gcd_image": list(a)} for s, a in self.a_s_chain
            ],
            "a_inf": list(self.a_inf),
            "b_zero": self.b_zero,
            "b_star": self.b_star,
            "e_description": self.e_description,
            "diagnostics": {
                "proximal": self.proximal,
                "taut_to_depth": {
                    "truncation": self.taut.truncation,
                    "is_taut": self.taut.is_taut,
                    "violator": self.taut.violator,
                    "exact": self.taut.exact,
                },
                "light_tails": {
                    "cutoff": self.light_tails.cutoff,
                    "enumerated_to": self.light_tails.enumerated_to,
                    "enumerated_sum": rat(self.light_tails.enumerated_sum),
                    "analytic_tail": rat(self.light_tails.analytic_tail),
                    "conclusive": self.light_tails.conclusive,
                    "bound": rat(self.light_tails.bound),
                    "bound_float": float(self.light_tails.bound)
                    if self.light_tails.bound is not None
                    else None,
                },
                "regularity": {
                    "verdict": reg.verdict,
                    "term": rat(reg.term),
                    "term_float": float(reg.term) if reg.term is not None else None,
                    "at_index": reg.at_index,
                    "certified": reg.certified,
                },
            },
        }


def build_structure_report(
    B: fam.BFamily,
    filtration: Filtration | None = None,
    taut_truncation: int = 30,
    light_tails_cutoff: int = 100,
    tolerance: Fraction = Fraction(0),
) -> StructureReport:
    from .window import regularity_verdict  # local import: window builds on structure

    filtration = filtration or standard_filtration(B)
    certs = a_infinity(B)
    zero = b_zero(B)
    star = b_star(B)
    e_desc = f"free set of B* ({fam.dumps_family(star)[:120]})"
    return StructureReport(
        family=fam.family_to_dict(B),
        a_s_chain=tuple((tuple(S), a_s(B, S)[0]) for S in filtration),
        a_inf=tuple(
            {"scale": c.scale, "audit_depth": c.audit_depth} for c in certs
        ),
        b_zero=fam.family_to_dict(zero) if zero is not None else None,
        b_star=fam.family_to_dict(star),
        e_description=e_desc,
        proximal=proximal(B),
        taut=taut_to_depth(B, taut_truncation),
        light_tails=light_tails_bound(B, light_tails_cutoff),
        regularity=regularity_verdict(B, filtration, tolerance),
    )
