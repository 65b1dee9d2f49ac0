"""The CRT witness constructor and block-level heredity audits.

Realizes target blocks between the lower and upper codings: given an anchor
and a set of positions to flip from 1 to 0, builds (by the three-step CRT
construction) a congruence class whose members carry the flipped pattern,
then searches the class for an exact integer witness, falling back to a
cylinder witness with audited avoidance constraints when the scan ceiling is
reached.  Every integer witness is re-verified from scratch: pattern by
divisibility, anchor by modular arithmetic, with no trust in the
construction path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import family as fam
from . import structure as st
from .arith import Congruence, crt_solve, factor, is_prime, lcm_all, primitivize
from .errors import CertificateMissing, FlipNotAllowed, TermExplosion
from .periodic import Block, indicator_window
from .window import Cylinder

WITNESS_SCAN_LIMIT = 10**6
TAIL_AUDIT_LIMIT = 10**4
LANGUAGE_LCM_LIMIT = 10**6
# Witness scan candidates live in a congruence class whose modulus multiplies
# the spectrum lcm by one fresh prime power per flip, so they routinely pass
# 2^63; factorization stays exact (rho + deterministic MR) well beyond.
WITNESS_FACTOR_CEILING = 2**96


def avoidance_residues(b: int, N: int) -> set[int]:
    """Residues r mod b with r + i != 0 mod b for all |i| <= N.

    Empty exactly when b <= 2N+1 (the forbidden classes -i cover everything).
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    forbidden = {(-i) % b for i in range(-N, N + 1)}
    return set(range(b)) - forbidden


def extend_avoidance(
    A: Sequence[int],
    k: int | Congruence,
    S: Sequence[int],
    N: int,
    p: int,
    s0_residues: Mapping[int, int] | None = None,
) -> Congruence:
    """One inductive CRT step: extend an anchor-compatible residue to avoid
    hits near zero for every member of S divisible by p.

    Splits S into S0 (members coprime to p) and the rest; picks the least
    j mod p clear of [-N, N], then solves the combined system.  The prime p
    must exceed 2N+1 and be coprime to the anchor modulus, which makes the
    system solvable; anything else is a precondition failure.
    """
    A = tuple(sorted(set(A)))
    mod_a = lcm_all(A)
    anchor = k if isinstance(k, Congruence) else Congruence(k, mod_a)
    if anchor.modulus != mod_a:
        raise ValueError("anchor residue must live mod lcm(A)")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p <= 2 * N + 1:
        raise ValueError(f"p = {p} must exceed 2N+1 = {2 * N + 1}")
    if math.gcd(p, mod_a) != 1:
        raise ValueError(f"p = {p} shares a factor with lcm(A)")
    s0 = [b for b in S if b % p]
    if len(s0) == len(S):
        raise ValueError("S has no multiple of p: nothing to extend")
    if s0_residues is None:
        # an integer k names the diagonal point, which fixes every coordinate;
        # a bare congruence does not determine coordinates outside lcm(A)
        if isinstance(k, Congruence) and any(mod_a % b for b in s0):
            raise ValueError("S0 residues required: the anchor does not determine them")
        point = k if isinstance(k, int) else anchor.residue
        s0_residues = {b: point % b for b in s0}
    for b in s0:
        r = s0_residues[b]
        if any((r + i) % b == 0 for i in range(-N, N + 1)):
            raise ValueError(f"given residue {r} mod {b} does not avoid [-N, N]")
    j = min(avoidance_residues(p, N))
    system = [anchor]
    system += [Congruence(s0_residues[b], b) for b in s0]
    system.append(Congruence(j, p))
    combined = crt_solve(system)
    for b in S:
        if b % p == 0:
            # hits of b near zero would be hits of p
            assert all((combined.residue + i) % p != 0 for i in range(-N, N + 1))
    return combined


@dataclass(frozen=True)
class AvoidanceConstraint:
    """h_b + i != 0 mod b for |i| <= radius; satisfiable whenever b has a
    prime divisor beyond 2*radius+1 (the audited residue is one witness)."""

    divisor: int
    radius: int
    residue: int | None  # an anchor-compatible avoiding residue, when audited
    reason: str


@dataclass(frozen=True)
class ClearTailReport:
    """The constraint family over the tail C(A, n), with audited members.

    Members of C(A, n) have a prime divisor > n coprime to lcm(A), so each
    constraint is individually satisfiable inside the anchor cylinder;
    compactness makes the whole family simultaneously satisfiable.  The
    finitely many members up to the audit bound carry explicit residues.
    """

    anchor_support: tuple[int, ...]
    spectrum_bound: int
    radius: int
    audited_to: int
    constraints: tuple[AvoidanceConstraint, ...]
    full_family_satisfiable: bool = True


def clear_tail(
    B: fam.BFamily,
    A: Sequence[int],
    k: int | Congruence,
    n: int,
    N: int,
    audit_to: int = TAIL_AUDIT_LIMIT,
) -> ClearTailReport:
    """Audit the tail constraints h_b + i != 0 (|i| <= N) over C(A, n).

    C(A, n) collects the members outside A with a prime divisor > n coprime
    to lcm(A).  For each member up to `audit_to` an explicit residue
    compatible with the anchor congruence is produced.
    """
    A = tuple(sorted(set(A)))
    if n < 2 * N + 1:
        raise ValueError(f"need n >= 2N+1, got n={n}, N={N}")
    missing = [b for b in fam.spectrum_bounded(B, n) if b not in A]
    if missing:
        raise ValueError(f"anchor set must contain the full spectrum slice; missing {missing}")
    mod_a = lcm_all(A)
    anchor = k if isinstance(k, Congruence) else Congruence(k, mod_a)
    constraints = []
    for b in fam.enumerate_upto(B, audit_to):
        if b in A:
            continue
        big_primes = [p for p in factor(b).primes() if p > n and mod_a % p != 0]
        if not big_primes:
            continue
        g = math.gcd(b, anchor.modulus)
        base = anchor.residue % g
        residue = None
        for t in range(b // g):
            r = base + t * g
            if all((r + i) % b != 0 for i in range(-N, N + 1)):
                residue = r
                break
        if residue is None:
            raise AssertionError(f"no avoiding residue mod {b}: contradicts p > 2N+1")
        constraints.append(
            AvoidanceConstraint(
                b, N, residue, f"prime divisor {big_primes[0]} > {n} coprime to lcm(A)"
            )
        )
    return ClearTailReport(A, n, N, audit_to, tuple(constraints))


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class IntegerWitness:
    value: int
    target: Block
    anchor_support: tuple[int, ...]
    anchor_residue: Congruence
    transcript: tuple[str, ...]


@dataclass(frozen=True)
class CylinderWitness:
    cylinder: Cylinder
    exceptions: tuple[AvoidanceConstraint, ...]
    verified_to: int
    target: Block
    anchor_support: tuple[int, ...]
    anchor_residue: Congruence
    transcript: tuple[str, ...]


Witness = IntegerWitness | CylinderWitness


def verify_integer_witness(B: fam.BFamily, w: IntegerWitness) -> list[str]:
    """Independent re-verification; raises AssertionError on any mismatch."""
    lines = []
    for i in w.target.positions():
        expected = w.target.value_at(i)
        actual = 0 if fam.divides_member(B, w.value + i, WITNESS_FACTOR_CEILING) else 1
        if expected != actual:
            raise AssertionError(f"pattern mismatch at {i}: want {expected}, got {actual}")
        lines.append(f"position {i}: bit {actual} checked by divisibility")
    if not w.anchor_residue.holds_for(w.value):
        raise AssertionError("anchor congruence violated")
    lines.append(f"anchor: {w.value} == {w.anchor_residue}")
    return lines


def _least_odd_spectrum_bound(protect: Sequence[int], N: int) -> int:
    top = 2 * N + 1
    for s in protect:
        if s > 1:
            top = max(top, factor(s).max_prime())
    return top if top % 2 else top + 1


def construct_witness(
    B: fam.BFamily,
    anchor: int | Cylinder,
    N: int,
    flips: Iterable[int],
    protect: Sequence[int] = (),
    scan_limit: int = WITNESS_SCAN_LIMIT,
    audit_to: int = TAIL_AUDIT_LIMIT,
    flip_justifications: Mapping[int, tuple[int, int]] | None = None,
) -> Witness:
    """Realize the anchor's block on [-N, N] with the flip positions forced
    to 0, inside the protected cylinder.

    Flips must sit strictly between the codings (lower 0, upper 1); each is
    justified by a primitive certificate scale dividing the position, paired
    with a fresh certificate element coprime to everything already fixed.
    The combined congruence class provably realizes the pattern in H; the
    integer scan looks for a member of the diagonal inside it.

    For a cylinder anchor the lower coding cannot be evaluated from finite
    data, so the caller must supply `flip_justifications` mapping each flip
    to a pair (member, scale): a family member divisible by a primitive
    certificate scale that hits the position in the intended point.  Only
    the machine-checkable residues of that claim are verified, and the
    result is always a CylinderWitness.
    """
    flips = tuple(sorted(set(flips)))
    if isinstance(anchor, Cylinder):
        return _construct_cylinder_witness(
            B, anchor, N, flips, flip_justifications or {}, audit_to
        )
    if flip_justifications:
        raise ValueError("flip justifications are only for cylinder anchors")
    m = anchor
    if any(i < -N or i > N for i in flips):
        raise ValueError("flips must lie in [-N, N]")
    protect = tuple(sorted(set(protect)))
    for s in protect:
        if not fam.contains(B, s):
            raise ValueError(f"protected element {s} is not a member of the family")
    anchor_mod = lcm_all(protect)
    anchor_res = Congruence(m, anchor_mod)
    transcript = [f"anchor {m}, radius {N}, flips {list(flips)}, protect {list(protect)}"]

    for i in flips:
        if fam.divides_member(B, m + i):
            raise FlipNotAllowed(i, f"upper coding already 0 at {i}")
        if st.e_member(B, m + i):
            raise FlipNotAllowed(i, f"lower coding is 1 at {i}: position not flippable")

    target = Block(
        -N,
        tuple(
            0 if (i in flips or fam.divides_member(B, m + i)) else 1
            for i in range(-N, N + 1)
        ),
    )
    if not flips:
        transcript.append("no flips: the anchor itself realizes its block")
        w = IntegerWitness(m, target, protect, anchor_res, tuple(transcript))
        verify_integer_witness(B, w)
        return w

    # Step 1: spectrum slice and hit bookkeeping at the anchor
    n = _least_odd_spectrum_bound(protect, N)
    spectrum_slice = fam.spectrum_bounded(B, n)
    hit_divisors = {}
    for i in range(-N, N + 1):
        if target.value_at(i) == 0 and i not in flips:
            hit_divisors[i] = fam.least_divisor_member(B, m + i)
    base = sorted(set(spectrum_slice) | set(hit_divisors.values()))
    beta1 = lcm_all(base)
    transcript.append(f"spectrum bound n={n}; base set {base}; beta1={beta1}")

    # Step 2: flip congruences from certificate scales
    certs = {c.scale: c for c in st.a_infinity(B)}
    scales = st.a_infinity_scales(B)
    prim_scales = primitivize(scales) if scales else ()
    flip_divisors: dict[int, int] = {}
    avoid = beta1
    for a in prim_scales:
        avoid *= a
    for i in flips:
        scale = next((a for a in prim_scales if (m + i) % a == 0), None)
        if scale is None:
            raise CertificateMissing(
                f"no primitive certificate scale divides {m + i} (position {i})"
            )
        d = certs[scale].term_coprime_to(avoid)
        b_i = scale * d
        if not fam.contains(B, b_i):
            raise AssertionError(f"constructed element {b_i} escaped the family")
        if b_i <= n:
            raise AssertionError("flip divisor must exceed the spectrum bound")
        flip_divisors[i] = b_i
        avoid *= d
        transcript.append(f"flip {i}: scale {scale}, fresh element {d}, divisor {b_i}")

    # exact CRT compatibility identities before solving
    items = sorted(flip_divisors.items())
    for a_idx, (i, bi) in enumerate(items):
        for j, bj in items[a_idx + 1 :]:
            if ((m + j) - (m + i)) % math.gcd(bi, bj):
                raise AssertionError("pairwise flip congruences incompatible")
    for i, bi in items:
        if (m + i) % math.gcd(bi, beta1):
            raise AssertionError("flip congruence incompatible with base lcm")

    system = [Congruence(0, beta1)]
    system += [Congruence(-(m + i), bi) for i, bi in items]
    shift = crt_solve(system)
    transcript.append(f"shift class {shift}")

    # each flip divisor pins exactly its own position inside the window
    for i, bi in items:
        for kpos in range(-N, N + 1):
            hit = (m + shift.residue + kpos) % bi == 0
            if hit != (kpos == i):
                raise AssertionError("flip divisor strikes a foreign position")

    # Step 3 for the diagonal: scan the congruence class for an exact pattern
    checked = 0
    t = 0
    while checked < scan_limit:
        for x in ({shift.residue} if t == 0 else {shift.residue + t * shift.modulus, shift.residue - t * shift.modulus}):
            candidate = m + x
            checked += 1
            if all(
                (0 if fam.divides_member(B, candidate + i, WITNESS_FACTOR_CEILING) else 1)
                == target.value_at(i)
                for i in target.positions()
            ):
                transcript.append(f"integer witness {candidate} after {checked} candidates")
                w = IntegerWitness(candidate, target, protect, anchor_res, tuple(transcript))
                verify_integer_witness(B, w)
                return w
        t += 1

    transcript.append(f"scan limit {scan_limit} reached; returning cylinder witness")
    support = tuple(sorted(set(base) | set(flip_divisors.values())))
    residue = Congruence(m + shift.residue, lcm_all(support))
    cyl = Cylinder(support, residue)
    tail = clear_tail(B, support, residue, n, N, audit_to)
    return CylinderWitness(
        cyl, tail.constraints, audit_to, target, protect, anchor_res, tuple(transcript)
    )


def _construct_cylinder_witness(
    B: fam.BFamily,
    anchor: Cylinder,
    N: int,
    flips: tuple[int, ...],
    justifications: Mapping[int, tuple[int, int]],
    audit_to: int,
) -> CylinderWitness:
    # The lower coding is not computable from a finite cylinder, so each flip
    # carries a caller-supplied (member, scale) pair; only its residue
    # content is machine-checkable here.
    if any(i < -N or i > N for i in flips):
        raise ValueError("flips must lie in [-N, N]")
    missing = [i for i in flips if i not in justifications]
    if missing:
        raise ValueError(
            f"cylinder anchors need (member, scale) justifications for flips {missing}"
        )
    r0 = anchor.residue.residue
    scales = st.a_infinity_scales(B)
    prim_scales = primitivize(scales) if scales else ()
    certs = {c.scale: c for c in st.a_infinity(B)}
    transcript = [
        f"cylinder anchor {anchor.residue} on support {list(anchor.support)}, "
        f"radius {N}, flips {list(flips)}"
    ]
    for i in flips:
        member, scale = justifications[i]
        if scale not in prim_scales:
            raise CertificateMissing(f"{scale} is not a primitive certificate scale")
        if not fam.contains(B, member) or member % scale:
            raise ValueError(f"justification for {i} needs a member divisible by {scale}")
        if any((r0 + i) % b == 0 for b in anchor.support):
            raise FlipNotAllowed(i, "support already forces a zero here")
        g = math.gcd(scale, anchor.residue.modulus)
        if (r0 + i) % g:
            raise FlipNotAllowed(i, f"claimed {scale}-hit incompatible with the cylinder")
    for i in flips:
        for j in flips:
            if j <= i:
                continue
            g = math.gcd(justifications[i][1], justifications[j][1])
            if (j - i) % g:
                raise FlipNotAllowed(
                    j, f"flips {i} and {j} clash modulo the shared scale factor {g}"
                )

    n = _least_odd_spectrum_bound(anchor.support, N)
    spectrum_slice = fam.spectrum_bounded(B, n)
    # canonical diagonal extension: every new coordinate follows the residue
    base = sorted(set(anchor.support) | set(spectrum_slice))
    base_res = crt_solve(
        [anchor.residue] + [Congruence(r0, b) for b in spectrum_slice]
    )
    transcript.append(f"spectrum bound n={n}; extended base {base}: {base_res}")

    avoid = base_res.modulus
    for a in prim_scales:
        avoid *= a
    for i in flips:
        avoid *= justifications[i][0]  # fresh elements stay coprime to the members
    flip_divisors: dict[int, int] = {}
    system = [base_res]
    for i in flips:
        scale = justifications[i][1]
        d = certs[scale].term_coprime_to(avoid)
        b_i = scale * d
        if not fam.contains(B, b_i):
            raise AssertionError(f"constructed element {b_i} escaped the family")
        g = math.gcd(b_i, base_res.modulus)
        if (base_res.residue + i) % g:
            raise FlipNotAllowed(
                i, f"flip divisor {b_i} incompatible with the extended base"
            )
        flip_divisors[i] = b_i
        system.append(Congruence(-i, b_i))
        avoid *= d
        transcript.append(f"flip {i}: scale {scale}, fresh element {d}, divisor {b_i}")
    solved = crt_solve(system)
    support = tuple(sorted(set(base) | set(flip_divisors.values())))
    cyl = Cylinder(support, solved)
    for i, bi in flip_divisors.items():
        for kpos in range(-N, N + 1):
            if ((solved.residue + kpos) % bi == 0) != (kpos == i):
                raise AssertionError("flip divisor strikes a foreign position")

    target = Block(
        -N,
        tuple(
            0 if any((solved.residue + i) % b == 0 for b in support) else 1
            for i in range(-N, N + 1)
        ),
    )
    # scan every member up to the audit bound: determined coordinates must
    # respect the target; undetermined ones get an audited avoiding residue
    tail = clear_tail(B, support, solved, n, N, audit_to)
    structural = {c.divisor: c for c in tail.constraints}
    exceptions: list[AvoidanceConstraint] = []
    for b in fam.enumerate_upto(B, audit_to):
        if b in support:
            continue
        if solved.modulus % b == 0:
            for i in range(-N, N + 1):
                if (solved.residue + i) % b == 0 and target.value_at(i) == 1:
                    raise AssertionError(f"visible member {b} hits a one-position")
            continue
        if b in structural:
            exceptions.append(structural[b])
            continue
        g = math.gcd(b, solved.modulus)
        residue = None
        for t in range(b // g):
            r = solved.residue % g + t * g
            if all((r + i) % b for i in range(-N, N + 1)):
                residue = r
                break
        if residue is None:
            raise AssertionError(f"exceptional member {b} blocks the window")
        exceptions.append(
            AvoidanceConstraint(b, N, residue, "exceptional member outside the tail family")
        )
    transcript.append(
        f"members scanned to {audit_to}: {len(exceptions)} avoidance constraints"
    )
    return CylinderWitness(
        cyl,
        tuple(exceptions),
        audit_to,
        target,
        anchor.support,
        anchor.residue,
        tuple(transcript),
    )


def approximate_point(
    B: fam.BFamily,
    anchor: int,
    x: Block | Callable[[int], int],
    N_max: int,
    filtration: st.Filtration | None = None,
    scan_limit: int = WITNESS_SCAN_LIMIT,
) -> list[Witness]:
    """Witness sequence showing the target pattern is reachable from the
    anchor at every radius up to N_max (protecting ever larger supports)."""
    value = x.value_at if isinstance(x, Block) else x
    filtration = filtration or st.standard_filtration(B)
    witnesses = []
    for N in range(1, N_max + 1):
        flips = []
        for i in range(-N, N + 1):
            phi_i = 0 if fam.divides_member(B, anchor + i) else 1
            lower_i = 1 if st.e_member(B, anchor + i) else 0
            if not lower_i <= value(i) <= phi_i:
                raise ValueError(
                    f"target leaves the coding strip at {i}: "
                    f"{lower_i} <= {value(i)} <= {phi_i} fails"
                )
            if value(i) == 0 and phi_i == 1:
                flips.append(i)
        S = filtration.chain[min(N, len(filtration)) - 1]
        witnesses.append(
            construct_witness(B, anchor, N, flips, S, scan_limit=scan_limit)
        )
    return witnesses


# ---------------------------------------------------------------------------
# block languages and the heredity audit


def block_language(
    B: fam.BFamily,
    N: int,
    mode: str,
    R: int | None = None,
    S: Sequence[int] | None = None,
    K: int | None = None,
) -> set[Block]:
    """Length-(2N+1) block sets approximating the subshift language.

    mode "eta": the factors the B-free indicator shows on [-R, R] (a lower
    approximation of the orbit-closure language).  mode "phi": the blocks
    some residue class mod lcm(S) can show under the constraints visible
    from S and the members up to K (an upper approximation).  The true
    languages are sandwiched between the two.
    """
    if mode == "eta":
        if R is None:
            raise ValueError("eta mode needs R")
        return set(_eta_language_positions(B, N, R))
    if mode == "phi":
        if S is None or K is None:
            raise ValueError("phi mode needs S and K")
        return _phi_language(B, N, tuple(sorted(set(S))), K)
    raise ValueError(f"unknown mode {mode!r}")


def _eta_language_positions(B: fam.BFamily, N: int, R: int) -> dict[Block, int]:
    """Factors of the indicator on [-R, R], mapped to a first center."""
    window = indicator_window(B, -R, R)
    width = 2 * N + 1
    out: dict[Block, int] = {}
    mask = (1 << width) - 1
    word = 0
    bits = window.bits
    for idx in range(len(bits)):
        word = ((word << 1) | bits[idx]) & mask
        if idx >= width - 1:
            key = word
            center = window.offset + idx - N
            block = Block(-N, tuple((key >> (width - 1 - j)) & 1 for j in range(width)))
            if block not in out:
                out[block] = center
    return out


def _phi_language(B: fam.BFamily, N: int, S: tuple[int, ...], K: int) -> set[Block]:
    for b in S:
        if not fam.contains(B, b):
            raise ValueError(f"{b} is not a member of the family")
    L = lcm_all(S)
    if L > LANGUAGE_LCM_LIMIT:
        raise TermExplosion(f"lcm(S) = {L} beyond the language enumeration limit")
    visible = [b for b in fam.enumerate_upto(B, K) if L % b == 0]
    if fam.is_finite(B):
        invisible = [b for b in fam.enumerate_upto(B, 10**9) if b not in visible]
        infinite_invisible = False
    else:
        invisible = []
        infinite_invisible = True
    width = 2 * N + 1
    language: set[Block] = set()
    for k in range(L):
        options: list[tuple[int, ...]] = []
        for i in range(-N, N + 1):
            forced = any((k + i) % b == 0 for b in visible)
            if forced:
                options.append((0,))
                continue
            zero_possible = infinite_invisible or any(
                (k + i) % math.gcd(b, L) == 0 for b in invisible
            )
            options.append((0, 1) if zero_possible else (1,))
        _expand(options, language, N)
    return language


def _expand(options: list[tuple[int, ...]], out: set[Block], N: int) -> None:
    import itertools

    for combo in itertools.product(*options):
        out.add(Block(-N, combo))


@dataclass(frozen=True)
class HereditaryAuditReport:
    radius: int
    base_range: int
    escalated_range: int
    confirmed: int
    witness_realized: int
    unresolved: int
    statuses: tuple[tuple[Block, str], ...]

    def status_of(self, block: Block) -> str | None:
        for blk, status in self.statuses:
            if blk == block:
                return status
        return None


def hereditary_audit(
    B: fam.BFamily,
    N: int,
    R: int,
    escalation: int = 10,
    scan_limit: int = WITNESS_SCAN_LIMIT,
    try_witnesses: bool = True,
) -> HereditaryAuditReport:
    """Check every pointwise-smaller variant of every observed block.

    A sub-block is confirmed when it reappears as a factor within the
    escalated range, witness-realized when the CRT constructor produces an
    integer carrying it, and unresolved otherwise.  Evidence-grade for
    infinite families: confirmed at scale (N, R, R') only.
    """
    base = _eta_language_positions(B, N, R)
    r_prime = R * escalation
    escalated = base if escalation <= 1 else _eta_language_positions(B, N, r_prime)
    candidates: set[Block] = set()
    for block in base:
        ones = [i for i in block.positions() if block.value_at(i) == 1]
        for sub in range(1 << len(ones)):
            kill = {ones[j] for j in range(len(ones)) if sub >> j & 1}
            candidates.add(
                Block(
                    block.offset,
                    tuple(
                        0 if i in kill else block.value_at(i)
                        for i in block.positions()
                    ),
                )
            )
    statuses: list[tuple[Block, str]] = []
    counts = {"confirmed": 0, "witness-realized": 0, "unresolved": 0}
    for cand in sorted(candidates, key=lambda blk: blk.bits):
        if cand in escalated:
            status = "confirmed"
        else:
            status = "unresolved"
            if try_witnesses:
                for parent, center in base.items():
                    if not parent.dominates(cand):
                        continue
                    flips = [
                        i
                        for i in cand.positions()
                        if cand.value_at(i) == 0 and parent.value_at(i) == 1
                    ]
                    try:
                        w = construct_witness(
                            B, center, N, flips, (), scan_limit=scan_limit
                        )
                    except (FlipNotAllowed, CertificateMissing):
                        continue
                    if isinstance(w, IntegerWitness):
                        status = "witness-realized"
                        break
        counts[status] += 1
        statuses.append((cand, status))
    return HereditaryAuditReport(
        N,
        R,
        r_prime,
        counts["confirmed"],
        counts["witness-realized"],
        counts["unresolved"],
        tuple(statuses),
    )
