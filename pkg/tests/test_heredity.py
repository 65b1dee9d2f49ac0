import math

import pytest

from bfree.arith import Congruence, lcm_all
from bfree.errors import FlipNotAllowed, TermExplosion
from bfree.family import ExplicitFinite, divides_member, enumerate_upto
from bfree.heredity import (
    CylinderWitness,
    IntegerWitness,
    approximate_point,
    avoidance_residues,
    block_language,
    clear_tail,
    construct_witness,
    extend_avoidance,
    hereditary_audit,
    verify_integer_witness,
)
from bfree.periodic import Block, indicator_window
from bfree.structure import e_member, standard_filtration
from bfree.window import phi_eval, phi_lower


class TestAvoidanceResidues:
    def test_examples(self):
        assert avoidance_residues(5, 1) == {2, 3}
        assert avoidance_residues(3, 1) == set()
        assert avoidance_residues(7, 0) == {1, 2, 3, 4, 5, 6}

    def test_empty_iff_small(self):
        for b in range(1, 30):
            for N in range(4):
                got = avoidance_residues(b, N)
                assert (got == set()) == (b <= 2 * N + 1)
                for r in got:
                    assert all((r + i) % b for i in range(-N, N + 1))


class TestExtendAvoidance:
    def test_concrete_run(self):
        got = extend_avoidance((2,), 1, (35,), 1, 5)
        assert got == Congruence(7, 10)
        # substitute back: each congruence holds, and the p-part avoids zero
        assert got.residue % 2 == 1
        assert all((got.residue + i) % 5 for i in (-1, 0, 1))

    def test_s0_empty_two_congruence_case(self):
        got = extend_avoidance((4, 9), 5, (7,), 1, 7)
        assert got.modulus == math.lcm(36, 7)
        assert got.residue % 36 == 5
        assert all((got.residue + i) % 7 for i in (-1, 0, 1))

    def test_precondition_failures(self):
        with pytest.raises(ValueError):
            extend_avoidance((2,), 1, (35,), 2, 5)  # p <= 2N+1
        with pytest.raises(ValueError):
            extend_avoidance((10,), 1, (35,), 1, 5)  # p | lcm(A)
        with pytest.raises(ValueError):
            extend_avoidance((2,), 1, (9,), 1, 5)  # no multiple of p in S

    def test_s0_residues_validated(self):
        with pytest.raises(ValueError):
            # residue 0 mod 9 cannot avoid [-1, 1]
            extend_avoidance((2,), 1, (9, 35), 1, 5, s0_residues={9: 0})


class TestClearTail:
    def test_squares_audit(self, squares):
        report = clear_tail(squares, (4, 9, 25, 49), 0, 7, 1, audit_to=10**4)
        divisors = [c.divisor for c in report.constraints]
        assert divisors == [p * p for p in (11, 13, 17, 19, 23, 29, 31, 37, 41,
                                            43, 47, 53, 59, 61, 67, 71, 73, 79,
                                            83, 89, 97)]
        for c in report.constraints:
            assert all((c.residue + i) % c.divisor for i in (-1, 0, 1))
            assert c.residue % math.gcd(c.divisor, lcm_all((4, 9, 25, 49))) == 0

    def test_finite_empty_tail(self, finite):
        report = clear_tail(finite, (6, 10, 15), 1, 5, 1)
        assert report.constraints == ()

    def test_twop_tail(self, twop):
        report = clear_tail(twop, (6, 10), 1, 5, 1, audit_to=100)
        assert [c.divisor for c in report.constraints] == [
            2 * p for p in (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
        ]

    def test_preconditions(self, squares):
        with pytest.raises(ValueError):
            clear_tail(squares, (4, 9, 25, 49), 0, 2, 1)  # n < 2N+1
        with pytest.raises(ValueError):
            clear_tail(squares, (4, 9), 0, 7, 1)  # missing spectrum members


class TestConstructWitness:
    def test_no_flips_returns_anchor(self, squares, twop):
        for B, anchor in ((squares, 5), (twop, 3)):
            w = construct_witness(B, anchor, 1, [])
            assert isinstance(w, IntegerWitness)
            assert w.value == anchor

    def test_fixed_all_zero_case(self, squares):
        w = construct_witness(squares, 0, 1, [-1, 1], (4, 9))
        assert isinstance(w, IntegerWitness)
        assert w.target.bits == (0, 0, 0)
        assert w.value % 36 == 0
        # independent oracle: three consecutive non-squarefree integers
        for i in (-1, 0, 1):
            n = abs(w.value + i)
            assert any(n % (d * d) == 0 for d in range(2, int(n**0.5) + 1))

    def test_flip_not_allowed_positions(self, twop):
        with pytest.raises(FlipNotAllowed):
            construct_witness(twop, 1, 1, [0])  # position 1 lies in E
        with pytest.raises(FlipNotAllowed):
            construct_witness(twop, 5, 1, [1])  # position 6 already hit

    def test_twop_power_of_two_flip(self, twop):
        w = construct_witness(twop, 3, 1, [1], (6,))
        assert isinstance(w, IntegerWitness)
        assert w.target.bits == (1, 1, 0)
        assert w.value % 6 == 3
        assert divides_member(twop, w.value + 1)
        assert not divides_member(twop, w.value)

    def test_anchor_congruence_preserved(self, squares):
        protect = (4, 9, 25)
        for anchor in (2, 7, 30):
            flips = [
                i
                for i in (-2, -1, 1, 2)
                if not divides_member(squares, anchor + i)
                and not e_member(squares, anchor + i)
            ][:2]
            if not flips:
                continue
            w = construct_witness(squares, anchor, 2, flips, protect)
            assert isinstance(w, IntegerWitness)
            assert w.value % lcm_all(protect) == anchor % lcm_all(protect)

    def test_reverification_is_independent(self, squares):
        w = construct_witness(squares, 0, 1, [-1, 1], (4, 9))
        lines = verify_integer_witness(squares, w)
        assert len(lines) == 4  # three positions plus the anchor line
        # a corrupted witness must fail
        bad = IntegerWitness(
            w.value + 36, w.target, w.anchor_support, w.anchor_residue, ()
        )
        if (0 if divides_member(squares, bad.value - 1) else 1) != 0:
            with pytest.raises(AssertionError):
                verify_integer_witness(squares, bad)

    def test_flip_divisor_pins_only_its_position(self, squares):
        # the chosen divisor for each flip hits no other window position
        w = construct_witness(squares, 14, 2, [-1, 1], (4, 9))
        assert isinstance(w, IntegerWitness)
        # reconstruct the flip divisors from the transcript
        divisors = [
            int(line.rsplit("divisor", 1)[1])
            for line in w.transcript
            if "divisor" in line and line.startswith("flip")
        ]
        assert len(divisors) == 2
        for d, flip in zip(divisors, (-1, 1)):
            hits = [i for i in range(-2, 3) if (w.value + i) % d == 0]
            assert hits == [flip]

    def test_scan_limit_falls_back_to_cylinder(self, squares):
        w = construct_witness(squares, 0, 1, [-1, 1], (4, 9), scan_limit=0)
        assert isinstance(w, CylinderWitness)
        assert w.verified_to >= 1
        assert set((4, 9)) <= set(w.cylinder.support)
        # the cylinder carries the forced flip congruences
        r = w.cylinder.residue.residue
        flip_divs = [d for d in w.cylinder.support if d not in (4, 9, 25, 49)]
        assert all(any((r + i) % d == 0 for i in (-1, 1)) for d in flip_divs)

    def test_cylinder_anchor_needs_justifications(self, squares):
        from bfree.window import Cylinder

        with pytest.raises(ValueError):
            construct_witness(squares, Cylinder.from_point((4,), 1), 1, [0])

    def test_cylinder_anchor_with_justifications(self, squares):
        from bfree.window import Cylinder, phi_eval

        # anchor residue 1 mod 36: positions -1..1 are 0,1,2 mod 36, none hit
        # by 4 or 9; flip position 0 justified by any prime square (scale 1)
        anchor = Cylinder.from_point((4, 9), 1)
        w = construct_witness(
            squares, anchor, 1, [0], flip_justifications={0: (4, 1)}
        )
        assert isinstance(w, CylinderWitness)
        assert w.target.value_at(0) == 0
        r, mod = w.cylinder.residue.residue, w.cylinder.residue.modulus
        assert r % 36 == 1  # stays inside the anchor cylinder
        # the forced zero holds at integer points of the refined cylinder
        for t in range(3):
            tri = phi_eval(squares, r + t * mod, 1)
            assert tri.value_at(0) == 0
        # audited constraints are compatible avoiding residues
        import math as _math

        for c in w.exceptions:
            g = _math.gcd(c.divisor, mod)
            assert c.residue % g == r % g
            assert all((c.residue + i) % c.divisor for i in (-1, 0, 1))

    def test_cylinder_anchor_rejects_bad_justification(self, twop):
        from bfree.window import Cylinder

        anchor = Cylinder.from_point((6,), 1)
        with pytest.raises(FlipNotAllowed):
            # position 0 sits at residue 1 mod 6: odd, so a scale-2 hit is
            # incompatible with the cylinder
            construct_witness(
                twop, anchor, 1, [0], flip_justifications={0: (6, 2)}
            )


class TestApproximatePoint:
    def test_target_equal_phi_gives_anchor(self, squares):
        target = phi_eval(squares, 7, 3).to_block()
        ws = approximate_point(squares, 7, target, 3)
        assert [w.value for w in ws if isinstance(w, IntegerWitness)][:1] == [7]

    def test_all_zeros_target(self, squares):
        zeros = Block(-3, (0,) * 7)
        ws = approximate_point(squares, 0, zeros, 3)
        assert len(ws) == 3
        for N, w in enumerate(ws, start=1):
            assert isinstance(w, IntegerWitness)
            assert w.target.bits == (0,) * (2 * N + 1)
            verify_integer_witness(squares, w)

    def test_below_lower_coding_rejected(self, twop):
        bad = Block(-1, (0, 0, 0))  # position 1 has lower coding 1 at anchor 0
        with pytest.raises(ValueError):
            approximate_point(twop, 0, bad, 1)


class TestBlockLanguage:
    def test_period_two(self, b2):
        lang = block_language(b2, 1, "eta", R=100)
        assert {b.bits for b in lang} == {(0, 1, 0), (1, 0, 1)}

    def test_finite_modes_coincide(self, finite):
        for N in (1, 2):
            eta = block_language(finite, N, "eta", R=100)
            phi = block_language(
                finite, N, "phi", S=finite.elements, K=max(finite.elements)
            )
            assert eta == phi

    def test_finite_equals_periodic_factor_oracle(self, finite):
        N = 2
        L = lcm_all(finite.elements)
        bits = [
            0 if any(n % b == 0 for b in finite.elements) else 1
            for n in range(L)
        ]
        oracle = {
            tuple(bits[(k + i) % L] for i in range(-N, N + 1)) for k in range(L)
        }
        lang = {b.bits for b in block_language(finite, N, "eta", R=3 * L)}
        assert lang == oracle

    def test_squares_upper_language_contains_zero_block(self, squares):
        lang = block_language(squares, 1, "phi", S=(4, 9, 25, 49), K=10**4)
        assert Block(-1, (0, 0, 0)) in lang
        eta = block_language(squares, 1, "eta", R=10**4)
        assert eta <= lang

    def test_realized_flips_land_in_upper_language(self, squares):
        # blocks produced by flip witnesses stay inside the phi-language:
        # the closed strip sits under the upper approximation at desk scale
        upper = block_language(squares, 1, "phi", S=(4, 9, 25, 49), K=10**4)
        for anchor in (0, 5, 14, 33):
            admissible = [
                i for i in (-1, 0, 1) if not divides_member(squares, anchor + i)
            ]
            for r in range(1, len(admissible) + 1):
                flips = admissible[:r]
                w = construct_witness(squares, anchor, 1, flips)
                assert isinstance(w, IntegerWitness)
                assert w.target in upper

    def test_phi_mode_guards(self, squares):
        with pytest.raises(TermExplosion):
            block_language(
                squares, 1, "phi",
                S=tuple(enumerate_upto(squares, 1000)), K=10**4,
            )
        with pytest.raises(ValueError):
            block_language(squares, 1, "phi", S=(5,), K=10)
        with pytest.raises(ValueError):
            block_language(squares, 1, "nope")


class TestHereditaryAudit:
    def test_b2_all_zeros_unresolved(self, b2):
        report = hereditary_audit(b2, 1, 100, escalation=1)
        assert report.status_of(Block(-1, (0, 0, 0))) == "unresolved"
        assert report.status_of(Block(-1, (0, 1, 0))) == "confirmed"
        assert report.unresolved > 0

    def test_squares_confirmed(self, squares):
        report = hereditary_audit(squares, 2, 10**5, escalation=1)
        assert report.unresolved == 0
        assert report.witness_realized == 0  # everything already a factor

    def test_witness_realization_path(self, squares):
        # with a range too small to see triple zeros, the constructor fills in
        report = hereditary_audit(squares, 1, 40, escalation=1)
        zeros = Block(-1, (0, 0, 0))
        assert report.status_of(zeros) in ("witness-realized", "confirmed")

    def test_minimal_subsystem_blocks_recur(self, catalog):
        # factors of the E-indicator recur within one lcm-period of B*:
        # the Toeplitz skeleton of the unique minimal subsystem
        from bfree.structure import b_star

        for B in catalog:
            star = b_star(B)
            period = lcm_all(enumerate_upto(star, 10**4))
            if period > 10**4:
                continue
            for L in (1, 5, 12):
                N = (L - 1) // 2
                seen = set()
                for m in range(-200, 201):
                    seen.add(phi_lower(B, m, N).bits)
                for word in seen:
                    recur = [
                        m
                        for m in range(period)
                        if phi_lower(B, m, N).bits == word
                    ]
                    assert recur, (B.label, word)
