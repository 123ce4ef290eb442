import pytest

from collatzkit import (BoundPreconditionError, Converged, CycleDetected,
                        EnteredKnownCycle, IterateFormulaDomainError, Limits,
                        NotACycleError, StepCapExceeded, Triplet, Undecided,
                        ValueCapExceeded, apply_map_iter, canonicalize,
                        check_cycle_necessary_conditions, classify_seed,
                        closed_form_iterate, detect_cycle_from,
                        enumerate_cycles, parse_triplet, trace)

T231 = parse_triplet("2:3:1:+")
T3819 = parse_triplet("3:8:19:+")
T10128 = parse_triplet("10:12:8:+")
T341M = parse_triplet("3:4:1:-")


class TestCanonicalize:
    def test_two_cycle(self):
        c = canonicalize(T3819, [57, 19])
        assert c.omega == 19 and c.length == 2 and c.elements == (19, 57)
        assert c.kbar == 1  # 57 is divisible by 3
        assert c.max_elem == 57

    def test_fixed_point(self):
        c = canonicalize(Triplet(4, 5, -1, 1), [1])
        assert c.omega == 1 and c.length == 1 and c.kbar == 1

    def test_fixed_point_rejects_noncycle(self):
        with pytest.raises(NotACycleError):
            canonicalize(Triplet(4, 5, -1, 1), [4])  # T(4) = 1, not 4

    def test_rotation_to_minimum(self):
        c = canonicalize(T341M, [2, 3, 1])
        assert c.omega == 1 and c.elements == (1, 2, 3) and c.length == 3

    def test_rejects_repeats(self):
        with pytest.raises(NotACycleError):
            canonicalize(T231, [1, 2, 1, 2])

    def test_rejects_broken_chain(self):
        with pytest.raises(NotACycleError):
            canonicalize(T231, [1, 3])


class TestTrace:
    def test_classical_known_minimum(self):
        tr = trace(T231, 6, Limits(known_cycle_minima=frozenset({1})))
        assert tr.path == (6, 3, 5, 8, 4, 2, 1)
        assert tr.visited_count == 6
        assert tr.terminal == EnteredKnownCycle(1)
        assert tr.peak == 8

    def test_cycle_detected(self):
        tr = trace(T3819, 2)
        assert isinstance(tr.terminal, CycleDetected)
        assert tr.terminal.cycle.elements == (2, 18, 6)

    def test_step_cap(self):
        tr = trace(T231, 7, Limits(max_steps=2))
        assert isinstance(tr.terminal, StepCapExceeded)
        assert tr.visited_count == 2

    def test_value_cap(self):
        tr = trace(parse_triplet("2:9:1:+"), 1, Limits(max_value=10**3))
        assert isinstance(tr.terminal, ValueCapExceeded)
        assert tr.peak > 10**3


class TestDetectCycle:
    def test_enters_trivial_cycle(self):
        c = detect_cycle_from(T10128, 25)
        assert c.omega == 4 and c.length == 6
        assert c.elements == (4, 8, 16, 24, 32, 40)

    def test_minus_triplet_cycle(self):
        c = detect_cycle_from(T341M, 7)
        assert c.omega == 7 and c.length == 9
        assert c.elements == (7, 10, 14, 19, 26, 35, 47, 63, 21)

    def test_no_cycle_within_caps(self):
        assert detect_cycle_from(parse_triplet("2:9:1:+"), 1,
                                 Limits(max_steps=10**3, max_value=10**18)) is None

    def test_rotation_invariance(self):
        base = detect_cycle_from(T10128, 4)
        for e in base.elements:
            assert detect_cycle_from(T10128, e) == base

    def test_brent_fallback_matches_hashing(self):
        full = detect_cycle_from(T10128, 25)
        tight = detect_cycle_from(T10128, 25, memory_budget=3)
        assert tight == full
        assert detect_cycle_from(T341M, 7, memory_budget=2) == \
            detect_cycle_from(T341M, 7)

    def test_paper_typo_cycle_length_is_three(self):
        # the (3,4,1)- cycle at 1 has three elements, whatever its caption says
        c = detect_cycle_from(T341M, 1)
        assert c.elements == (1, 2, 3) and c.length == 3


class TestEnumerate:
    def test_ladder_triplet_four_cycles(self):
        cycles = enumerate_cycles(T3819, 1, 200)
        assert {c.omega for c in cycles} == {1, 2, 19, 38}
        lengths = {c.omega: c.length for c in cycles}
        assert lengths == {19: 2, 38: 2, 1: 3, 2: 3}

    def test_single_cycle_triplet(self):
        cycles = enumerate_cycles(parse_triplet("5:6:4:+"), 1, 100)
        assert len(cycles) == 1
        assert cycles[0].omega == 4 and cycles[0].length == 5
        assert cycles[0].elements == (4, 8, 12, 16, 20)

    def test_two_power_exceptional(self):
        cycles = enumerate_cycles(parse_triplet("8:12:4:+"), 1, 600)
        assert [(c.omega, c.length) for c in cycles] == [(1, 4), (67, 6)]

    def test_sorted_and_deterministic(self):
        a = enumerate_cycles(T3819, 1, 200)
        b = enumerate_cycles(T3819, 1, 200)
        assert a == b
        keys = [(c.length, c.omega) for c in a]
        assert keys == sorted(keys)

    def test_cycle_closure_and_minimality(self):
        for c in enumerate_cycles(T3819, 1, 200):
            assert apply_map_iter(T3819, c.omega, c.length) == c.omega
            for k in range(1, c.length):
                assert apply_map_iter(T3819, c.omega, k) != c.omega

    def test_seed_range_above_cycles_still_finds_them(self):
        # orbits from seeds >= 20 pass through values below the range floor;
        # cycles with small minima are still collected
        cycles = enumerate_cycles(T3819, 20, 200)
        assert {c.omega for c in cycles} == {1, 2, 19, 38}

    def test_nonexistent_listed_cycle_is_refuted(self):
        # 33534 converges into the small cycle at 918; it lies on no cycle
        t = parse_triplet("4:10:54:+")
        c = detect_cycle_from(t, 33534)
        assert c.omega == 918 and c.length == 5
        assert 33534 not in c.elements


class TestClassify:
    def test_famous_27(self):
        target = detect_cycle_from(T231, 1)
        assert classify_seed(T231, 27, (target,)) == Converged(1)

    def test_large_seed_converges(self):
        target = detect_cycle_from(T10128, 4)
        label = classify_seed(T10128, 10**6, (target,))
        assert label == Converged(4)
        # independent oracle: direct iteration
        step = T10128.step_function()
        v = 10**6
        for _ in range(10**5):
            if v in target.elements:
                break
            v = step(v)
        assert v in target.elements

    def test_empty_targets_undecided(self):
        assert classify_seed(parse_triplet("2:9:1:+"), 5, (),
                             Limits(max_steps=100, max_value=10**9)) == Undecided()


class TestClosedForm:
    def test_cross_check_against_iteration(self):
        for d in (2, 3):
            for nu1 in (2, 3):
                for mu0 in (2, 3):
                    if 2 * mu0 <= nu1:
                        continue
                    alpha = d**nu1 + 1
                    beta = d**(2 * mu0 + nu1) - alpha**2
                    t = Triplet(d, alpha, beta, 1)
                    for k in range(1, 6):
                        nk = beta * (d**k + 1)
                        for ell in range(1, min(k, nu1) + 1):
                            assert closed_form_iterate(d, nu1, mu0, k, ell) == \
                                apply_map_iter(t, nk, ell)

    def test_substitution_example(self):
        alpha, beta = 3**2 + 1, 3**6 - (3**2 + 1)**2
        assert closed_form_iterate(3, 2, 2, 1, 1) == beta * (alpha + 4)

    def test_domain_rejections(self):
        with pytest.raises(IterateFormulaDomainError):
            closed_form_iterate(2, 2, 2, 2, 0)  # ell >= 1
        with pytest.raises(IterateFormulaDomainError):
            closed_form_iterate(2, 2, 2, 2, 3)  # ell > k
        with pytest.raises(IterateFormulaDomainError):
            closed_form_iterate(2, 1, 2, 3, 1)  # nu1 = 1 branch
        with pytest.raises(IterateFormulaDomainError):
            closed_form_iterate(2, 2, 1, 3, 3)  # ell > nu1: residue class shifts
        with pytest.raises(IterateFormulaDomainError):
            closed_form_iterate(2, 3, 1, 2, 1)  # 2*mu0 <= nu1

    def test_scope_boundary_is_genuine(self):
        # at ell = nu1 + 1 the previous iterate is divisible by d, so the
        # closed form (if extended) would diverge from iteration
        d, nu1, mu0 = 2, 2, 2
        beta = d**(2 * mu0 + nu1) - (d**nu1 + 1)**2
        t = Triplet(d, d**nu1 + 1, beta, 1)
        second = apply_map_iter(t, beta * (d**3 + 1), nu1)
        assert second % d == 0


class TestNecessaryConditions:
    def test_classical_cycle(self):
        rep = check_cycle_necessary_conditions(T231, detect_cycle_from(T231, 1))
        assert rep.both_hold

    def test_single_cycle_example(self):
        t = parse_triplet("5:6:4:+")
        rep = check_cycle_necessary_conditions(t, detect_cycle_from(t, 4))
        assert rep.both_hold
        # Omega(4) = (4,8,12,16,20): one multiple of 5
        assert detect_cycle_from(t, 4).kbar == 4

    def test_square_gap_big_beta(self):
        t = Triplet(5, 6, 3089, 1)
        rep = check_cycle_necessary_conditions(t, detect_cycle_from(t, 3089))
        assert rep.both_hold
        assert detect_cycle_from(t, 3089).length == 5

    def test_precondition_violations(self):
        t = parse_triplet("4:10:54:+")  # gcd(4, 10) = 2
        with pytest.raises(BoundPreconditionError):
            check_cycle_necessary_conditions(t, detect_cycle_from(t, 1))
        tneg = parse_triplet("3:28:-19:+")
        with pytest.raises(BoundPreconditionError):
            check_cycle_necessary_conditions(tneg, detect_cycle_from(tneg, 1))

    def test_report_quantities_bracket_truth(self):
        import math
        t = parse_triplet("5:6:4:+")
        rep = check_cycle_necessary_conditions(t, detect_cycle_from(t, 4))
        gap = rep.quantities["gap"]
        true_gap = 5 - 4 * math.log(6) / math.log(5)
        assert gap.lo <= true_gap <= gap.hi or abs(float(gap) - true_gap) < 1e-12
