"""Diophantine bound machinery against independent oracles.

The expected convergents below were computed with the decimal-module oracle
in this file (and double-checked against exact integer power comparisons);
they agree with the float-safe parts of the reference tables and correct
their precision-exhausted tails.
"""

import math
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest

from collatzkit import (BoundPreconditionError, CoprimalityError,
                        MTooSmallError, PrecisionPolicy, convergents,
                        farey_bound, hurwitz_bound, mu_bound, parse_triplet,
                        r_infinity_bound, xi_value)
from collatzkit.bounds import exact_farey_sign

T564 = parse_triplet("5:6:4:+")
T231 = parse_triplet("2:3:1:+")

# first 21 certified convergents of log_5(6); the 21st row corrects the
# reference table's float64 tail
LOG56_PQ = [
    (1, 1), (9, 8), (10, 9), (49, 44), (59, 53), (226, 203), (285, 256),
    (2791, 2507), (5867, 5270), (8658, 7777), (31841, 28601),
    (167863, 150782), (199704, 179383), (367567, 330165), (567271, 509548),
    (934838, 839713), (9915651, 8906678), (10850489, 9746391),
    (20766140, 18653069), (93915049, 84358667), (208596238, 187370403),
]


def oracle_cf_convergents(d, alpha, n_terms, digits=90):
    """Independent continued-fraction oracle built on decimal's ln."""
    with localcontext() as c:
        c.prec = digits
        x = Decimal(alpha).ln() / Decimal(d).ln()
        terms = []
        for _ in range(n_terms):
            a = int(x)
            terms.append(a)
            x = 1 / (x - a)
    pq = []
    p1, p2, q1, q2 = 1, 0, 0, 1
    for a in terms:
        p, q = a * p1 + p2, a * q1 + q2
        pq.append((p, q))
        p2, p1, q2, q1 = p1, p, q1, q
    return pq


class TestConvergents:
    def test_log56_against_oracle_and_frozen_table(self):
        assert oracle_cf_convergents(5, 6, 21) == LOG56_PQ
        seq = convergents(T564, 21)
        assert [(p, q) for _a, p, q in seq.terms] == LOG56_PQ

    def test_rows_21_to_23_certified(self):
        # 24-term pull; the tail rows continue the corrected expansion
        # (oracle-checked; the reference table's q_23 = 15032816369 is a
        # float64 artifact)
        tail = [(511107525, 459099473), (4297456438, 3860166187),
                (4808563963, 4319265660)]
        assert oracle_cf_convergents(5, 6, 24)[21:] == tail
        seq = convergents(T564, 24)
        assert [(p, q) for _a, p, q in seq.terms[21:]] == tail

    def test_log23_first_terms(self):
        seq = convergents(T231, 4)
        assert [(p, q) for _a, p, q in seq.terms] == [(1, 1), (2, 1), (3, 2), (8, 5)]
        assert oracle_cf_convergents(2, 3, 4) == [(1, 1), (2, 1), (3, 2), (8, 5)]

    def test_row_23_of_log23(self):
        seq = convergents(T231, 24)
        assert seq.terms[23][1:] == (217976794617, 137528045312)

    def test_determinant_alternates(self):
        seq = convergents(T564, 25).terms
        for n in range(len(seq) - 1):
            det = seq[n][1] * seq[n + 1][2] - seq[n + 1][1] * seq[n][2]
            assert det == (-1) ** (n + 1)

    def test_coprime_and_increasing(self):
        seq = convergents(T564, 25).terms
        for n, (_a, p, q) in enumerate(seq):
            assert math.gcd(p, q) == 1
            if n >= 1:
                assert q >= seq[n - 1][2]
                if n >= 2:
                    assert q > seq[n - 1][2]

    def test_bracketing_exact(self):
        # p/q < log_d(alpha) iff d^p < alpha^q: exact, float-free
        seq = convergents(T564, 18).terms
        for n, (_a, p, q) in enumerate(seq):
            below = 5**p < 6**q
            assert below == (n % 2 == 0)

    def test_coprimality_required(self):
        with pytest.raises(CoprimalityError):
            convergents(parse_triplet("4:10:54:+"), 5)

    def test_precision_invariance(self):
        lo = convergents(T564, 21, PrecisionPolicy(start_bits=64))
        hi = convergents(T564, 21, PrecisionPolicy(start_bits=1024))
        assert lo.terms == hi.terms


class TestXiValue:
    def test_radius_and_containment(self):
        for t, digits in ((T231, "1.5849625007211561814537389439478"),
                          (T564, "1.1132827525593783458046729280350")):
            for bits in (8, 64, 128):
                enc = xi_value(t, bits)
                assert enc.radius <= Fraction(1, 2**bits)
                truth = Fraction(Decimal(digits))
                # truth string has 31 digits; containment up to that accuracy
                assert enc.lo - Fraction(1, 10**30) <= truth <= enc.hi + Fraction(1, 10**30)

    def test_nested_intervals(self):
        coarse = xi_value(T231, 8)
        fine = xi_value(T231, 64)
        assert coarse.lo <= fine.lo and fine.hi <= coarse.hi

    def test_coprimality(self):
        with pytest.raises(CoprimalityError):
            xi_value(parse_triplet("15:35:10:+"), 32)


class TestHurwitz:
    def test_classical_two_pow_71(self):
        rep = hurwitz_bound(T231, 2**71)
        assert rep.bound == 46859289878
        assert rep.method == "hurwitz"

    def test_oracle_cross_check(self):
        # independent decimal-based evaluation of sqrt(alpha ln d M/(beta (d-1) sqrt 5))
        with localcontext() as c:
            c.prec = 60
            v = (Decimal(6) * Decimal(5).ln() * Decimal(5**30) /
                 (Decimal(16) * Decimal(5).sqrt())).sqrt()
            want = int(v)
        assert hurwitz_bound(T564, 5**30).bound == want == 15854783336

    def test_vacuous_at_one(self):
        assert hurwitz_bound(T231, 1).bound == 0

    def test_preconditions(self):
        with pytest.raises(BoundPreconditionError):
            hurwitz_bound(parse_triplet("4:10:54:+"), 100)
        with pytest.raises(BoundPreconditionError):
            hurwitz_bound(parse_triplet("3:28:-19:+"), 100)


class TestRInfinity:
    def test_float_safe_reference_rows(self):
        for e, bound, n0 in ((5, 36, 3), (10, 2134, 7), (15, 102678, 11),
                             (20, 5905570, 16)):
            rep = r_infinity_bound(T564, 5**e)
            assert (rep.bound, rep.n0) == (bound, n0), f"M=5^{e}"

    def test_certified_corrections_beyond_float64(self):
        # these correct the reference table's precision-exhausted tail
        assert r_infinity_bound(T564, 5**25).bound == 278232150
        assert r_infinity_bound(T564, 5**25).n0 == 21
        rep30 = r_infinity_bound(T564, 5**30)
        assert (rep30.bound, rep30.n0) == (10092943629, 24)

    def test_unimodal_table(self):
        rows = r_infinity_bound(T564, 5**15).rows
        values = [r.value for r in rows]
        peak = values.index(max(values))
        assert values[:peak + 1] == sorted(values[:peak + 1])
        assert values[peak:] == sorted(values[peak:], reverse=True)

    def test_row_values_match_oracle(self):
        # independent recomputation of each row at high decimal precision
        rep = r_infinity_bound(T564, 5**15)
        with localcontext() as c:
            c.prec = 60
            g0M = Decimal(6) * Decimal(5).ln() / Decimal(16) * Decimal(5**15)
            qprev = 0
            for row in rep.rows:
                ratio = g0M / (qprev + row.q)
                assert row.value == min(row.q, int(ratio) + 1)
                qprev = row.q

    def test_precision_invariance(self):
        a = r_infinity_bound(T564, 5**20, PrecisionPolicy(start_bits=64))
        b = r_infinity_bound(T564, 5**20, PrecisionPolicy(start_bits=512))
        assert a.bound == b.bound and a.n0 == b.n0
        assert [(r.n, r.value) for r in a.rows] == [(r.n, r.value) for r in b.rows]

    def test_preconditions(self):
        with pytest.raises(BoundPreconditionError):
            r_infinity_bound(parse_triplet("4:10:54:+"), 100)


class TestFarey:
    def test_values_over_m_grid(self):
        # first flips, certified; 5^5 corrects the reference 226 (its D_3 > 0
        # by exact integer comparison), the last two correct the float tail
        expect = {5: (49, 3), 10: (2791, 7), 15: (167863, 11),
                  20: (10850489, 17), 25: (511107525, 21), 30: (62000223994, 25)}
        for e, (bound, boxed) in expect.items():
            rep = farey_bound(T564, 5**e)
            assert (rep.bound, rep.boxed_index) == (bound, boxed), f"M=5^{e}"
            assert rep.n0 == (boxed - 1) // 2

    def test_classical_two_pow_71(self):
        rep = farey_bound(T231, 2**71)
        assert rep.bound == 217976794617
        assert rep.boxed_index == 23 and rep.n0 == 11

    def test_sign_structure(self):
        rep = farey_bound(T564, 5**15)
        for row in rep.rows:
            if row.n % 2 == 0:
                assert row.sign > 0
            elif row.n < rep.boxed_index:
                assert row.sign < 0
        assert rep.rows[-1].n == rep.boxed_index and rep.rows[-1].sign > 0

    def test_exact_sign_agrees_with_intervals(self):
        for e in (5, 10, 15):
            rep = farey_bound(T564, 5**e)
            for row in rep.rows:
                if row.q <= 10**4:
                    assert exact_farey_sign(T564, 5**e, row.p, row.q) == row.sign

    def test_m_too_small(self):
        with pytest.raises(MTooSmallError):
            farey_bound(T564, 1)

    def test_precision_invariance(self):
        a = farey_bound(T564, 5**25, PrecisionPolicy(start_bits=64))
        b = farey_bound(T564, 5**25, PrecisionPolicy(start_bits=1024))
        assert (a.bound, a.boxed_index) == (b.bound, b.boxed_index)

    def test_precision_exhaustion_is_first_class(self):
        from collatzkit import PrecisionExhaustedError
        with pytest.raises(PrecisionExhaustedError):
            farey_bound(T564, 5**15, PrecisionPolicy(start_bits=8, max_bits=16))

    def test_exact_demand_survives_over_request(self):
        # the amortized stream over-request must not turn a satisfiable
        # bound run into exhaustion: flip index 17 needs 18 terms, and a
        # 64-bit cap certifies ~27
        rep = farey_bound(T564, 5**20, PrecisionPolicy(start_bits=8, max_bits=64))
        assert (rep.bound, rep.boxed_index) == (10850489, 17)

    def test_ambiguous_sign_carries_index(self, monkeypatch):
        import collatzkit.bounds as bounds_mod
        from collatzkit import PrecisionExhaustedError

        def always_ambiguous(expr, policy=None, what=""):
            raise PrecisionExhaustedError(f"synthetic ambiguity for {what}")

        monkeypatch.setattr(bounds_mod, "certified_sign", always_ambiguous)
        with pytest.raises(PrecisionExhaustedError) as exc:
            bounds_mod.farey_bound(T564, 5**15)
        assert exc.value.ambiguous_index == 0

    def test_d3_at_5pow5_positive_exactly(self):
        # the decisive entry: D_3(5^5) > 0 by pure integer arithmetic
        assert 6**44 * (6 * 5**5 + 16)**44 > 5**49 * (6 * 5**5)**44
        assert exact_farey_sign(T564, 5**5, 49, 44) == 1


def test_cross_method_sanity():
    # the square-root bound never beats the best convergent-based bound
    for e in (10, 15, 20, 25):
        h = hurwitz_bound(T564, 5**e).bound
        best = max(r_infinity_bound(T564, 5**e).bound, farey_bound(T564, 5**e).bound)
        assert 1 <= h <= best


class TestMuBound:
    def test_oracle_on_convergent_grid(self):
        # evaluate min(q_n, gamma0*M/q_n^2) over the certified q_n directly
        rep = mu_bound(T564, 5**15, 2)
        with localcontext() as c:
            c.prec = 60
            g0M = Decimal(6) * Decimal(5).ln() / Decimal(16) * Decimal(5**15)
            best = 0
            for row in rep.rows:
                ratio = g0M / (Decimal(row.q) ** 2)
                want = min(row.q, int(ratio) if ratio < row.q else row.q)
                assert row.value == want
                best = max(best, want)
        assert rep.bound == best
        assert not rep.certified  # advisory by construction

    def test_monotone_in_mu(self):
        b2 = mu_bound(T564, 5**15, 2).bound
        b3 = mu_bound(T564, 5**15, 3).bound
        b52 = mu_bound(T564, 5**15, Fraction(5, 2)).bound
        assert b2 >= b52 >= b3

    def test_classical_runs(self):
        rep = mu_bound(T231, 2**71, 2)
        assert rep.bound >= 1
        assert rep.constants["mu"] == "2"

    def test_mu_below_two_rejected(self):
        with pytest.raises(BoundPreconditionError):
            mu_bound(T564, 5**15, Fraction(3, 2))
