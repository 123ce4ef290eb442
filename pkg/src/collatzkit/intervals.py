"""Certified real comparisons via directed-rounding interval arithmetic.

Every comparison made here is backed by an mpmath interval enclosure whose
endpoints are extracted as exact dyadic rationals.  A comparison is
*certified* when the whole enclosure lies on one side; otherwise precision
is doubled (fresh context each time) up to the policy cap, and the caller
gets PrecisionExhaustedError rather than a guess.  Contexts are local to a
single computation, so concurrent callers never share rounding state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from mpmath.ctx_iv import MPIntervalContext

from .errors import PrecisionExhaustedError

# extra bits over the nominal rung, absorbs enclosure slack near thresholds
GUARD_BITS = 16


@dataclass(frozen=True)
class PrecisionPolicy:
    """Escalation ladder: start_bits, doubling, hard cap."""

    start_bits: int = 128
    max_bits: int = 16384

    def __post_init__(self):
        if self.start_bits < 8 or self.max_bits < self.start_bits:
            raise ValueError(f"bad precision policy {self}")

    def ladder(self) -> Iterator[int]:
        bits = self.start_bits
        while bits <= self.max_bits:
            yield bits
            bits *= 2


DEFAULT_POLICY = PrecisionPolicy()


def _fraction_from_mpf_tuple(t) -> Fraction:
    sign, man, exp, _bc = t
    man = int(man)
    exp = int(exp)
    if man == 0:
        # mpf zero, or an infinity when exp is the special marker
        if exp != 0:
            raise OverflowError("interval endpoint is not finite")
        return Fraction(0)
    f = Fraction(man, 1) * Fraction(2, 1) ** exp
    return -f if sign else f


def endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact dyadic endpoints of an mpmath interval value."""
    lo = _fraction_from_mpf_tuple(x._mpi_[0])
    hi = _fraction_from_mpf_tuple(x._mpi_[1])
    return lo, hi


def make_context(bits: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = bits + GUARD_BITS
    return ctx


@dataclass(frozen=True)
class CertifiedReal:
    """A real number bracketed by exact rational bounds."""

    lo: Fraction
    hi: Fraction
    bits_used: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("inverted enclosure")

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def __float__(self) -> float:
        return float(self.midpoint)

    def sci(self, sig: int = 3) -> str:
        """Midpoint in scientific notation with sig significant digits."""
        from decimal import Decimal, localcontext
        with localcontext() as lctx:
            lctx.prec = sig + 10
            mid = self.midpoint
            v = Decimal(mid.numerator) / Decimal(mid.denominator)
        return format(v, f".{sig - 1}e")


Expr = Callable[[MPIntervalContext], object]


def enclose(expr: Expr, bits: int) -> tuple[Fraction, Fraction]:
    """Evaluate expr in a fresh context at the given precision."""
    return endpoints(expr(make_context(bits)))


def certified_floor(expr: Expr, policy: PrecisionPolicy = DEFAULT_POLICY,
                    what: str = "value") -> tuple[int, int]:
    """Floor of an irrational-valued expression, certified; (floor, bits)."""
    for bits in policy.ladder():
        lo, hi = enclose(expr, bits)
        flo = lo.numerator // lo.denominator
        fhi = hi.numerator // hi.denominator
        if flo == fhi:
            return int(flo), bits
    raise PrecisionExhaustedError(
        f"floor of {what} still ambiguous at {policy.max_bits} bits")


def certified_sign(expr: Expr, policy: PrecisionPolicy = DEFAULT_POLICY,
                   what: str = "value") -> tuple[int, CertifiedReal]:
    """Strict sign (-1 or +1) of a nonzero expression, with its enclosure."""
    for bits in policy.ladder():
        lo, hi = enclose(expr, bits)
        if lo > 0:
            return 1, CertifiedReal(lo, hi, bits)
        if hi < 0:
            return -1, CertifiedReal(lo, hi, bits)
    raise PrecisionExhaustedError(
        f"sign of {what} still ambiguous at {policy.max_bits} bits")


def certified_enclosure(expr: Expr, max_radius: Fraction,
                        policy: PrecisionPolicy = DEFAULT_POLICY,
                        what: str = "value") -> CertifiedReal:
    """Enclosure of expr with radius at most max_radius."""
    for bits in policy.ladder():
        lo, hi = enclose(expr, bits)
        if hi - lo <= 2 * max_radius:
            return CertifiedReal(lo, hi, bits)
    raise PrecisionExhaustedError(
        f"cannot enclose {what} to radius {max_radius} within {policy.max_bits} bits")


def log_ratio_expr(d: int, alpha: int) -> Expr:
    """Expression for log(alpha)/log(d)."""
    def expr(ctx):
        return ctx.log(ctx.mpf(alpha)) / ctx.log(ctx.mpf(d))
    return expr


def certified_partial_quotients(d: int, alpha: int, n_terms: int,
                                policy: PrecisionPolicy = DEFAULT_POLICY) -> tuple[list[int], int]:
    """First n_terms partial quotients of log_d(alpha), each one certified.

    Runs the continued-fraction recursion on the exact rational endpoints of
    an interval enclosure; a term is emitted only when both endpoints share
    the same floor, so each emitted a_n is proven correct.  Ambiguity (or an
    endpoint landing exactly on an integer) escalates the whole expansion to
    doubled precision.
    """
    expr = log_ratio_expr(d, alpha)
    for bits in policy.ladder():
        lo, hi = enclose(expr, bits)
        terms: list[int] = []
        while len(terms) < n_terms:
            flo = lo.numerator // lo.denominator
            fhi = hi.numerator // hi.denominator
            if flo != fhi:
                break
            a = int(flo)
            terms.append(a)
            lo_frac = lo - a
            hi_frac = hi - a
            if lo_frac <= 0:
                break  # next interval would be unbounded; escalate
            lo, hi = 1 / hi_frac, 1 / lo_frac
        if len(terms) >= n_terms:
            return terms, bits
    raise PrecisionExhaustedError(
        f"only certified {len(terms)} partial quotients of log_{d}({alpha}) "
        f"at {policy.max_bits} bits, wanted {n_terms}")


class ConvergentStream:
    """Lazily extended certified convergents p_n/q_n of log_d(alpha).

    Extension recomputes the expansion from scratch at whatever precision the
    policy ladder needs; prefixes are stable across extensions because every
    emitted term is certified.
    """

    def __init__(self, d: int, alpha: int, policy: PrecisionPolicy = DEFAULT_POLICY):
        self.d = d
        self.alpha = alpha
        self.policy = policy
        self.bits_used = 0
        self._terms: list[tuple[int, int, int]] = []  # (a_n, p_n, q_n)

    def ensure(self, n_terms: int) -> None:
        if n_terms <= len(self._terms):
            return
        target = max(n_terms, 2 * len(self._terms), 8)
        try:
            quotients, bits = certified_partial_quotients(self.d, self.alpha, target, self.policy)
        except PrecisionExhaustedError:
            if target == n_terms:
                raise
            # the amortized over-request exceeded the policy cap; the exact
            # demand may still be certifiable
            quotients, bits = certified_partial_quotients(self.d, self.alpha, n_terms, self.policy)
        self.bits_used = max(self.bits_used, bits)
        terms: list[tuple[int, int, int]] = []
        p1, p2, q1, q2 = 1, 0, 0, 1
        for a in quotients:
            p = a * p1 + p2
            q = a * q1 + q2
            terms.append((a, p, q))
            p2, p1, q2, q1 = p1, p, q1, q
        if self._terms and terms[: len(self._terms)] != self._terms:
            raise AssertionError("certified prefix changed across extension")
        self._terms = terms

    def term(self, n: int) -> tuple[int, int, int]:
        self.ensure(n + 1)
        return self._terms[n]

    def prefix(self, n_terms: int) -> Sequence[tuple[int, int, int]]:
        self.ensure(n_terms)
        return tuple(self._terms[:n_terms])
