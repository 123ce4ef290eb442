"""Trajectories, cycle detection and canonical cycles, orbit classification.

Divergence is never asserted: a trajectory that exhausts its caps is
reported as capped/undecided, with the caps that were in force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .core import Triplet
from .errors import (BoundPreconditionError, InvalidTripletError,
                     IterateFormulaDomainError, NotACycleError)
from .intervals import (DEFAULT_POLICY, CertifiedReal, PrecisionPolicy,
                        certified_sign, endpoints, make_context)

DEFAULT_MAX_STEPS = 10**5
DEFAULT_MAX_VALUE = 10**30


@dataclass(frozen=True)
class Limits:
    """Caps for orbit exploration plus early-exit cycle minima."""

    max_steps: int = DEFAULT_MAX_STEPS
    max_value: int = DEFAULT_MAX_VALUE
    known_cycle_minima: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.max_steps < 1 or self.max_value < 1:
            raise InvalidTripletError("limits must be positive")


@dataclass(frozen=True)
class Cycle:
    """A periodic orbit, rotated so its minimum leads.

    length is the exact period (elements are distinct), kbar counts the
    elements not divisible by d.
    """

    elements: tuple[int, ...]
    omega: int
    length: int
    kbar: int
    max_elem: int

    def to_json_dict(self, t: Triplet | None = None) -> dict:
        rec = {
            "omega": str(self.omega),
            "length": self.length,
            "kbar": self.kbar,
            "max_elem": str(self.max_elem),
            "elements": [str(x) for x in self.elements],
        }
        if t is not None:
            rec["triplet"] = t.to_json_dict()
        return rec


def canonicalize(t: Triplet, elements: Iterable[int]) -> Cycle:
    """Validate an orbit list as a genuine cycle and rotate min-first."""
    elems = [int(x) for x in elements]
    if not elems:
        raise NotACycleError("empty element list")
    if len(set(elems)) != len(elems):
        raise NotACycleError("repeated values in claimed cycle")
    step = t.step_function()
    for i, x in enumerate(elems):
        nxt = elems[(i + 1) % len(elems)]
        if step(x) != nxt:
            raise NotACycleError(
                f"T({x}) = {step(x)} != {nxt}; not an orbit of {t}")
    i0 = elems.index(min(elems))
    rotated = tuple(elems[i0:] + elems[:i0])
    return Cycle(
        elements=rotated,
        omega=rotated[0],
        length=len(rotated),
        kbar=sum(1 for x in rotated if x % t.d != 0),
        max_elem=max(rotated),
    )


# --- trajectory terminals ---------------------------------------------------

@dataclass(frozen=True)
class EnteredKnownCycle:
    omega: int


@dataclass(frozen=True)
class CycleDetected:
    cycle: Cycle


@dataclass(frozen=True)
class StepCapExceeded:
    pass


@dataclass(frozen=True)
class ValueCapExceeded:
    pass


Terminal = Union[EnteredKnownCycle, CycleDetected, StepCapExceeded, ValueCapExceeded]


@dataclass(frozen=True)
class Trajectory:
    start: int
    visited_count: int  # map applications performed
    terminal: Terminal
    peak: int
    path: tuple[int, ...] = field(repr=False, default=())


def trace(t: Triplet, n: int, limits: Limits = Limits()) -> Trajectory:
    """Iterate T from n until a known minimum, a revisit, or a cap.

    Stops at the first of: current value is one of the known cycle minima,
    revisit of a value seen in this trajectory (the cycle is extracted),
    step cap, value cap.
    """
    step = t.step_function()
    known = limits.known_cycle_minima
    path = [n]
    seen = {n: 0}
    peak = n
    v = n
    steps = 0
    while True:
        if v in known:
            return Trajectory(n, steps, EnteredKnownCycle(v), peak, tuple(path))
        if steps >= limits.max_steps:
            return Trajectory(n, steps, StepCapExceeded(), peak, tuple(path))
        v = step(v)
        steps += 1
        if v > peak:
            peak = v
        if v > limits.max_value:
            path.append(v)
            return Trajectory(n, steps, ValueCapExceeded(), peak, tuple(path))
        if v in seen:
            cycle = canonicalize(t, path[seen[v]:])
            return Trajectory(n, steps, CycleDetected(cycle), peak, tuple(path))
        seen[v] = len(path)
        path.append(v)


def detect_cycle_from(t: Triplet, n: int, limits: Limits = Limits(),
                      memory_budget: int = 1_000_000) -> Optional[Cycle]:
    """Cycle reached by the forward orbit of n, canonicalized, or None.

    Uses value hashing while the visited set fits the memory budget, then
    switches to Brent's constant-memory detection from the current point.
    Either way the extracted period is exact.
    """
    step = t.step_function()
    budget = min(limits.max_steps, memory_budget)
    path = [n]
    index = {n: 0}
    v = n
    steps = 0
    while steps < limits.max_steps and len(path) <= budget:
        v = step(v)
        steps += 1
        if v > limits.max_value:
            return None
        hit = index.get(v)
        if hit is not None:
            return canonicalize(t, path[hit:])
        index[v] = len(path)
        path.append(v)
    if steps >= limits.max_steps:
        return None
    return _brent_from(t, v, limits.max_steps - steps, limits.max_value)


def _brent_from(t: Triplet, x0: int, steps_left: int, max_value: int) -> Optional[Cycle]:
    step = t.step_function()
    if steps_left < 1:
        return None
    power = lam = 1
    tortoise = x0
    hare = step(x0)
    used = 1
    if hare > max_value:
        return None
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        if used >= steps_left:
            return None
        hare = step(hare)
        used += 1
        lam += 1
        if hare > max_value:
            return None
    # tortoise lies on the cycle; collect exactly lam elements
    elems = [tortoise]
    x = step(tortoise)
    while x != tortoise:
        elems.append(x)
        x = step(x)
    return canonicalize(t, elems)


def enumerate_cycles(t: Triplet, seed_lo: int, seed_hi: int,
                     limits: Limits = Limits()) -> tuple[Cycle, ...]:
    """All cycles reached from seeds in [seed_lo, seed_hi] within the caps.

    Deduplicated by cycle minimum, sorted by (length, omega).  Orbits stop
    early on any element of an already-found cycle, and on any value in
    [seed_lo, seed) whose orbit was therefore already explored.
    """
    if seed_lo > seed_hi or seed_lo < 1:
        raise InvalidTripletError(f"bad seed range [{seed_lo}, {seed_hi}]")
    step = t.step_function()
    max_steps, max_value = limits.max_steps, limits.max_value
    found: dict[int, Cycle] = {}
    known_elements: set[int] = set()
    for seed in range(seed_lo, seed_hi + 1):
        if seed in known_elements:
            continue
        v = seed
        index = {seed: 0}
        path = [seed]
        steps = 0
        while steps < max_steps:
            if v in known_elements:
                break
            v = step(v)
            steps += 1
            if v > max_value or (seed_lo <= v < seed):
                break
            hit = index.get(v)
            if hit is not None:
                cycle = canonicalize(t, path[hit:])
                if cycle.omega not in found:
                    found[cycle.omega] = cycle
                    known_elements.update(cycle.elements)
                break
            index[v] = len(path)
            path.append(v)
    return tuple(sorted(found.values(), key=lambda c: (c.length, c.omega)))


# --- seed classification ----------------------------------------------------

@dataclass(frozen=True)
class Converged:
    omega: int


@dataclass(frozen=True)
class Undecided:
    pass


SeedLabel = Union[Converged, Undecided]


def classify_seed(t: Triplet, n: int, cycles: Iterable[Cycle],
                  limits: Limits = Limits()) -> SeedLabel:
    """Converged(omega) when the orbit hits any element of a given cycle.

    Caps produce Undecided; membership in a divergent class is never
    asserted.
    """
    owner: dict[int, int] = {}
    for c in cycles:
        for x in c.elements:
            owner[x] = c.omega
    step = t.step_function()
    v = n
    steps = 0
    while True:
        hit = owner.get(v)
        if hit is not None:
            return Converged(hit)
        if steps >= limits.max_steps:
            return Undecided()
        v = step(v)
        steps += 1
        if v > limits.max_value:
            return Undecided()


# --- closed-form iterate for the square-gap family ---------------------------

def closed_form_iterate(d: int, nu1: int, mu0exp: int, k: int, ell: int) -> int:
    """Value of T^(ell) at beta*(d^k + 1) for the square-gap triplet, in
    closed form:

        beta * (alpha^ell * d^(k-ell) + sum_{i<ell} alpha^i d^(nu1-i-1) + 1)

    with alpha = d^nu1 + 1 and beta = d^(2*mu0exp+nu1) - alpha^2.  Valid for
    1 <= ell <= min(k, nu1) and nu1 > 1: beyond nu1 the iterate's residue
    class changes (for ell = nu1 the bracket is congruent to 2 mod d), so the
    formula stops matching iteration and is rejected.
    """
    if d < 2:
        raise IterateFormulaDomainError(f"d must be >= 2, got {d}")
    if nu1 <= 1:
        raise IterateFormulaDomainError("nu1 must exceed 1; nu1=1 is a different construction")
    if 2 * mu0exp <= nu1:
        raise IterateFormulaDomainError(f"need 2*mu0exp > nu1, got {2 * mu0exp} <= {nu1}")
    if k < 1:
        raise IterateFormulaDomainError(f"k must be >= 1, got {k}")
    if ell < 1 or ell > k:
        raise IterateFormulaDomainError(f"ell must lie in [1, k], got {ell}")
    if ell > nu1:
        raise IterateFormulaDomainError(
            f"formula scope ends at ell = nu1 = {nu1}; got ell = {ell}")
    alpha = d**nu1 + 1
    beta = d**(2 * mu0exp + nu1) - alpha * alpha
    bracket = alpha**ell * d**(k - ell) + sum(alpha**i * d**(nu1 - i - 1) for i in range(ell)) + 1
    return beta * bracket


# --- necessary conditions for any genuine cycle ------------------------------

@dataclass(frozen=True)
class CycleBoundReport:
    """Certified evaluation of the two inequality chains every cycle obeys.

    max_side:  0 < kbar*log_d(1 + beta/(alpha*max)) < L - kbar*xi
                 <= sum over non-divisible elements of log_d(1 + beta(d-1)/(alpha n))
                 <= beta(d-1)/(alpha ln d) * sum 1/n
    min_side:  0 < L - kbar*xi <= kbar*log_d(1 + beta(d-1)/(alpha*min))
                 <= kbar*beta(d-1)/(alpha ln d * min)
    """

    max_side_holds: bool
    min_side_holds: bool
    quantities: dict[str, CertifiedReal]
    bits_used: int

    @property
    def both_hold(self) -> bool:
        return self.max_side_holds and self.min_side_holds


def check_cycle_necessary_conditions(t: Triplet, cycle: Cycle,
                                     policy: PrecisionPolicy = DEFAULT_POLICY) -> CycleBoundReport:
    """Certify both chains.

    Comparisons between pure logarithms of rationals are decided exactly by
    big-integer power comparison (they can hold with equality: for d=2 every
    non-divisible residue equals d-1, so the middle inequality of the max
    chain is an identity).  Comparisons of a logarithm against a rational
    are strict in truth and decided by interval escalation.
    """
    if math.gcd(t.d, t.alpha) != 1:
        raise BoundPreconditionError(f"gcd(d, alpha) != 1 for {t}")
    if t.beta <= 0:
        raise BoundPreconditionError(f"beta must be positive for {t}")
    d, alpha, beta = t.d, t.alpha, t.beta
    L, kbar = cycle.length, cycle.kbar
    lo_elem, hi_elem = cycle.omega, cycle.max_elem
    nondiv = [x for x in cycle.elements if x % d != 0]

    prod_num = 1  # product of (alpha*n + beta*(d-1)) over non-divisible n
    prod_den = 1  # product of (alpha*n)
    for x in nondiv:
        prod_num *= alpha * x + beta * (d - 1)
        prod_den *= alpha * x
    harmonic = sum(Fraction(1, x) for x in nondiv)
    sum_coeff = Fraction(beta * (d - 1), alpha) * harmonic
    min_coeff = Fraction(kbar * beta * (d - 1), alpha * lo_elem)

    # exact decisions: sign of log-linear combinations == integer comparisons
    # max_lhs > 0        <=>  (alpha*max + beta) > alpha*max
    max_lhs_pos = alpha * hi_elem + beta > alpha * hi_elem
    # max_lhs < gap      <=>  alpha^kbar * (alpha*max+beta)^kbar < d^L * (alpha*max)^kbar
    lhs_lt_gap = alpha**kbar * (alpha * hi_elem + beta)**kbar < d**L * (alpha * hi_elem)**kbar
    # gap > 0            <=>  d^L > alpha^kbar
    gap_pos = d**L > alpha**kbar
    # gap <= sum_logs    <=>  d^L * prod_den <= alpha^kbar * prod_num   (equality for d=2)
    gap_le_sum = d**L * prod_den <= alpha**kbar * prod_num
    # gap <= min_mid     <=>  d^L * min^kbar <= (alpha*min + beta*(d-1))^kbar
    gap_le_min = d**L * lo_elem**kbar <= (alpha * lo_elem + beta * (d - 1))**kbar

    # strict-in-truth comparisons (log vs rational): interval escalation
    def sum_slack(ctx):
        ln_d = ctx.log(ctx.mpf(d))
        logs = ctx.log(ctx.mpf(prod_num)) - ctx.log(ctx.mpf(prod_den))
        bound = ctx.mpf(sum_coeff.numerator) / ctx.mpf(sum_coeff.denominator)
        return (bound - logs) / ln_d

    def min_slack(ctx):
        ln_d = ctx.log(ctx.mpf(d))
        mid = kbar * (ctx.log(ctx.mpf(alpha * lo_elem + beta * (d - 1))) -
                      ctx.log(ctx.mpf(alpha * lo_elem)))
        bound = ctx.mpf(min_coeff.numerator) / ctx.mpf(min_coeff.denominator)
        return (bound - mid) / ln_d

    sign_sum, enc_sum = certified_sign(sum_slack, policy, what="sum bound slack")
    sign_min, enc_min = certified_sign(min_slack, policy, what="min bound slack")
    bits = max(enc_sum.bits_used, enc_min.bits_used)

    max_side = max_lhs_pos and lhs_lt_gap and gap_le_sum and sign_sum > 0
    min_side = gap_pos and gap_le_min and sign_min > 0

    # display enclosures for the report (not used for any decision)
    ctx = make_context(bits)
    ln_d = ctx.log(ctx.mpf(d))
    shown = {
        "max_lhs": kbar * (ctx.log(ctx.mpf(alpha * hi_elem + beta)) -
                           ctx.log(ctx.mpf(alpha * hi_elem))) / ln_d,
        "gap": L - kbar * ctx.log(ctx.mpf(alpha)) / ln_d,
        "sum_logs": (ctx.log(ctx.mpf(prod_num)) - ctx.log(ctx.mpf(prod_den))) / ln_d,
        "sum_bound": ctx.mpf(sum_coeff.numerator) / ctx.mpf(sum_coeff.denominator) / ln_d,
        "min_mid": kbar * (ctx.log(ctx.mpf(alpha * lo_elem + beta * (d - 1))) -
                           ctx.log(ctx.mpf(alpha * lo_elem))) / ln_d,
        "min_bound": ctx.mpf(min_coeff.numerator) / ctx.mpf(min_coeff.denominator) / ln_d,
    }
    reals = {}
    for name, val in shown.items():
        lo, hi = endpoints(val)
        reals[name] = CertifiedReal(lo, hi, bits)
    return CycleBoundReport(max_side, min_side, reals, bits)
