"""Command-line surface: check, map, trace, cycles, family, bound, verify,
resume.  Human-readable tables go to stdout; --json/--csv write reports.

Exit status: 0 success, 1 domain error (message names the violated
precondition), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bounds import (Alg2Row, BoundReport, farey_bound, hurwitz_bound,
                     mu_bound, r_infinity_bound)
from .core import Triplet, apply_map, apply_map_iter, parse_triplet
from .dynamics import (CycleDetected, EnteredKnownCycle, Limits,
                       StepCapExceeded, ValueCapExceeded, detect_cycle_from,
                       enumerate_cycles, trace)
from .errors import CollatzKitError, InvalidTargetsError
from .families import (LadderParams, PredictedCycleSet, SquareGapParams,
                       build_dplus1_family, build_ladder_family,
                       build_mersenne_family, build_square_gap_family,
                       build_two_power_family, parse_family_spec,
                       scale_cycles)
from .intervals import DEFAULT_POLICY, PrecisionPolicy
from .verify import (Checkpoint, VerificationJob, load_checkpoint, resume,
                     save_checkpoint, verify_range)

_POWER_RE = re.compile(r"^(\d+)\^(\d+)$")


def parse_natural(text: str) -> int:
    """Decimal or base^exponent shorthand (5^15, 2^71)."""
    s = text.strip()
    m = _POWER_RE.match(s)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    if s.isdigit():
        return int(s)
    raise argparse.ArgumentTypeError(f"expected a natural number or b^e, got {text!r}")


def _sign(text: str) -> int:
    if text in ("+", "+1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"expected + or -, got {text!r}")


# --- table emission -----------------------------------------------------------

def _text_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    out = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    for row in rows:
        out.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(out)


def _bound_rows(report: BoundReport) -> list[list[str]]:
    rows = []
    for r in report.rows:
        value = r.approx if isinstance(r, Alg2Row) else str(r.value)
        rows.append([str(r.n), str(r.p), str(r.q), value])
    return rows


def emit_table(report, fmt: str = "text") -> str:
    """Render a BoundReport, PredictedCycleSet, or Checkpoint."""
    if isinstance(report, BoundReport):
        if fmt == "json":
            return json.dumps(report.to_json_dict(), indent=1)
        header = ["n", "p_n", "q_n", "value"]
        rows = _bound_rows(report)
        if fmt == "csv":
            return _csv_string(header, rows)
        lines = []
        if rows:
            lines.append(_text_table(header, rows))
        lines.append(f"method={report.method} triplet={report.triplet} "
                     f"min_omega={report.M}")
        tail = f"bound={report.bound} n0={report.n0}"
        if report.boxed_index is not None:
            tail += f" boxed_index={report.boxed_index}"
        if not report.certified:
            tail += " (advisory)"
        lines.append(tail)
        for k, v in report.constants.items():
            lines.append(f"{k}={v}")
        return "\n".join(lines)
    if isinstance(report, PredictedCycleSet):
        if fmt == "json":
            return json.dumps(report.to_json_dict(), indent=1)
        header = ["omega", "length", "kbar", "max_elem", "elements"]
        rows = [[str(c.omega), str(c.length), str(c.kbar), str(c.max_elem),
                 "->".join(str(x) for x in c.elements)] for c in report.cycles]
        if fmt == "csv":
            return _csv_string(header, rows)
        lines = [f"triplet {report.triplet}  [{report.provenance}]",
                 f"cycles: {len(report.cycles)} "
                 f"(order lower bound {report.lower_bound_on_order})"]
        if report.generated_count is not None:
            lines.append(f"generator count before deduplication: {report.generated_count}")
        lines.append(_text_table(header, rows))
        return "\n".join(lines)
    if isinstance(report, Checkpoint):
        from .verify import checkpoint_to_json_dict
        if fmt == "json":
            return json.dumps(checkpoint_to_json_dict(report), indent=1)
        header = ["n", "status"]
        rows = [[str(n), status] for n, status in report.exceptions]
        if fmt == "csv":
            summary = _csv_string(
                ["triplet", "lo", "hi", "frontier", "seeds", "throughput"],
                [[report.job.triplet.text, str(report.job.lo), str(report.job.hi),
                  str(report.verified_frontier), str(report.seeds_scanned),
                  f"{report.throughput:.0f}"]])
            return summary + "\n" + _csv_string(header, rows)
        lines = [
            f"triplet {report.job.triplet}  range [{report.job.lo}, {report.job.hi}]",
            f"verified frontier: {report.verified_frontier}",
            f"exceptions: {len(report.exceptions)}",
            f"seeds scanned: {report.seeds_scanned} in {report.wall_time:.2f}s "
            f"({report.throughput:,.0f} seeds/s)",
        ]
        if report.exceptions:
            lines.append(_text_table(header, rows))
        return "\n".join(lines)
    raise TypeError(f"cannot emit {type(report)!r}")


def _csv_string(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write_outputs(report, args) -> None:
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(emit_table(report, "json") + "\n")
    if getattr(args, "csv", None):
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(emit_table(report, "csv"))


# --- command handlers ---------------------------------------------------------

def _limits_from(args) -> Limits:
    known = frozenset()
    raw = getattr(args, "known", None)
    if raw:
        known = frozenset(parse_natural(x) for x in raw.split(","))
    return Limits(max_steps=args.max_steps, max_value=args.max_value,
                  known_cycle_minima=known)


def _policy_from(args) -> PrecisionPolicy:
    return PrecisionPolicy(start_bits=args.precision_bits,
                           max_bits=args.max_precision_bits)


def _cmd_check(args) -> int:
    t = parse_triplet(args.triplet)
    wf = t.wellformedness
    if wf.satisfied:
        print(f"{t} is well-formed: the map sends naturals to naturals")
        return 0
    s = t.alpha + t.kappa * t.beta
    if not wf.divisibility_ok:
        print(f"divisibility clause fails: {t.d} does not divide {s}")
    if not wf.magnitude_ok:
        rhs = ((t.kappa - 1) // 2) * t.beta * t.d
        print(f"magnitude clause fails: {s} is not greater than {rhs}")
    if wf.witness is not None:
        print(f"witness: the map leaves the naturals at n={wf.witness}")
    return 1


def _cmd_map(args) -> int:
    t = parse_triplet(args.triplet)
    if args.iters is None:
        print(apply_map(t, args.n))
    else:
        print(apply_map_iter(t, args.n, args.iters))
    return 0


def _cmd_trace(args) -> int:
    t = parse_triplet(args.triplet)
    tr = trace(t, args.n, _limits_from(args))
    shown = tr.path if len(tr.path) <= 40 else tr.path[:40]
    arrow = "->".join(str(x) for x in shown)
    if len(tr.path) > 40:
        arrow += "->..."
    print(arrow)
    term = tr.terminal
    if isinstance(term, EnteredKnownCycle):
        print(f"entered known cycle at omega={term.omega} after {tr.visited_count} steps")
    elif isinstance(term, CycleDetected):
        c = term.cycle
        print(f"cycle detected: omega={c.omega} length={c.length} after {tr.visited_count} steps")
    elif isinstance(term, StepCapExceeded):
        print(f"step cap {args.max_steps} exceeded")
    elif isinstance(term, ValueCapExceeded):
        print(f"value cap {args.max_value} exceeded")
    print(f"peak value: {tr.peak}")
    return 0


def _cmd_cycles(args) -> int:
    t = parse_triplet(args.triplet)
    cycles = enumerate_cycles(t, args.seed_lo, args.seed_hi, _limits_from(args))
    report = PredictedCycleSet(t, cycles, f"seeds:{args.seed_lo}..{args.seed_hi}",
                               len(cycles))
    print(emit_table(report, "text"))
    _write_outputs(report, args)
    return 0


def _cmd_family(args) -> int:
    kind = args.kind
    if kind == "ladder":
        report = build_ladder_family(LadderParams(
            args.d, args.nu0, args.nu1, args.delta, args.k0, args.k1))
    elif kind == "squaregap":
        report = build_square_gap_family(SquareGapParams(args.d, args.nu1, args.mu0))
    elif kind == "dplus1":
        report = build_dplus1_family(args.d, args.kappa)
    elif kind == "mersenne":
        report = build_mersenne_family(args.p)
    elif kind == "power2":
        report = build_two_power_family(args.p, args.q)
    elif kind == "scale":
        base = parse_family_spec(args.of)
        report = scale_cycles(base.triplet, base.cycles, args.a0)
    elif kind == "spec":
        report = parse_family_spec(args.spec)
    else:  # pragma: no cover
        raise AssertionError(kind)
    print(emit_table(report, "text"))
    _write_outputs(report, args)
    return 0


def _cmd_bound(args) -> int:
    t = parse_triplet(args.triplet)
    policy = _policy_from(args)
    method = args.method
    if method in ("alg1", "r-infinity"):
        report = r_infinity_bound(t, args.min_omega, policy)
    elif method in ("alg2", "farey"):
        report = farey_bound(t, args.min_omega, policy)
    elif method == "hurwitz":
        report = hurwitz_bound(t, args.min_omega, policy)
    elif method == "mu":
        report = mu_bound(t, args.min_omega, Fraction(args.mu), policy)
    else:  # pragma: no cover
        raise AssertionError(method)
    print(emit_table(report, "text"))
    _write_outputs(report, args)
    return 0


def _targets_for(t: Triplet, spec: str, limits: Limits):
    targets = []
    for part in spec.split(","):
        omega = parse_natural(part)
        cycle = detect_cycle_from(t, omega, limits)
        if cycle is None or cycle.omega != omega:
            raise InvalidTargetsError(
                f"{omega} is not the minimum of a cycle reachable from itself")
        targets.append(cycle)
    return tuple(targets)


def _cmd_verify(args) -> int:
    t = parse_triplet(args.triplet)
    limits = Limits(max_steps=args.max_steps, max_value=args.max_value)
    targets = _targets_for(t, args.targets, limits)
    job = VerificationJob(
        triplet=t, lo=args.lo, hi=args.hi, targets=targets, limits=limits,
        chunk_size=args.chunk, below_frontier_shortcut=not args.no_shortcut)
    cp = verify_range(job, workers=args.threads)
    print(emit_table(cp, "text"))
    if args.checkpoint:
        save_checkpoint(cp, args.checkpoint)
        print(f"checkpoint written to {args.checkpoint}")
    _write_outputs(cp, args)
    return 0 if not cp.exceptions else 1


def _cmd_resume(args) -> int:
    cp = load_checkpoint(args.checkpoint)
    cp2 = resume(cp, args.hi, workers=args.threads)
    print(emit_table(cp2, "text"))
    save_checkpoint(cp2, args.checkpoint)
    print(f"checkpoint updated at {args.checkpoint}")
    _write_outputs(cp2, args)
    return 0 if not cp2.exceptions else 1


# --- parser -------------------------------------------------------------------

def _add_caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-steps", type=parse_natural, default=10**5)
    p.add_argument("--max-value", type=parse_natural, default=10**30)


def _add_outputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", metavar="PATH", help="write a JSON report")
    p.add_argument("--csv", metavar="PATH", help="write a CSV report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="collatzkit",
        description="Generalized Collatz triplet maps: cycles, families, "
                    "certified cycle-length bounds, range verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="well-formedness of a triplet")
    p.add_argument("--triplet", required=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("map", help="apply the map once or k times")
    p.add_argument("--triplet", required=True)
    p.add_argument("--n", type=parse_natural, required=True)
    p.add_argument("--iters", type=parse_natural, default=None)
    p.set_defaults(func=_cmd_map)

    p = sub.add_parser("trace", help="trajectory until cycle, known minimum, or cap")
    p.add_argument("--triplet", required=True)
    p.add_argument("--n", type=parse_natural, required=True)
    p.add_argument("--known", help="comma-separated known cycle minima")
    _add_caps(p)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("cycles", help="enumerate cycles over a seed range")
    p.add_argument("--triplet", required=True)
    p.add_argument("--seed-lo", type=parse_natural, default=1)
    p.add_argument("--seed-hi", type=parse_natural, required=True)
    _add_caps(p)
    _add_outputs(p)
    p.set_defaults(func=_cmd_cycles)

    p = sub.add_parser("family", help="build a trivial-cycle family")
    fam = p.add_subparsers(dest="kind", required=True)
    f = fam.add_parser("ladder")
    f.add_argument("--d", type=parse_natural, required=True)
    f.add_argument("--nu0", type=parse_natural, required=True)
    f.add_argument("--nu1", type=parse_natural, required=True)
    f.add_argument("--delta", type=parse_natural, required=True)
    f.add_argument("--k0", type=_sign, required=True)
    f.add_argument("--k1", type=_sign, required=True)
    f = fam.add_parser("squaregap")
    f.add_argument("--d", type=parse_natural, required=True)
    f.add_argument("--nu1", type=parse_natural, required=True)
    f.add_argument("--mu0", type=parse_natural, required=True)
    f = fam.add_parser("dplus1")
    f.add_argument("--d", type=parse_natural, required=True)
    f.add_argument("--kappa", type=_sign, required=True)
    f = fam.add_parser("mersenne")
    f.add_argument("--p", type=parse_natural, required=True)
    f = fam.add_parser("power2")
    f.add_argument("--p", type=parse_natural, required=True)
    f.add_argument("--q", type=parse_natural, required=True)
    f = fam.add_parser("scale")
    f.add_argument("--of", required=True,
                   help="base family spec, e.g. squaregap:d=5,nu1=1,mu0=2")
    f.add_argument("--a0", type=parse_natural, required=True)
    f = fam.add_parser("spec")
    f.add_argument("spec", help="family spec string, e.g. power2:p=3,q=1")
    for f in fam.choices.values():
        _add_outputs(f)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("bound", help="lower bounds on hypothetical cycle length")
    p.add_argument("method", choices=["alg1", "r-infinity", "alg2", "farey",
                                      "hurwitz", "mu"])
    p.add_argument("--triplet", required=True)
    p.add_argument("--min-omega", type=parse_natural, required=True,
                   help="threshold M: every cycle minimum is assumed >= M")
    p.add_argument("--mu", default="2", help="irrationality measure (mu method)")
    p.add_argument("--precision-bits", type=int, default=DEFAULT_POLICY.start_bits)
    p.add_argument("--max-precision-bits", type=int, default=DEFAULT_POLICY.max_bits)
    _add_outputs(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("verify", help="verify every seed in a range reaches a target")
    p.add_argument("--triplet", required=True)
    p.add_argument("--lo", type=parse_natural, default=1)
    p.add_argument("--hi", type=parse_natural, required=True)
    p.add_argument("--targets", required=True, help="comma-separated cycle minima")
    p.add_argument("--chunk", type=parse_natural, default=1 << 16)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default: $COLLATZKIT_THREADS or cores)")
    p.add_argument("--no-shortcut", action="store_true",
                   help="disable the below-frontier shortcut")
    p.add_argument("--checkpoint", metavar="PATH")
    _add_caps(p)
    _add_outputs(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("resume", help="extend a checkpointed verification")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--hi", type=parse_natural, required=True)
    p.add_argument("--threads", type=int, default=None)
    _add_outputs(p)
    p.set_defaults(func=_cmd_resume)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CollatzKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
