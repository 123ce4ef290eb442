"""Checkpointed range verification: every seed in [lo, hi] reaches a target
cycle, scanned in parallel chunks with a deterministic report.

The below-frontier shortcut stops a trajectory as soon as it dips under its
seed; by strong induction that certifies convergence only when the prefix
[1, lo) is itself covered (lo == 1, or resuming past a checkpointed
frontier).  When exceptions exist, only seeds up to min(exception) - 1 are
claimed verified, since the induction is grounded only below the first
undecided seed.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

from .core import PLUS, Triplet, parse_triplet
from .dynamics import Cycle, Limits, canonicalize
from .errors import (DigestMismatchError, InvalidTargetsError,
                     NotACycleError, ShortcutUnsoundError)

DEFAULT_CHUNK = 1 << 16
THREADS_ENV = "COLLATZKIT_THREADS"

STEP_CAP = "step_cap"
VALUE_CAP = "value_cap"


@dataclass(frozen=True)
class VerificationJob:
    triplet: Triplet
    lo: int
    hi: int
    targets: tuple[Cycle, ...]
    limits: Limits = Limits()
    chunk_size: int = DEFAULT_CHUNK
    below_frontier_shortcut: bool = True
    prefix_verified_to: int = 0  # highest seed proven converged before lo

    def __post_init__(self):
        if self.lo < 1 or self.lo > self.hi:
            raise InvalidTargetsError(f"bad range [{self.lo}, {self.hi}]")
        if self.chunk_size < 1:
            raise InvalidTargetsError("chunk_size must be positive")


@dataclass(frozen=True)
class Checkpoint:
    job: VerificationJob
    digest: str
    verified_frontier: int
    exceptions: tuple[tuple[int, str], ...]
    seeds_scanned: int
    wall_time: float
    throughput: float


def job_digest(job: VerificationJob) -> str:
    """Hash of the semantic job fields (range extension and scheduling
    parameters excluded, so resumes keep the same digest)."""
    targets = ";".join(
        f"{c.omega}:" + ",".join(str(x) for x in c.elements)
        for c in sorted(job.targets, key=lambda c: c.omega))
    payload = "|".join([
        "v1",
        job.triplet.text,
        f"base={min(job.lo, job.prefix_verified_to + 1)}",
        targets,
        f"steps={job.limits.max_steps}",
        f"value={job.limits.max_value}",
        f"shortcut={int(job.below_frontier_shortcut)}",
    ])
    return hashlib.sha256(payload.encode()).hexdigest()


def _validate_targets(job: VerificationJob) -> None:
    if not job.targets:
        raise InvalidTargetsError("target cycle set is empty")
    for c in job.targets:
        try:
            again = canonicalize(job.triplet, c.elements)
        except NotACycleError as exc:
            raise InvalidTargetsError(f"target {c.omega} fails cycle closure: {exc}") from None
        if again.omega != c.omega:
            raise InvalidTargetsError(
                f"target claims minimum {c.omega} but cycle minimum is {again.omega}")


def _scan_chunk(args) -> list[tuple[int, str]]:
    """Scan seeds [lo, hi]; returns (seed, status) for every undecided seed."""
    (d, alpha, beta, kappa, lo, hi, members, max_elem,
     max_steps, max_value, shortcut) = args
    exceptions: list[tuple[int, str]] = []
    plus = kappa == PLUS
    for n in range(lo, hi + 1):
        v = n
        steps = 0
        status = None
        if shortcut and n > max_elem:
            # membership impossible while v >= n; pure descent test
            while v >= n:
                if steps >= max_steps:
                    status = STEP_CAP
                    break
                r = v % d
                if r == 0:
                    v //= d
                else:
                    v = (alpha * v + beta * r) // d if plus else \
                        (alpha * v + beta * (d - r)) // d
                steps += 1
                if v > max_value:
                    status = VALUE_CAP
                    break
        else:
            while True:
                if v in members or (shortcut and v < n):
                    break
                if steps >= max_steps:
                    status = STEP_CAP
                    break
                r = v % d
                if r == 0:
                    v //= d
                else:
                    v = (alpha * v + beta * r) // d if plus else \
                        (alpha * v + beta * (d - r)) // d
                steps += 1
                if v > max_value:
                    status = VALUE_CAP
                    break
        if status is not None:
            exceptions.append((n, status))
    return exceptions


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def verify_range(job: VerificationJob, workers: Optional[int] = None) -> Checkpoint:
    """Scan the whole range; deterministic exception list in seed order,
    independent of chunking and worker count."""
    _validate_targets(job)
    if job.below_frontier_shortcut and job.lo > 1 and job.prefix_verified_to < job.lo - 1:
        raise ShortcutUnsoundError(
            f"shortcut requires the prefix [1, {job.lo}) to be covered; "
            f"verified only up to {job.prefix_verified_to}")
    members = frozenset(x for c in job.targets for x in c.elements)
    max_elem = max(members)
    t = job.triplet
    if not t.is_wellformed:
        raise InvalidTargetsError(f"triplet {t} is not well-formed")
    chunks = []
    a = job.lo
    while a <= job.hi:
        b = min(a + job.chunk_size - 1, job.hi)
        chunks.append((t.d, t.alpha, t.beta, t.kappa, a, b, members, max_elem,
                       job.limits.max_steps, job.limits.max_value,
                       job.below_frontier_shortcut))
        a = b + 1
    nworkers = _worker_count(workers)
    start = time.perf_counter()
    if nworkers == 1 or len(chunks) == 1:
        results = [_scan_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(_scan_chunk, chunks))
    wall = time.perf_counter() - start
    exceptions: list[tuple[int, str]] = []
    for r in results:
        exceptions.extend(r)
    seeds = job.hi - job.lo + 1
    frontier = job.hi if not exceptions else exceptions[0][0] - 1
    return Checkpoint(
        job=job,
        digest=job_digest(job),
        verified_frontier=frontier,
        exceptions=tuple(exceptions),
        seeds_scanned=seeds,
        wall_time=wall,
        throughput=seeds / wall if wall > 0 else float("inf"),
    )


def resume(cp: Checkpoint, hi_new: int, workers: Optional[int] = None) -> Checkpoint:
    """Continue a checkpointed job up to hi_new; digest integrity enforced."""
    if job_digest(cp.job) != cp.digest:
        raise DigestMismatchError("checkpoint digest does not match its job")
    if hi_new <= cp.verified_frontier:
        raise InvalidTargetsError(
            f"nothing to do: hi_new={hi_new} <= frontier={cp.verified_frontier}")
    cont = replace(cp.job,
                   lo=cp.verified_frontier + 1,
                   hi=hi_new,
                   prefix_verified_to=cp.verified_frontier)
    part = verify_range(cont, workers=workers)
    merged: dict[int, str] = dict(cp.exceptions)
    merged.update(dict(part.exceptions))
    exceptions = tuple(sorted(merged.items()))
    frontier = hi_new if not exceptions else exceptions[0][0] - 1
    full_job = replace(cp.job, hi=hi_new)
    wall = cp.wall_time + part.wall_time
    seeds = cp.seeds_scanned + part.seeds_scanned
    return Checkpoint(
        job=full_job,
        digest=job_digest(full_job),
        verified_frontier=frontier,
        exceptions=exceptions,
        seeds_scanned=seeds,
        wall_time=wall,
        throughput=seeds / wall if wall > 0 else float("inf"),
    )


# --- checkpoint files ---------------------------------------------------------

def checkpoint_to_json_dict(cp: Checkpoint) -> dict:
    return {
        "version": 1,
        "job": {
            "triplet": cp.job.triplet.to_json_dict(),
            "lo": str(cp.job.lo),
            "hi": str(cp.job.hi),
            "targets": [c.to_json_dict() for c in cp.job.targets],
            "max_steps": str(cp.job.limits.max_steps),
            "max_value": str(cp.job.limits.max_value),
            "chunk_size": cp.job.chunk_size,
            "below_frontier_shortcut": cp.job.below_frontier_shortcut,
            "prefix_verified_to": str(cp.job.prefix_verified_to),
        },
        "digest": cp.digest,
        "verified_frontier": str(cp.verified_frontier),
        "exceptions": [[str(n), status] for n, status in cp.exceptions],
        "seeds_scanned": str(cp.seeds_scanned),
        "wall_time": cp.wall_time,
        "throughput": cp.throughput,
    }


def checkpoint_from_json_dict(doc: dict) -> Checkpoint:
    if doc.get("version") != 1:
        raise InvalidTargetsError(f"unsupported checkpoint version {doc.get('version')}")
    jd = doc["job"]
    td = jd["triplet"]
    t = parse_triplet(f"{td['d']}:{td['alpha']}:{td['beta']}:{td['kappa']}")
    targets = []
    for c in jd["targets"]:
        elements = tuple(int(x) for x in c["elements"])
        targets.append(Cycle(
            elements=elements,
            omega=int(c["omega"]),
            length=int(c["length"]),
            kbar=int(c["kbar"]),
            max_elem=int(c["max_elem"]),
        ))
    job = VerificationJob(
        triplet=t,
        lo=int(jd["lo"]),
        hi=int(jd["hi"]),
        targets=tuple(targets),
        limits=Limits(max_steps=int(jd["max_steps"]), max_value=int(jd["max_value"])),
        chunk_size=int(jd["chunk_size"]),
        below_frontier_shortcut=bool(jd["below_frontier_shortcut"]),
        prefix_verified_to=int(jd["prefix_verified_to"]),
    )
    return Checkpoint(
        job=job,
        digest=doc["digest"],
        verified_frontier=int(doc["verified_frontier"]),
        exceptions=tuple((int(n), status) for n, status in doc["exceptions"]),
        seeds_scanned=int(doc["seeds_scanned"]),
        wall_time=float(doc["wall_time"]),
        throughput=float(doc["throughput"]),
    )


def save_checkpoint(cp: Checkpoint, path: str) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    doc = checkpoint_to_json_dict(cp)
    directory = os.path.dirname(os.path.abspath(path))
    tmp = os.path.join(directory, f".{os.path.basename(path)}.tmp.{os.getpid()}")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, encoding="utf-8") as fh:
        return checkpoint_from_json_dict(json.load(fh))
