"""Does a transform preserve the uniform/Haar connection measure?

Two independent routes.  The exact route enumerates every configuration
of a finite group on the base skeleton the transform reads, pushes each
through, and demands the probe-skeleton marginal be uniform to the
integer.  The statistical route draws lazy Haar connections and checks
fundamental-character moments of loop holonomies against their Haar
values before and after transforming.  A third check exhibits the
failure mode: pinned edges come out constant, which no measure-preserving
map allows.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .connections import ExplicitConnection, LazyHaarConnection
from .groups import GroupCtx, counter_seed, derive_seed
from .paths import GraphSkeleton, PathWord, induce_skeleton
from .transforms import Transform


class EnumerationCapError(ValueError):
    """The exact route refuses to enumerate past its configuration cap."""


def char_moments(ctx: GroupCtx) -> tuple[float, float]:
    """Haar mean and second moment of the fundamental character."""
    if ctx.kind == "su2":
        return 0.0, 1.0
    vals = [ctx.char_fund(g) for g in ctx.elements()]
    # round off accumulated float dust so reports print clean exact moments
    m1 = round(sum(vals) / len(vals), 12)
    m2 = round(sum(v * v for v in vals) / len(vals), 12)
    return (m1 if m1 != 0 else 0.0, m2 if m2 != 0 else 0.0)


@dataclass
class PushforwardReport:
    mode: str
    passed: bool
    group: str
    transform: str
    base_atoms: int
    probe_atoms: int
    assignments: int
    cells: int
    expected_cells: int
    min_count: int
    max_count: int
    expected_count: int

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} exact pushforward [{self.transform}] group={self.group} "
            f"base={self.base_atoms} probe={self.probe_atoms} "
            f"cells={self.cells}/{self.expected_cells} "
            f"counts={self.min_count}..{self.max_count} (want {self.expected_count})"
        )


def exact_pushforward(
    transform: Transform, probe: GraphSkeleton, max_enum: int = 10**7
) -> PushforwardReport:
    """Enumerate the full pushforward marginal on a probe skeleton.

    The base skeleton is induced from everything the transform reads:
    morphism images of the probe atoms' Q-parts plus the junction map's
    support paths.  Uniformity is decided by integer equality.
    """
    ctx = transform.ctx
    if not ctx.is_finite:
        raise EnumerationCapError(f"{ctx.name} is not enumerable")
    if probe.cx is not transform.home:
        raise ValueError("probe skeleton lives off the transform's home complex")
    reads: list[PathWord] = []
    for atom in probe.atom_paths():
        for step in transform._plan(atom):
            reads.append(step.image)
    reads.extend(transform.rho.support_paths)
    base_sk = induce_skeleton(transform.base_home, reads)

    order = ctx.order
    k = len(base_sk)
    assignments = order**k
    if assignments > max_enum:
        raise EnumerationCapError(
            f"{assignments} configurations ({ctx.name}^{k}) exceed the cap {max_enum}"
        )
    probe_paths = probe.atom_paths()
    expected_cells = order ** len(probe_paths)

    tally: dict[tuple, int] = {}
    elems = list(ctx.elements())
    for values in itertools.product(elems, repeat=k):
        conn = ExplicitConnection(base_sk, values, ctx)
        image = transform.apply(conn)
        key = tuple(image.holonomy(p) for p in probe_paths)
        tally[key] = tally.get(key, 0) + 1

    cells = len(tally)
    min_count = min(tally.values())
    max_count = max(tally.values())
    expected_count = assignments // expected_cells
    passed = (
        cells == expected_cells
        and assignments % expected_cells == 0
        and min_count == expected_count
        and max_count == expected_count
    )
    return PushforwardReport(
        "exact",
        passed,
        ctx.name,
        transform.name,
        k,
        len(probe_paths),
        assignments,
        cells,
        expected_cells,
        min_count,
        max_count,
        expected_count,
    )


@dataclass
class LoopStat:
    label: str
    m1: float
    m2: float
    mu1: float
    mu2: float
    tol1: float
    tol2: float
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} {self.label}: m1={self.m1:.6f} (|.-{self.mu1:g}|<={self.tol1:.6f}) "
            f"m2={self.m2:.6f} (|.-{self.mu2:g}|<={self.tol2:.6f})"
        )


@dataclass
class StatReport:
    mode: str
    passed: bool
    group: str
    transform: str
    samples: int
    loops: list[LoopStat] = field(default_factory=list)


def statistical_pushforward(
    transform: Transform | None,
    cx,
    ctx: GroupCtx,
    loops: dict[str, PathWord],
    samples: int = 100_000,
    seed: int = 0,
) -> StatReport:
    """Moment test on loop holonomies under fresh lazy Haar draws.

    With ``transform`` None the raw connection is probed (the baseline a
    caller should establish first).  Bands are 4 and 4*sqrt(2) standard
    errors around the Haar character moments; the second uses the
    conservative variance bound 2 for the squared character.
    """
    labels = sorted(loops)
    sums1 = {lab: 0.0 for lab in labels}
    sums2 = {lab: 0.0 for lab in labels}
    base_seed = derive_seed(seed, 0x5A)
    for i in range(samples):
        conn = LazyHaarConnection(cx, ctx, seed=counter_seed(base_seed, i))
        probe = transform.apply(conn) if transform is not None else conn
        for lab in labels:
            c = ctx.char_fund(probe.holonomy(loops[lab]))
            sums1[lab] += c
            sums2[lab] += c * c

    mu1, mu2 = char_moments(ctx)
    tol1 = 4.0 / math.sqrt(samples)
    tol2 = 4.0 * math.sqrt(2.0) / math.sqrt(samples)
    stats = []
    for lab in labels:
        m1 = sums1[lab] / samples
        m2 = sums2[lab] / samples
        ok = abs(m1 - mu1) <= tol1 and abs(m2 - mu2) <= tol2
        stats.append(LoopStat(lab, m1, m2, mu1, mu2, tol1, tol2, ok))
    name = transform.name if transform is not None else "baseline"
    return StatReport("stat", all(s.passed for s in stats), ctx.name, name, samples, stats)


@dataclass
class WitnessReport:
    verdict: str
    passed: bool
    samples: int
    pinned: int
    mismatches: int
    forced: dict[str, str] = field(default_factory=dict)

    def line(self) -> str:
        if self.pinned == 0:
            return f"PASS no pinned edges ({self.samples} samples unaffected)"
        status = "stands" if self.passed else "broken"
        return (
            f"{self.verdict} pinned marginal is constant: {self.pinned} edge(s), "
            f"{self.samples} samples, {self.mismatches} mismatches (witness {status})"
        )


def nonpreservation_witness(
    transform: Transform, samples: int = 1000, seed: int = 0
) -> WitnessReport:
    """Show a pinning transform cannot preserve the connection measure.

    Every pinned edge must come out at its prescribed value on every
    sampled Haar connection; a constant marginal on a nontrivial group is
    the non-preservation certificate, reported as EXPECTED-FAIL.  With no
    pinned edges the transform degenerates and the check passes vacuously.
    """
    ctx = transform.ctx
    targets: dict[PathWord, object] = getattr(transform, "pin_targets", {})
    if not targets:
        return WitnessReport("PASS", True, samples, 0, 0)
    cx = transform.base_home
    base_seed = derive_seed(seed, 0x71)
    mismatches = 0
    for i in range(samples):
        conn = LazyHaarConnection(cx, ctx, seed=counter_seed(base_seed, i))
        image = transform.apply(conn)
        for e, want in targets.items():
            if not ctx.isclose(image.holonomy(e), want):
                mismatches += 1
    forced = {str(e): ctx.format(v) for e, v in targets.items()}
    passed = mismatches == 0
    verdict = "EXPECTED-FAIL" if passed else "BROKEN"
    return WitnessReport(verdict, passed, samples, len(targets), mismatches, forced)
