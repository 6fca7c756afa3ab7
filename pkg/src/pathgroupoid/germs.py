"""Partial connection data on a closed family of paths, and its extension.

A Q-set is a family of paths closed under inverses and under taking parts
of decompositions, with a decomposer that writes any path as a product of
members.  A germ assigns group values on a Q-set subject to two laws:

* value(inverse(q)) = inverse(value(q))
* value(q) = value(q1) * value(q2) for every two-part decomposition

Those laws make the obvious product formula over the decomposer a
well-defined connection on all paths, independent of the decomposition
chosen and constant on equivalence classes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .connections import Connection
from .groups import GroupCtx, GroupElem, derive_seed
from .paths import CurveComplex, PathWord, Point, Segment
from . import sampling


class CompletenessError(ValueError):
    """A decomposer returned parts outside its own Q-set."""


@dataclass
class QSet:
    """A hereditary, complete family of paths with a canonical decomposer."""

    name: str
    contains: Callable[[PathWord], bool]
    decompose_fn: Callable[[PathWord], list[PathWord]]
    _cache: dict = field(default_factory=dict, repr=False)

    def decompose(self, path: PathWord) -> list[PathWord]:
        parts = self._cache.get(path)
        if parts is None:
            parts = self.decompose_fn(path)
            self._cache[path] = parts
        return parts

    def check_parts(self, path: PathWord) -> list[PathWord]:
        """Decompose and verify the parts are members (used by validators)."""
        parts = self.decompose(path)
        for p in parts:
            if not self.contains(p):
                raise CompletenessError(f"{self.name} decomposer left its set at {p}")
        return parts


def _split_segment_at(seg: Segment, params: Sequence[Fraction]) -> list[Segment]:
    """Split one segment at the given interior parameters (any order)."""
    inner = sorted((t for t in params if seg.lo < t < seg.hi), reverse=seg.sign < 0)
    out: list[Segment] = []
    cur = seg.a
    for t in inner:
        out.append(Segment(seg.curve, cur, t))
        cur = t
    out.append(Segment(seg.curve, cur, seg.b))
    return out


def qset_all(cx: CurveComplex) -> QSet:
    """Every path; the decomposer is the identity."""
    return QSet("all", lambda p: True, lambda p: [p])


def qset_edges(cx: CurveComplex) -> QSet:
    """Single-segment words and trivial paths."""

    def contains(p: PathWord) -> bool:
        return p.is_trivial or len(p.segs) == 1

    def decomp(p: PathWord) -> list[PathWord]:
        if p.is_trivial:
            return [p]
        return [PathWord.of(p.cx, s) for s in p.segs]

    return QSet("edge", contains, decomp)


class QuasiSurface:
    """Finitely many whole curves plus finitely many marked point classes.

    ``sigma_out`` prescribes, per (point class, curve, departure
    direction), the exponent in {-1, 0, +1} a crossing picks up when a
    path leaves the surface along that germ of directions.
    """

    def __init__(
        self,
        cx: CurveComplex,
        curves: Sequence[str] = (),
        points: Sequence = (),
        sigma_out: dict | None = None,
        name: str = "surface",
    ):
        self.cx = cx
        self.name = name
        for c in curves:
            if c not in cx.curves:
                raise ValueError(f"unknown surface curve {c!r}")
        self.curves = frozenset(curves)
        self.points = frozenset(cx.rep(p) for p in points)
        table = {}
        for key, val in (sigma_out or {}).items():
            point, curve, direction = key
            if val not in (-1, 0, 1):
                raise ValueError(f"sigma value must be -1, 0 or 1, got {val}")
            if direction not in (-1, 1):
                raise ValueError("direction key must be +1 or -1")
            table[(cx.rep(point), curve, direction)] = val
        self._sigma = table
        # parameters per curve where the curve meets the surface
        self._params: dict[str, tuple[Fraction, ...]] = {}
        for curve in cx.curves:
            hits = set()
            for t in cx.glued_params(curve):
                if self._class_in_surface(cx.rep((curve, t))):
                    hits.add(t)
            for (pc, pt) in self.points:
                if pc == curve:
                    hits.add(pt)
            self._params[curve] = tuple(sorted(hits))

    def _class_in_surface(self, rep: Point) -> bool:
        if rep in self.points:
            return True
        return any(m[0] in self.curves for m in self.cx.class_members(rep))

    def contains_point(self, p) -> bool:
        rep = self.cx.rep(p)
        if rep[0] in self.curves:
            return True
        return self._class_in_surface(rep)

    def crossing_params(self, curve: str) -> tuple[Fraction, ...]:
        return self._params.get(curve, ())

    def sigma_out(self, path: PathWord) -> int:
        """Exponent for the departure of a nontrivial path from its start."""
        red = path.reduced()
        if red.is_trivial:
            return 0
        first = red.segs[0]
        if not self.contains_point(first.start):
            return 0
        return self._sigma.get((self.cx.rep(first.start), first.curve, first.sign), 0)

    def sigma_in(self, path: PathWord) -> int:
        """Arrival exponent, defined as minus the departure of the inverse."""
        return -self.sigma_out(path.inverse())


def qset_surface(cx: CurveComplex, surface: QuasiSurface) -> QSet:
    """Trivial paths and single segments that are internal or external.

    Internal: the open arc lies on a surface curve.  External: the open
    arc avoids the surface entirely (endpoints may touch it).
    """

    def seg_external(s: Segment) -> bool:
        if s.curve in surface.curves:
            return False
        return not any(s.lo < t < s.hi for t in surface.crossing_params(s.curve))

    def contains(p: PathWord) -> bool:
        if p.is_trivial:
            return True
        if len(p.segs) != 1:
            return False
        s = p.segs[0]
        return s.curve in surface.curves or seg_external(s)

    def decomp(p: PathWord) -> list[PathWord]:
        if p.is_trivial:
            return [p]
        out: list[PathWord] = []
        for s in p.segs:
            if s.curve in surface.curves:
                out.append(PathWord.of(p.cx, s))
            else:
                for piece in _split_segment_at(s, surface.crossing_params(s.curve)):
                    out.append(PathWord.of(p.cx, piece))
        return out

    return QSet(f"surface:{surface.name}", contains, decomp)


class PointSet:
    """A finite set of marked point classes."""

    def __init__(self, cx: CurveComplex, points: Sequence, name: str = "points"):
        self.cx = cx
        self.name = name
        self.reps = frozenset(cx.rep(p) for p in points)
        self._params: dict[str, tuple[Fraction, ...]] = {}
        for curve in cx.curves:
            hits = {pt for (pc, pt) in self.reps if pc == curve}
            for t in cx.glued_params(curve):
                if cx.rep((curve, t)) in self.reps:
                    hits.add(t)
            self._params[curve] = tuple(sorted(hits))

    def contains_point(self, p) -> bool:
        return self.cx.rep(p) in self.reps

    def marked_params(self, curve: str) -> tuple[Fraction, ...]:
        return self._params.get(curve, ())


def qset_points(cx: CurveComplex, marked: PointSet) -> QSet:
    """Trivial paths and paths whose interior avoids the marked points."""

    def contains(p: PathWord) -> bool:
        if p.is_trivial:
            return True
        for s in p.segs:
            if any(s.lo < t < s.hi for t in marked.marked_params(s.curve)):
                return False
        for s in p.segs[:-1]:
            if marked.contains_point(s.end):
                return False
        return True

    def decomp(p: PathWord) -> list[PathWord]:
        if p.is_trivial:
            return [p]
        out: list[PathWord] = []
        for s in p.segs:
            for piece in _split_segment_at(s, marked.marked_params(s.curve)):
                out.append(PathWord.of(p.cx, piece))
        return out

    return QSet(f"points:{marked.name}", contains, decomp)


def builtin_qset(
    cx: CurveComplex,
    spec: str,
    surfaces: dict[str, QuasiSurface] | None = None,
    point_sets: dict[str, PointSet] | None = None,
) -> QSet:
    """Resolve a Q-set spec: ``all``, ``edge``, ``surface:<n>``, ``points:<n>``."""
    if spec == "all":
        return qset_all(cx)
    if spec == "edge":
        return qset_edges(cx)
    kind, _, label = spec.partition(":")
    if kind == "surface" and label:
        table = surfaces or {}
        if label not in table:
            raise ValueError(f"unknown surface {label!r}")
        return qset_surface(cx, table[label])
    if kind == "points" and label:
        table = point_sets or {}
        if label not in table:
            raise ValueError(f"unknown point set {label!r}")
        return qset_points(cx, table[label])
    raise ValueError(f"unknown qset spec {spec!r}")


# ---------------------------------------------------------------------------
# germs


@dataclass
class Germ:
    """Group values on a Q-set; trivial paths always map to the identity."""

    domain: QSet
    ctx: GroupCtx
    fn: Callable[[PathWord], GroupElem]
    _memo: dict = field(default_factory=dict, repr=False)

    def value(self, member: PathWord) -> GroupElem:
        if member.is_trivial:
            return self.ctx.identity
        got = self._memo.get(member)
        if got is None:
            got = self.fn(member)
            self._memo[member] = got
        return got


def germ_from_connection(conn: Connection, qset: QSet) -> Germ:
    """Restrict a connection's holonomy to a Q-set."""
    return Germ(qset, conn.ctx, conn.holonomy)


@dataclass
class GermCheckReport:
    passed: bool
    trials: int
    failure: str | None = None
    witness: PathWord | None = None


def _random_member(
    qset: QSet, cx: CurveComplex, rng: random.Random, nontrivial: bool = False
) -> PathWord:
    for _ in range(64):
        path = sampling.random_path(cx, rng)
        parts = [p for p in qset.decompose(path) if not (nontrivial and p.is_trivial)]
        if parts:
            return parts[rng.randrange(len(parts))]
    raise CompletenessError(f"could not sample a member of {qset.name}")


def check_germ(
    germ: Germ,
    cx: CurveComplex,
    trials: int = 1000,
    seed: int = 0,
    tol: float | None = None,
) -> GermCheckReport:
    """Falsification pass over the two germ laws on random members.

    Inverse law on random members; product law on random two-part
    decompositions (parts stay members because the set is hereditary).
    """
    ctx = germ.ctx
    rng = random.Random(derive_seed(seed, 0xE6))
    close = ctx.isclose if tol is None else (lambda a, b: ctx.isclose(a, b, tol))
    for i in range(trials):
        m = _random_member(germ.domain, cx, rng)
        if not germ.domain.contains(m):
            return GermCheckReport(False, i, "decomposer-left-set", m)
        if not close(germ.value(m.inverse()), ctx.inv(germ.value(m))):
            return GermCheckReport(False, i, "inverse-law", m)
        if m.is_trivial:
            continue
        a, b = sampling.random_bisection(m, rng)
        if not close(germ.value(m), ctx.mul(germ.value(a), germ.value(b))):
            return GermCheckReport(False, i, "product-law", m)
    return GermCheckReport(True, trials)


class ExtendedGermConnection(Connection):
    """The unique connection extending a germ: a product over the decomposer."""

    provenance = "extended"

    def __init__(self, germ: Germ, cx: CurveComplex):
        self.germ = germ
        self.cx = cx
        self.ctx = germ.ctx

    def holonomy(self, path: PathWord) -> GroupElem:
        germ = self.germ
        ctx = self.ctx
        out = ctx.identity
        for part in germ.domain.decompose(path):
            out = ctx.mul(out, germ.value(part))
        return out


def extend(germ: Germ, cx: CurveComplex) -> ExtendedGermConnection:
    """Extension of a law-abiding germ to all paths.

    The caller vouches for the germ laws (see ``check_germ``); for a
    violating germ the returned evaluator would depend on the
    decomposition and fail the connection invariants.
    """
    return ExtendedGermConnection(germ, cx)


def find_disagreement(
    a: Connection,
    b: Connection,
    qset: QSet,
    cx: CurveComplex,
    trials: int = 200,
    seed: int = 0,
    tol: float | None = None,
) -> PathWord | None:
    """Random-member search for a path where two connections differ."""
    if a.ctx is not b.ctx:
        raise ValueError("connections use different group contexts")
    ctx = a.ctx
    rng = random.Random(derive_seed(seed, 0xD1))
    close = ctx.isclose if tol is None else (lambda x, y: ctx.isclose(x, y, tol))
    for _ in range(trials):
        m = _random_member(qset, cx, rng)
        if not close(a.holonomy(m), b.holonomy(m)):
            return m
    return None


def connections_equal_on(
    a: Connection,
    b: Connection,
    qset: QSet,
    cx: CurveComplex,
    trials: int = 200,
    seed: int = 0,
    tol: float | None = None,
) -> bool:
    """Sampled agreement of two connections on a complete family.

    Agreement on a complete set forces agreement everywhere, since every
    holonomy is a product over members.
    """
    return find_disagreement(a, b, qset, cx, trials, seed, tol) is None
