"""Curve complexes and the path words over them.

A complex is a finite set of named curves, each carrying the rational
parameter interval [0,1], glued at finitely many rational points.  A path
is either a trivial marker at a point or a word of oriented segments whose
junctions match up to gluing.

Two levels of word normalization are kept apart deliberately:

* ``param_canonical`` merges contiguous same-direction runs on one curve
  and nothing else; two words with equal canonical forms trace the same
  parametrized curve.
* ``reduced`` additionally cancels retracings (an excursion followed by
  its own reversal); equal reduced forms characterize equivalence in the
  groupoid sense.

Merging only happens when the inner parameters agree exactly on one curve.
It never crosses a gluing, so traversing a closed loop twice stays a
two-letter word.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[str, Fraction]


class ComplexError(ValueError):
    """Malformed complex data: unknown curve, parameter out of range, ..."""


class PathError(ValueError):
    """Malformed path word: empty, non-composable junctions, ..."""


class DecompositionError(ValueError):
    """Inputs that were promised to decompose a common path do not."""


class NotExpressibleError(ValueError):
    """A path cannot be written as a word in a skeleton's atoms."""


def frac(x) -> Fraction:
    """Exact rational from int, Fraction or string ('1/2', '0.25').

    Floats are rejected: parameters must stay exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}")


class CurveComplex:
    """Named curves glued at finitely many rational points.

    Gluings generate an equivalence on point references; ``rep`` maps a
    reference to the canonical representative (minimal in (curve, param)
    order) of its class.  Unmentioned points are their own class.
    """

    def __init__(
        self,
        curves: Iterable[str],
        gluings: Iterable[tuple[tuple, tuple]] = (),
    ):
        names = list(curves)
        if len(names) != len(set(names)):
            raise ComplexError("duplicate curve names")
        for c in names:
            if not c or not isinstance(c, str):
                raise ComplexError(f"bad curve name {c!r}")
        self.curves = frozenset(names)
        parent: dict[Point, Point] = {}

        def find(p: Point) -> Point:
            while parent[p] != p:
                parent[p] = parent[parent[p]]
                p = parent[p]
            return p

        pairs = []
        for raw_a, raw_b in gluings:
            a = self._check_point(raw_a)
            b = self._check_point(raw_b)
            pairs.append((a, b))
            parent.setdefault(a, a)
            parent.setdefault(b, b)
        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        classes: dict[Point, list[Point]] = {}
        for p in parent:
            classes.setdefault(find(p), []).append(p)
        self._rep: dict[Point, Point] = {}
        self._classes: dict[Point, tuple[Point, ...]] = {}
        for members in classes.values():
            members.sort()
            rep = members[0]
            self._classes[rep] = tuple(members)
            for p in members:
                self._rep[p] = rep
        by_curve: dict[str, set[Fraction]] = {c: set() for c in names}
        for p in parent:
            by_curve[p[0]].add(p[1])
        self._glued_params = {c: tuple(sorted(ts)) for c, ts in by_curve.items()}

    def _check_point(self, p) -> Point:
        try:
            curve, t = p
        except (TypeError, ValueError):
            raise ComplexError(f"point reference must be (curve, param): {p!r}")
        t = frac(t)
        if curve not in self.curves:
            raise ComplexError(f"unknown curve {curve!r}")
        if t < 0 or t > 1:
            raise ComplexError(f"parameter {t} outside [0,1] on {curve!r}")
        return (curve, t)

    def rep(self, p) -> Point:
        """Canonical representative of the gluing class of p."""
        p = self._check_point(p)
        return self._rep.get(p, p)

    def same_point(self, p, q) -> bool:
        return self.rep(p) == self.rep(q)

    def class_members(self, p) -> tuple[Point, ...]:
        """All point references glued to p (including p itself)."""
        r = self.rep(p)
        return self._classes.get(r, (r,))

    def glued_params(self, curve: str) -> tuple[Fraction, ...]:
        """Sorted parameters on this curve that take part in any gluing."""
        if curve not in self.curves:
            raise ComplexError(f"unknown curve {curve!r}")
        return self._glued_params[curve]

    def is_connected(self) -> bool:
        """True when every curve can reach every other through gluings."""
        names = sorted(self.curves)
        if len(names) <= 1:
            return True
        adj: dict[str, set[str]] = {c: set() for c in names}
        for members in self._classes.values():
            touched = sorted({p[0] for p in members})
            for a, b in itertools.combinations(touched, 2):
                adj[a].add(b)
                adj[b].add(a)
        seen = {names[0]}
        queue = [names[0]]
        while queue:
            for nxt in adj[queue.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return len(seen) == len(names)

    def __repr__(self) -> str:
        return f"CurveComplex({sorted(self.curves)}, {len(self._classes)} glue classes)"


@dataclass(frozen=True)
class Segment:
    """One oriented traversal of a parameter interval on a single curve."""

    curve: str
    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = frac(self.a), frac(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise PathError(f"segment parameters outside [0,1]: {self}")
        if a == b:
            raise PathError(f"degenerate segment on {self.curve!r} at {a}")

    @property
    def sign(self) -> int:
        return 1 if self.b > self.a else -1

    @property
    def lo(self) -> Fraction:
        return min(self.a, self.b)

    @property
    def hi(self) -> Fraction:
        return max(self.a, self.b)

    @property
    def length(self) -> Fraction:
        return abs(self.b - self.a)

    @property
    def start(self) -> Point:
        return (self.curve, self.a)

    @property
    def end(self) -> Point:
        return (self.curve, self.b)

    def reversed(self) -> "Segment":
        return Segment(self.curve, self.b, self.a)

    def __str__(self) -> str:
        return f"{self.curve}[{self.a}..{self.b}]"

    __repr__ = __str__


@dataclass(frozen=True)
class PathWord:
    """A path on a complex: trivial marker or a composable segment word.

    Trivial paths store their basepoint as the canonical class
    representative, so dataclass equality matches equality of basepoint
    classes.
    """

    cx: CurveComplex
    segs: tuple[Segment, ...]
    base: Point | None = None

    def __post_init__(self):
        object.__setattr__(self, "segs", tuple(self.segs))
        if self.segs:
            if self.base is not None:
                raise PathError("nonempty word must not carry a basepoint")
            for s in self.segs:
                if s.curve not in self.cx.curves:
                    raise PathError(f"segment on unknown curve {s.curve!r}")
            for s, t in zip(self.segs, self.segs[1:]):
                if not self.cx.same_point(s.end, t.start):
                    raise PathError(f"non-composable junction {s} | {t}")
        else:
            if self.base is None:
                raise PathError("empty word needs a basepoint")
            object.__setattr__(self, "base", self.cx.rep(self.base))

    # -- constructors ---------------------------------------------------------

    @classmethod
    def trivial(cls, cx: CurveComplex, point) -> "PathWord":
        return cls(cx, (), cx.rep(point))

    @classmethod
    def of(cls, cx: CurveComplex, *segs: Segment) -> "PathWord":
        return cls(cx, tuple(segs))

    # -- basic geometry -------------------------------------------------------

    @property
    def is_trivial(self) -> bool:
        return not self.segs

    @property
    def start(self) -> Point:
        return self.base if self.is_trivial else self.cx.rep(self.segs[0].start)

    @property
    def end(self) -> Point:
        return self.base if self.is_trivial else self.cx.rep(self.segs[-1].end)

    @property
    def length(self) -> Fraction:
        return sum((s.length for s in self.segs), Fraction(0))

    def inverse(self) -> "PathWord":
        if self.is_trivial:
            return self
        return PathWord(self.cx, tuple(s.reversed() for s in reversed(self.segs)))

    def __mul__(self, other: "PathWord") -> "PathWord":
        return concat([self, other])

    # -- normal forms ---------------------------------------------------------

    def param_canonical(self) -> "PathWord":
        """Merge contiguous same-direction runs; keep retracings intact."""
        if self.is_trivial:
            return self
        out: list[Segment] = []
        for s in self.segs:
            while out:
                t = out[-1]
                if t.curve == s.curve and t.b == s.a and t.sign == s.sign:
                    out.pop()
                    s = Segment(s.curve, t.a, s.b)
                else:
                    break
            out.append(s)
        return PathWord(self.cx, tuple(out))

    def reduced(self) -> "PathWord":
        """Normal form under retracing cancellation.

        Adjacent segments on one curve whose inner parameters agree merge
        into the single segment between their outer parameters, vanishing
        entirely when those coincide.  The rewrite system is confluent, so
        a single left-to-right stack pass reaches the normal form.
        """
        if self.is_trivial:
            return self
        start = self.start
        out: list[Segment] = []
        for s in self.segs:
            cur: Segment | None = s
            while cur is not None and out:
                t = out[-1]
                if t.curve == cur.curve and t.b == cur.a:
                    out.pop()
                    cur = None if t.a == cur.b else Segment(cur.curve, t.a, cur.b)
                else:
                    break
            if cur is not None:
                out.append(cur)
        if not out:
            return PathWord.trivial(self.cx, start)
        return PathWord(self.cx, tuple(out))

    def __str__(self) -> str:
        if self.is_trivial:
            return f"triv({self.base[0]},{self.base[1]})"
        return " ".join(str(s) for s in self.segs)

    __repr__ = __str__


def parse_path(cx: CurveComplex, text: str) -> PathWord:
    """Parse a path literal: ``c1[0..1] c2[0..1/2]~ triv(c1,1/4)``.

    A ``~`` suffix reverses the preceding segment.  A literal consisting of
    a single ``triv(curve,param)`` atom is the trivial path there; trivial
    atoms inside a longer word are dropped (after a composability check).
    """
    atoms = text.split()
    if not atoms:
        raise PathError("empty path literal")
    parts: list[PathWord] = []
    for atom in atoms:
        rev = atom.endswith("~")
        if rev:
            atom = atom[:-1]
        if atom.startswith("triv(") and atom.endswith(")"):
            inner = atom[5:-1]
            curve, _, param = inner.partition(",")
            if not _:
                raise PathError(f"bad trivial atom {atom!r}")
            parts.append(PathWord.trivial(cx, (curve.strip(), frac(param.strip()))))
            continue
        head, bracket, rest = atom.partition("[")
        if not bracket or not rest.endswith("]"):
            raise PathError(f"bad segment atom {atom!r}")
        rng = rest[:-1]
        lo, dots, hi = rng.partition("..")
        if not dots:
            raise PathError(f"bad parameter range in {atom!r}")
        seg = Segment(head, frac(lo.strip()), frac(hi.strip()))
        if rev:
            seg = seg.reversed()
        parts.append(PathWord.of(cx, seg))
    return concat(parts)


# ---------------------------------------------------------------------------
# concatenation, equivalence, decompositions


def concat(parts: Sequence[PathWord]) -> PathWord:
    """Join paths end to start, dropping trivial factors.

    Raises PathError when consecutive parts do not meet (up to gluing).
    """
    parts = list(parts)
    if not parts:
        raise PathError("cannot concatenate an empty sequence")
    cx = parts[0].cx
    for p in parts:
        if p.cx is not cx:
            raise PathError("parts live on different complexes")
    for p, q in zip(parts, parts[1:]):
        if p.end != q.start:
            raise PathError(f"non-composable parts: {p} ends {p.end}, {q} starts {q.start}")
    segs: list[Segment] = []
    for p in parts:
        segs.extend(p.segs)
    if not segs:
        return PathWord.trivial(cx, parts[0].start)
    return PathWord(cx, tuple(segs))


def equivalent(a: PathWord, b: PathWord) -> bool:
    """Equality in the groupoid: identical reduced normal forms."""
    if a.cx is not b.cx:
        raise PathError("paths live on different complexes")
    return a.reduced() == b.reduced()


def is_decomposition(parts: Sequence[PathWord], whole: PathWord) -> bool:
    """True when the parts concatenate to the whole up to parametrization.

    Retracing cancellation is deliberately not applied here: a product
    that backtracks is not a decomposition of the shortcut.
    """
    parts = list(parts)
    if not parts:
        return False
    if any(p.cx is not whole.cx for p in parts):
        return False
    try:
        cat = concat(parts)
    except PathError:
        return False
    return cat.param_canonical() == whole.param_canonical()


def is_refinement(fine: Sequence[PathWord], coarse: Sequence[PathWord]) -> bool:
    """True when consecutive blocks of ``fine`` decompose the parts of ``coarse``.

    The block search is greedy: each part of ``coarse`` takes the shortest
    prefix of remaining fine parts that decomposes it.  Nontrivial parts
    have positive parameter length, so the shortest match is the only one
    up to trailing trivial factors, which the next block absorbs.
    """
    fine, coarse = list(fine), list(coarse)
    if not fine or not coarse:
        return False
    pos = 0
    for j, target in enumerate(coarse):
        if j == len(coarse) - 1:
            return pos < len(fine) and is_decomposition(fine[pos:], target)
        found = False
        for k in range(pos + 1, len(fine) + 1):
            if is_decomposition(fine[pos:k], target):
                pos = k
                found = True
                break
        if not found:
            return False
    return False


def point_at(word: PathWord, pos: Fraction) -> Point:
    """Class representative of the point at cumulative parameter length pos."""
    pos = frac(pos)
    if pos < 0 or pos > word.length:
        raise PathError(f"position {pos} outside [0, {word.length}]")
    if word.is_trivial or pos == 0:
        return word.start
    acc = Fraction(0)
    for s in word.segs:
        nxt = acc + s.length
        if pos < nxt:
            off = pos - acc
            return word.cx.rep((s.curve, s.a + s.sign * off))
        if pos == nxt:
            return word.cx.rep(s.end)
        acc = nxt
    return word.end


def slice_word(word: PathWord, p: Fraction, q: Fraction) -> PathWord:
    """Subword between cumulative positions p <= q, splitting segments as
    needed; a degenerate slice is the trivial path there."""
    p, q = frac(p), frac(q)
    if not (0 <= p <= q <= word.length):
        raise PathError(f"bad slice [{p},{q}] of length-{word.length} word")
    if p == q:
        return PathWord.trivial(word.cx, point_at(word, p))
    segs: list[Segment] = []
    acc = Fraction(0)
    for s in word.segs:
        nxt = acc + s.length
        lo = max(p, acc)
        hi = min(q, nxt)
        if lo < hi:
            t1 = s.a + s.sign * (lo - acc)
            t2 = s.a + s.sign * (hi - acc)
            segs.append(Segment(s.curve, t1, t2))
        acc = nxt
    return PathWord(word.cx, tuple(segs))


def split_at(word: PathWord, pos: Fraction) -> tuple[PathWord, PathWord]:
    """Split into (prefix, suffix) at cumulative position pos; ends give trivial parts."""
    pos = frac(pos)
    total = word.length
    if pos < 0 or pos > total:
        raise PathError(f"position {pos} outside [0, {total}]")
    if pos == 0:
        return PathWord.trivial(word.cx, word.start), word
    if pos == total:
        return word, PathWord.trivial(word.cx, word.end)
    return slice_word(word, Fraction(0), pos), slice_word(word, pos, total)


def common_refinement(
    left: Sequence[PathWord], right: Sequence[PathWord]
) -> list[PathWord]:
    """A decomposition refining two decompositions of the same path.

    Built by cutting the canonical form of the path at the union of both
    boundary position sets.  Trivial factors present in either input are
    reproduced at their positions (with the larger multiplicity) so the
    result refines both inputs block-wise.
    """
    left, right = list(left), list(right)
    if not left or not right:
        raise DecompositionError("decompositions must be nonempty")
    whole_l = concat(left)
    whole_r = concat(right)
    if whole_l.param_canonical() != whole_r.param_canonical():
        raise DecompositionError("inputs do not decompose a common path")
    canon = whole_l.param_canonical()
    total = canon.length
    if total == 0:
        return list(left if len(left) >= len(right) else right)

    def boundary_data(parts: Sequence[PathWord]):
        cuts: set[Fraction] = set()
        triv_counts: dict[Fraction, int] = {}
        acc = Fraction(0)
        for p in parts:
            if p.is_trivial:
                triv_counts[acc] = triv_counts.get(acc, 0) + 1
            else:
                acc += p.length
                if acc < total:
                    cuts.add(acc)
        return cuts, triv_counts

    cuts_l, triv_l = boundary_data(left)
    cuts_r, triv_r = boundary_data(right)
    positions = sorted(cuts_l | cuts_r)
    bounds = [Fraction(0)] + positions + [total]
    out: list[PathWord] = []
    for i, (p, q) in enumerate(zip(bounds, bounds[1:])):
        k = max(triv_l.get(p, 0), triv_r.get(p, 0))
        out.extend([PathWord.trivial(canon.cx, point_at(canon, p))] * k)
        out.append(slice_word(canon, p, q))
    k = max(triv_l.get(total, 0), triv_r.get(total, 0))
    out.extend([PathWord.trivial(canon.cx, point_at(canon, total))] * k)
    return out


# ---------------------------------------------------------------------------
# edges


def is_edge(word: PathWord) -> bool:
    """True when the word traces an embedded arc (or embedded closed loop).

    Checks that open parameter intervals on a common curve are pairwise
    disjoint, that visited junction classes repeat only as a shared
    start/end, and that no junction class lies in the interior of any
    segment (gluings included).
    """
    if word.is_trivial:
        return False
    segs = word.segs
    for s, t in itertools.combinations(segs, 2):
        if s.curve == t.curve and s.lo < t.hi and t.lo < s.hi:
            return False
    cx = word.cx
    visits = [cx.rep(segs[0].start)]
    for s in segs:
        visits.append(cx.rep(s.end))
    closed = visits[0] == visits[-1]
    inner = visits[1:-1]
    distinct = set(visits)
    expect = len(visits) - (1 if closed else 0)
    if len(distinct) != expect:
        return False
    if closed and visits[0] in inner:
        return False
    for v in distinct:
        for (curve, t) in cx.class_members(v):
            for s in segs:
                if s.curve == curve and s.lo < t < s.hi:
                    return False
    return True


# ---------------------------------------------------------------------------
# skeletons


@dataclass(eq=False)
class GraphSkeleton:
    """A finite family of atomic segments induced by a set of paths.

    Atoms are increasing-orientation segments, pairwise with disjoint open
    intervals, meeting other atoms and gluings only at their endpoints.
    """

    cx: CurveComplex
    atoms: tuple[Segment, ...]
    _starts: dict = field(default_factory=dict, repr=False)
    _ends: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i, s in enumerate(self.atoms):
            self._starts[(s.curve, s.a)] = i
            self._ends[(s.curve, s.b)] = i

    def __len__(self) -> int:
        return len(self.atoms)

    def atom_paths(self) -> list[PathWord]:
        return [PathWord.of(self.cx, s) for s in self.atoms]


def induce_skeleton(cx: CurveComplex, paths: Sequence[PathWord]) -> GraphSkeleton:
    """Skeleton whose atoms tile exactly the intervals the paths use.

    Breakpoints on each curve: all segment endpoints, plus every glued
    parameter falling inside the used region.  Consecutive breakpoints
    within the used region bound one atom.
    """
    used: dict[str, list[tuple[Fraction, Fraction]]] = {}
    marks: dict[str, set[Fraction]] = {}
    for p in paths:
        if p.cx is not cx:
            raise PathError("path on a different complex")
        for s in p.segs:
            used.setdefault(s.curve, []).append((s.lo, s.hi))
            marks.setdefault(s.curve, set()).update((s.lo, s.hi))
    atoms: list[Segment] = []
    for curve in sorted(used):
        intervals = sorted(used[curve])
        merged: list[list[Fraction]] = []
        for lo, hi in intervals:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        cuts = set(marks[curve])
        cuts.update(t for t in cx.glued_params(curve))
        for lo, hi in merged:
            inner = sorted(t for t in cuts if lo <= t <= hi)
            if inner[0] != lo or inner[-1] != hi:
                raise AssertionError("endpoint marks must bound the merged run")
            for u, v in zip(inner, inner[1:]):
                atoms.append(Segment(curve, u, v))
    return GraphSkeleton(cx, tuple(atoms))


def express(word: PathWord, sk: GraphSkeleton) -> list[tuple[int, int]]:
    """Write the reduced word as a signed sequence of skeleton atoms.

    Returns [(atom_index, +1 | -1), ...]; empty for trivial paths.  Raises
    NotExpressibleError when the reduced word leaves the atom tiling.
    """
    if word.cx is not sk.cx:
        raise PathError("path and skeleton on different complexes")
    red = word.reduced()
    out: list[tuple[int, int]] = []
    for s in red.segs:
        t = s.a
        if s.sign > 0:
            while t != s.b:
                idx = sk._starts.get((s.curve, t))
                if idx is None or sk.atoms[idx].b > s.b:
                    raise NotExpressibleError(f"{s} not tiled by skeleton atoms")
                out.append((idx, 1))
                t = sk.atoms[idx].b
        else:
            while t != s.b:
                idx = sk._ends.get((s.curve, t))
                if idx is None or sk.atoms[idx].a < s.b:
                    raise NotExpressibleError(f"{s} not tiled by skeleton atoms")
                out.append((idx, -1))
                t = sk.atoms[idx].a
    return out
