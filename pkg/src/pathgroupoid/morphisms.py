"""Structure-respecting maps between curve complexes.

A graphical morphism sends each source curve to a path word in the target
together with a strictly monotone piecewise-affine correspondence from the
curve's parameter interval onto the image word's cumulative length.  All
breakpoints are exact rationals, so applying a morphism, composing two, or
inverting a parameter position never leaves the rationals.

A graphomorphism additionally carries an explicit backward morphism; the
pair is validated (not synthesized) to invert each other on points.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .germs import QSet
from .groups import derive_seed
from .paths import (
    CurveComplex,
    GraphSkeleton,
    PathWord,
    Point,
    Segment,
    concat,
    equivalent,
    induce_skeleton,
    is_edge,
    point_at,
    slice_word,
)
from . import sampling

Corr = tuple[tuple[Fraction, Fraction], ...]


class MorphismError(ValueError):
    """Morphism data fails its structural requirements."""


class GraphicalMorphism:
    """Per-curve image words with exact monotone parameter correspondences."""

    def __init__(
        self,
        source: CurveComplex,
        target: CurveComplex,
        images: dict[str, PathWord],
        corr: dict[str, Sequence[tuple[Fraction, Fraction]]] | None = None,
        name: str = "morphism",
    ):
        self.source = source
        self.target = target
        self.name = name
        if set(images) != set(source.curves):
            raise MorphismError("images must cover exactly the source curves")
        self.images: dict[str, PathWord] = {}
        self.corr: dict[str, Corr] = {}
        for curve, word in images.items():
            if word.cx is not target:
                raise MorphismError(f"image of {curve!r} lives off the target complex")
            if word.is_trivial:
                raise MorphismError(f"image of {curve!r} must have positive length")
            self.images[curve] = word
            total = word.length
            pairs = (corr or {}).get(curve)
            if pairs is None:
                pairs = ((Fraction(0), Fraction(0)), (Fraction(1), total))
            pairs = tuple((Fraction(t), Fraction(u)) for t, u in pairs)
            if pairs[0] != (0, 0) or pairs[-1] != (1, total):
                raise MorphismError(
                    f"correspondence for {curve!r} must run (0,0)..(1,{total})"
                )
            for (t1, u1), (t2, u2) in zip(pairs, pairs[1:]):
                if t2 <= t1 or u2 <= u1:
                    raise MorphismError(
                        f"correspondence for {curve!r} must be strictly increasing"
                    )
            self.corr[curve] = pairs
        self._check_gluings()

    def _check_gluings(self) -> None:
        seen: set[Point] = set()
        for curve in sorted(self.source.curves):
            for t in self.source.glued_params(curve):
                rep = self.source.rep((curve, t))
                if rep in seen:
                    continue
                seen.add(rep)
                members = self.source.class_members(rep)
                imgs = {self.point_image(m) for m in members}
                if len(imgs) > 1:
                    raise MorphismError(
                        f"glued class at {rep} maps to distinct points {sorted(imgs)}"
                    )

    # -- parameter transport ---------------------------------------------------

    def map_param(self, curve: str, t: Fraction) -> Fraction:
        """Image position (cumulative length along the image word) of t."""
        pairs = self.corr[curve]
        if not (0 <= t <= 1):
            raise MorphismError(f"parameter {t} outside [0,1]")
        for (t1, u1), (t2, u2) in zip(pairs, pairs[1:]):
            if t1 <= t <= t2:
                return u1 + (u2 - u1) * (t - t1) / (t2 - t1)
        raise AssertionError("correspondence does not cover [0,1]")

    def pull_position(self, curve: str, u: Fraction) -> Fraction:
        """Source parameter whose image position is u (exact inverse)."""
        pairs = self.corr[curve]
        for (t1, u1), (t2, u2) in zip(pairs, pairs[1:]):
            if u1 <= u <= u2:
                return t1 + (t2 - t1) * (u - u1) / (u2 - u1)
        raise MorphismError(f"position {u} outside the image of {curve!r}")

    def point_image(self, p) -> Point:
        curve, t = self.source._check_point(p)
        return point_at(self.images[curve], self.map_param(curve, t))

    # -- path transport --------------------------------------------------------

    def map_segment(self, seg: Segment) -> PathWord:
        word = self.images[seg.curve]
        ua = self.map_param(seg.curve, seg.a)
        ub = self.map_param(seg.curve, seg.b)
        if ua < ub:
            return slice_word(word, ua, ub)
        return slice_word(word, ub, ua).inverse()

    def apply(self, path: PathWord) -> PathWord:
        if path.cx is not self.source:
            raise MorphismError("path lives off the source complex")
        if path.is_trivial:
            return PathWord.trivial(self.target, self.point_image(path.base))
        return concat([self.map_segment(s) for s in path.segs])

    def __repr__(self) -> str:
        return f"GraphicalMorphism({self.name})"


def identity_morphism(cx: CurveComplex) -> GraphicalMorphism:
    images = {
        c: PathWord.of(cx, Segment(c, Fraction(0), Fraction(1))) for c in cx.curves
    }
    return GraphicalMorphism(cx, cx, images, name="id")


def compose(outer: GraphicalMorphism, inner: GraphicalMorphism) -> GraphicalMorphism:
    """The morphism acting as ``outer`` after ``inner``.

    Breakpoints are assembled from the inner correspondence, the junctions
    of the inner image words, and the outer breakpoints pulled back
    through them; between those the composed position map is affine.
    """
    if inner.target is not outer.source:
        raise MorphismError("composition needs inner.target == outer.source")
    images: dict[str, PathWord] = {}
    corr: dict[str, Corr] = {}
    for curve in sorted(inner.source.curves):
        word = inner.images[curve]
        composed = outer.apply(word)
        breaks: set[Fraction] = {t for t, _ in inner.corr[curve]}
        acc = Fraction(0)
        for seg in word.segs:
            for (t_o, _) in outer.corr[seg.curve]:
                if seg.lo < t_o < seg.hi:
                    breaks.add(inner.pull_position(curve, acc + abs(t_o - seg.a)))
            acc += seg.length
            if acc < word.length:
                breaks.add(inner.pull_position(curve, acc))
        pairs: list[tuple[Fraction, Fraction]] = []
        for t in sorted(breaks):
            u = inner.map_param(curve, t)
            if u == 0:
                pos = Fraction(0)
            else:
                pos = outer.apply(slice_word(word, Fraction(0), u)).length
            pairs.append((t, pos))
        images[curve] = composed
        corr[curve] = tuple(pairs)
    return GraphicalMorphism(
        inner.source,
        outer.target,
        images,
        corr,
        name=f"{outer.name}*{inner.name}",
    )


# ---------------------------------------------------------------------------
# injectivity


def is_injective(phi: GraphicalMorphism) -> bool:
    """Exact global injectivity on points.

    Two checks suffice for piecewise-affine data: no two image segments
    overlap on an open interval, and at every critical target point (any
    image-segment endpoint, swept through target gluings) all source
    preimages fall into one source gluing class.
    """
    tagged: list[tuple[str, Segment]] = []
    for curve in sorted(phi.source.curves):
        for seg in phi.images[curve].segs:
            tagged.append((curve, seg))
    for (_, s), (_, t) in itertools.combinations(tagged, 2):
        if s.curve == t.curve and s.lo < t.hi and t.lo < s.hi:
            return False

    refs: set[Point] = set()
    for _, seg in tagged:
        refs.add((seg.curve, seg.a))
        refs.add((seg.curve, seg.b))
    classes: dict[Point, set[Point]] = {}
    for ref in refs:
        classes.setdefault(phi.target.rep(ref), set()).add(ref)
    for rep, group in classes.items():
        group.update(m for m in phi.target.class_members(rep) if m[0] in phi.target.curves)
        sources: set[Point] = set()
        for (tc, tp) in group:
            for curve in sorted(phi.source.curves):
                acc = Fraction(0)
                for seg in phi.images[curve].segs:
                    if seg.curve == tc and seg.lo <= tp <= seg.hi:
                        u = acc + abs(tp - seg.a)
                        sources.add(
                            phi.source.rep((curve, phi.pull_position(curve, u)))
                        )
                    acc += seg.length
        if len(sources) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# graphomorphisms


@dataclass(eq=False)
class Graphomorphism:
    """An invertible re-coordinatization: explicit forward and backward maps.

    The backward map is supplied, never synthesized; ``validate_inverse``
    spot-checks (exactly, on rational points) that the two compose to the
    identity in both orders.
    """

    forward: GraphicalMorphism
    backward: GraphicalMorphism
    name: str = "grapho"

    def __post_init__(self):
        f, b = self.forward, self.backward
        if f.source is not b.target or f.target is not b.source:
            raise MorphismError("forward and backward complexes do not match")
        # fail fast on a coarse fixed grid; heavier sampling in validate_inverse
        grid = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
        for curve in sorted(f.source.curves):
            for t in grid:
                p = (curve, t)
                if f.source.rep(b.point_image(f.point_image(p))) != f.source.rep(p):
                    raise MorphismError(f"backward(forward({p})) != {p}")
        for curve in sorted(b.source.curves):
            for t in grid:
                q = (curve, t)
                if b.source.rep(f.point_image(b.point_image(q))) != b.source.rep(q):
                    raise MorphismError(f"forward(backward({q})) != {q}")

    @property
    def source(self) -> CurveComplex:
        return self.forward.source

    @property
    def target(self) -> CurveComplex:
        return self.forward.target

    def apply(self, path: PathWord) -> PathWord:
        return self.forward.apply(path)

    def apply_inverse(self, path: PathWord) -> PathWord:
        return self.backward.apply(path)

    def inverse(self) -> "Graphomorphism":
        return Graphomorphism(self.backward, self.forward, name=f"{self.name}~")


def validate_inverse(
    g: Graphomorphism, trials: int = 1000, seed: int = 0
) -> None:
    """Exact round-trip check on sampled rational points (both orders)."""
    rng = random.Random(derive_seed(seed, 0x17))
    for _ in range(trials):
        p = sampling.random_point(g.source, rng, max_den=16)
        back = g.backward.point_image(g.forward.point_image(p))
        if g.source.rep(back) != g.source.rep(p):
            raise MorphismError(f"backward(forward({p})) = {back}")
        q = sampling.random_point(g.target, rng, max_den=16)
        forth = g.forward.point_image(g.backward.point_image(q))
        if g.target.rep(forth) != g.target.rep(q):
            raise MorphismError(f"forward(backward({q})) = {forth}")


def identity_graphomorphism(cx: CurveComplex) -> Graphomorphism:
    m = identity_morphism(cx)
    return Graphomorphism(m, m, name="id")


def map_qset(g: Graphomorphism, q: QSet) -> QSet:
    """Transport a Q-set along an invertible morphism.

    Membership and decomposition are computed by pulling back, so the
    image family inherits closure and completeness from the original.
    """

    def contains(p: PathWord) -> bool:
        return q.contains(g.apply_inverse(p))

    def decomp(p: PathWord) -> list[PathWord]:
        return [g.apply(part) for part in q.decompose(g.apply_inverse(p))]

    return QSet(f"{q.name}>{g.name}", contains, decomp)


# ---------------------------------------------------------------------------
# the criteria audit


@dataclass
class CriteriaReport:
    """Verdicts for the six structural criteria plus the implication audit.

    Items: (1) segments map to valid paths, (2) edges map to edges,
    (3) skeleton families map to orderable edge families, (4) paths map
    to paths, (5) products and inverses are respected, (6) injectivity.
    """

    items: dict[int, bool]
    connected: bool
    violations: list[str] = field(default_factory=list)
    details: dict[int, str] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return not self.violations


def _covers_direction(word: PathWord, curve: str, a: Fraction, direction: int) -> bool:
    for s in word.segs:
        if s.curve != curve:
            continue
        if direction > 0 and s.lo <= a < s.hi:
            return True
        if direction < 0 and s.lo < a <= s.hi:
            return True
    return False


def _has_free_point(word: PathWord, others: Sequence[PathWord]) -> bool:
    first, last = word.segs[0], word.segs[-1]
    start_covered = any(
        _covers_direction(o, first.curve, first.a, first.sign) for o in others
    )
    end_covered = any(
        _covers_direction(o, last.curve, last.b, -last.sign) for o in others
    )
    return not start_covered or not end_covered


def is_orderable_edge_family(edges: Sequence[PathWord]) -> bool:
    """Can the edges be ordered so each has a free point w.r.t. earlier ones?

    Greedy elimination from the back: some edge free with respect to all
    the rest must exist at every stage, else no order works.
    """
    remaining = list(edges)
    while remaining:
        for i, e in enumerate(remaining):
            others = remaining[:i] + remaining[i + 1 :]
            if _has_free_point(e, others):
                del remaining[i]
                break
        else:
            return False
    return True


def check_criteria(
    phi: GraphicalMorphism, trials: int = 200, seed: int = 0
) -> CriteriaReport:
    """Sampled verdicts for criteria (1)-(5), exact verdict for (6).

    The audit then checks the implication table: (1), (4), (5) are
    equivalent; (2) and (3) each imply (4); on a connected source complex
    (2) implies (6); and under injectivity all six coincide.
    """
    rng = random.Random(derive_seed(seed, 0x33))
    cx = phi.source
    items: dict[int, bool] = {}
    details: dict[int, str] = {}

    ok = True
    for _ in range(trials):
        seg_path = PathWord.of(cx, sampling.random_path(cx, rng, 1, 1).segs[0])
        try:
            phi.apply(seg_path)
        except Exception as exc:  # construction failure = invalid image path
            ok = False
            details[1] = f"{seg_path}: {exc}"
            break
    items[1] = ok

    ok = True
    for _ in range(trials):
        e = sampling.random_edge(cx, rng)
        img = phi.apply(e)
        if not is_edge(img):
            ok = False
            details[2] = f"edge {e} maps to non-edge {img}"
            break
    items[2] = ok

    ok = True
    for _ in range(max(1, trials // 4)):
        fam = [sampling.random_path(cx, rng, 1, 3) for _ in range(rng.randint(1, 3))]
        sk = induce_skeleton(cx, fam)
        images = [phi.apply(p) for p in sk.atom_paths()]
        if not all(is_edge(i) for i in images) or not is_orderable_edge_family(images):
            ok = False
            details[3] = f"skeleton of {len(images)} atoms maps to a non-orderable family"
            break
    items[3] = ok

    ok = True
    for _ in range(trials):
        p = sampling.random_path(cx, rng)
        try:
            phi.apply(p)
        except Exception as exc:
            ok = False
            details[4] = f"{p}: {exc}"
            break
    items[4] = ok

    ok = True
    for _ in range(trials):
        a, b = sampling.random_composable_pair(cx, rng)
        if not equivalent(phi.apply(a * b), phi.apply(a) * phi.apply(b)):
            ok = False
            details[5] = f"product image mismatch at {a} | {b}"
            break
        if not equivalent(phi.apply(a.inverse()), phi.apply(a).inverse()):
            ok = False
            details[5] = f"inverse image mismatch at {a}"
            break
    items[5] = ok

    items[6] = is_injective(phi)

    connected = cx.is_connected()
    violations: list[str] = []
    if not (items[1] == items[4] == items[5]):
        violations.append("items 1, 4, 5 must agree")
    if items[2] and not items[4]:
        violations.append("item 2 must imply item 4")
    if items[3] and not items[4]:
        violations.append("item 3 must imply item 4")
    if connected and items[2] and not items[6]:
        violations.append("item 2 must imply item 6 on a connected complex")
    if items[6] and len({items[i] for i in range(1, 7)}) != 1:
        violations.append("under injectivity all items must coincide")
    return CriteriaReport(items, connected, violations, details)
