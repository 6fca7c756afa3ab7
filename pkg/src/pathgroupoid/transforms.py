"""Connection transforms built from a Q-set, a morphism, and a junction map.

The general recipe: on a member q of the Q-set,

    h'(q) = rho(q)^-1 . h(phi(q)) . rho(q^-1)

and elsewhere by the unique germ extension.  ``rho`` must satisfy two laws
over decompositions of members into nontrivial members (the junction then
sits strictly inside, which is what makes the point-pinning map legal):

    prefix law      rho(q1.q2) = rho(q1)
    junction law    rho(q1^-1) = rho(q2)

``rho`` may consult the connection being transformed; the pinning map does.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .connections import Connection
from .germs import Germ, PointSet, QSet, QuasiSurface, _random_member, qset_all, qset_points, qset_surface
from .groups import GroupCtx, GroupElem, derive_seed
from .morphisms import Graphomorphism, identity_graphomorphism, map_qset
from .paths import CurveComplex, PathWord, is_edge, split_at
from . import sampling


class TransformError(ValueError):
    """Transform data fails its structural requirements."""


def bb_related(a: PathWord, b: PathWord) -> bool:
    """Do two paths leave their start along the same germ?

    Decided on reduced words: both trivial at the same point class, or
    both nontrivial with identical first-segment curve, start parameter
    and direction.  A nontrivial path is never related to a trivial one.
    """
    ra, rb = a.reduced(), b.reduced()
    if ra.is_trivial or rb.is_trivial:
        return ra.is_trivial and rb.is_trivial and ra.base == rb.base
    sa, sb = ra.segs[0], rb.segs[0]
    return sa.curve == sb.curve and sa.a == sb.a and sa.sign == sb.sign


@dataclass
class AdmissibleMap:
    """Junction map for a transform: a group value for every Q-set member.

    ``fn(path, conn)`` ignores ``conn`` unless ``needs_connection`` is
    set.  ``support_paths`` lists the paths whose holonomy the map reads,
    so exact enumeration can widen its skeleton accordingly.
    """

    name: str
    qset: QSet
    ctx: GroupCtx
    fn: Callable[[PathWord, Connection | None], GroupElem]
    needs_connection: bool = False
    support_paths: tuple[PathWord, ...] = ()

    def value(self, path: PathWord, conn: Connection | None = None) -> GroupElem:
        if self.needs_connection and conn is None:
            raise TransformError(f"{self.name} needs the connection it acts on")
        return self.fn(path, conn)


@dataclass
class AdmissibilityReport:
    passed: bool
    trials: int
    checked: int
    failure: str | None = None
    witness: PathWord | None = None


def check_admissible(
    amap: AdmissibleMap,
    cx: CurveComplex,
    conn: Connection | None = None,
    trials: int = 500,
    seed: int = 0,
    tol: float | None = None,
) -> AdmissibilityReport:
    """Falsification pass for the prefix and junction laws.

    Samples members, cuts them strictly inside, and keeps only cuts where
    both halves are again members; trivial halves never arise that way.
    """
    ctx = amap.ctx
    rng = random.Random(derive_seed(seed, 0xAD))
    close = ctx.isclose if tol is None else (lambda a, b: ctx.isclose(a, b, tol))
    checked = 0
    for i in range(trials):
        member = _random_member(amap.qset, cx, rng, nontrivial=True)
        left, right = split_at(member, sampling.random_cut_position(member, rng))
        if left.is_trivial or right.is_trivial:
            continue
        if not (amap.qset.contains(left) and amap.qset.contains(right)):
            continue
        checked += 1
        if not close(amap.value(member, conn), amap.value(left, conn)):
            return AdmissibilityReport(False, i + 1, checked, "prefix-law", member)
        if not close(amap.value(left.inverse(), conn), amap.value(right, conn)):
            return AdmissibilityReport(False, i + 1, checked, "junction-law", member)
    return AdmissibilityReport(True, trials, checked)


class _PlanStep:
    __slots__ = ("part", "part_inv", "image", "left", "right")

    def __init__(self, part, part_inv, image, left, right):
        self.part = part
        self.part_inv = part_inv
        self.image = image
        self.left = left
        self.right = right


class Transform:
    """A buildable transform: Q-set plus morphism plus junction map.

    Transformed connections live on the morphism's source complex and
    read the base connection through the morphism.  Per-path evaluation
    plans (Q-decomposition, image words, static junction factors) are
    cached on the transform, so repeated sampling pays only for holonomy.
    """

    def __init__(
        self,
        qset: QSet,
        morphism: Graphomorphism,
        rho: AdmissibleMap,
        ctx: GroupCtx,
        name: str = "transform",
    ):
        self.qset = qset
        self.morphism = morphism
        self.rho = rho
        self.ctx = ctx
        self.name = name
        self._plans: dict[PathWord, list[_PlanStep]] = {}

    @property
    def home(self) -> CurveComplex:
        """Complex the transformed connections live on."""
        return self.morphism.source

    @property
    def base_home(self) -> CurveComplex:
        """Complex the connections being transformed live on."""
        return self.morphism.target

    def _plan(self, path: PathWord) -> list[_PlanStep]:
        plan = self._plans.get(path)
        if plan is not None:
            return plan
        plan = []
        static = not self.rho.needs_connection
        for part in self.qset.decompose(path):
            if part.is_trivial:
                continue
            part_inv = part.inverse()
            image = self.morphism.apply(part)
            left = self.ctx.inv(self.rho.value(part)) if static else None
            right = self.rho.value(part_inv) if static else None
            plan.append(_PlanStep(part, part_inv, image, left, right))
        self._plans[path] = plan
        return plan

    def evaluate(self, conn: Connection, path: PathWord) -> GroupElem:
        ctx = self.ctx
        out = ctx.identity
        for step in self._plan(path):
            left = step.left
            if left is None:
                left = ctx.inv(self.rho.value(step.part, conn))
            right = step.right
            if right is None:
                right = self.rho.value(step.part_inv, conn)
            out = ctx.mul(out, ctx.mul(ctx.mul(left, conn.holonomy(step.image)), right))
        return out

    def member_value(self, conn: Connection, member: PathWord) -> GroupElem:
        """The defining formula on a single Q-set member, no decomposition."""
        if member.is_trivial:
            return self.ctx.identity
        left = self.ctx.inv(self.rho.value(member, conn))
        right = self.rho.value(member.inverse(), conn)
        return self.ctx.mul(
            self.ctx.mul(left, conn.holonomy(self.morphism.apply(member))), right
        )

    def germ(self, conn: Connection) -> Germ:
        """The transform's values on the Q-set, as a checkable germ."""
        return Germ(self.qset, self.ctx, lambda q: self.member_value(conn, q))

    def apply(self, conn: Connection) -> "TransformedConnection":
        if conn.ctx is not self.ctx:
            raise TransformError("connection group does not match the transform")
        if conn.cx is not self.base_home:
            raise TransformError("connection lives off the transform's base complex")
        return TransformedConnection(self, conn)

    def __repr__(self) -> str:
        return f"Transform({self.name})"


class TransformedConnection(Connection):
    provenance = "transformed"

    def __init__(self, transform: Transform, base: Connection):
        self.transform = transform
        self.base = base
        self.cx = transform.home
        self.ctx = transform.ctx

    def holonomy(self, path: PathWord) -> GroupElem:
        return self.transform.evaluate(self.base, path)


def build_transform(
    morphism: Graphomorphism, rho: AdmissibleMap, name: str | None = None
) -> Transform:
    return Transform(rho.qset, morphism, rho, rho.ctx, name or rho.name)


def invert_transform(t: Transform) -> Transform:
    """The transform undoing ``t``: mapped Q-set, reversed morphism,
    inverted junction values pulled back through the morphism.

    When the junction map reads the connection, the inverse peels a
    connection transformed by ``t`` back to its base, so the values match
    the ones used on the way in.
    """
    m = t.morphism
    if not isinstance(m, Graphomorphism):
        raise TransformError("only transforms along invertible morphisms invert")
    mapped = map_qset(m, t.qset)

    def fn(path: PathWord, conn: Connection | None) -> GroupElem:
        base = conn
        if isinstance(conn, TransformedConnection) and conn.transform is t:
            base = conn.base
        return t.ctx.inv(t.rho.fn(m.apply_inverse(path), base))

    rho = AdmissibleMap(
        f"{t.rho.name}~",
        mapped,
        t.ctx,
        fn,
        needs_connection=t.rho.needs_connection,
        support_paths=tuple(m.apply(p) for p in t.rho.support_paths),
    )
    return Transform(mapped, m.inverse(), rho, t.ctx, f"{t.name}~")


# ---------------------------------------------------------------------------
# the stock transforms


def identity_transform(cx: CurveComplex, ctx: GroupCtx) -> Transform:
    rho = AdmissibleMap(
        "unit", qset_all(cx), ctx, lambda path, conn: ctx.identity
    )
    return Transform(rho.qset, identity_graphomorphism(cx), rho, ctx, "identity")


def gauge_transform(cx: CurveComplex, ctx: GroupCtx, g) -> Transform:
    """Pointwise regauging: h'(p->q) = g(p)^-1 . h(p->q) . g(q).

    ``g`` is a dict over point classes (identity elsewhere) or a callable
    on points; values attach at path starts.
    """
    if callable(g):
        table = lambda p: g(p)
    else:
        fixed = {cx.rep(k): v for k, v in g.items()}
        for v in fixed.values():
            ctx._check(v)
        table = lambda p: fixed.get(p, ctx.identity)

    rho = AdmissibleMap(
        "gauge", qset_all(cx), ctx, lambda path, conn: table(path.start)
    )
    return Transform(rho.qset, identity_graphomorphism(cx), rho, ctx, "gauge")


def diffeo_transform(g: Graphomorphism, ctx: GroupCtx) -> Transform:
    """Carry connections along an invertible morphism: h'(p) = h(g^-1(p))."""
    minv = g.inverse()
    rho = AdmissibleMap(
        "unit", qset_all(minv.source), ctx, lambda path, conn: ctx.identity
    )
    return Transform(rho.qset, minv, rho, ctx, f"diffeo:{g.name}")


def weyl_transform(
    surface: QuasiSurface, d: GroupElem, ctx: GroupCtx
) -> Transform:
    """Multiply by a fixed element at transversal surface punctures:
    h'(p) = d^sigma_out(p) . h(p) . d^sigma_in(p) for punctured paths,
    untouched along the surface."""
    ctx._check(d)
    cx = surface.cx

    def fn(path: PathWord, conn: Connection | None) -> GroupElem:
        r = path.reduced()
        if r.is_trivial or r.segs[0].curve in surface.curves:
            return ctx.identity
        return ctx.power(d, -surface.sigma_out(r))

    rho = AdmissibleMap(f"weyl:{surface.name}", qset_surface(cx, surface), ctx, fn)
    return Transform(rho.qset, identity_graphomorphism(cx), rho, ctx, "weyl")


def npoint_transform(
    marked: PointSet, ctx: GroupCtx, pins: Sequence[tuple[PathWord, GroupElem]]
) -> Transform:
    """Pin prescribed values onto chosen departing edges at marked points.

    Each pinned edge must start at a marked point, meet the marked set
    nowhere else, and edges sharing a start must leave along distinct
    germs.  The junction map reads the connection: along a pinned germ it
    is h(e).f(e)^-1, so the transformed connection satisfies h'(e) = f(e).
    """
    cx = marked.cx
    edges: list[PathWord] = []
    targets: dict[PathWord, GroupElem] = {}
    for e, value in pins:
        ctx._check(value)
        w = e.reduced()
        if w.is_trivial or not is_edge(w):
            raise TransformError(f"pinned path {e} is not an edge")
        if not marked.contains_point(w.start):
            raise TransformError(f"pinned edge {w} does not start at a marked point")
        hits = []
        for k, seg in enumerate(w.segs):
            for t in marked.marked_params(seg.curve):
                if seg.lo < t < seg.hi:
                    hits.append((seg.curve, t))
            if k > 0 and marked.contains_point(seg.start):
                hits.append(seg.start)
        if marked.contains_point(w.end):
            hits.append(w.end)
        if hits:
            raise TransformError(f"pinned edge {w} meets marked points at {hits}")
        for other in edges:
            if cx.rep(other.start) == cx.rep(w.start) and bb_related(other, w):
                raise TransformError(
                    f"pinned edges {other} and {w} leave along the same germ"
                )
        edges.append(w)
        targets[w] = value

    def fn(path: PathWord, conn: Connection | None) -> GroupElem:
        r = path.reduced()
        for e in edges:
            if bb_related(r, e):
                return ctx.mul(conn.holonomy(e), ctx.inv(targets[e]))
        return ctx.identity

    rho = AdmissibleMap(
        f"pin:{marked.name}",
        qset_points(cx, marked),
        ctx,
        fn,
        needs_connection=True,
        support_paths=tuple(edges),
    )
    t = Transform(
        rho.qset, identity_graphomorphism(cx), rho, ctx, f"npoint:{marked.name}"
    )
    t.pin_targets = dict(targets)
    return t


def pinned_edges(t: Transform) -> tuple[PathWord, ...]:
    """The edges a pinning transform forces values on (empty otherwise)."""
    return tuple(t.rho.support_paths)
