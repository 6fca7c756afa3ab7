import random
from fractions import Fraction as F

import pytest

from pathgroupoid import (
    Connection,
    Germ,
    LazyHaarConnection,
    PathWord,
    PointSet,
    QuasiSurface,
    Segment,
    builtin_qset,
    check_germ,
    connections_equal_on,
    equivalent,
    extend,
    find_disagreement,
    germ_from_connection,
    qset_all,
    qset_edges,
    qset_points,
    qset_surface,
    split_at,
)
from pathgroupoid.sampling import insert_retracings, random_decomposition, random_path


def seg(c, a, b):
    return Segment(c, F(a), F(b))


def theta_surface(theta):
    # a transversal cut through both strands, oriented +1 with increasing c
    pts = [("c1", F(1, 2)), ("c2", F(1, 2))]
    sigma = {}
    for c, t in pts:
        sigma[((c, t), c, 1)] = 1
        sigma[((c, t), c, -1)] = -1
    return QuasiSurface(theta, [], pts, sigma, name="cut")


def test_qset_all_is_lazy_identity(theta):
    q = qset_all(theta)
    w = PathWord.of(theta, seg("c1", 0, 1))
    assert q.contains(w)
    assert q.decompose(w) == [w]


def test_qset_edges_splits_to_segments(theta):
    q = qset_edges(theta)
    w = PathWord.of(theta, seg("c1", 0, 1), seg("c2", 1, 0), seg("c1", 0, "1/2"))
    parts = q.decompose(w)
    assert all(q.contains(p) for p in parts)
    assert [str(p) for p in parts] == ["c1[0..1]", "c2[1..0]", "c1[0..1/2]"]
    assert not q.contains(w)


def test_qset_surface_membership(theta):
    surf = theta_surface(theta)
    q = qset_surface(theta, surf)
    crossing = PathWord.of(theta, seg("c1", 0, 1))
    assert not q.contains(crossing)
    parts = q.decompose(crossing)
    assert [str(p) for p in parts] == ["c1[0..1/2]", "c1[1/2..1]"]
    assert all(q.contains(p) for p in parts)
    assert surf.sigma_out(PathWord.of(theta, seg("c1", "1/2", 1))) == 1
    assert surf.sigma_out(PathWord.of(theta, seg("c1", "1/2", 0))) == -1
    assert surf.sigma_in(PathWord.of(theta, seg("c1", 0, "1/2"))) == 1
    assert surf.sigma_out(PathWord.of(theta, seg("c1", 0, "1/2"))) == 0


def test_point_set_and_qset_points(theta):
    marked = PointSet(theta, [("c1", F(1))], name="far")
    # the far junction aliases into l1 ends and c2's end through gluing
    assert F(0) in marked.marked_params("l1")
    assert F(1) in marked.marked_params("l1")
    assert F(1) in marked.marked_params("c2")
    q = qset_points(theta, marked)
    through = PathWord.of(theta, seg("c2", 0, 1), seg("c1", 1, 0))
    assert not q.contains(through)
    parts = q.decompose(through)
    assert all(q.contains(p) for p in parts)
    ends_at = PathWord.of(theta, seg("c2", 0, 1))
    assert q.contains(ends_at)


def test_builtin_qset_resolution(theta):
    surf = theta_surface(theta)
    marked = PointSet(theta, [("c1", F(0))], name="near")
    assert builtin_qset(theta, "all").name == "all"
    assert builtin_qset(theta, "edge").contains(
        PathWord.of(theta, seg("c1", 0, 1))
    )
    builtin_qset(theta, "surface:cut", {"cut": surf})
    builtin_qset(theta, "points:near", None, {"near": marked})
    with pytest.raises(ValueError):
        builtin_qset(theta, "surface:nope")
    with pytest.raises(ValueError):
        builtin_qset(theta, "wild")


@pytest.mark.parametrize("qname", ["all", "edge", "surface", "points"])
def test_connection_germ_laws(theta, su2, qname):
    conn = LazyHaarConnection(theta, su2, seed=5)
    if qname == "surface":
        q = qset_surface(theta, theta_surface(theta))
    elif qname == "points":
        q = qset_points(theta, PointSet(theta, [("c1", F(1))], name="far"))
    else:
        q = builtin_qset(theta, qname)
    rep = check_germ(germ_from_connection(conn, q), theta, trials=300, seed=3)
    assert rep.passed, (rep.failure, rep.witness)


def test_check_germ_catches_constant_breakage(theta, z3):
    bad = Germ(qset_all(theta), z3, lambda p: z3.elem(1))
    rep = check_germ(bad, theta, trials=300, seed=3)
    assert not rep.passed
    assert rep.failure in ("inverse-law", "product-law")


@pytest.mark.parametrize("qname", ["all", "edge"])
def test_extension_recovers_connection(theta, z3, rng, qname):
    conn = LazyHaarConnection(theta, z3, seed=8)
    q = builtin_qset(theta, qname)
    ext = extend(germ_from_connection(conn, q), theta)
    for _ in range(150):
        p = random_path(theta, rng)
        assert ext.holonomy(p) == conn.holonomy(p)


def test_extension_decomposition_independent(theta, su2, rng):
    conn = LazyHaarConnection(theta, su2, seed=8)
    q = qset_edges(theta)
    ext = extend(germ_from_connection(conn, q), theta)
    for _ in range(60):
        p = random_path(theta, rng)
        whole = ext.holonomy(p)
        parts = random_decomposition(p, rng)
        acc = su2.identity
        for part in parts:
            acc = su2.mul(acc, ext.holonomy(part))
        assert su2.isclose(acc, whole, tol=1e-9)


def test_extension_retracing_invariant(theta, z3, rng):
    conn = LazyHaarConnection(theta, z3, seed=8)
    ext = extend(germ_from_connection(conn, qset_edges(theta)), theta)
    for _ in range(100):
        p = random_path(theta, rng)
        assert ext.holonomy(insert_retracings(p, rng, 2)) == ext.holonomy(p)


class _RefinedQueries(Connection):
    """Route every holonomy through a midpoint split of the same backend."""

    provenance = "refined"

    def __init__(self, inner):
        self.inner = inner
        self.cx = inner.cx
        self.ctx = inner.ctx

    def holonomy(self, path):
        if path.is_trivial or path.length == 0:
            return self.inner.holonomy(path)
        a, b = split_at(path, path.length / 2)
        return self.ctx.mul(self.inner.holonomy(a), self.inner.holonomy(b))


def test_connections_equal_on_refined_queries(theta, su2):
    lazy = LazyHaarConnection(theta, su2, seed=13)
    wrapped = _RefinedQueries(lazy)
    assert connections_equal_on(
        lazy, wrapped, qset_all(theta), theta, trials=150, seed=2, tol=1e-9
    )


def test_find_disagreement_different_seeds(theta, z3):
    a = LazyHaarConnection(theta, z3, seed=1)
    b = LazyHaarConnection(theta, z3, seed=2)
    witness = find_disagreement(a, b, qset_all(theta), theta, trials=200, seed=4)
    assert witness is not None
    assert a.holonomy(witness) != b.holonomy(witness)


def test_trivial_always_identity(theta, su2):
    germ = Germ(qset_all(theta), su2, lambda p: su2.haar_sample())
    t = PathWord.trivial(theta, ("c1", F(1, 4)))
    assert germ.value(t) == su2.identity
