import random
from fractions import Fraction as F

import pytest

from pathgroupoid import (
    CurveComplex,
    GraphicalMorphism,
    Graphomorphism,
    MorphismError,
    PathWord,
    Segment,
    check_criteria,
    compose,
    equivalent,
    identity_graphomorphism,
    identity_morphism,
    is_injective,
    is_orderable_edge_family,
    map_qset,
    parse_path,
    qset_edges,
    validate_inverse,
)
from pathgroupoid.sampling import random_edge, random_path


def seg(c, a, b):
    return Segment(c, F(a), F(b))


def reversal(single):
    img = {"c1": PathWord.of(single, seg("c1", 1, 0))}
    return GraphicalMorphism(single, single, img, name="rev")


def swap(theta):
    imgs = {
        "c1": PathWordOf(theta, "c2"),
        "c2": PathWordOf(theta, "c1"),
        "l1": PathWordOf(theta, "l1"),
    }
    return GraphicalMorphism(theta, theta, imgs, name="swap")


def PathWordOf(cx, curve):
    return PathWord.of(cx, Segment(curve, F(0), F(1)))


def test_reversal_images(single):
    rev = reversal(single)
    w = PathWord.of(single, seg("c1", 0, "1/2"))
    assert rev.apply(w).segs == (seg("c1", 1, "1/2"),)
    assert rev.point_image(("c1", F(1, 4))) == ("c1", F(3, 4))
    assert is_injective(rev)
    g = Graphomorphism(rev, reversal(single), name="rev")
    validate_inverse(g, trials=100)


def test_subdivision_between_complexes(line2):
    # chain of two curves onto one curve, exact halves
    target = CurveComplex(["d"])
    imgs = {
        "c1": PathWord.of(target, Segment("d", F(0), F(1, 2))),
        "c2": PathWord.of(target, Segment("d", F(1, 2), F(1))),
    }
    phi = GraphicalMorphism(line2, target, imgs, name="sub")
    assert phi.point_image(("c1", F(1, 2))) == ("d", F(1, 4))
    assert phi.point_image(("c2", F(0))) == ("d", F(1, 2))
    w = PathWord.of(line2, seg("c1", 0, 1), seg("c2", 0, 1))
    assert phi.apply(w).param_canonical().segs == (Segment("d", F(0), F(1)),)
    assert is_injective(phi)
    rep = check_criteria(phi, trials=80, seed=1)
    assert all(rep.items.values())
    assert rep.consistent


def test_nonaffine_correspondence(single):
    # a two-piece correspondence bends parameter speed but stays exact
    img = {"c1": PathWord.of(single, seg("c1", 0, 1))}
    corr = {"c1": [(F(0), F(0)), (F(1, 2), F(1, 4)), (F(1), F(1))]}
    phi = GraphicalMorphism(single, single, img, corr, name="bend")
    assert phi.point_image(("c1", F(1, 2))) == ("c1", F(1, 4))
    assert phi.point_image(("c1", F(3, 4))) == ("c1", F(5, 8))
    assert phi.pull_position("c1", F(1, 4)) == F(1, 2)
    w = PathWord.of(single, seg("c1", 0, "1/2"))
    assert phi.apply(w).segs == (seg("c1", 0, "1/4"),)


def test_gluing_compatibility_enforced(line2, two_disjoint):
    target = CurveComplex(["d", "e"])
    imgs = {
        "c1": PathWord.of(target, Segment("d", F(0), F(1))),
        "c2": PathWord.of(target, Segment("e", F(0), F(1))),
    }
    # line2 glues (c1,1)=(c2,0) but the images' endpoints are unglued
    with pytest.raises(MorphismError):
        GraphicalMorphism(line2, target, imgs, name="broken")
    GraphicalMorphism(two_disjoint, target, imgs, name="fine")


def test_monotonicity_enforced(single):
    img = {"c1": PathWord.of(single, seg("c1", 0, 1))}
    with pytest.raises(MorphismError):
        GraphicalMorphism(
            single, single, img, {"c1": [(F(0), F(0)), (F(1, 2), F(0)), (F(1), F(1))]}
        )


def test_swap_is_clean(theta):
    phi = swap(theta)
    assert is_injective(phi)
    rep = check_criteria(phi, trials=100, seed=2)
    assert all(rep.items.values())
    assert rep.consistent


def test_disconnected_fold_witness(two_disjoint):
    # both curves onto one arc, the second reversed: edges map to edges
    # but the map folds, and image families stop being orderable
    target = CurveComplex(["d"])
    imgs = {
        "c1": PathWord.of(target, Segment("d", F(0), F(1))),
        "c2": PathWord.of(target, Segment("d", F(1), F(0))),
    }
    phi = GraphicalMorphism(two_disjoint, target, imgs, name="fold")
    rep = check_criteria(phi, trials=150, seed=3)
    assert not rep.connected
    assert rep.items[2], "single-complex edges still map to edges"
    assert not rep.items[6], "the fold is not injective"
    assert not rep.items[3], "duplicate image arcs are not orderable"
    assert rep.consistent, rep.violations


def test_connected_fold_fails_edge_criterion(circle2):
    # same fold on a connected circle: an edge crossing the junction
    # maps to a retracing word, so the edge criterion itself fails
    imgs = {
        "c1": PathWord.of(circle2, seg("c1", 0, 1)),
        "c2": PathWord.of(circle2, seg("c1", 1, 0)),
    }
    phi = GraphicalMorphism(circle2, circle2, imgs, name="fold2")
    rep = check_criteria(phi, trials=200, seed=4)
    assert rep.connected
    assert not rep.items[2]
    assert not rep.items[6]
    assert rep.consistent, rep.violations


def test_edge_sampler_crosses_junctions(theta, rng):
    crossing = 0
    for _ in range(200):
        e = random_edge(theta, rng)
        if len(e.segs) > 1:
            crossing += 1
    assert crossing > 0, "edge sampling must exercise multi-segment edges"


def test_orderable_edge_family():
    cx = CurveComplex(["d"])
    a = PathWord.of(cx, Segment("d", F(0), F(1, 2)))
    b = PathWord.of(cx, Segment("d", F(1, 2), F(1)))
    assert is_orderable_edge_family([a, b])
    assert is_orderable_edge_family([a, b, a.inverse()]) is False
    assert is_orderable_edge_family([a, a.inverse()]) is False
    assert is_orderable_edge_family([])


def test_bad_inverse_rejected(single):
    ident = identity_morphism(single)
    rev = reversal(single)
    with pytest.raises(MorphismError):
        Graphomorphism(ident, rev, name="mismatch")


def test_compose_round_trip(theta, rng):
    g = Graphomorphism(swap(theta), swap(theta), name="swap")
    comp = compose(g.backward, g.forward)
    for _ in range(50):
        p = random_path(theta, rng)
        assert equivalent(comp.apply(p), p)


def test_compose_with_correspondence(single):
    img = {"c1": PathWord.of(single, seg("c1", 0, 1))}
    corr = {"c1": [(F(0), F(0)), (F(1, 2), F(1, 4)), (F(1), F(1))]}
    bend = GraphicalMorphism(single, single, img, corr, name="bend")
    twice = compose(bend, bend)
    assert twice.point_image(("c1", F(1, 2))) == ("c1", F(1, 8))
    w = PathWord.of(single, seg("c1", 0, "1/2"))
    assert twice.apply(w).param_canonical().segs == (seg("c1", 0, "1/8"),)


def test_map_qset_transports(theta, rng):
    g = Graphomorphism(swap(theta), swap(theta), name="swap")
    q = qset_edges(theta)
    q2 = map_qset(g, q)
    for _ in range(50):
        p = random_path(theta, rng)
        parts = q2.decompose(p)
        assert all(q2.contains(part) for part in parts)
        from pathgroupoid import concat

        assert concat(parts).param_canonical() == p.param_canonical()


def test_identity_graphomorphism(theta, rng):
    g = identity_graphomorphism(theta)
    for _ in range(20):
        p = random_path(theta, rng)
        assert g.apply(p) == p
        assert g.apply_inverse(p) == p
