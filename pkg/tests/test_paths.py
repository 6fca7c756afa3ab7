import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathgroupoid import (
    ComplexError,
    DecompositionError,
    NotExpressibleError,
    PathError,
    PathWord,
    Segment,
    common_refinement,
    concat,
    equivalent,
    express,
    induce_skeleton,
    is_decomposition,
    is_edge,
    is_refinement,
    parse_path,
    point_at,
    slice_word,
    split_at,
)
from pathgroupoid.sampling import (
    insert_retracings,
    random_decomposition,
    random_order_reduce,
    random_path,
)

from conftest import make_theta


def seg(c, a, b):
    return Segment(c, F(a), F(b))


def test_segment_validation():
    with pytest.raises(PathError):
        seg("c1", 0, 0)
    with pytest.raises(PathError):
        Segment("c1", F(0), F(3, 2))
    s = seg("c1", "1/4", 1)
    assert s.sign == 1 and s.length == F(3, 4)
    assert s.reversed() == seg("c1", 1, "1/4")
    assert str(s) == "c1[1/4..1]"


def test_complex_classes(theta):
    far = theta.rep(("l1", F(0)))
    assert far == theta.rep(("c1", F(1))) == theta.rep(("l1", F(1)))
    assert theta.rep(("c2", F(1))) == far
    assert theta.rep(("c1", F(0))) == theta.rep(("c2", F(0)))
    assert theta.rep(("c1", F(1, 2))) == ("c1", F(1, 2))
    assert set(theta.glued_params("l1")) == {F(0), F(1)}
    assert theta.is_connected()


def test_complex_errors():
    with pytest.raises(ComplexError):
        make_theta().rep(("zz", F(0)))
    with pytest.raises(ComplexError):
        from pathgroupoid import CurveComplex

        CurveComplex(["c1", "c1"])


def test_junction_check(theta, two_disjoint):
    # composable only when endpoint classes match
    with pytest.raises(PathError):
        PathWord.of(theta, seg("c1", 0, 1), seg("c1", 0, 1))
    PathWord.of(theta, seg("c1", 0, 1), seg("c2", 1, 0))
    with pytest.raises(PathError):
        PathWord.of(two_disjoint, seg("c1", 0, 1), seg("c2", 0, 1))


def test_param_canonical_merges(single):
    w = PathWord.of(single, seg("c1", 0, "1/3"), seg("c1", "1/3", "2/3"), seg("c1", "2/3", "1/2"))
    assert w.param_canonical().segs == (seg("c1", 0, "2/3"), seg("c1", "2/3", "1/2"))


def test_reduced_cancels_retrace(single):
    w = PathWord.of(single, seg("c1", 0, 1), seg("c1", 1, "1/2"))
    assert w.reduced().segs == (seg("c1", 0, "1/2"),)
    gone = PathWord.of(single, seg("c1", 0, "1/2"), seg("c1", "1/2", 0))
    r = gone.reduced()
    assert r.is_trivial and r.base == ("c1", F(0))


def test_reduce_never_crosses_gluings(loop_only):
    # a doubled loop is not a retrace: junction passes through the gluing
    w = PathWord.of(loop_only, seg("l1", 0, 1), seg("l1", 0, 1))
    assert w.reduced().segs == w.segs
    back = PathWord.of(loop_only, seg("l1", 0, 1), seg("l1", 1, 0))
    assert back.reduced().is_trivial


def test_reduced_idempotent_random(theta, rng):
    for _ in range(300):
        w = insert_retracings(random_path(theta, rng), rng, rng.randint(0, 4))
        r = w.reduced()
        assert r.reduced() == r


def test_reduction_confluence_random(theta, rng):
    for _ in range(400):
        base = random_path(theta, rng, 1, 4)
        messy = insert_retracings(base, rng, rng.randint(0, 6))
        assert messy.reduced() == random_order_reduce(messy, rng)
        assert messy.reduced() == base.reduced()


def test_equivalence_and_groupoid_laws(theta, rng):
    for _ in range(200):
        a = random_path(theta, rng)
        assert equivalent(a, insert_retracings(a, rng, 2))
        assert a.inverse().inverse() == a
        assert equivalent((a * a.inverse()), PathWord.trivial(theta, a.start))


def test_concat_and_trivial_factors(theta):
    t = PathWord.trivial(theta, ("c1", F(1)))
    a = PathWord.of(theta, seg("c1", 0, 1))
    b = PathWord.of(theta, seg("l1", 0, 1))
    assert concat([a, t, b]).segs == (seg("c1", 0, 1), seg("l1", 0, 1))
    with pytest.raises(PathError):
        concat([b, PathWord.of(theta, seg("c2", "1/2", 0))])


def test_is_decomposition(theta):
    w = PathWord.of(theta, seg("c1", 0, 1), seg("l1", 0, 1))
    a, b = split_at(w, F(1, 2))
    assert is_decomposition([a, b], w)
    assert not is_decomposition([b, a], w)
    # equivalent but not parameter-equal concatenation is not a decomposition
    messy = PathWord.of(theta, seg("c1", 0, 1), seg("c1", 1, 0), seg("c1", 0, 1), seg("l1", 0, 1))
    assert not is_decomposition([messy], w)


def test_refinement_greedy(theta):
    w = PathWord.of(theta, seg("c1", 0, 1), seg("l1", 0, 1))
    fine = [slice_word(w, a, b) for a, b in [(F(0), F(1, 4)), (F(1, 4), F(1)), (F(1), F(2))]]
    coarse = [slice_word(w, F(0), F(1)), slice_word(w, F(1), F(2))]
    assert is_refinement(fine, coarse)
    assert not is_refinement(coarse, fine)
    assert is_refinement(fine, fine)


def test_refinement_with_trivial_parts(theta):
    w = PathWord.of(theta, seg("c1", 0, 1))
    t = PathWord.trivial(theta, ("c1", F(1, 2)))
    a, b = split_at(w, F(1, 2))
    assert is_refinement([a, t, b], [w])
    assert is_refinement([a, t, b], [a, b])
    assert not is_refinement([a, b], [a, t, b])


def test_common_refinement_cuts(theta):
    w = PathWord.of(theta, seg("c1", 0, 1), seg("l1", 0, 1))
    left = [slice_word(w, F(0), F(1, 2)), slice_word(w, F(1, 2), F(2))]
    right = [slice_word(w, F(0), F(4, 3)), slice_word(w, F(4, 3), F(2))]
    both = common_refinement(left, right)
    assert is_refinement(both, left)
    assert is_refinement(both, right)
    assert len(both) == 3


def test_common_refinement_trivial_multiplicity(theta):
    w = PathWord.of(theta, seg("c1", 0, 1))
    a, b = split_at(w, F(1, 2))
    t = PathWord.trivial(theta, ("c1", F(1, 2)))
    both = common_refinement([a, t, t, b], [a, t, b])
    assert both.count(t) == 2
    assert is_refinement(both, [a, t, t, b])
    assert is_refinement(both, [a, t, b])


def test_common_refinement_rejects_distinct_paths(theta):
    a = [PathWord.of(theta, seg("c1", 0, 1))]
    b = [PathWord.of(theta, seg("c2", 0, 1))]
    with pytest.raises(DecompositionError):
        common_refinement(a, b)


def test_point_and_slice(theta):
    w = PathWord.of(theta, seg("c1", 0, 1), seg("c2", 1, 0))
    assert point_at(w, F(1, 2)) == ("c1", F(1, 2))
    assert point_at(w, F(3, 2)) == ("c2", F(1, 2))
    assert point_at(w, F(1)) == theta.rep(("c1", F(1)))
    mid = slice_word(w, F(1, 2), F(3, 2))
    assert mid.segs == (seg("c1", "1/2", 1), seg("c2", 1, "1/2"))
    assert slice_word(w, F(1, 2), F(1, 2)).is_trivial


def test_is_edge(theta, loop_only):
    assert is_edge(PathWord.of(theta, seg("c1", 0, 1)))
    assert is_edge(PathWord.of(theta, seg("c1", "1/4", 1), seg("c2", 1, "1/4")))
    assert is_edge(PathWord.of(loop_only, seg("l1", 0, 1)))  # closed edge
    # self-overlap
    assert not is_edge(PathWord.of(theta, seg("c1", 0, 1), seg("c1", 1, "1/2")))
    # revisits an interior class
    w = PathWord.of(theta, seg("c1", 0, 1), seg("c2", 1, 0), seg("c1", 0, "1/2"))
    assert not is_edge(w)
    assert not is_edge(PathWord.trivial(theta, ("c1", F(0))))


def test_induced_skeleton_and_express(theta):
    p = PathWord.of(theta, seg("c1", 0, "3/4"))
    q = PathWord.of(theta, seg("c1", "1/4", 1), seg("l1", 0, 1))
    sk = induce_skeleton(theta, [p, q])
    rendered = sorted(str(a) for a in sk.atoms)
    assert rendered == ["c1[0..1/4]", "c1[1/4..3/4]", "c1[3/4..1]", "l1[0..1]"]
    idx = {str(a): i for i, a in enumerate(sk.atoms)}
    assert express(p, sk) == [(idx["c1[0..1/4]"], 1), (idx["c1[1/4..3/4]"], 1)]
    assert express(q.inverse(), sk)[0] == (idx["l1[0..1]"], -1)
    with pytest.raises(NotExpressibleError):
        express(PathWord.of(theta, seg("c2", 0, 1)), sk)


def test_express_trivial(theta):
    sk = induce_skeleton(theta, [PathWord.of(theta, seg("c1", 0, 1))])
    assert express(PathWord.trivial(theta, ("c1", F(0))), sk) == []


def test_parse_round_trip(theta):
    w = parse_path(theta, "c1[0..1] c2[1..1/2]")
    assert w.segs == (seg("c1", 0, 1), seg("c2", 1, "1/2"))
    assert parse_path(theta, str(w)) == w
    # ~ reverses a bracket segment
    assert parse_path(theta, "c1[0..1]~").segs == (seg("c1", 1, 0),)
    t = parse_path(theta, "triv(c1,1/4)")
    assert t.is_trivial
    with pytest.raises(ValueError):
        parse_path(theta, "c9[0..1]")


# -- property tests ---------------------------------------------------------

_params = st.integers(0, 8).map(lambda k: F(k, 8))


@st.composite
def theta_words(draw):
    cx = make_theta()
    rng = random.Random(draw(st.integers(0, 10**9)))
    word = random_path(cx, rng, 1, draw(st.integers(1, 4)))
    return cx, rng, word


@given(theta_words())
@settings(max_examples=150, deadline=None)
def test_prop_reduce_confluent(data):
    cx, rng, word = data
    messy = insert_retracings(word, rng, rng.randint(0, 5))
    assert messy.reduced() == random_order_reduce(messy, rng)


@given(theta_words())
@settings(max_examples=100, deadline=None)
def test_prop_decomposition_recomposes(data):
    cx, rng, word = data
    parts = random_decomposition(word, rng)
    assert is_decomposition(parts, word)
    assert concat(parts).param_canonical() == word.param_canonical()


@given(theta_words(), _params, _params)
@settings(max_examples=100, deadline=None)
def test_prop_slice_consistent(data, p, q):
    cx, rng, word = data
    lo, hi = sorted((p * word.length, q * word.length))
    piece = slice_word(word, lo, hi)
    if lo == hi:
        assert piece.is_trivial
    else:
        assert piece.length == hi - lo
        assert piece.start == point_at(word, lo)
        assert piece.end == point_at(word, hi)


@given(theta_words())
@settings(max_examples=100, deadline=None)
def test_prop_inverse_reverses(data):
    cx, rng, word = data
    assert word.inverse().reduced() == word.reduced().inverse().reduced()
