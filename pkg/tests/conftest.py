import random
from fractions import Fraction as F

import pytest

from pathgroupoid import CurveComplex, make_group


@pytest.fixture
def single():
    """One free curve."""
    return CurveComplex(["c1"])


@pytest.fixture
def two_disjoint():
    """Two curves, nothing glued."""
    return CurveComplex(["c1", "c2"])


@pytest.fixture
def line2():
    """Two curves chained end to start."""
    return CurveComplex(["c1", "c2"], [(("c1", F(1)), ("c2", F(0)))])


@pytest.fixture
def circle2():
    """Two curves closed into a circle."""
    return CurveComplex(
        ["c1", "c2"],
        [(("c1", F(1)), ("c2", F(0))), (("c2", F(1)), ("c1", F(0)))],
    )


@pytest.fixture
def loop_only():
    """A single curve with its ends identified."""
    return CurveComplex(["l1"], [(("l1", F(0)), ("l1", F(1)))])


def make_theta():
    # two parallel strands plus a loop hanging off the far junction
    return CurveComplex(
        ["c1", "c2", "l1"],
        [
            (("c1", F(0)), ("c2", F(0))),
            (("c1", F(1)), ("c2", F(1))),
            (("l1", F(0)), ("c1", F(1))),
            (("l1", F(0)), ("l1", F(1))),
        ],
    )


@pytest.fixture
def theta():
    return make_theta()


@pytest.fixture
def z2():
    return make_group("zn:2", seed=7)


@pytest.fixture
def z3():
    return make_group("zn:3", seed=7)


@pytest.fixture
def s3():
    return make_group("s3", seed=7)


@pytest.fixture
def su2():
    return make_group("su2", seed=7)


@pytest.fixture
def rng():
    return random.Random(20240817)
