"""Seeded random generators for paths, decompositions and rewrites.

These feed the falsification-style checks (germ laws, admissibility,
morphism criteria) and the stress tests.  Everything is driven by an
explicit ``random.Random`` so runs reproduce exactly.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .paths import (
    CurveComplex,
    PathWord,
    Segment,
    is_edge,
    slice_word,
    split_at,
)


def random_param(rng: random.Random, max_den: int = 8) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def random_point(cx: CurveComplex, rng: random.Random, max_den: int = 8):
    curve = rng.choice(sorted(cx.curves))
    return (curve, random_param(rng, max_den))


def random_path(
    cx: CurveComplex,
    rng: random.Random,
    min_segs: int = 1,
    max_segs: int = 5,
    max_den: int = 8,
) -> PathWord:
    """Random composable word: a walk that may hop curves through gluings."""
    n = rng.randint(min_segs, max_segs)
    cur = random_point(cx, rng, max_den)
    segs: list[Segment] = []
    for _ in range(n):
        members = cx.class_members(cur)
        curve, t = members[rng.randrange(len(members))]
        for _ in range(32):
            t2 = random_param(rng, max_den)
            if t2 != t:
                break
        else:
            t2 = Fraction(1) if t != 1 else Fraction(0)
        segs.append(Segment(curve, t, t2))
        cur = (curve, t2)
    return PathWord(cx, tuple(segs))


def random_trivial(cx: CurveComplex, rng: random.Random) -> PathWord:
    return PathWord.trivial(cx, random_point(cx, rng))


def insert_retracings(word: PathWord, rng: random.Random, count: int) -> PathWord:
    """Splice ``count`` random there-and-back excursions into the word.

    The result is equivalent to the input by construction.
    """
    cx = word.cx
    segs = list(word.segs)
    for _ in range(count):
        j = rng.randint(0, len(segs))
        if segs:
            anchor = segs[j - 1].end if j > 0 else segs[0].start
        else:
            anchor = word.base
        members = cx.class_members(anchor)
        curve, t = members[rng.randrange(len(members))]
        steps = rng.randint(1, 2)
        ex: list[Segment] = []
        cur = (curve, t)
        for _ in range(steps):
            mem = cx.class_members(cur)
            c2, u = mem[rng.randrange(len(mem))]
            for _ in range(32):
                u2 = random_param(rng)
                if u2 != u:
                    break
            else:
                u2 = Fraction(1) if u != 1 else Fraction(0)
            ex.append(Segment(c2, u, u2))
            cur = (c2, u2)
        back = [s.reversed() for s in reversed(ex)]
        segs[j:j] = ex + back
    if not segs:
        return word
    return PathWord(cx, tuple(segs))


def random_order_reduce(word: PathWord, rng: random.Random) -> PathWord:
    """Reduce by merging randomly chosen adjacent redexes until none remain.

    Independent of the stack-based normal form routine; confluence says
    both must land on the same word.
    """
    if word.is_trivial:
        return word
    start = word.start
    segs = list(word.segs)
    while True:
        redexes = [
            i
            for i in range(len(segs) - 1)
            if segs[i].curve == segs[i + 1].curve and segs[i].b == segs[i + 1].a
        ]
        if not redexes:
            break
        i = rng.choice(redexes)
        s, t = segs[i], segs[i + 1]
        if s.a == t.b:
            del segs[i : i + 2]
        else:
            segs[i : i + 2] = [Segment(s.curve, s.a, t.b)]
    if not segs:
        return PathWord.trivial(word.cx, start)
    return PathWord(word.cx, tuple(segs))


def random_cut_position(word: PathWord, rng: random.Random) -> Fraction:
    """A position strictly inside the word's parameter length."""
    total = word.length
    if total == 0:
        raise ValueError("cannot cut a trivial path")
    den = rng.randint(2, 12)
    num = rng.randint(1, den - 1)
    return total * Fraction(num, den)


def random_bisection(word: PathWord, rng: random.Random) -> tuple[PathWord, PathWord]:
    """Split a nontrivial word into two nontrivial parts at a random position."""
    return split_at(word, random_cut_position(word, rng))


def random_decomposition(
    word: PathWord, rng: random.Random, max_cuts: int = 3, trivial_rate: float = 0.2
) -> list[PathWord]:
    """A random decomposition of the word, occasionally with trivial factors."""
    if word.is_trivial:
        return [word] * rng.randint(1, 2)
    total = word.length
    cuts = sorted({random_cut_position(word, rng) for _ in range(rng.randint(0, max_cuts))})
    bounds = [Fraction(0)] + cuts + [total]
    parts: list[PathWord] = []
    from .paths import point_at

    for p, q in zip(bounds, bounds[1:]):
        if rng.random() < trivial_rate:
            parts.append(PathWord.trivial(word.cx, point_at(word, p)))
        parts.append(slice_word(word, p, q))
    if rng.random() < trivial_rate:
        parts.append(PathWord.trivial(word.cx, word.end))
    return parts


def random_edge(
    cx: CurveComplex, rng: random.Random, max_segs: int = 3, attempts: int = 64
) -> PathWord:
    """Random embedded arc, found by rejection sampling."""
    for _ in range(attempts):
        w = random_path(cx, rng, 1, max_segs).reduced()
        if not w.is_trivial and is_edge(w):
            return w
    # single short segments are always edges
    curve = rng.choice(sorted(cx.curves))
    return PathWord.of(cx, Segment(curve, Fraction(0), Fraction(1, 2)))


def random_composable_pair(
    cx: CurveComplex, rng: random.Random
) -> tuple[PathWord, PathWord]:
    """Two words with matching junction, for homomorphism checks."""
    a = random_path(cx, rng)
    segs: list[Segment] = []
    cur = a.end
    for _ in range(rng.randint(1, 3)):
        members = cx.class_members(cur)
        curve, t = members[rng.randrange(len(members))]
        for _ in range(32):
            t2 = random_param(rng)
            if t2 != t:
                break
        else:
            t2 = Fraction(1) if t != 1 else Fraction(0)
        segs.append(Segment(curve, t, t2))
        cur = (curve, t2)
    return a, PathWord(cx, tuple(segs))
