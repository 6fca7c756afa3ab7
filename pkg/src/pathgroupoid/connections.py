"""Connections: groupoid homomorphisms from paths into a structure group.

A connection answers ``holonomy(path)`` and factors through the reduced
normal form, so equivalent paths always get equal values.  Three
evaluator families live here:

* ``ExplicitConnection`` stores one element per skeleton atom.
* ``LazyHaarConnection`` materializes Haar-distributed interval data on
  demand, splitting intervals conditionally so that earlier answers never
  change.
* ``CylFunction`` wraps a base function of finitely many holonomies.
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .groups import GroupCtx, GroupElem
from .paths import (
    CurveComplex,
    GraphSkeleton,
    PathWord,
    Segment,
    express,
)


class Connection:
    """Base evaluator; subclasses implement ``holonomy``."""

    provenance = "abstract"
    cx: CurveComplex
    ctx: GroupCtx

    def holonomy(self, path: PathWord) -> GroupElem:
        raise NotImplementedError


class ExplicitConnection(Connection):
    """Finite data: one group element per atom of a fixed skeleton."""

    provenance = "explicit"

    def __init__(self, sk: GraphSkeleton, values: Sequence[GroupElem], ctx: GroupCtx):
        if len(values) != len(sk.atoms):
            raise ValueError(
                f"need {len(sk.atoms)} atom values, got {len(values)}"
            )
        for g in values:
            if g.ctx is not ctx:
                raise ValueError("atom value from a different group context")
        self.sk = sk
        self.cx = sk.cx
        self.ctx = ctx
        self.values = tuple(values)

    def holonomy(self, path: PathWord) -> GroupElem:
        ctx = self.ctx
        out = ctx.identity
        for idx, sgn in express(path, self.sk):
            g = self.values[idx]
            out = ctx.mul(out, g if sgn > 0 else ctx.inv(g))
        return out


class LazyHaarConnection(Connection):
    """Haar-random connection, materialized only where it is queried.

    Per curve the state is an ordered disjoint list of closed intervals,
    each holding the group value of its increasing-orientation traversal.
    A query breakpoint falling inside an assigned interval [a,b] with
    value g triggers a conditional split: a fresh Haar draw g1 is stored
    on [a,c] and inv(g1)*g on [c,b], so the product across [a,b] is
    unchanged and every earlier answer stays valid.  Uncovered stretches
    get fresh independent draws.
    """

    provenance = "lazy-haar"

    def __init__(self, cx: CurveComplex, ctx: GroupCtx, seed: int | None = None):
        self.cx = cx
        self.ctx = ctx
        self._rng = ctx._rng if seed is None else random.Random(seed)
        # curve -> parallel sorted lists: lows, highs, values
        self._lows: dict[str, list[Fraction]] = {}
        self._highs: dict[str, list[Fraction]] = {}
        self._vals: dict[str, list[GroupElem]] = {}

    def _tables(self, curve: str):
        if curve not in self._lows:
            if curve not in self.cx.curves:
                raise ValueError(f"unknown curve {curve!r}")
            self._lows[curve] = []
            self._highs[curve] = []
            self._vals[curve] = []
        return self._lows[curve], self._highs[curve], self._vals[curve]

    def _ensure_breakpoint(self, curve: str, t: Fraction) -> None:
        lows, highs, vals = self._tables(curve)
        i = bisect.bisect_right(lows, t) - 1
        if i >= 0 and lows[i] < t < highs[i]:
            g = vals[i]
            g1 = self.ctx.haar_sample(self._rng)
            lows[i : i + 1] = [lows[i], t]
            highs[i : i + 1] = [t, highs[i]]
            vals[i : i + 1] = [g1, self.ctx.mul(self.ctx.inv(g1), g)]

    def _cover(self, curve: str, lo: Fraction, hi: Fraction) -> None:
        self._ensure_breakpoint(curve, lo)
        self._ensure_breakpoint(curve, hi)
        lows, highs, vals = self._tables(curve)
        # fill gaps left to right with fresh draws
        t = lo
        i = bisect.bisect_left(lows, lo)
        while t < hi:
            if i < len(lows) and lows[i] == t:
                t = highs[i]
                i += 1
            else:
                nxt = min(hi, lows[i]) if i < len(lows) else hi
                lows.insert(i, t)
                highs.insert(i, nxt)
                vals.insert(i, self.ctx.haar_sample(self._rng))
                t = nxt
                i += 1

    def _segment_value(self, seg: Segment) -> GroupElem:
        lo, hi = seg.lo, seg.hi
        self._cover(seg.curve, lo, hi)
        lows, highs, vals = self._tables(seg.curve)
        i = bisect.bisect_left(lows, lo)
        j = bisect.bisect_left(highs, hi)
        ctx = self.ctx
        if seg.sign > 0:
            out = vals[i]
            for k in range(i + 1, j + 1):
                out = ctx.mul(out, vals[k])
        else:
            out = ctx.inv(vals[j])
            for k in range(j - 1, i - 1, -1):
                out = ctx.mul(out, ctx.inv(vals[k]))
        return out

    def holonomy(self, path: PathWord) -> GroupElem:
        ctx = self.ctx
        out = ctx.identity
        for s in path.segs:
            out = ctx.mul(out, self._segment_value(s))
        return out


def project(sk: GraphSkeleton, conn: Connection) -> tuple[GroupElem, ...]:
    """Holonomies along all skeleton atoms, in atom order."""
    return tuple(conn.holonomy(p) for p in sk.atom_paths())


@dataclass
class CylFunction:
    """A function of a connection that factors through one skeleton."""

    sk: GraphSkeleton
    base: Callable[[tuple[GroupElem, ...]], float]
    label: str = "cyl"


def eval_cyl(f: CylFunction, conn: Connection) -> float:
    return f.base(project(f.sk, conn))
