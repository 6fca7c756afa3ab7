"""Structure groups with a uniform element interface.

Three backends: SU(2) represented by unit quaternions, the cyclic groups
Z_n, and the symmetric group S_3.  The finite groups make distribution
checks exactly enumerable; SU(2) is the continuous case and is verified
statistically through characters of the fundamental representation.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

#: tolerance for algebraic identities (unit norms, identity and inverse laws)
ALGEBRA_TOL = 1e-12
#: tolerance when comparing independently computed group values
VALUE_TOL = 1e-9

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


class GroupMismatchError(ValueError):
    """Operands belong to different group contexts."""


class NotEnumerableError(ValueError):
    """Exact element enumeration requested for a continuous group."""


def derive_seed(master: int, *key: int) -> int:
    """Deterministic, well-separated child seed for a master seed and key path."""
    ss = np.random.SeedSequence(entropy=master & _MASK64, spawn_key=key)
    lo, hi = ss.generate_state(2)
    return ((int(hi) << 32) ^ int(lo)) & _MASK64


def counter_seed(base: int, i: int) -> int:
    """Cheap distinct seed for the i-th member of a sample family."""
    return (base ^ ((i + 1) * _GOLDEN64)) & _MASK64


@dataclass(frozen=True)
class GroupElem:
    """Immutable group element tagged with its owning context.

    ``value`` is an int residue for Z_n, a one-line permutation tuple for
    S_3 (images of 1,2,3), or a 4-tuple of floats (w,x,y,z) for SU(2).
    """

    ctx: "GroupCtx" = field(repr=False)
    value: object

    def __repr__(self) -> str:
        return f"<{self.ctx.name}:{self.ctx.format(self)}>"


_S3_ELEMENTS = (
    (1, 2, 3),
    (1, 3, 2),
    (2, 1, 3),
    (2, 3, 1),
    (3, 1, 2),
    (3, 2, 1),
)


class GroupCtx:
    """A concrete structure group: element ops, Haar sampling, characters.

    Contexts compare by identity; elements from distinct contexts never mix.
    The context owns a seeded random source so that repeated runs with the
    same seed reproduce identical draws.
    """

    def __init__(self, kind: str, n: int | None = None, seed: int = 0):
        if kind not in ("su2", "zn", "s3"):
            raise ValueError(f"unknown group kind {kind!r}")
        if kind == "zn":
            if n is None or n < 1:
                raise ValueError("zn requires a modulus n >= 1")
        elif n is not None:
            raise ValueError(f"group kind {kind!r} takes no modulus")
        self.kind = kind
        self.n = n
        self.seed = seed
        self._rng = random.Random(seed)
        if kind == "su2":
            self.identity = GroupElem(self, (1.0, 0.0, 0.0, 0.0))
        elif kind == "zn":
            self.identity = GroupElem(self, 0)
        else:
            self.identity = GroupElem(self, (1, 2, 3))

    @property
    def name(self) -> str:
        return f"zn:{self.n}" if self.kind == "zn" else self.kind

    @property
    def is_finite(self) -> bool:
        return self.kind != "su2"

    def __repr__(self) -> str:
        return f"GroupCtx({self.name}, seed={self.seed})"

    # -- element construction ------------------------------------------------

    def elem(self, value) -> GroupElem:
        """Build a validated element from a raw value."""
        if self.kind == "zn":
            if not isinstance(value, int):
                raise ValueError(f"zn element must be an int, got {value!r}")
            return GroupElem(self, value % self.n)
        if self.kind == "s3":
            perm = tuple(value)
            if sorted(perm) != [1, 2, 3]:
                raise ValueError(f"not a permutation of (1,2,3): {value!r}")
            return GroupElem(self, perm)
        q = tuple(float(c) for c in value)
        if len(q) != 4:
            raise ValueError("su2 element needs 4 components")
        norm = math.sqrt(sum(c * c for c in q))
        if norm < 0.5 or norm > 2.0:
            raise ValueError(f"quaternion norm {norm} too far from 1 to normalize")
        return GroupElem(self, tuple(c / norm for c in q))

    def _check(self, *elems: GroupElem) -> None:
        for g in elems:
            if g.ctx is not self:
                raise GroupMismatchError(
                    f"element of {g.ctx.name} used in {self.name} context"
                )

    # -- group operations ----------------------------------------------------

    def mul(self, a: GroupElem, b: GroupElem) -> GroupElem:
        """Product a*b; for permutations this applies b first, then a."""
        self._check(a, b)
        if self.kind == "zn":
            return GroupElem(self, (a.value + b.value) % self.n)
        if self.kind == "s3":
            pa, pb = a.value, b.value
            return GroupElem(self, (pa[pb[0] - 1], pa[pb[1] - 1], pa[pb[2] - 1]))
        w1, x1, y1, z1 = a.value
        w2, x2, y2, z2 = b.value
        q = (
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )
        # renormalize after every product to keep drift below ALGEBRA_TOL
        norm = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
        return GroupElem(self, (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm))

    def inv(self, a: GroupElem) -> GroupElem:
        self._check(a)
        if self.kind == "zn":
            return GroupElem(self, (-a.value) % self.n)
        if self.kind == "s3":
            p = a.value
            q = [0, 0, 0]
            for i, img in enumerate(p):
                q[img - 1] = i + 1
            return GroupElem(self, tuple(q))
        w, x, y, z = a.value
        return GroupElem(self, (w, -x, -y, -z))

    def power(self, a: GroupElem, k: int) -> GroupElem:
        """a**k for small integer exponents (used with k in {-1, 0, 1})."""
        self._check(a)
        if k == 0:
            return self.identity
        base = a if k > 0 else self.inv(a)
        out = base
        for _ in range(abs(k) - 1):
            out = self.mul(out, base)
        return out

    def prod(self, elems: Iterable[GroupElem]) -> GroupElem:
        out = self.identity
        for g in elems:
            out = self.mul(out, g)
        return out

    # -- sampling and enumeration ---------------------------------------------

    def haar_sample(self, rng: random.Random | None = None) -> GroupElem:
        """One Haar-uniform draw; deterministic for a fixed seed and call order.

        SU(2): four independent standard normals, normalized to the unit
        sphere.  Finite groups: uniform choice.
        """
        r = rng if rng is not None else self._rng
        if self.kind == "zn":
            return GroupElem(self, r.randrange(self.n))
        if self.kind == "s3":
            return GroupElem(self, _S3_ELEMENTS[r.randrange(6)])
        while True:
            q = (r.gauss(0.0, 1.0), r.gauss(0.0, 1.0), r.gauss(0.0, 1.0), r.gauss(0.0, 1.0))
            norm = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
            if norm > 1e-8:
                return GroupElem(self, (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm))

    def elements(self) -> Iterator[GroupElem]:
        """All elements in a fixed deterministic order (finite groups only)."""
        if self.kind == "zn":
            for k in range(self.n):
                yield GroupElem(self, k)
        elif self.kind == "s3":
            for p in _S3_ELEMENTS:
                yield GroupElem(self, p)
        else:
            raise NotEnumerableError("su2 has no finite element enumeration")

    @property
    def order(self) -> int:
        if self.kind == "zn":
            return self.n
        if self.kind == "s3":
            return 6
        raise NotEnumerableError("su2 has no finite order")

    # -- characters and comparison ---------------------------------------------

    def char_fund(self, a: GroupElem) -> float:
        """Character of the fundamental (defining 2-dim) representation.

        SU(2): trace 2w.  Z_n: 2 cos(2 pi k / n), the trace of the rotation
        by angle 2 pi k / n.  S_3: character of its 2-dim irreducible
        (identity 2, transpositions 0, 3-cycles -1).
        """
        self._check(a)
        if self.kind == "su2":
            return 2.0 * a.value[0]
        if self.kind == "zn":
            return 2.0 * math.cos(2.0 * math.pi * a.value / self.n)
        fixed = sum(1 for i, img in enumerate(a.value) if img == i + 1)
        if fixed == 3:
            return 2.0
        if fixed == 1:
            return 0.0
        return -1.0

    def isclose(self, a: GroupElem, b: GroupElem, tol: float = VALUE_TOL) -> bool:
        self._check(a, b)
        if self.kind == "su2":
            return all(abs(u - v) <= tol for u, v in zip(a.value, b.value))
        return a.value == b.value

    # -- text round-trip (scenario files, reports) -----------------------------

    def format(self, a: GroupElem) -> str:
        self._check(a)
        if self.kind == "zn":
            return str(a.value)
        if self.kind == "s3":
            return "".join(str(i) for i in a.value)
        return "(" + ",".join("%.12g" % c for c in a.value) + ")"

    def parse(self, text: str) -> GroupElem:
        text = text.strip()
        if text == "e":
            return self.identity
        if self.kind == "zn":
            return self.elem(int(text))
        if self.kind == "s3":
            if len(text) != 3 or not text.isdigit():
                raise ValueError(f"s3 element literal must be 3 digits, got {text!r}")
            return self.elem(tuple(int(c) for c in text))
        inner = text.strip()
        if inner.startswith("(") and inner.endswith(")"):
            inner = inner[1:-1]
        parts = [p.strip() for p in inner.split(",")]
        if len(parts) != 4:
            raise ValueError(f"su2 element literal needs 4 components, got {text!r}")
        vals = []
        for p in parts:
            if "/" in p:
                num, den = p.split("/", 1)
                vals.append(float(num) / float(den))
            else:
                vals.append(float(p))
        return self.elem(vals)


def make_group(spec: str, seed: int = 0) -> GroupCtx:
    """Build a group context from a text spec: ``su2``, ``zn:<n>`` or ``s3``."""
    spec = spec.strip().lower()
    if spec == "su2":
        return GroupCtx("su2", seed=seed)
    if spec == "s3":
        return GroupCtx("s3", seed=seed)
    if spec.startswith("zn:"):
        return GroupCtx("zn", n=int(spec[3:]), seed=seed)
    raise ValueError(f"unknown group spec {spec!r}")
