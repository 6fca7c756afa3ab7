"""A tiny deterministic scenario language driving the library end to end.

A scenario is a sequence of statements separated by newlines or ``;``,
with ``#`` comments.  A braced block replays its header in front of every
inner statement, so

    surface sdiv {
      curve c3; point (c1,1/2)
    }

means ``surface sdiv curve c3`` and ``surface sdiv point (c1,1/2)``.
Declaration statements build one curve complex, named paths, point sets,
surfaces, Q-sets, morphisms and transforms; ``task`` statements execute
checks in order and report PASS or FAIL lines.  All randomness derives
from the scenario seed, so output is byte-stable.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import measure, sampling
from .connections import LazyHaarConnection
from .germs import (
    PointSet,
    QuasiSurface,
    builtin_qset,
    check_germ,
    extend,
    germ_from_connection,
)
from .groups import GroupCtx, derive_seed, make_group
from .morphisms import (
    GraphicalMorphism,
    Graphomorphism,
    check_criteria,
    validate_inverse,
)
from .paths import (
    CurveComplex,
    PathWord,
    common_refinement,
    equivalent,
    express,
    induce_skeleton,
    is_refinement,
    parse_path,
    slice_word,
)
from .transforms import (
    Transform,
    diffeo_transform,
    gauge_transform,
    identity_transform,
    npoint_transform,
    weyl_transform,
)


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


class ScenarioError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(msg)
        self.msg = msg
        self.line = line
        self.col = col

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}:{self.col}: {self.msg}"
        return self.msg


_SINGLES = {"{", "}", "=", ";"}


def tokenize(text: str) -> list[list[Token]]:
    """Split into statements, expanding braced blocks into header-prefixed
    statements."""
    raw: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            raw.append(Token("\n", line, col))
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
                col += 1
        elif ch in _SINGLES:
            raw.append(Token(ch, line, col))
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < len(text) and text[i] not in " \t\r\n#" and text[i] not in _SINGLES:
                i += 1
                col += 1
            raw.append(Token(text[start:i], line, start_col))

    statements: list[list[Token]] = []
    prefixes: list[list[Token]] = []
    opens: list[Token] = []
    current: list[Token] = []

    def flush():
        if current:
            full = [t for p in prefixes for t in p] + list(current)
            statements.append(full)
            current.clear()

    for tok in raw:
        if tok.text in ("\n", ";"):
            flush()
        elif tok.text == "{":
            prefixes.append(list(current))
            opens.append(tok)
            current.clear()
        elif tok.text == "}":
            flush()
            if not prefixes:
                raise ScenarioError("unmatched '}'", tok.line, tok.col)
            prefixes.pop()
            opens.pop()
        else:
            current.append(tok)
    flush()
    if opens:
        raise ScenarioError("unclosed '{'", opens[-1].line, opens[-1].col)
    return statements


def _parse_fraction(tok: Token) -> Fraction:
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"bad number {tok.text!r}: {exc}", tok.line, tok.col)


def _parse_point(tok: Token) -> tuple[str, Fraction]:
    t = tok.text
    if not (t.startswith("(") and t.endswith(")")) or "," not in t:
        raise ScenarioError(f"expected a point like (c1,1/2), got {t!r}", tok.line, tok.col)
    name, _, num = t[1:-1].partition(",")
    try:
        return name, Fraction(num)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"bad point {t!r}: {exc}", tok.line, tok.col)


def _parse_pair(tok: Token) -> tuple[Fraction, Fraction]:
    t = tok.text
    if not (t.startswith("(") and t.endswith(")")) or "," not in t:
        raise ScenarioError(f"expected a pair like (1/2,1/4), got {t!r}", tok.line, tok.col)
    a, _, b = t[1:-1].partition(",")
    try:
        return Fraction(a), Fraction(b)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"bad pair {t!r}: {exc}", tok.line, tok.col)


@dataclass
class _SurfaceDraft:
    curves: list[str] = field(default_factory=list)
    points: list[tuple[str, Fraction]] = field(default_factory=list)
    sigma: list[tuple[tuple[str, Fraction], str, int, int]] = field(default_factory=list)


@dataclass
class _MorphismDraft:
    maps: dict[str, tuple[str, list[tuple[Fraction, Fraction]] | None]] = field(
        default_factory=dict
    )
    invmaps: dict[str, tuple[str, list[tuple[Fraction, Fraction]] | None]] = field(
        default_factory=dict
    )


@dataclass
class TaskResult:
    label: str
    passed: bool
    lines: list[str]


class Scenario:
    """Interpreter state plus the task runners."""

    def __init__(self):
        self.group_spec: str | None = None
        self.seed = 0
        self._curves: list[str] = []
        self._gluings: list[tuple[tuple[str, Fraction], tuple[str, Fraction]]] = []
        self._cx: CurveComplex | None = None
        self._ctx: GroupCtx | None = None
        self.paths: dict[str, PathWord] = {}
        self.point_sets: dict[str, PointSet] = {}
        self.surface_drafts: dict[str, _SurfaceDraft] = {}
        self.surfaces: dict[str, QuasiSurface] = {}
        self.qsets: dict = {}
        self.morphism_drafts: dict[str, _MorphismDraft] = {}
        self.graphos: dict[str, Graphomorphism] = {}
        self.transforms: dict[str, Transform] = {}
        self.results: list[TaskResult] = []
        self.trials_override: int | None = None
        self.max_enum_override: int | None = None
        self._task_count = 0

    # -- lazy structure -------------------------------------------------------

    def complex(self) -> CurveComplex:
        if self._cx is None:
            if not self._curves:
                raise ScenarioError("no curves declared")
            self._cx = CurveComplex(self._curves, self._gluings)
        return self._cx

    def ctx(self) -> GroupCtx:
        if self._ctx is None:
            if self.group_spec is None:
                raise ScenarioError("no group declared")
            self._ctx = make_group(self.group_spec, seed=self.seed)
        return self._ctx

    def surface(self, name: str) -> QuasiSurface:
        if name not in self.surfaces:
            if name not in self.surface_drafts:
                raise ScenarioError(f"unknown surface {name!r}")
            d = self.surface_drafts[name]
            sigma = {(p, c, s): v for p, c, s, v in d.sigma}
            self.surfaces[name] = QuasiSurface(
                self.complex(), d.curves, d.points, sigma, name=name
            )
        return self.surfaces[name]

    def grapho(self, name: str) -> Graphomorphism:
        if name not in self.graphos:
            if name not in self.morphism_drafts:
                raise ScenarioError(f"unknown morphism {name!r}")
            d = self.morphism_drafts[name]
            cx = self.complex()

            def build(table, tag):
                images, corr = {}, {}
                for curve, (text, pairs) in table.items():
                    images[curve] = parse_path(cx, text)
                    if pairs is not None:
                        corr[curve] = pairs
                return GraphicalMorphism(cx, cx, images, corr, name=f"{name}{tag}")

            self.graphos[name] = Graphomorphism(
                build(d.maps, ""), build(d.invmaps, "~"), name=name
            )
        return self.graphos[name]

    def named_path(self, tok: Token) -> PathWord:
        if tok.text not in self.paths:
            raise ScenarioError(f"unknown path {tok.text!r}", tok.line, tok.col)
        return self.paths[tok.text]

    def named_transform(self, tok: Token) -> Transform:
        if tok.text not in self.transforms:
            raise ScenarioError(f"unknown transform {tok.text!r}", tok.line, tok.col)
        return self.transforms[tok.text]

    def _task_seed(self, idx: int) -> int:
        return derive_seed(self.seed, 0xC11, idx)

    # -- statements -----------------------------------------------------------

    def run_statement(self, stmt: list[Token]) -> None:
        head = stmt[0]
        handler = getattr(self, f"_stmt_{head.text.replace('-', '_')}", None)
        if handler is None:
            raise ScenarioError(f"unknown statement {head.text!r}", head.line, head.col)
        handler(stmt)

    def _need(self, stmt: list[Token], n: int, usage: str) -> None:
        if len(stmt) < n:
            raise ScenarioError(f"usage: {usage}", stmt[0].line, stmt[0].col)

    def _stmt_group(self, stmt):
        self._need(stmt, 2, "group <su2|zn:<n>|s3>")
        if self._ctx is not None:
            raise ScenarioError("group already in use", stmt[0].line, stmt[0].col)
        self.group_spec = stmt[1].text

    def _stmt_seed(self, stmt):
        self._need(stmt, 2, "seed <int>")
        try:
            self.seed = int(stmt[1].text)
        except ValueError:
            raise ScenarioError(f"bad seed {stmt[1].text!r}", stmt[1].line, stmt[1].col)

    def _stmt_curve(self, stmt):
        self._need(stmt, 2, "curve <name> [<name> ...]")
        if self._cx is not None:
            raise ScenarioError("complex already in use", stmt[0].line, stmt[0].col)
        self._curves.extend(t.text for t in stmt[1:])

    def _stmt_glue(self, stmt):
        self._need(stmt, 3, "glue (c,t) (c,t) [...]")
        if self._cx is not None:
            raise ScenarioError("complex already in use", stmt[0].line, stmt[0].col)
        pts = [_parse_point(t) for t in stmt[1:]]
        for a, b in zip(pts, pts[1:]):
            self._gluings.append((a, b))

    def _stmt_path(self, stmt):
        self._need(stmt, 4, "path <name> = <segments>")
        if stmt[2].text != "=":
            raise ScenarioError("expected '='", stmt[2].line, stmt[2].col)
        text = " ".join(t.text for t in stmt[3:])
        try:
            self.paths[stmt[1].text] = parse_path(self.complex(), text)
        except ValueError as exc:
            raise ScenarioError(str(exc), stmt[3].line, stmt[3].col)

    def _stmt_points(self, stmt):
        self._need(stmt, 4, "points <name> = (c,t) [...]")
        pts = [_parse_point(t) for t in stmt[3:]]
        self.point_sets[stmt[1].text] = PointSet(
            self.complex(), pts, name=stmt[1].text
        )

    def _stmt_surface(self, stmt):
        self._need(stmt, 2, "surface <name> [curve|point|sigma ...]")
        draft = self.surface_drafts.setdefault(stmt[1].text, _SurfaceDraft())
        if len(stmt) == 2:
            return
        sub = stmt[2].text
        if sub == "curve":
            self._need(stmt, 4, "surface <name> curve <c> [...]")
            draft.curves.extend(t.text for t in stmt[3:])
        elif sub == "point":
            self._need(stmt, 4, "surface <name> point (c,t)")
            draft.points.append(_parse_point(stmt[3]))
        elif sub == "sigma":
            self._need(stmt, 7, "surface <name> sigma (c,t) <curve> <+|-> <val>")
            p = _parse_point(stmt[3])
            direction = {"+": 1, "-": -1}.get(stmt[5].text)
            if direction is None:
                raise ScenarioError("direction must be + or -", stmt[5].line, stmt[5].col)
            try:
                val = int(stmt[6].text)
            except ValueError:
                raise ScenarioError(f"bad sigma value {stmt[6].text!r}", stmt[6].line, stmt[6].col)
            draft.sigma.append((p, stmt[4].text, direction, val))
        else:
            raise ScenarioError(f"unknown surface clause {sub!r}", stmt[2].line, stmt[2].col)

    def _stmt_qset(self, stmt):
        self._need(stmt, 4, "qset <name> = <all|edge|surface:<s>|points:<p>>")
        spec = stmt[3].text
        kind, _, label = spec.partition(":")
        if kind == "surface" and label:
            self.surface(label)
        try:
            self.qsets[stmt[1].text] = builtin_qset(
                self.complex(), spec, self.surfaces, self.point_sets
            )
        except ValueError as exc:
            raise ScenarioError(str(exc), stmt[3].line, stmt[3].col)

    def _stmt_morphism(self, stmt):
        self._need(stmt, 3, "morphism <name> <map|invmap> <curve> = <segments> [corr ...]")
        draft = self.morphism_drafts.setdefault(stmt[1].text, _MorphismDraft())
        sub = stmt[2].text
        if sub not in ("map", "invmap"):
            raise ScenarioError(f"unknown morphism clause {sub!r}", stmt[2].line, stmt[2].col)
        self._need(stmt, 6, f"morphism <name> {sub} <curve> = <segments> [corr ...]")
        if stmt[4].text != "=":
            raise ScenarioError("expected '='", stmt[4].line, stmt[4].col)
        rest = stmt[5:]
        pairs = None
        for k, t in enumerate(rest):
            if t.text == "corr":
                pairs = [_parse_pair(p) for p in rest[k + 1 :]]
                rest = rest[:k]
                break
        text = " ".join(t.text for t in rest)
        table = draft.maps if sub == "map" else draft.invmaps
        table[stmt[3].text] = (text, pairs)

    def _stmt_transform(self, stmt):
        self._need(stmt, 4, "transform <name> = <kind> ...")
        if stmt[2].text != "=":
            raise ScenarioError("expected '='", stmt[2].line, stmt[2].col)
        name, kind, rest = stmt[1].text, stmt[3].text, stmt[4:]
        cx, ctx = self.complex(), self.ctx()
        if kind == "identity":
            t = identity_transform(cx, ctx)
        elif kind == "gauge":
            table = {}
            k = 0
            while k < len(rest):
                if k + 2 >= len(rest) or rest[k + 1].text != "=":
                    raise ScenarioError(
                        "gauge needs (c,t) = <elem> entries", rest[k].line, rest[k].col
                    )
                table[_parse_point(rest[k])] = ctx.parse(rest[k + 2].text)
                k += 3
            t = gauge_transform(cx, ctx, table)
        elif kind == "diffeo":
            self._need(stmt, 5, "transform <name> = diffeo <morphism>")
            t = diffeo_transform(self.grapho(rest[0].text), ctx)
        elif kind == "weyl":
            self._need(stmt, 6, "transform <name> = weyl <surface> <elem>")
            t = weyl_transform(self.surface(rest[0].text), ctx.parse(rest[1].text), ctx)
        elif kind == "npoint":
            self._need(stmt, 5, "transform <name> = npoint <points> pin <path> <elem> ...")
            pset = self.point_sets.get(rest[0].text)
            if pset is None:
                raise ScenarioError(f"unknown point set {rest[0].text!r}", rest[0].line, rest[0].col)
            pins = []
            k = 1
            while k < len(rest):
                if rest[k].text != "pin" or k + 2 >= len(rest):
                    raise ScenarioError("expected pin <path> <elem>", rest[k].line, rest[k].col)
                pins.append((self.named_path(rest[k + 1]), ctx.parse(rest[k + 2].text)))
                k += 3
            t = npoint_transform(pset, ctx, pins)
        else:
            raise ScenarioError(f"unknown transform kind {kind!r}", stmt[3].line, stmt[3].col)
        t.name = name
        self.transforms[name] = t

    def _stmt_task(self, stmt):
        self._need(stmt, 2, "task <name> ...")
        label = stmt[1].text
        runner = getattr(self, f"_task_{label.replace('-', '_')}", None)
        if runner is None:
            raise ScenarioError(f"unknown task {label!r}", stmt[1].line, stmt[1].col)
        idx = self._task_count
        self._task_count += 1
        try:
            lines, passed = runner(stmt[2:], self._task_seed(idx))
        except ScenarioError:
            raise
        except Exception as exc:
            lines, passed = [f"ERROR: {type(exc).__name__}: {exc}"], False
        self.results.append(TaskResult(label, passed, lines))

    # -- task helpers ---------------------------------------------------------

    def _opt_int(self, args: list[Token], key: str, default: int) -> tuple[list[Token], int]:
        for k, t in enumerate(args):
            if t.text == key:
                if k + 1 >= len(args):
                    raise ScenarioError(f"{key} needs a value", t.line, t.col)
                try:
                    return args[:k] + args[k + 2 :], int(args[k + 1].text)
                except ValueError:
                    raise ScenarioError(
                        f"bad {key} value {args[k + 1].text!r}", args[k + 1].line, args[k + 1].col
                    )
        return args, default

    def _trials(self, args: list[Token], default: int) -> tuple[list[Token], int]:
        args, n = self._opt_int(args, "trials", default)
        if self.trials_override is not None:
            n = self.trials_override
        return args, n

    # -- tasks ----------------------------------------------------------------

    def _task_reduce(self, args, seed):
        self._need([Token("task", 0, 0)] + args, 2, "task reduce <path>")
        p = self.named_path(args[0])
        r = p.reduced()
        ok = r.reduced() == r
        return [f"input:   {p}", f"reduced: {r}"], ok

    def _task_equiv(self, args, seed):
        self._need([Token("task", 0, 0)] + args, 3, "task equiv <path> <path>")
        a, b = self.named_path(args[0]), self.named_path(args[1])
        verdict = "EQUIVALENT" if equivalent(a, b) else "DISTINCT"
        return [verdict], True

    def _task_refine(self, args, seed):
        usage = "task refine <path> cuts <pos> [...] cuts <pos> [...]"
        if not args or args[0].text not in self.paths:
            raise ScenarioError(usage, args[0].line if args else 0, args[0].col if args else 0)
        whole = self.named_path(args[0])
        groups: list[list[Fraction]] = []
        for t in args[1:]:
            if t.text == "cuts":
                groups.append([])
            elif not groups:
                raise ScenarioError(usage, t.line, t.col)
            else:
                groups[-1].append(_parse_fraction(t))
        if len(groups) != 2:
            raise ScenarioError(usage, args[0].line, args[0].col)

        def decompose(cuts):
            bounds = [Fraction(0)] + sorted(cuts) + [whole.length]
            return [slice_word(whole, a, b) for a, b in zip(bounds, bounds[1:])]

        left, right = decompose(groups[0]), decompose(groups[1])
        common = common_refinement(left, right)
        ok = is_refinement(common, left) and is_refinement(common, right)
        return [
            f"parts: {len(left)} | {len(right)}",
            f"left refines right: {'yes' if is_refinement(left, right) else 'no'}",
            f"right refines left: {'yes' if is_refinement(right, left) else 'no'}",
            f"common refinement: {len(common)} parts",
            f"refines both: {'yes' if ok else 'no'}",
        ], ok

    def _task_skeleton(self, args, seed):
        paths = [self.named_path(t) for t in args]
        if not paths:
            raise ScenarioError("task skeleton <path> [...]")
        sk = induce_skeleton(self.complex(), paths)
        lines = [f"atoms: {len(sk)}"]
        for i, a in enumerate(sk.atoms):
            lines.append(f"  #{i} {a}")
        for t, p in zip(args, paths):
            word = " ".join(f"#{i}{'~' if s < 0 else ''}" for i, s in express(p, sk))
            lines.append(f"{t.text} = {word or 'trivial'}")
        return lines, True

    def _task_extend_check(self, args, seed):
        args, trials = self._trials(args, 200)
        self._need([Token("task", 0, 0)] + args, 2, "task extend-check <qset> [trials N]")
        q = self.qsets.get(args[0].text)
        if q is None:
            raise ScenarioError(f"unknown qset {args[0].text!r}", args[0].line, args[0].col)
        cx, ctx = self.complex(), self.ctx()
        conn = LazyHaarConnection(cx, ctx, seed=derive_seed(seed, 1))
        germ = germ_from_connection(conn, q)
        rep = check_germ(germ, cx, trials=trials, seed=derive_seed(seed, 2))
        ext = extend(germ, cx)
        rng = random.Random(derive_seed(seed, 3))
        agree = sum(
            1
            for _ in range(trials)
            for p in [sampling.random_path(cx, rng)]
            if ctx.isclose(ext.holonomy(p), conn.holonomy(p))
        )
        ok = rep.passed and agree == trials
        return [
            f"germ-laws: {'PASS' if rep.passed else 'FAIL'} ({rep.trials} trials)",
            f"extension agreement: {agree}/{trials}",
        ], ok

    def _task_check_grapho(self, args, seed):
        args, trials = self._trials(args, 200)
        self._need([Token("task", 0, 0)] + args, 2, "task check-grapho <morphism> [trials N]")
        g = self.grapho(args[0].text)
        validate_inverse(g, trials=trials, seed=derive_seed(seed, 1))
        rep = check_criteria(g.forward, trials=trials, seed=derive_seed(seed, 2))
        marks = " ".join(f"{i}:{'T' if rep.items[i] else 'F'}" for i in range(1, 7))
        lines = [
            f"inverse round-trip: PASS ({trials} points)",
            f"criteria: {marks} connected:{'yes' if rep.connected else 'no'}",
        ]
        if rep.consistent:
            lines.append("audit: consistent")
        else:
            lines.extend(f"audit: VIOLATION {v}" for v in rep.violations)
        return lines, rep.consistent

    def _task_transform_apply(self, args, seed):
        self._need([Token("task", 0, 0)] + args, 3, "task transform-apply <transform> <path>")
        t = self.named_transform(args[0])
        p = self.named_path(args[1])
        ctx = self.ctx()
        conn = LazyHaarConnection(self.complex(), ctx, seed=derive_seed(seed, 1))
        before = conn.holonomy(p)
        after = t.apply(conn).holonomy(p)
        return [f"h  = {ctx.format(before)}", f"h' = {ctx.format(after)}"], True

    def _task_measure_exact(self, args, seed):
        args, cap = self._opt_int(args, "max", 10**7)
        if self.max_enum_override is not None:
            cap = self.max_enum_override
        usage = "task measure-exact <transform> probe <path> [...] [max N]"
        if len(args) < 3 or args[1].text != "probe":
            raise ScenarioError(usage, args[0].line if args else 0, args[0].col if args else 0)
        t = self.named_transform(args[0])
        probe_paths = [self.named_path(a) for a in args[2:]]
        sk = induce_skeleton(t.home, probe_paths)
        try:
            rep = measure.exact_pushforward(t, sk, max_enum=cap)
        except measure.EnumerationCapError as exc:
            return [f"REFUSED: {exc}"], False
        return [rep.line()], rep.passed

    def _task_measure_stat(self, args, seed):
        args, samples = self._opt_int(args, "samples", 2000)
        usage = "task measure-stat <transform|baseline> loops <path> [...] [samples N]"
        if len(args) < 3 or args[1].text != "loops":
            raise ScenarioError(usage, args[0].line if args else 0, args[0].col if args else 0)
        t = None if args[0].text == "baseline" else self.named_transform(args[0])
        loops = {a.text: self.named_path(a) for a in args[2:]}
        rep = measure.statistical_pushforward(
            t, self.complex(), self.ctx(), loops, samples=samples, seed=derive_seed(seed, 1)
        )
        return [s.line() for s in rep.loops], rep.passed

    def _task_npoint_witness(self, args, seed):
        args, samples = self._opt_int(args, "samples", 500)
        self._need([Token("task", 0, 0)] + args, 2, "task npoint-witness <transform> [samples N]")
        t = self.named_transform(args[0])
        rep = measure.nonpreservation_witness(t, samples=samples, seed=derive_seed(seed, 1))
        lines = [rep.line()]
        for e in sorted(rep.forced):
            lines.append(f"  {e} -> {rep.forced[e]}")
        return lines, rep.passed


@dataclass
class ScenarioReport:
    output: str
    tasks: int
    failed: int

    @property
    def passed(self) -> bool:
        return self.failed == 0


def run_text(
    text: str,
    seed: int | None = None,
    trials: int | None = None,
    max_enum: int | None = None,
) -> ScenarioReport:
    statements = tokenize(text)
    sc = Scenario()
    sc.trials_override = trials
    sc.max_enum_override = max_enum
    if seed is not None:
        sc.seed = seed
    for stmt in statements:
        if seed is not None and stmt[0].text == "seed":
            continue
        sc.run_statement(stmt)
    out: list[str] = []
    for r in sc.results:
        out.append(f"== TASK {r.label} ==")
        out.extend(r.lines)
        out.append("")
    failed = sum(1 for r in sc.results if not r.passed)
    total = len(sc.results)
    verdict = "PASS" if failed == 0 else "FAIL"
    out.append(f"RESULT {verdict} {total - failed}/{total}")
    return ScenarioReport("\n".join(out) + "\n", total, failed)
