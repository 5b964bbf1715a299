"""Wang tiles on BS(2,3) computing a piecewise-linear circle map along t."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .flow import FlowConfig, Violation, flow_constraints, mul_flow_letter, validate_flow_patch, FlowPatch
from .groups import Ball, BSGroup, BSNormalForm, enumerate_ball
from .heights import HeightContext, lam


def fmt_q(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_q(text: str) -> Fraction:
    return Fraction(text.strip())


# ---------------------------------------------------------------------------
# Piecewise-linear circle maps


@dataclass(frozen=True)
class Branch:
    lo: Fraction
    hi: Fraction
    slope: Fraction

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x < self.hi


@dataclass(frozen=True)
class PLMap:
    """A linear-on-pieces bijection of the circle [lo, hi) with lo ~ hi."""

    lo: Fraction
    hi: Fraction
    branches: tuple
    name: str = "f"

    def __post_init__(self):
        pieces = sorted(self.branches, key=lambda b: b.lo)
        if pieces[0].lo != self.lo or pieces[-1].hi != self.hi:
            raise ValueError("branches do not cover the circle")
        for b1, b2 in zip(pieces, pieces[1:]):
            if b1.hi != b2.lo:
                raise ValueError("branches do not partition the circle")
        images = sorted((b.slope * b.lo, b.slope * b.hi) for b in pieces)
        if images[0][0] != self.lo or images[-1][1] != self.hi:
            raise ValueError("images do not cover the circle")
        for (_, h1), (l2, _) in zip(images, images[1:]):
            if h1 != l2:
                raise ValueError("images do not partition the circle")
        for b in pieces:
            if b.slope <= 0:
                raise ValueError("slopes must be positive")
            if b.slope in (Fraction(2, 3), Fraction(3, 2)):
                raise ValueError("slope collides with the group's own scaling")

    def reduce(self, x) -> Fraction:
        x = Fraction(x)
        if x == self.hi:
            return self.lo
        if not self.lo <= x < self.hi:
            raise ValueError(f"{fmt_q(x)} is not on the circle [{fmt_q(self.lo)}, {fmt_q(self.hi)})")
        return x

    def branch(self, x) -> Branch:
        x = self.reduce(x)
        for b in self.branches:
            if b.contains(x):
                return b
        raise AssertionError("unreachable")

    def slope(self, x) -> Fraction:
        return self.branch(x).slope

    def __call__(self, x) -> Fraction:
        x = self.reduce(x)
        return self.branch(x).slope * x

    def inverse(self) -> "PLMap":
        inv = tuple(Branch(b.slope * b.lo, b.slope * b.hi, 1 / b.slope) for b in self.branches)
        name = self.name[:-4] if self.name.endswith("_inv") else self.name + "_inv"
        return PLMap(self.lo, self.hi, inv, name)


LO, HI = Fraction(1, 10), Fraction(5, 2)
T_MAP = PLMap(LO, HI, (Branch(LO, Fraction(1), Fraction(5, 2)), Branch(Fraction(1), HI, Fraction(1, 10))), "T")
T_INV = T_MAP.inverse()


def pl_eval(f: PLMap, x) -> Fraction:
    return f(x)


def orbit(f: PLMap, x, k: int) -> Fraction:
    x = f.reduce(x)
    g = f if k >= 0 else f.inverse()
    for _ in range(abs(k)):
        x = g(x)
    return x


# ---------------------------------------------------------------------------
# Tiles


@dataclass(frozen=True)
class WangTile7:
    t1: int
    t2: int
    b1: int
    b2: int
    b3: int
    l: Fraction
    r: Fraction
    f_tag: str

    @property
    def top(self):
        return (self.t1, self.t2)

    @property
    def bottom(self):
        return (self.b1, self.b2, self.b3)

    def line(self) -> str:
        return f"{self.t1} {self.t2} | {fmt_q(self.l)} | {self.b1} {self.b2} {self.b3} | {fmt_q(self.r)} | {self.f_tag}"

    @classmethod
    def parse(cls, text: str) -> "WangTile7":
        parts = [p.split() for p in text.split("|")]
        if len(parts) != 5:
            raise ValueError(f"bad tile line: {text!r}")
        (t1, t2), (l,), (b1, b2, b3), (r,), (tag,) = parts
        if tag not in ("T", "T_inv"):
            raise ValueError(f"bad f_tag {tag!r}")
        return cls(int(t1), int(t2), int(b1), int(b2), int(b3), parse_q(l), parse_q(r), tag)


def map_for_tag(tag: str) -> PLMap:
    return T_MAP if tag == "T" else T_INV


def tile_colors(f_tag: str, x, g=None, lam_value=None) -> WangTile7:
    """Tile for branch map f at circle point x over the group element g (or a given lambda)."""
    f = map_for_tag(f_tag)
    x = f.reduce(x)
    if lam_value is not None:
        L = Fraction(lam_value)
    else:
        L = lam(g) if g is not None else Fraction(0)
    c = f.slope(x)
    cx = c * x
    fl = math.floor
    t = [fl((2 * L + k) * x) - fl((2 * L + k - 1) * x) for k in (1, 2)]
    b = [fl((3 * L + k) * cx) - fl((3 * L + k - 1) * cx) for k in (1, 2, 3)]
    left = Fraction(1, 2) * c * fl(2 * L * x) - Fraction(1, 3) * fl(3 * L * cx)
    right = Fraction(1, 2) * c * fl((2 * L + 2) * x) - Fraction(1, 3) * fl((3 * L + 3) * cx)
    return WangTile7(t[0], t[1], b[0], b[1], b[2], left, right, f_tag)


def computes(tile: WangTile7) -> bool:
    """The tile's own identity; only slope data is needed, read off the tag and colours."""
    # c is not stored; both branch slopes are tried since the identity fixes which one fits
    f = map_for_tag(tile.f_tag)
    lhs_base = Fraction(tile.t1 + tile.t2, 2)
    rhs = Fraction(tile.b1 + tile.b2 + tile.b3, 3) + tile.r
    return any(b.slope * lhs_base + tile.l == rhs for b in f.branches)


def tile_identity_holds(tile: WangTile7, x) -> bool:
    f = map_for_tag(tile.f_tag)
    c = f.slope(x)
    return c * Fraction(tile.t1 + tile.t2, 2) + tile.l == Fraction(tile.b1 + tile.b2 + tile.b3, 3) + tile.r


# ---------------------------------------------------------------------------
# Configurations on balls


@dataclass
class BSConfigPatch:
    ball: Ball
    letters: dict = field(repr=False)
    tiles: dict = field(repr=False)
    word: tuple | None = None
    x: Fraction | None = None
    group: BSGroup = field(default_factory=BSGroup)

    @property
    def radius(self):
        return self.ball.radius

    def label(self, g):
        return (self.letters.get(g), self.tiles.get(g))

    def cells(self):
        return [g for g in self.ball.elements if g in self.letters and g in self.tiles]


def build_bs_config(word, x, radius: int) -> BSConfigPatch:
    """Flow from ``word``; at g place tile(f, T^{beta_y(g)}(x), g) with f = T iff y_g = t."""
    word = tuple(word)
    if len(word) < radius + 1:
        raise ValueError(f"need at least {radius + 1} flow letters for radius {radius}, got {len(word)}")
    x = T_MAP.reduce(Fraction(x))
    group = BSGroup()
    ctx = HeightContext(word)
    ball = enumerate_ball(group, radius)
    letters, tiles = {}, {}
    xs: dict[int, Fraction] = {}
    for g in ball.elements:
        y = ctx.config.letter(g)
        h = ctx.beta_y(g)
        if h not in xs:
            xs[h] = orbit(T_MAP, x, h)
        letters[g] = y
        tiles[g] = tile_colors("T" if y == "t" else "T_inv", xs[h], g)
    return BSConfigPatch(ball, letters, tiles, word, x, group)


RULE_FAMILIES = ("flow", "f-tag", "r-l", "b-t1", "b-t2")


@dataclass
class BSValidation:
    violations: list
    checked: Counter

    def __bool__(self):
        return not self.violations


def check_bs_patch(p: BSConfigPatch) -> BSValidation:
    group = p.group
    checked: Counter = Counter()
    out: list[Violation] = []
    fp = FlowPatch(group, p.ball, {g: y for g, y in p.letters.items()})
    flow_bad = validate_flow_patch(fp)
    checked["flow"] += len(flow_constraints(group, p.ball))
    out.extend(flow_bad)
    a2 = group.from_word("aa")
    for g in p.cells():
        tile, y = p.tiles[g], p.letters[g]
        key = group.key(g)
        checked["f-tag"] += 1
        if (tile.f_tag == "T") != (y == "t"):
            out.append(Violation(key, "f-tag", f"{y} with {tile.f_tag}"))
        h = group.mul(g, a2)
        if h in p.tiles:
            checked["r-l"] += 1
            if tile.r != p.tiles[h].l:
                out.append(Violation(key, "r-l", f"r={fmt_q(tile.r)} vs l={fmt_q(p.tiles[h].l)} at {group.key(h)}"))
        gt = group.mul_letter(g, "t")
        for i, b in enumerate(tile.bottom):
            h1 = mul_flow_letter(group, gt, "a" * i)
            if h1 in p.tiles:
                checked["b-t1"] += 1
                if b != p.tiles[h1].t1:
                    out.append(Violation(key, "b-t1", f"b{i + 1}={b} vs t1={p.tiles[h1].t1} at {group.key(h1)}"))
            h2 = group.mul_letter(gt, "A") if i == 0 else mul_flow_letter(group, gt, "a" * (i - 1))
            if h2 in p.tiles:
                checked["b-t2"] += 1
                if b != p.tiles[h2].t2:
                    out.append(Violation(key, "b-t2", f"b{i + 1}={b} vs t2={p.tiles[h2].t2} at {group.key(h2)}"))
    return BSValidation(out, checked)


def validate_bs_patch(p: BSConfigPatch) -> list[Violation]:
    return check_bs_patch(p).violations


def tileset_of(p: BSConfigPatch) -> list[WangTile7]:
    """Distinct tiles used by a patch, in first-seen order."""
    seen = {}
    for g in p.ball.elements:
        if g in p.tiles:
            seen.setdefault(p.tiles[g], None)
    return list(seen)


# ---------------------------------------------------------------------------
# Period scanning


@dataclass
class PeriodScan:
    survivors: list
    inconclusive: list
    refuted: int


def scan_periods(labels: dict, group, max_len: int, min_overlap: int = 1) -> PeriodScan:
    """Non-identity g with |g| <= max_len such that z_{g^-1 h} = z_h on the overlap."""
    if min_overlap < 1:
        raise ValueError("min_overlap must be >= 1")
    survivors, inconclusive, refuted = [], [], 0
    for g in enumerate_ball(group, max_len).elements:
        if g == group.identity:
            continue
        ginv = group.inv(g)
        overlap, agree = 0, True
        for h, z in labels.items():
            src = group.mul(ginv, h)
            if src in labels:
                overlap += 1
                if labels[src] != z:
                    agree = False
                    break
        if not agree:
            refuted += 1
        elif overlap < min_overlap:
            inconclusive.append(group.key(g))
        else:
            survivors.append(group.key(g))
    return PeriodScan(survivors, inconclusive, refuted)


def bs_patch_labels(p: BSConfigPatch) -> dict:
    return {g: (p.letters[g], p.tiles[g]) for g in p.cells()}


# ---------------------------------------------------------------------------
# Text formats


def dump_bs_patch(p: BSConfigPatch) -> str:
    lines = [f"# group: BS(2,3)", f"# radius: {p.radius}"]
    if p.word is not None:
        lines.append(f"# word: {''.join(p.word)}")
    if p.x is not None:
        lines.append(f"# x: {fmt_q(p.x)}")
    for g in p.ball.elements:
        if g in p.tiles:
            lines.append(f"{p.group.key(g)} {p.letters[g]} {p.tiles[g].line()}")
    return "\n".join(lines) + "\n"


def load_bs_patch(text: str) -> BSConfigPatch:
    group = BSGroup()
    radius, word, x = None, None, None
    letters, tiles = {}, {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            k, v = k.strip(), v.strip()
            if k == "radius":
                radius = int(v)
            elif k == "word":
                from .flow import parse_flow_word
                word = parse_flow_word(v, group)
            elif k == "x":
                x = parse_q(v)
            continue
        key, letter, rest = line.split(None, 2)
        g = group.parse(key)
        letters[g] = letter
        tiles[g] = WangTile7.parse(rest)
    if radius is None:
        raise ValueError("missing '# radius:' header")
    ball = enumerate_ball(group, radius)
    stray = [group.key(g) for g in letters if g not in ball]
    if stray:
        raise ValueError(f"cells outside the radius-{radius} ball: {stray[:3]}")
    return BSConfigPatch(ball, letters, tiles, word, x, group)
