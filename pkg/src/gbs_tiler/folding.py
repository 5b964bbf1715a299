"""Z^2 Wang tilesets and their folding onto F_n x Z along a flow path.

A Z^2 configuration x and a flow configuration y with word W combine into
``(x (*) y)(w t^i) = (x_(i, j), y_w)`` where ``j = 2|lcp(w, W)| - |w|``.
"""
from __future__ import annotations

import math
import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction

from .flow import FlowConfig, FlowPatch, Violation, validate_flow_patch, word_of_patch
from .groups import FnZElem, FnZGroup, enumerate_ball


@dataclass(frozen=True)
class WangTile4:
    north: str
    east: str
    south: str
    west: str

    def sides(self) -> tuple:
        return (self.north, self.east, self.south, self.west)


@dataclass
class Z2Tileset:
    tiles: list
    name: str = "tileset"
    blocks: list | None = None  # for block tilesets: the underlying patch of each tile

    def __post_init__(self):
        if not self.tiles:
            raise ValueError("empty tileset")

    @property
    def palette(self) -> list:
        seen = {}
        for t in self.tiles:
            for c in t.sides():
                seen.setdefault(c, None)
        return list(seen)

    def __len__(self):
        return len(self.tiles)

    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.tiles)}


def load_tileset(text: str, name: str = "tileset") -> Z2Tileset:
    palette, declared = None, None
    tiles = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {n}: expected 'key: value', got {raw!r}")
        key, rest = key.strip(), rest.split()
        if key == "name":
            name = " ".join(rest)
        elif key == "palette":
            palette = set(rest)
        elif key == "tiles":
            if len(rest) != 1 or not rest[0].isdigit():
                raise ValueError(f"line {n}: 'tiles:' takes one count")
            declared = int(rest[0])
        elif key == "tile":
            if len(rest) != 4:
                raise ValueError(f"line {n}: a tile needs 4 colours (N E S W), got {len(rest)}")
            tiles.append(WangTile4(*rest))
        else:
            raise ValueError(f"line {n}: unknown key {key!r}")
    if not tiles:
        raise ValueError("empty tileset")
    if declared is not None and declared != len(tiles):
        raise ValueError(f"declared {declared} tiles, found {len(tiles)}")
    if palette is not None:
        for i, t in enumerate(tiles):
            bad = [c for c in t.sides() if c not in palette]
            if bad:
                raise ValueError(f"tile {i} uses colours outside the palette: {bad}")
    return Z2Tileset(tiles, name)


def dump_tileset(ts: Z2Tileset) -> str:
    lines = [f"name: {ts.name}", f"tiles: {len(ts.tiles)}", "palette: " + " ".join(ts.palette)]
    lines += ["tile: " + " ".join(t.sides()) for t in ts.tiles]
    return "\n".join(lines) + "\n"


def rotate_tile(t: WangTile4) -> WangTile4:
    """Quarter turn clockwise: the west side moves to the north."""
    return WangTile4(t.west, t.north, t.east, t.south)


def rotate_tileset(ts: Z2Tileset) -> Z2Tileset:
    return Z2Tileset([rotate_tile(t) for t in ts.tiles], ts.name)


# ---------------------------------------------------------------------------
# Patches on Z^2


@dataclass
class Z2Patch:
    """Tile ids on a subset of the rectangle [i0, i1] x [j0, j1] (i east, j north)."""

    i0: int
    i1: int
    j0: int
    j1: int
    cells: dict = field(default_factory=dict)

    def __contains__(self, ij) -> bool:
        return ij in self.cells

    def __getitem__(self, ij):
        return self.cells[ij]


def diamond(radius: int) -> list:
    return [(i, j) for j in range(radius, -radius - 1, -1) for i in range(-radius, radius + 1) if abs(i) + abs(j) <= radius]


def z2_violations(ts: Z2Tileset, patch: Z2Patch) -> list:
    out = []
    for (i, j), k in patch.cells.items():
        if not 0 <= k < len(ts.tiles):
            out.append(((i, j), "tile-id"))
            continue
        t = ts.tiles[k]
        right = patch.cells.get((i + 1, j))
        if right is not None and 0 <= right < len(ts.tiles) and t.east != ts.tiles[right].west:
            out.append(((i, j), "east-west"))
        up = patch.cells.get((i, j + 1))
        if up is not None and 0 <= up < len(ts.tiles) and t.north != ts.tiles[up].south:
            out.append(((i, j), "north-south"))
    return out


def rotate_patch(patch: Z2Patch) -> Z2Patch:
    """Cell (i, j) moves to (j, -i); pair with ``rotate_tileset``."""
    cells = {(j, -i): k for (i, j), k in patch.cells.items()}
    return Z2Patch(patch.j0, patch.j1, -patch.i1, -patch.i0, cells)


def dump_z2_patch(patch: Z2Patch) -> str:
    lines = [f"window: {patch.i0} {patch.i1} {patch.j0} {patch.j1}"]
    for j in range(patch.j1, patch.j0 - 1, -1):
        row = [str(patch.cells[(i, j)]) if (i, j) in patch.cells else "." for i in range(patch.i0, patch.i1 + 1)]
        lines.append(f"row {j}: " + " ".join(row))
    return "\n".join(lines) + "\n"


def load_z2_patch(text: str) -> Z2Patch:
    patch = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("window:"):
            i0, i1, j0, j1 = map(int, line[7:].split())
            patch = Z2Patch(i0, i1, j0, j1)
        elif line.startswith("row"):
            if patch is None:
                raise ValueError(f"line {n}: row before window header")
            head, _, body = line.partition(":")
            j = int(head.split()[1])
            items = body.split()
            if len(items) != patch.i1 - patch.i0 + 1:
                raise ValueError(f"line {n}: expected {patch.i1 - patch.i0 + 1} entries")
            for i, item in zip(range(patch.i0, patch.i1 + 1), items):
                if item != ".":
                    patch.cells[(i, j)] = int(item)
        else:
            raise ValueError(f"line {n}: cannot parse {raw!r}")
    if patch is None:
        raise ValueError("missing window header")
    return patch


def random_patch(ts: Z2Tileset, cells, seed: int = 0, max_steps: int = 200000) -> Z2Patch:
    """A valid patch on ``cells`` by randomized backtracking (row-major from the south-west)."""
    rng = random.Random(seed)
    order = sorted(cells, key=lambda c: (c[1], c[0]))
    cellset = set(order)
    assign: dict = {}
    steps = 0

    def ok(c, k):
        t = ts.tiles[k]
        i, j = c
        for nb, check in (((i - 1, j), lambda u: u.east == t.west), ((i + 1, j), lambda u: t.east == u.west),
                          ((i, j - 1), lambda u: u.north == t.south), ((i, j + 1), lambda u: t.north == u.south)):
            if nb in assign and not check(ts.tiles[assign[nb]]):
                return False
        return True

    def search(idx):
        nonlocal steps
        if idx == len(order):
            return True
        steps += 1
        if steps > max_steps:
            raise RuntimeError("patch search gave up")
        c = order[idx]
        choices = list(range(len(ts.tiles)))
        rng.shuffle(choices)
        for k in choices:
            if ok(c, k):
                assign[c] = k
                if search(idx + 1):
                    return True
                del assign[c]
        return False

    if not search(0):
        raise ValueError("no valid patch on this window")
    i_s = [c[0] for c in cellset] or [0]
    j_s = [c[1] for c in cellset] or [0]
    return Z2Patch(min(i_s), max(i_s), min(j_s), max(j_s), dict(assign))


def valid_patches(ts: Z2Tileset, width: int, height: int) -> list:
    """All valid width x height patches, cells (0..width-1, 0..height-1), in lexicographic order."""
    cells = [(i, j) for j in range(height) for i in range(width)]
    out = []
    assign = {}

    def search(idx):
        if idx == len(cells):
            out.append(dict(assign))
            return
        i, j = cells[idx]
        for k, t in enumerate(ts.tiles):
            if i > 0 and ts.tiles[assign[(i - 1, j)]].east != t.west:
                continue
            if j > 0 and ts.tiles[assign[(i, j - 1)]].north != t.south:
                continue
            assign[(i, j)] = k
            search(idx + 1)
            del assign[(i, j)]

    search(0)
    return out


# ---------------------------------------------------------------------------
# Higher blocks


def _block_key(block: dict, cols, rows) -> str:
    return "/".join(".".join(str(block[(i, j)]) for i in cols) for j in rows)


def higher_block(ts: Z2Tileset, m: int, n: int) -> Z2Tileset:
    """Overlapping m x n blocks; neighbouring blocks must agree on their overlap.

    With m = 1 the east/west colours are the boundary colour columns, with
    m >= 2 they are the overlapping sub-blocks (likewise for n).
    """
    if m < 1 or n < 1:
        raise ValueError("block sizes must be >= 1")
    if (m, n) == (1, 1):
        return Z2Tileset(list(ts.tiles), ts.name, [{(0, 0): k} for k in range(len(ts.tiles))])
    tiles, blocks = [], []
    for block in valid_patches(ts, m, n):
        rows, cols = range(n), range(m)
        if m >= 2:
            east = _block_key(block, range(1, m), rows)
            west = _block_key(block, range(0, m - 1), rows)
        else:
            east = ",".join(ts.tiles[block[(0, j)]].east for j in rows)
            west = ",".join(ts.tiles[block[(0, j)]].west for j in rows)
        if n >= 2:
            north = _block_key(block, cols, range(1, n))
            south = _block_key(block, cols, range(0, n - 1))
        else:
            north = ",".join(ts.tiles[block[(i, 0)]].north for i in cols)
            south = ",".join(ts.tiles[block[(i, 0)]].south for i in cols)
        tiles.append(WangTile4(north, east, south, west))
        blocks.append(block)
    return Z2Tileset(tiles, f"{ts.name}[{m}x{n}]", blocks)


def unblock_patch(block_ts: Z2Tileset, patch: Z2Patch) -> Z2Patch:
    """Underlying patch: the block at (i, j) covers (i..i+m-1, j..j+n-1)."""
    if block_ts.blocks is None:
        raise ValueError("not a block tileset")
    cells = {}
    for (i, j), k in patch.cells.items():
        for (di, dj), u in block_ts.blocks[k].items():
            prev = cells.setdefault((i + di, j + dj), u)
            if prev != u:
                raise ValueError(f"blocks disagree at {(i + di, j + dj)}")
    i_s = [c[0] for c in cells]
    j_s = [c[1] for c in cells]
    return Z2Patch(min(i_s), max(i_s), min(j_s), max(j_s), cells)


# ---------------------------------------------------------------------------
# A Kari-style tileset computing the circle map along the vertical direction


def _kari_tile(x: Fraction, rho: Fraction, K: int, c: Fraction) -> WangTile4:
    # the tile in column i of a row carrying x, where ix = K + rho
    N = math.floor(rho + x)
    base = c * K
    W = base - math.floor(c * (K + rho))
    S = math.floor(c * (K + rho + x)) - math.floor(c * (K + rho))
    E = c * (K + N) - math.floor(c * (K + rho + x))
    return WangTile4(str(N), _fmt(E), str(S), _fmt(W))


def _fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def kari_tile_at(i: int, x: Fraction) -> WangTile4:
    """Tile in column i of a row with value x; the row below carries T^-1(x)."""
    from .wang import T_MAP

    x = T_MAP.reduce(x)
    c = T_MAP.slope(x)
    ix = i * x
    K = math.floor(ix)
    return _kari_tile(x, ix - K, K, c)


@lru_cache(maxsize=None)
def kari_tileset(grid: int = 40) -> Z2Tileset:
    """All tiles of the construction, found on an offset rational grid over (rho, x, K mod den c).

    Colours are floors of increasing linear forms, so every tile is attained
    on an open region of the (rho, x) box; ``grid`` only has to be finer
    than the smallest region.
    """
    from .wang import T_MAP

    seen = {}
    pts = [Fraction(2 * k + 1, 2 * grid) for k in range(grid)]
    for br in T_MAP.branches:
        c = br.slope
        xs = [br.lo + (br.hi - br.lo) * p for p in pts]
        for K in range(c.denominator):
            for rho in pts:
                for x in xs:
                    seen.setdefault(_kari_tile(x, rho, K, c), None)
    tiles = sorted(seen, key=lambda t: (Fraction(t.west), Fraction(t.east), int(t.north), int(t.south)))
    return Z2Tileset(tiles, "kari-T")


def kari_patch(ts: Z2Tileset, x0, cells) -> Z2Patch:
    """Formula patch: row j carries T^-j(x0), column i the i-th Beatty phase."""
    from .wang import orbit, T_MAP

    idx = ts.index()
    rows = {}
    cellset = list(cells)
    out = {}
    for i, j in cellset:
        if j not in rows:
            rows[j] = orbit(T_MAP, Fraction(x0), -j)
        tile = kari_tile_at(i, rows[j])
        if tile not in idx:
            raise ValueError(f"tile {tile} missing from the tileset")
        out[(i, j)] = idx[tile]
    i_s = [c[0] for c in cellset]
    j_s = [c[1] for c in cellset]
    return Z2Patch(min(i_s), max(i_s), min(j_s), max(j_s), out)


# ---------------------------------------------------------------------------
# Folding onto F_n x Z


@dataclass
class FoldedPatch:
    group: FnZGroup
    radius: int
    cells: dict = field(repr=False)  # FnZElem -> (tile id, flow letter)
    word: tuple | None = None

    def flow_patch(self) -> FlowPatch:
        ball = enumerate_ball(self.group, self.radius)
        return FlowPatch(self.group, ball, {g: y for g, (_, y) in self.cells.items()})


def height(w: str, word) -> int:
    """j = 2 |lcp(w, W)| - |w|."""
    k = 0
    while k < len(w) and k < len(word) and w[k] == word[k]:
        k += 1
    return 2 * k - len(w)


def rho(word, j: int) -> str:
    """Path element at height j: W_0...W_{j-1} above the base, W_0^-|j| below it."""
    if j >= 0:
        if j > len(word):
            raise ValueError("word too short")
        return "".join(word[:j])
    return word[0].swapcase() * -j


def fold(x: Z2Patch, word, radius: int, rank: int = 2) -> FoldedPatch:
    group = FnZGroup(rank)
    word = tuple(word)
    if len(word) < radius + 1:
        raise ValueError(f"need at least {radius + 1} flow letters for radius {radius}")
    config = FlowConfig(group.free, word)
    cells = {}
    for g in enumerate_ball(group, radius).elements:
        ij = (g.k, height(g.w, word))
        if ij not in x.cells:
            raise ValueError(f"window misses cell {ij} needed by {group.key(g)}")
        cells[g] = (x.cells[ij], config.letter(g.w))
    return FoldedPatch(group, radius, cells, word)


def validate_folded(p: FoldedPatch, ts: Z2Tileset) -> list:
    group = p.group
    out = []
    for g, (k, _) in p.cells.items():
        if not 0 <= k < len(ts.tiles):
            out.append(Violation(group.key(g), "tile-id", str(k)))
    if out:
        return out
    out.extend(validate_flow_patch(p.flow_patch()))
    for g, (k, y) in p.cells.items():
        tile = ts.tiles[k]
        h = group.mul_letter(g, "t")
        if h in p.cells:
            if tile.east != ts.tiles[p.cells[h][0]].west:
                out.append(Violation(group.key(g), "P:east-west", f"-> {group.key(h)}"))
        if y in group.free.letters:
            h = group.mul_letter(g, y)
            if h in p.cells and tile.north != ts.tiles[p.cells[h][0]].south:
                out.append(Violation(group.key(g), f"Q:{y}", f"-> {group.key(h)}"))
    return out


def unfold(p: FoldedPatch, ts: Z2Tileset | None = None) -> Z2Patch:
    """x_(i, j) = tile at rho_W(j) t^i on the diamond |i| + |j| <= radius."""
    if ts is not None:
        bad = validate_folded(p, ts)
        if bad:
            raise ValueError(f"invalid folded patch: {len(bad)} violations, first {bad[0]}")
    word = word_of_patch(p.flow_patch())
    R = p.radius
    cells = {}
    for i, j in diamond(R):
        g = FnZElem(rho(word, j), i)
        if g in p.cells:
            cells[(i, j)] = p.cells[g][0]
    return Z2Patch(-R, R, -R, R, cells)


def dump_folded(p: FoldedPatch, tileset_name: str = "") -> str:
    lines = [f"# group: F{p.group.rank}xZ", f"# radius: {p.radius}"]
    if p.word is not None:
        lines.append(f"# word: {''.join(p.word)}")
    if tileset_name:
        lines.append(f"# tileset: {tileset_name}")
    for g in enumerate_ball(p.group, p.radius).elements:
        if g in p.cells:
            k, y = p.cells[g]
            lines.append(f"{p.group.key(g)} {k} {y}")
    return "\n".join(lines) + "\n"


def load_folded(text: str) -> FoldedPatch:
    rank, radius, word = 2, None, None
    cells = {}
    group = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            k, v = k.strip(), v.strip()
            if k == "group":
                if not (v.startswith("F") and v.endswith("xZ")):
                    raise ValueError(f"line {n}: folded patches live on F_n x Z, got {v}")
                rank = int(v[1:-2])
            elif k == "radius":
                radius = int(v)
            elif k == "word":
                word = tuple(v)
            continue
        group = group or FnZGroup(rank)
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {n}: expected '<key> <tile-id> <flow-letter>'")
        cells[group.parse(parts[0])] = (int(parts[1]), parts[2])
    if radius is None:
        raise ValueError("missing '# radius:' header")
    return FoldedPatch(group or FnZGroup(rank), radius, cells, word)


def folded_labels(p: FoldedPatch) -> dict:
    return dict(p.cells)


def scan_periods_fnz(p: FoldedPatch, max_len: int, min_overlap: int = 1):
    from .wang import scan_periods

    return scan_periods(folded_labels(p), p.group, max_len, min_overlap)


def tileset_fixture(name: str) -> Z2Tileset:
    """Small built-in tilesets used by tests and examples."""
    if name == "single":
        return Z2Tileset([WangTile4("0", "0", "0", "0")], "single")
    if name == "checkerboard":
        return Z2Tileset([WangTile4("1", "1", "0", "0"), WangTile4("0", "0", "1", "1")], "checkerboard")
    if name == "three":
        return Z2Tileset([WangTile4("0", "0", "0", "0"), WangTile4("0", "1", "1", "0"), WangTile4("1", "0", "0", "1")], "three")
    if name == "kari":
        return kari_tileset()
    raise ValueError(f"unknown fixture {name!r}")
