"""Deterministic DOT and SVG output for patches.

Every drawn cell carries ``data-cell`` (and ``data-letter`` / ``data-tile``
where relevant) so tests can check structure instead of pixels.
"""
from __future__ import annotations

import colorsys
from fractions import Fraction
from xml.sax.saxutils import quoteattr

from .flow import FlowPatch, mul_flow_letter
from .groups import BSGroup, FnZGroup


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def flow_dot(p: FlowPatch) -> str:
    """Cayley edges for each generator plus one bold flow arrow per cell."""
    group = p.group
    lines = ["digraph flow {", "  node [shape=point];"]
    cells = [g for g in p.ball.elements if g in p.labels]
    for g in cells:
        lines.append(f"  {_q(group.key(g))} [letter={_q(p.labels[g])}];")
    for g in cells:
        for s in group.generators:
            h = group.mul_letter(g, s)
            if h in p.labels:
                lines.append(f"  {_q(group.key(g))} -> {_q(group.key(h))} [label={_q(s)}];")
    for g in cells:
        h = mul_flow_letter(group, g, p.labels[g])
        if h in p.labels:
            lines.append(f"  {_q(group.key(g))} -> {_q(group.key(h))} [flow=true, letter={_q(p.labels[g])}, style=bold, color=red];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot_edges(text: str) -> list[tuple[str, str, dict]]:
    """Edges of a DOT file written by this module, as (src, dst, attributes)."""
    import re

    out = []
    for m in re.finditer(r'^\s*"((?:[^"\\]|\\.)*)" -> "((?:[^"\\]|\\.)*)" \[(.*)\];$', text, re.M):
        attrs = dict(re.findall(r'(\w+)=("(?:[^"\\]|\\.)*"|\w+)', m.group(3)))
        attrs = {k: v.strip('"') for k, v in attrs.items()}
        out.append((m.group(1), m.group(2), attrs))
    return out


def _svg(width: float, height: float, body: list, view=None) -> str:
    vb = view or (0, 0, width, height)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
            f'viewBox="{vb[0]:.2f} {vb[1]:.2f} {vb[2]:.2f} {vb[3]:.2f}">')
    return "\n".join([head] + body + ["</svg>"]) + "\n"


def _tree_position(word: str, step: float = 120.0) -> tuple[float, float]:
    # a/A move horizontally, b/B vertically, other letters diagonally; lengths halve per level
    dirs = {"a": (1, 0), "A": (-1, 0), "b": (0, -1), "B": (0, 1), "c": (1, -1), "C": (-1, 1), "d": (1, 1), "D": (-1, -1)}
    x = y = 0.0
    length = step
    for c in word:
        dx, dy = dirs.get(c, (0.7, 0.7))
        x, y = x + dx * length, y + dy * length
        length /= 2
    return x, y


def flow_svg(p: FlowPatch) -> str:
    """Tree drawing of an F_n (or F_n x Z base layer) flow patch with one arrow per cell."""
    group = p.group
    if isinstance(group, BSGroup):
        return bs_sheet_svg(p)
    free = group.free if isinstance(group, FnZGroup) else group
    cells = [g for g in p.ball.elements if g in p.labels]
    if isinstance(group, FnZGroup):
        cells = [g for g in cells if g.k == 0]
    word = (lambda g: g.w) if isinstance(group, FnZGroup) else (lambda g: g)
    body = []
    for g in cells:
        w = word(g)
        x, y = _tree_position(w)
        for s in free.letters:
            h = free.mul_letter(w, s)
            if len(h) > len(w) and any(word(c) == h for c in cells):
                x2, y2 = _tree_position(h)
                body.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="#999" stroke-width="1"/>')
    for g in cells:
        w = word(g)
        letter = p.labels[g]
        x, y = _tree_position(w)
        x2, y2 = _tree_position(free.mul_letter(w, letter))
        mx, my = x + (x2 - x) * 0.45, y + (y2 - y) * 0.45
        body.append(f'<line data-cell={quoteattr(group.key(g))} data-letter={quoteattr(letter)} x1="{x:.2f}" y1="{y:.2f}" '
                    f'x2="{mx:.2f}" y2="{my:.2f}" stroke="#c00" stroke-width="2" marker-end="url(#arrow)"/>')
        body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="black"/>')
    defs = ('<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
            '<path d="M0,0 L6,3 L0,6 z" fill="#c00"/></marker></defs>')
    return _svg(520, 520, [defs] + body, view=(-260, -260, 520, 520))


def bs_sheet_svg(p, heights=None) -> str:
    """BS(2,3) cells placed at (lambda scaled to the sheet, -beta_y): sheets stack by height."""
    from .heights import HeightContext, lam

    group = p.group
    letters = p.labels if isinstance(p, FlowPatch) else p.letters
    tiles = {} if isinstance(p, FlowPatch) else p.tiles
    cells = [g for g in p.ball.elements if g in letters]
    if heights is None:
        word = p.word
        ctx = HeightContext(tuple(word)) if word else None
        heights = {g: (ctx.beta_y(g) if ctx else 0) for g in cells}
    body = []
    pos = {}
    for g in cells:
        h = heights[g]
        x = float(lam(g) * Fraction(2, 3) ** h) * 60
        y = -h * 70.0
        pos[g] = (x, y)
    for g in cells:
        for s in "at":
            h = group.mul_letter(g, s)
            if h in pos:
                (x1, y1), (x2, y2) = pos[g], pos[h]
                colour = "#999" if s == "a" else "#36c"
                body.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{colour}" stroke-width="1"/>')
    for g in cells:
        x, y = pos[g]
        attrs = f'data-cell={quoteattr(group.key(g))} data-letter={quoteattr(letters[g])}'
        if g in tiles:
            attrs += f" data-tile={quoteattr(tiles[g].line())}"
        body.append(f'<circle {attrs} cx="{x:.2f}" cy="{y:.2f}" r="3" fill="black"/>')
    if pos:
        xs = [v[0] for v in pos.values()]
        ys = [v[1] for v in pos.values()]
        view = (min(xs) - 20, min(ys) - 20, max(xs) - min(xs) + 40, max(ys) - min(ys) + 40)
    else:
        view = (0, 0, 40, 40)
    return _svg(view[2], view[3], body, view=view)


def _colour(index: int, total: int) -> str:
    r, g, b = colorsys.hls_to_rgb(index / max(total, 1), 0.6, 0.55)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def z2_svg(patch, ts, size: int = 24) -> str:
    """Each tile as four triangles coloured by side colour."""
    palette = sorted(set(ts.palette))
    colour = {c: _colour(i, len(palette)) for i, c in enumerate(palette)}
    body = []
    for (i, j) in sorted(patch.cells, key=lambda c: (-c[1], c[0])):
        k = patch.cells[(i, j)]
        t = ts.tiles[k]
        x0, y0 = (i - patch.i0) * size, (patch.j1 - j) * size
        cx, cy = x0 + size / 2, y0 + size / 2
        corners = {"nw": (x0, y0), "ne": (x0 + size, y0), "se": (x0 + size, y0 + size), "sw": (x0, y0 + size)}
        sides = [("north", "nw", "ne", t.north), ("east", "ne", "se", t.east), ("south", "se", "sw", t.south), ("west", "sw", "nw", t.west)]
        body.append(f'<g data-cell="{i},{j}" data-tile="{k}">')
        for _, a, b, c in sides:
            (ax, ay), (bx, by) = corners[a], corners[b]
            body.append(f'<polygon points="{ax},{ay} {bx},{by} {cx},{cy}" fill="{colour[c]}" stroke="#333" stroke-width="0.3"/>')
        body.append("</g>")
    w = (patch.i1 - patch.i0 + 1) * size
    h = (patch.j1 - patch.j0 + 1) * size
    return _svg(w, h, body)


def cayley_dot(ball) -> str:
    group = ball.group
    lines = ["digraph cayley {", "  node [shape=point];"]
    for g in ball.elements:
        lines.append(f"  {_q(group.key(g))};")
    for g in ball.elements:
        for s in group.generators:
            h = group.mul_letter(g, s)
            if h in ball:
                lines.append(f"  {_q(group.key(g))} -> {_q(group.key(h))} [label={_q(s)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
