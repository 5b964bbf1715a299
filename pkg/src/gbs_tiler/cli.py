"""Command-line entry point ``gbs-tiler``.

Exit status: 0 on success, 1 when a validator finds violations, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from pathlib import Path

from . import acceptance, flow, folding, gbs, heights, locked, render, wang
from .groups import BSGroup, FreeGroup, enumerate_ball, group_from_name


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# IO helpers


def write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def patch_kind(text: str) -> str:
    """Guess the file format from its headers and first data line."""
    headers, first = {}, None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            headers[k.strip()] = v.strip()
        elif first is None:
            first = line
    if first is not None and (first.startswith("window:") or first.startswith("row ")):
        return "z2"
    if first is not None and first.split(":")[0] in ("group", "order", "table"):
        return "quotient"
    group = headers.get("group", "")
    if group.startswith("BS(") and "x" in headers:
        return "bs"
    if group.startswith("F") and group.endswith("xZ") and first is not None and len(first.split()) == 3:
        return "folded"
    if "word" in headers:
        return "flow"
    if "group" in headers:
        return "locked"
    raise UsageError("unrecognised patch file")


def load_tileset_arg(arg: str) -> folding.Z2Tileset:
    if arg in ("single", "checkerboard", "three", "kari"):
        return folding.tileset_fixture(arg)
    return folding.load_tileset(read_text(arg), Path(arg).stem)


def load_graph_arg(arg: str) -> gbs.GBSGraph:
    """A graph file, or ``loop:M,N`` / ``edge:P,Q``."""
    kind, _, rest = arg.partition(":")
    if kind in ("loop", "edge") and rest:
        try:
            a, b = (int(v) for v in rest.split(","))
        except ValueError as exc:
            raise UsageError(f"bad graph shorthand {arg!r}") from exc
        return gbs.loop_graph(a, b) if kind == "loop" else gbs.edge_graph(a, b)
    return gbs.parse_graph(read_text(arg))


def load_quotient_arg(arg: str) -> locked.FiniteQuotient:
    if arg in ("f2z-a", "trivial", "z2-klein", "f2z-t", "bs-t"):
        return locked.quotient_fixture(arg)
    return locked.load_quotient(read_text(arg))


def flow_word_arg(text: str, group, radius: int) -> tuple:
    word = flow.parse_flow_word(text, group)
    return flow.periodic_word(word, radius + 1, group)


def report_violations(violations, limit: int = 20) -> int:
    for v in violations[:limit]:
        print(f"violation {v.cell} {v.rule} {getattr(v, 'detail', '')}".rstrip())
    if len(violations) > limit:
        print(f"... {len(violations) - limit} more")
    print(f"violations: {len(violations)}")
    return 1 if violations else 0


# ---------------------------------------------------------------------------
# Commands


def cmd_normalize(args) -> int:
    group = group_from_name(args.group)
    g = group.from_word(args.word)
    print(group.key(g))
    return 0


def cmd_ball(args) -> int:
    ball = enumerate_ball(group_from_name(args.group), args.radius)
    if args.count:
        print(len(ball.elements))
    else:
        write_output("".join(ball.group.key(g) + "\n" for g in ball.elements), args.out)
    return 0


def cmd_presentation(args) -> int:
    print(gbs.fundamental_presentation(load_graph_arg(args.graph)))
    return 0


def cmd_witness(args) -> int:
    print(gbs.weak_aperiodicity_witness(load_graph_arg(args.graph)).describe())
    return 0


def cmd_classify(args) -> int:
    g = load_graph_arg(args.graph)
    print(f"class: {gbs.whyte_class(g)}")
    print(f"witness: {gbs.weak_aperiodicity_witness(g).describe()}")
    return 0


def cmd_flow_build(args) -> int:
    group = group_from_name(args.group)
    p = flow.flow_patch_from_word(flow_word_arg(args.word, group, args.radius), args.radius, group)
    write_output(flow.dump_flow_patch(p), args.out)
    return 0


def cmd_flow_validate(args) -> int:
    p = flow.load_flow_patch(read_text(args.patch))
    return report_violations(flow.validate_flow_patch(p))


def cmd_approach(args) -> int:
    F = FreeGroup(args.rank)
    W = flow.periodic_word(flow.parse_flow_word(args.word, F), args.steps + 2, F)
    Wp = flow.periodic_word(flow.parse_flow_word(args.target, F), 3, F)
    for s in flow.approach_sequence(W, Wp, args.steps, F, generator=args.generator):
        print(f"n={s.n} g={s.g or '1'} e={s.error}")
    return 0


def cmd_lambda(args) -> int:
    w = args.word
    print(f"beta: {heights.beta(w)}")
    print(f"alpha: {wang.fmt_q(heights.alpha(w))}")
    print(f"lambda: {wang.fmt_q(heights.lam(w))}")
    if args.flow_word:
        ctx = heights.HeightContext(flow_word_arg(args.flow_word, BSGroup(), len(w) + 1))
        print(f"beta_y: {ctx.beta_y(w)}")
    return 0


def cmd_tile(args) -> int:
    x = wang.parse_q(args.x)
    tag = {"T": "T", "T^-1": "T_inv", "T_inv": "T_inv"}.get(args.tag)
    if tag is None:
        raise UsageError("--tag must be T or T^-1")
    g = BSGroup().from_word(args.g)
    tile = wang.tile_colors(tag, x, g)
    print(tile.line())
    ok = wang.tile_identity_holds(tile, x)
    print(f"identity: {'holds' if ok else 'FAILS'}")
    return 0 if ok else 1


def cmd_build_bs(args) -> int:
    group = BSGroup()
    word = flow_word_arg(args.word, group, args.radius)
    p = wang.build_bs_config(word, wang.parse_q(args.x), args.radius)
    write_output(wang.dump_bs_patch(p), args.out)
    tiles = wang.tileset_of(p)
    print(f"cells: {len(p.cells())} distinct tiles: {len(tiles)}", file=sys.stderr)
    if args.tileset_out:
        write_output("".join(t.line() + "\n" for t in tiles), args.tileset_out)
    return 0


def cmd_validate(args) -> int:
    res = wang.check_bs_patch(wang.load_bs_patch(read_text(args.patch)))
    for family in wang.RULE_FAMILIES:
        print(f"checked {family}: {res.checked.get(family, 0)}")
    return report_violations(res.violations)


def _labels_of(text: str):
    kind = patch_kind(text)
    if kind == "bs":
        p = wang.load_bs_patch(text)
        return wang.bs_patch_labels(p), p.group
    if kind == "folded":
        p = folding.load_folded(text)
        return folding.folded_labels(p), p.group
    if kind == "flow":
        p = flow.load_flow_patch(text)
        return dict(p.labels), p.group
    if kind == "locked":
        p, _ = locked.load_locked(text)
        return dict(p.labels), p.group
    raise UsageError(f"cannot scan a {kind} file")


def cmd_scan_periods(args) -> int:
    labels, group = _labels_of(read_text(args.patch))
    scan = wang.scan_periods(labels, group, args.max_len, args.min_overlap)
    print(f"candidates: {len(scan.survivors) + len(scan.inconclusive) + scan.refuted}")
    print(f"refuted: {scan.refuted}")
    print(f"inconclusive: {len(scan.inconclusive)}")
    print(f"survivors: {len(scan.survivors)}")
    for key in scan.survivors:
        print(f"survivor {key}")
    for key in scan.inconclusive:
        print(f"inconclusive {key}")
    return 0


def cmd_fold(args) -> int:
    ts = load_tileset_arg(args.tileset)
    F = FreeGroup(args.rank)
    word = flow_word_arg(args.word, F, args.radius)
    cells = folding.diamond(args.radius)
    if ts.name.startswith("kari"):
        x = folding.kari_patch(ts, wang.parse_q(args.x), cells)
    else:
        x = folding.random_patch(ts, cells, seed=args.seed)
    p = folding.fold(x, word, args.radius, rank=args.rank)
    write_output(folding.dump_folded(p, ts.name), args.out)
    return report_violations(folding.validate_folded(p, ts))


def cmd_unfold(args) -> int:
    p = folding.load_folded(read_text(args.patch))
    ts = load_tileset_arg(args.tileset) if args.tileset else None
    write_output(folding.dump_z2_patch(folding.unfold(p, ts)), args.out)
    return 0


def cmd_validate_folded(args) -> int:
    p = folding.load_folded(read_text(args.patch))
    return report_violations(folding.validate_folded(p, load_tileset_arg(args.tileset)))


def cmd_rotate_tileset(args) -> int:
    ts = load_tileset_arg(args.tileset)
    for _ in range(args.times % 4):
        ts = folding.rotate_tileset(ts)
    write_output(folding.dump_tileset(ts), args.out)
    return 0


def cmd_higher_block(args) -> int:
    block = folding.higher_block(load_tileset_arg(args.tileset), args.m, args.n)
    print(f"block tiles: {len(block.tiles)}", file=sys.stderr)
    write_output(folding.dump_tileset(block), args.out)
    return 0


def cmd_locked_build(args) -> int:
    q = load_quotient_arg(args.quotient)
    p = locked.canonical_locked_patch(q, args.radius)
    write_output(locked.dump_locked(p, q.group_name), args.out)
    return 0


def cmd_locked_validate(args) -> int:
    q = load_quotient_arg(args.quotient)
    p, name = locked.load_locked(read_text(args.patch))
    if name != q.group_name:
        raise UsageError(f"patch lives on {name} but the quotient is of {q.group_name}")
    gens = args.kernel.split(",") if args.kernel else locked.schreier_generators(q)
    rules = locked.locked_rules(q, gens)
    print(f"alphabet: {len(rules.alphabet)} fix rules: {len(rules.fix_rules)} sigma rules: {len(rules.sigma_rules)}")
    return report_violations(locked.validate_locked(p, rules))


def cmd_render(args) -> int:
    text = read_text(args.patch)
    kind = patch_kind(text)
    if kind == "z2":
        if args.format != "svg" or not args.tileset:
            raise UsageError("Z2 patches render to svg and need --tileset")
        doc = render.z2_svg(folding.load_z2_patch(text), load_tileset_arg(args.tileset))
    elif kind in ("flow", "bs", "folded"):
        if kind == "flow":
            p = flow.load_flow_patch(text)
        elif kind == "bs":
            b = wang.load_bs_patch(text)
            p = b if args.format == "svg" else flow.FlowPatch(b.group, b.ball, b.letters, b.word)
        else:
            p = folding.load_folded(text).flow_patch()
        if args.format == "dot":
            doc = render.flow_dot(p)
        elif isinstance(p.group, BSGroup):
            doc = render.bs_sheet_svg(p)
        else:
            doc = render.flow_svg(p)
    else:
        raise UsageError(f"cannot render a {kind} file")
    write_output(doc, args.out)
    return 0


def cmd_verify_paper(args) -> int:
    only = {int(v) for v in args.only.split(",")} if args.only else None
    results = acceptance.run_all(seed=args.seed, only=only)
    for r in results:
        print(r.line())
    if args.json:
        report = {"seed": args.seed, "passed": all(r.passed for r in results),
                  "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                                "seconds": round(r.seconds, 3), "details": r.details} for r in results]}
        write_output(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n", args.json)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbs-tiler", description="Flow shifts, Wang tiles and folds on GBS groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("normalize", cmd_normalize, "print the normal-form key of a word")
    p.add_argument("word")
    p.add_argument("--group", default="BS(2,3)")

    p = add("ball", cmd_ball, "list the ball of a given radius")
    p.add_argument("--group", default="BS(2,3)")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--count", action="store_true")
    p.add_argument("--out")

    for name, fn, h in (("presentation", cmd_presentation, "presentation of a GBS graph"),
                        ("witness", cmd_witness, "subgroup witness for weak aperiodicity"),
                        ("classify", cmd_classify, "quasi-isometry class and witness")):
        p = add(name, fn, h)
        p.add_argument("graph", help="graph file, or loop:M,N / edge:P,Q")

    p = add("flow-build", cmd_flow_build, "flow patch from a word (repeated periodically)")
    p.add_argument("--group", default="F2")
    p.add_argument("--word", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out")

    p = add("flow-validate", cmd_flow_validate, "check a flow patch")
    p.add_argument("patch")

    p = add("approach", cmd_approach, "approach sequence from W towards W'")
    p.add_argument("--word", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--generator")

    p = add("lambda", cmd_lambda, "beta, alpha and lambda of a BS(2,3) word")
    p.add_argument("word")
    p.add_argument("--flow-word", help="also print beta_y for this flow word")

    p = add("tile", cmd_tile, "tile colours at x")
    p.add_argument("--tag", default="T")
    p.add_argument("--x", required=True)
    p.add_argument("--g", default="")

    p = add("build-bs", cmd_build_bs, "BS(2,3) configuration patch")
    p.add_argument("--word", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--tileset-out")

    p = add("validate", cmd_validate, "check a BS(2,3) configuration patch")
    p.add_argument("patch")

    p = add("scan-periods", cmd_scan_periods, "look for short periods of a patch")
    p.add_argument("patch")
    p.add_argument("--max-len", type=int, default=2)
    p.add_argument("--min-overlap", type=int, default=1)

    p = add("fold", cmd_fold, "fold a Z^2 tiling onto F_n x Z")
    p.add_argument("--tileset", required=True, help="tileset file or single/checkerboard/three/kari")
    p.add_argument("--word", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--x", default="1/2", help="orbit start for the kari tileset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = add("unfold", cmd_unfold, "recover the Z^2 patch from a folded patch")
    p.add_argument("patch")
    p.add_argument("--tileset")
    p.add_argument("--out")

    p = add("validate-folded", cmd_validate_folded, "check a folded patch")
    p.add_argument("patch")
    p.add_argument("--tileset", required=True)

    p = add("rotate-tileset", cmd_rotate_tileset, "rotate every tile by a quarter turn")
    p.add_argument("tileset")
    p.add_argument("--times", type=int, default=1)
    p.add_argument("--out")

    p = add("higher-block", cmd_higher_block, "m x n block tileset")
    p.add_argument("tileset")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out")

    p = add("locked-build", cmd_locked_build, "canonical locked patch of a finite quotient")
    p.add_argument("--quotient", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out")

    p = add("locked-validate", cmd_locked_validate, "check a locked patch")
    p.add_argument("patch")
    p.add_argument("--quotient", required=True)
    p.add_argument("--kernel", help="comma-separated kernel generators (default: Schreier generators)")

    p = add("render", cmd_render, "DOT or SVG drawing of a patch")
    p.add_argument("patch")
    p.add_argument("--format", choices=("dot", "svg"), default="svg")
    p.add_argument("--tileset")
    p.add_argument("--out")

    p = add("verify-paper", cmd_verify_paper, "run the acceptance suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--json", help="write a JSON report here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed"):
        random.seed(args.seed)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"gbs-tiler {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
