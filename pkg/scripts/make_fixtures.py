"""Regenerate the patch fixtures under tests/fixtures (good and deliberately broken)."""
import dataclasses
from fractions import Fraction
from pathlib import Path

from gbs_tiler import flow, folding, locked, wang
from gbs_tiler.groups import BSGroup, FnZElem, FreeGroup

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    F2, BS = FreeGroup(2), BSGroup()

    p = flow.flow_patch_from_word("babab", 3, F2)
    (OUT / "flow_good.patch").write_text(flow.dump_flow_patch(p))
    p.labels["a"] = "a"
    (OUT / "flow_bad.patch").write_text(flow.dump_flow_patch(p))

    b = wang.build_bs_config(("t", "at", "t", "at"), Fraction(1, 2), 3)
    (OUT / "bs_good.patch").write_text(wang.dump_bs_patch(b))
    g = BS.identity
    b.tiles[g] = dataclasses.replace(b.tiles[g], r=b.tiles[g].r + 1)
    (OUT / "bs_bad_r.patch").write_text(wang.dump_bs_patch(b))

    ts = folding.tileset_fixture("three")
    (OUT / "three.tl").write_text(folding.dump_tileset(ts))
    x = folding.random_patch(ts, folding.diamond(3), seed=0)
    fp = folding.fold(x, tuple("abab"), 3)
    (OUT / "folded_good.patch").write_text(folding.dump_folded(fp, ts.name))
    e = FnZElem("", 0)
    k, y = fp.cells[e]
    fp.cells[e] = ((k + 1) % len(ts), y)
    (OUT / "folded_bad.patch").write_text(folding.dump_folded(fp, ts.name))

    q = locked.quotient_fixture("f2z-a")
    lp = locked.canonical_locked_patch(q, 2)
    (OUT / "locked_good.patch").write_text(locked.dump_locked(lp, q.group_name))
    lp.labels[lp.group.identity] = q.representatives[1]
    (OUT / "locked_bad.patch").write_text(locked.dump_locked(lp, q.group_name))


if __name__ == "__main__":
    main()
