"""Period scans over constructed patches and positive controls, as a table."""
import argparse
from fractions import Fraction

from gbs_tiler import folding, locked, wang


def row(name, scan):
    print(f"{name:<34} refuted={scan.refuted:3d} inconclusive={len(scan.inconclusive):3d} survivors={len(scan.survivors):3d}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=5)
    ap.add_argument("--max-len", type=int, default=2)
    ap.add_argument("--min-overlap", type=int, default=10)
    args = ap.parse_args()
    R, L, k = args.radius, args.max_len, args.min_overlap
    word = ("t", "at", "aT", "aaT", "at", "t", "at")[: R + 1] + ("t",) * max(0, R - 6)
    for x in (Fraction(1, 2), Fraction(7, 5), Fraction(11, 10)):
        p = wang.build_bs_config(word, x, R)
        row(f"BS(2,3) x={x}", wang.scan_periods(wang.bs_patch_labels(p), p.group, L, k))
    ts = folding.kari_tileset()
    fw = tuple(("ab" * R)[: R + 1])
    x = folding.kari_patch(ts, Fraction(7, 5), folding.diamond(R))
    row("kari fold", folding.scan_periods_fnz(folding.fold(x, fw, R), L, k))
    one = folding.tileset_fixture("single")
    x = folding.random_patch(one, folding.diamond(R))
    row("single-tile fold, W = a^inf", folding.scan_periods_fnz(folding.fold(x, ("a",) * (R + 1), R), L, k))
    q = locked.quotient_fixture("trivial")
    lp = locked.canonical_locked_patch(q, R)
    row("trivial quotient", wang.scan_periods(lp.labels, q.group, L, k))
    q = locked.quotient_fixture("f2z-a")
    lp = locked.canonical_locked_patch(q, R)
    row("F2xZ -> Z/2 (a -> 1)", wang.scan_periods(lp.labels, q.group, L, k))


if __name__ == "__main__":
    main()
