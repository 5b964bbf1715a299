"""Count distinct BS(2,3) tiles as the radius and the number of orbit points grow."""
import argparse
import random
from fractions import Fraction

from gbs_tiler import flow, wang
from gbs_tiler.groups import BSGroup


def random_word(rng, length):
    group = BSGroup()
    letters = flow.bs_letters()
    out = [rng.choice(letters)]
    while len(out) < length:
        c = rng.choice(letters)
        if not flow.backtracks(out[-1], c, group):
            out.append(c)
    return tuple(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    xs = [Fraction(rng.randint(10, 249), 100) for _ in range(args.points)]
    print("radius  cells  tiles(T)  tiles(T^-1)")
    for r in args.radii:
        seen = {"T": set(), "T_inv": set()}
        cells = 0
        for x in xs:
            p = wang.build_bs_config(random_word(rng, r + 2), x, r)
            cells += len(p.cells())
            for t in wang.tileset_of(p):
                seen[t.f_tag].add(t)
        print(f"{r:6d} {cells:6d} {len(seen['T']):9d} {len(seen['T_inv']):12d}")


if __name__ == "__main__":
    main()
