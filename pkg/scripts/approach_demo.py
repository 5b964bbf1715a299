"""Print the approach sequence for W = (ba)^inf towards W' = (BA)^inf and what each translate reads."""
import argparse

from gbs_tiler import flow
from gbs_tiler.groups import FreeGroup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--word", default="ba")
    ap.add_argument("--target", default="BA")
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--generator", default="a")
    args = ap.parse_args()
    F = FreeGroup(2)
    W = flow.periodic_word(flow.parse_flow_word(args.word, F), args.steps + 2, F)
    Wp = flow.periodic_word(flow.parse_flow_word(args.target, F), 6, F)
    for s in flow.approach_sequence(W, Wp, args.steps, F, generator=args.generator or None):
        read = "".join(flow.approach_word(s.g, Wp, s.n + 5, F))
        print(f"n={s.n}  g_n={s.g:<10} e_n={s.error}  reads {read[: s.n + 1]}|{read[s.n + 1]}|{read[s.n + 2:]}...")


if __name__ == "__main__":
    main()
