"""Trace table for monodromy @ twist(c, n) over the bundled battery.

    python3 scripts/twist_battery.py [--n-max 20] [--per-sign 8] [--csv out.csv]
"""

import argparse
import collections

from goodman_lab.exact_algebra import Mat2Z
from goodman_lab.scene import Scene
from goodman_lab.surgery import twist_battery


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--per-sign", type=int, default=8)
    ap.add_argument("--csv")
    args = ap.parse_args()

    cfg = Scene.load("twist_battery").twist_scan
    monos = [Mat2Z.from_rows(m) for m in cfg["monodromies"]]
    rows = twist_battery(monos, args.per_sign, args.n_max)

    tally = collections.Counter((r.predicted, r.hyperbolic) for r in rows)
    print(f"predicted sign: {tally[True, True]} hyperbolic, {tally[True, False]} not")
    print(f"wrong sign:     {tally[False, True]} hyperbolic, {tally[False, False]} not")
    worst = collections.defaultdict(int)
    for r in rows:
        if not r.predicted and not r.hyperbolic:
            worst[r.monodromy] = max(worst[r.monodromy], abs(r.n))
    for m in monos:
        print(f"  {m.rows()}: largest wrong-sign |n| with |tr| <= 2: {worst.get(m.key(), '-')}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("a,b,c,d,x0,y0,sign,n,trace,hyperbolic,predicted\n")
            for r in rows:
                fh.write(",".join(map(str, [*r.monodromy, *r.c, r.sign, r.n, r.trace,
                                            int(r.hyperbolic), int(r.predicted)])) + "\n")


if __name__ == "__main__":
    main()
