"""Averaged-metric margins against the averaging time and grid size.

    python3 scripts/metric_margin.py [--grid 32 64] [--T 1 2 4 8 16]
"""

import argparse
import time

from goodman_lab.flow_model import MetricSample, SuspensionFlow, average_metric


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, nargs="+", default=[32, 64])
    ap.add_argument("--T", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--nt", type=int, default=16)
    ap.add_argument("--monodromy", type=int, nargs=4, default=[2, 1, 1, 1])
    args = ap.parse_args()

    a, b, c, d = args.monodromy
    flow = SuspensionFlow.from_rows([[a, b], [c, d]])
    print(f"lambda = {float(flow.lam):.12f}")
    print(f"{'grid':>5} {'T':>3} {'lam_bar':>14} {'stable':>14} {'unstable':>14} {'quad err':>9} {'s':>6}")
    for n in args.grid:
        g0 = MetricSample.flat(flow, n, args.nt)
        for T in args.T:
            t = time.perf_counter()
            r = average_metric(flow, g0, T)
            print(f"{n:5d} {T:3d} {r.lam_bar:14.10f} {r.lam_bar_stable:14.10f} {r.lam_bar_unstable:14.10f} "
                  f"{r.quadrature_error:9.1e} {time.perf_counter() - t:6.2f}")


if __name__ == "__main__":
    main()
