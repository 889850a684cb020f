"""Pairwise connectivity of the level-one vertices for a range of boxes.

    python3 scripts/graph_connectivity.py [--boxes 2 4 6 8 10]
"""

import argparse
import time

from goodman_lab.surgery_graph import verify_g1_connected


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--boxes", type=int, nargs="+", default=[2, 4, 6, 8, 10])
    args = ap.parse_args()
    print(f"{'B':>3} {'vertices':>8} {'pairs':>8} {'max len':>7} {'edges':>9} {'ok':>3} {'s':>6}")
    for B in args.boxes:
        t = time.perf_counter()
        rep = verify_g1_connected(B)
        print(f"{B:3d} {rep.vertices:8d} {rep.pairs:8d} {rep.max_path_length:7d} {rep.edges_replayed:9d} "
              f"{'yes' if rep.connected else 'no':>3} {time.perf_counter() - t:6.2f}")


if __name__ == "__main__":
    main()
