"""Independent brute-force oracles used by the tests and the acceptance runner.

Nothing here shares code with the exact decision procedures.
"""

from __future__ import annotations

import numpy as np

from .exact_algebra import Mat2Z


def rasterized_crossing_count(A: Mat2Z, c1_verts, c1_class, c2_verts, c2_class, K: int,
                              resolution: int = 2048, k_min: int = 1,
                              c1_heights=None, c2_heights=None) -> int:
    """Count crossings (x, y, k) by scanning every lattice translate in floats.

    Each curve is given by lifted vertices and its homology class. For every
    k, every pair of segments and every integer translate n in the bounding
    box, the float intersection of A^k(segment) with segment + n is solved.
    Hits are snapped to the resolution grid on the torus and counted once per
    (k, x cell, y cell, x height, y height); the heights separate strands
    that pass through one torus point.
    """
    def segs(verts, H):
        V = np.array([[float(a), float(b)] for a, b in verts])
        W = np.vstack([V[1:], V[:1] + np.array([float(H[0]), float(H[1])])])
        return V, W - V

    def hts(h, n):
        h = np.zeros(n) if h is None else np.array([float(x) for x in h])
        return h, np.roll(h, -1)

    P1, D1 = segs(c1_verts, c1_class)
    P2, D2 = segs(c2_verts, c2_class)
    h1a, h1b = hts(c1_heights, len(P1))
    h2a, h2b = hts(c2_heights, len(P2))
    hits = set()
    tol = 1e-9
    for k in range(k_min, K + 1):
        M = np.array((A ** k).rows(), dtype=float)
        for i in range(len(P1)):
            P = M @ P1[i]
            D = M @ D1[i]
            for j in range(len(P2)):
                R, E = P2[j], D2[j]
                Q = P - R
                box = np.array([Q, Q + D, Q - E, Q + D - E])
                lo = np.floor(box.min(axis=0)) - 1
                hi = np.ceil(box.max(axis=0)) + 1
                xs = np.arange(lo[0], hi[0] + 1)
                ys = np.arange(lo[1], hi[1] + 1)
                n = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
                det = D[0] * (-E[1]) - D[1] * (-E[0])
                if abs(det) < 1e-14:
                    continue
                rhs = n - Q  # tau D - sigma E = n - Q
                tau = (rhs[:, 0] * (-E[1]) - rhs[:, 1] * (-E[0])) / det
                sigma = (D[0] * rhs[:, 1] - D[1] * rhs[:, 0]) / det
                ok = (tau >= -tol) & (tau <= 1 + tol) & (sigma >= -tol) & (sigma <= 1 + tol)
                for t, s in zip(tau[ok], sigma[ok]):
                    x = P1[i] + t * D1[i]
                    y = R + s * E
                    xc = tuple(np.round(np.mod(x, 1.0) * resolution).astype(int) % resolution)
                    yc = tuple(np.round(np.mod(y, 1.0) * resolution).astype(int) % resolution)
                    hx = round(((1 - t) * h1a[i] + t * h1b[i]) * resolution)
                    hy = round(((1 - s) * h2a[j] + s * h2b[j]) * resolution)
                    hits.add((k, xc, yc, hx, hy))
    return len(hits)


def trace_is_hyperbolic(rows) -> bool:
    (a, b), (c, d) = rows
    return abs(a + d) > 2
