"""Piecewise-linear curves on the fiber torus and their crossings under the flow.

A curve is stored by lifted vertices v_0, ..., v_{m-1} in R^2 together with
its homology class H; segment i runs from v_i to v_{i+1}, where v_m = v_0 + H.
Optional vertex heights (|h| < 1/4, linear along segments) place the curve in
a thin slab around the fiber. They only matter for projection double points,
which are then time-(h_y - h_x) crossings inside the slab.

All decisions are exact: points are Fractions, slopes are QuadExt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact_algebra import ExtendedSlope, HomologyClass, Mat2Z, QuadExt, sign_of
from .flow_model import SuspensionFlow, frame_slope

Point = tuple[Fraction, Fraction]


class NotEmbedded(ValueError):
    pass


class DegenerateSegment(ValueError):
    pass


class TangentToFoliation(ValueError):
    pass


class MixedSign(ValueError):
    pass


class NonTransverseOverlap(ValueError):
    pass


class TubeTooWide(ValueError):
    pass


def _pt(v) -> Point:
    return (Fraction(v[0]), Fraction(v[1]))


def _cross(v, w):
    return v[0] * w[1] - v[1] * w[0]


def _floor(x: Fraction) -> int:
    return math.floor(x)


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


@dataclass(frozen=True)
class PLCurve:
    vertices: tuple[Point, ...]
    homology: HomologyClass
    heights: tuple[Fraction, ...] | None = None
    name: str = ""
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        verts = tuple(_pt(v) for v in self.vertices)
        if not verts:
            raise DegenerateSegment("a curve needs at least one vertex")
        object.__setattr__(self, "vertices", verts)
        if not isinstance(self.homology, HomologyClass):
            object.__setattr__(self, "homology", HomologyClass(*self.homology))
        hs = self.heights
        hs = tuple(Fraction(0) for _ in verts) if hs is None else tuple(Fraction(h) for h in hs)
        if len(hs) != len(verts):
            raise ValueError("one height per vertex")
        if any(abs(h) >= Fraction(1, 4) for h in hs):
            raise ValueError("heights must lie in (-1/4, 1/4)")
        object.__setattr__(self, "heights", hs)
        for i, (_, d) in enumerate(self.segments()):
            if d[0] == 0 and d[1] == 0:
                raise DegenerateSegment(f"segment {i} has zero length")
        for i in range(len(verts)):
            d_in, d_out = self.direction(i - 1), self.direction(i)
            if _cross(d_in, d_out) == 0 and d_in[0] * d_out[0] + d_in[1] * d_out[1] < 0:
                raise DegenerateSegment(f"curve backtracks at vertex {i}")
        if self.check:
            self.self_crossings()

    # construction ------------------------------------------------------
    @classmethod
    def straight(cls, homology, base=(0, 0), pieces: int = 1, name: str = "") -> "PLCurve":
        """Constant-slope closed curve: the straight line of the class through base."""
        H = homology if isinstance(homology, HomologyClass) else HomologyClass(*homology)
        b = _pt(base)
        verts = [(b[0] + Fraction(i * H.x, pieces), b[1] + Fraction(i * H.y, pieces))
                 for i in range(pieces)]
        return cls(tuple(verts), H, name=name)

    def with_vertices(self, vertices, check: bool = True) -> "PLCurve":
        return PLCurve(tuple(vertices), self.homology, self.heights, self.name, check)

    def transported(self, A: Mat2Z) -> "PLCurve":
        """Image of the curve under the monodromy (a flow isotopy by one period)."""
        verts = [A.apply(v) for v in self.vertices]
        H = HomologyClass(*A.apply(tuple(self.homology)))
        return PLCurve(tuple(verts), H, self.heights, self.name)

    # geometry ----------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> Point:
        """Lifted vertex i for any integer i (shifted by multiples of H)."""
        q, r = divmod(i, self.m)
        v = self.vertices[r]
        return (v[0] + q * self.homology.x, v[1] + q * self.homology.y)

    def height(self, i: int) -> Fraction:
        return self.heights[i % self.m]

    def direction(self, i: int) -> Point:
        a, b = self.vertex(i), self.vertex(i + 1)
        return (b[0] - a[0], b[1] - a[1])

    def segments(self) -> list[tuple[Point, Point]]:
        return [(self.vertex(i), self.direction(i)) for i in range(self.m)]

    def is_turn(self, i: int) -> bool:
        return _cross(self.direction(i - 1), self.direction(i)) != 0

    def turns(self) -> list[int]:
        return [i for i in range(self.m) if self.is_turn(i)]

    def point(self, loc: tuple[int, Fraction]) -> Point:
        i, t = loc
        P, D = self.vertex(i), self.direction(i)
        return (P[0] + t * D[0], P[1] + t * D[1])

    def height_at(self, loc: tuple[int, Fraction]) -> Fraction:
        i, t = loc
        return (1 - t) * self.height(i) + t * self.height(i + 1)

    def normalize(self, seg: int, t: Fraction) -> tuple[int, Fraction]:
        if t == 1:
            return ((seg + 1) % self.m, Fraction(0))
        return (seg % self.m, t)

    def self_crossings(self) -> list["Crossing"]:
        """Projection double points, each as a time (h_y - h_x) crossing."""
        return _self_crossings(self)

    def to_json(self) -> dict:
        out = {"vertices": [[[v[0].numerator, v[0].denominator], [v[1].numerator, v[1].denominator]]
                            for v in self.vertices],
               "homology": [self.homology.x, self.homology.y]}
        if any(self.heights):
            out["heights"] = [[h.numerator, h.denominator] for h in self.heights]
        if self.name:
            out["name"] = self.name
        return out


def segment_slopes(flow: SuspensionFlow, curve: PLCurve) -> list[ExtendedSlope]:
    return [frame_slope(flow, d) for d in (curve.direction(i) for i in range(curve.m))]


def classify_sign(flow: SuspensionFlow, curve: PLCurve) -> str:
    """'positive', 'negative' or 'mixed' from the frame slopes of the segments."""
    signs = set()
    for i, sl in enumerate(segment_slopes(flow, curve)):
        if sl.is_infinite or sl.sign() == 0:
            raise TangentToFoliation(f"segment {i} is tangent to the "
                                     f"{'stable' if sl.is_infinite else 'unstable'} direction")
        signs.add(sl.sign())
    if signs == {1}:
        return "positive"
    if signs == {-1}:
        return "negative"
    return "mixed"


# --------------------------------------------------------------------------
# crossings


@dataclass(frozen=True)
class Crossing:
    """(x, y, t) with y = phi^t(x): x on the under strand, y on the over strand.

    Locations are (segment index, parameter in [0, 1)). ``under_slopes`` and
    ``over_slopes`` are the one-sided slopes (stable-negative side, stable-
    positive side); they coincide away from turns.
    """

    x_param: tuple[int, Fraction]
    y_param: tuple[int, Fraction]
    k: int
    t: Fraction
    x_point: Point
    y_point: Point
    under_slopes: tuple[ExtendedSlope, ExtendedSlope]
    over_slopes: tuple[ExtendedSlope, ExtendedSlope]

    @property
    def under_slope(self) -> ExtendedSlope:
        return self.under_slopes[0]

    @property
    def over_slope(self) -> ExtendedSlope:
        return self.over_slopes[0]

    @property
    def at_turn(self) -> bool:
        return self.under_slopes[0] != self.under_slopes[1] or self.over_slopes[0] != self.over_slopes[1]

    def key(self):
        return (self.k, self.x_param, self.y_param)


def _mod1(p: Point) -> Point:
    return (p[0] - _floor(p[0]), p[1] - _floor(p[1]))


def _one_sided_slopes(flow: SuspensionFlow, curve: PLCurve, loc, slopes) -> tuple[ExtendedSlope, ExtendedSlope]:
    i, t = loc
    if t != 0 or not curve.is_turn(i):
        return (slopes[i], slopes[i])
    u = flow.unstable_dir
    d_out = curve.direction(i)
    d_in = curve.direction(i - 1)
    # side of a branch = sign of its stable coordinate; det(s, u) < 0 flips det(b, u)
    side_out = -sign_of(d_out[0] * u[1] - d_out[1] * u[0])
    side_in = sign_of(d_in[0] * u[1] - d_in[1] * u[0])  # branch direction is -d_in
    if side_out == side_in:
        raise ValueError(f"cusp at vertex {i}: both branches on one side of the stable leaf")
    lo, hi = (slopes[i], slopes[(i - 1) % curve.m]) if side_out < 0 else (slopes[(i - 1) % curve.m], slopes[i])
    return (lo, hi)


def _lattice_hits(Q: Point, Dv: Point, E: Point) -> Iterable[tuple[Fraction, Fraction, tuple[int, int]]]:
    """All (tau, sigma, n) in [0,1]^2 x Z^2 with Q + tau Dv = sigma E + n, Dv x E != 0.

    n ranges over the lattice points of the parallelogram Q + tau Dv - sigma E;
    integer columns are scanned and each column is sliced exactly.
    """
    det = _cross(Dv, E)
    corners = [Q, (Q[0] + Dv[0], Q[1] + Dv[1]), (Q[0] - E[0], Q[1] - E[1]),
               (Q[0] + Dv[0] - E[0], Q[1] + Dv[1] - E[1])]
    edges = [(corners[0], Dv), (corners[2], Dv), (corners[0], (-E[0], -E[1])), (corners[1], (-E[0], -E[1]))]
    x_lo = _ceil(min(c[0] for c in corners))
    x_hi = _floor(max(c[0] for c in corners))
    for X in range(x_lo, x_hi + 1):
        ys = []
        for V, W in edges:
            if W[0] != 0:
                r = (X - V[0]) / W[0]
                if 0 <= r <= 1:
                    ys.append(V[1] + r * W[1])
            elif V[0] == X:
                ys.extend((V[1], V[1] + W[1]))
        if not ys:
            continue
        for Y in range(_ceil(min(ys)), _floor(max(ys)) + 1):
            # Q - n + tau Dv - sigma E = 0
            Rx, Ry = X - Q[0], Y - Q[1]
            tau = _cross((Rx, Ry), E) / det
            sigma = -_cross(Dv, (Rx, Ry)) / det
            if 0 <= tau <= 1 and 0 <= sigma <= 1:
                yield tau, sigma, (X, Y)


def _parallel_hits(Q: Point, Dv: Point, E: Point):
    """Touching points of parallel segments; raise on overlaps of positive length."""
    # n must lie on the line through Q along E, inside Q + [0,1] Dv - [0,1] E
    if E[0] != 0:
        main = 0
    else:
        main = 1
    other = 1 - main
    lo = min(Q[main], Q[main] + Dv[main]) - max(E[main], 0)
    hi = max(Q[main], Q[main] + Dv[main]) - min(E[main], 0)
    for N in range(_ceil(lo), _floor(hi) + 1):
        r = (N - Q[main]) / E[main]
        n_other = Q[other] + r * E[other]
        if n_other.denominator != 1:
            continue
        n = (N, int(n_other)) if main == 0 else (int(n_other), N)
        # on the common line: parametrize by E; Dv = mu E
        mu = Dv[main] / E[main]
        base = (Q[0] - n[0], Q[1] - n[1])
        b0 = base[main] / E[main]  # start of image segment in sigma units
        a_lo, a_hi = sorted((b0, b0 + mu))
        ov_lo, ov_hi = max(a_lo, Fraction(0)), min(a_hi, Fraction(1))
        if ov_lo < ov_hi:
            raise NonTransverseOverlap("parallel segments overlap along an interval")
        if ov_lo == ov_hi:
            sigma = ov_lo
            tau = (sigma - b0) / mu
            yield tau, sigma, n


def _segment_pair_hits(P, D, R, E):
    Q = (P[0] - R[0], P[1] - R[1])
    if _cross(D, E) != 0:
        yield from _lattice_hits(Q, D, E)
    else:
        yield from _parallel_hits(Q, D, E)


def _raw_crossings(flow: SuspensionFlow, c1: PLCurve, c2: PLCurve, k: int):
    """Yield (x_loc, y_loc) with A^k x = y mod Z^2, deduplicated, sorted."""
    Ak = flow.monodromy ** k
    seen = set()
    for i in range(c1.m):
        P = Ak.apply(c1.vertex(i))
        D = Ak.apply(c1.direction(i))
        for j in range(c2.m):
            R, E = c2.vertex(j), c2.direction(j)
            for tau, sigma, n in _segment_pair_hits(P, D, R, E):
                seen.add((c1.normalize(i, tau), c2.normalize(j, sigma)))
    return sorted(seen)


def _primitive_along(D: Point) -> tuple[int, int]:
    L = math.lcm(D[0].denominator, D[1].denominator)
    ix, iy = int(D[0] * L), int(D[1] * L)
    g = math.gcd(ix, iy)
    return (ix // g, iy // g)


def _self_translate_overlaps(curve: PLCurve):
    """A segment at least as long as the lattice period along it is not embedded,
    unless it is the whole (straight, single-segment) curve."""
    for i in range(curve.m):
        D = curve.direction(i)
        w = _primitive_along(D)
        r = D[0] / w[0] if w[0] != 0 else D[1] / w[1]
        if r > 1 or (r == 1 and curve.m > 1):
            raise NotEmbedded(f"segment {i} covers a closed geodesic of class {w}")


def _self_crossings(curve: PLCurve) -> list[Crossing]:
    _self_translate_overlaps(curve)
    out = []
    done = set()
    try:
        pairs = _raw_crossings_k0(curve)
    except NonTransverseOverlap as exc:
        raise NotEmbedded(str(exc)) from exc
    for xl, yl in pairs:
        if (yl, xl) in done:
            continue
        done.add((xl, yl))
        hx, hy = curve.height_at(xl), curve.height_at(yl)
        if hx == hy:
            raise NotEmbedded(f"curve meets itself at {_mod1(curve.point(xl))}")
        if hx > hy:
            xl, yl = yl, xl
            hx, hy = hy, hx
        out.append((xl, yl, hy - hx))
    return [Crossing(xl, yl, 0, t, _mod1(curve.point(xl)), _mod1(curve.point(yl)), (), ())
            for xl, yl, t in sorted(out)]


def _raw_crossings_k0(curve: PLCurve):
    seen = set()
    for i in range(curve.m):
        P, D = curve.vertex(i), curve.direction(i)
        for j in range(curve.m):
            R, E = curve.vertex(j), curve.direction(j)
            if i == j:
                continue
            for tau, sigma, n in _segment_pair_hits(P, D, R, E):
                xl = curve.normalize(i, tau)
                yl = curve.normalize(j, sigma)
                if xl == yl:
                    continue
                seen.add((xl, yl))
    return sorted(seen)


def _dress(flow, c1, c2, xl, yl, k, slopes1, slopes2) -> Crossing:
    t = k + c2.height_at(yl) - c1.height_at(xl)
    if slopes1 is None:
        under = over = (None, None)
    else:
        under = _one_sided_slopes(flow, c1, xl, slopes1)
        over = _one_sided_slopes(flow, c2, yl, slopes2)
    return Crossing(xl, yl, k, t, _mod1(c1.point(xl)), _mod1(c2.point(yl)), under, over)


def enumerate_crossings(flow: SuspensionFlow, c1: PLCurve, c2: PLCurve, K: int,
                        k_min: int = 1, slopes: bool = True) -> list[Crossing]:
    """All crossings (x, y, k), k_min <= k <= K, x on c1, y = A^k x on c2.

    With k_min = 0 and c1 == c2 the projection double points are included.
    Raises NonTransverseOverlap when an image segment runs along a segment.
    With slopes=False the one-sided slopes are left as None, so curves with
    cusps (where they are undefined) can still be counted.
    """
    if K < 1 and k_min >= 1:
        raise ValueError("K must be at least 1")
    slopes1 = segment_slopes(flow, c1) if slopes else None
    slopes2 = slopes1 if c2 is c1 or not slopes else segment_slopes(flow, c2)
    out: list[Crossing] = []
    for k in range(k_min, K + 1):
        if k == 0:
            if c1 is not c2 and c1 != c2:
                raise ValueError("time-0 crossings are only defined for a single curve")
            for cr in c1.self_crossings():
                out.append(_dress(flow, c1, c1, cr.x_param, cr.y_param, 0, slopes1, slopes1))
            continue
        for xl, yl in _raw_crossings(flow, c1, c2, k):
            out.append(_dress(flow, c1, c2, xl, yl, k, slopes1, slopes2))
    return out


# --------------------------------------------------------------------------
# steadiness


@dataclass
class SteadinessReport:
    verdict: str
    sign: str
    K: int
    h: ExtendedSlope | None
    H: ExtendedSlope | None
    violations: list[Crossing]
    crossings_checked: int
    delta_star: Fraction | None = None
    min_slack: float | None = None

    @property
    def steady(self) -> bool:
        return self.verdict == "steady"


def cutoff_K(flow: SuspensionFlow, ratio: QuadExt) -> int:
    """Least K >= 1 with lam^(-2K) < ratio (strict)."""
    if ratio.sign() <= 0:
        raise ValueError("slope ratio must be positive")
    K = 1
    lam_m2 = flow.lam_power(-2)
    p = lam_m2
    while not (p < ratio):
        K += 1
        p = p * lam_m2
    return K


def _crossing_ok(flow: SuspensionFlow, cr: Crossing, sign: str) -> bool:
    factor = flow.lam_power(-2 * cr.k)
    for over, under in zip(cr.over_slopes, cr.under_slopes):
        diff = over.value - under.value * factor
        if sign == "positive" and not diff.sign() > 0:
            return False
        if sign == "negative" and not diff.sign() < 0:
            return False
    return True


def check_steadiness(flow: SuspensionFlow, curve: PLCurve, with_slack: bool = True) -> SteadinessReport:
    sign = classify_sign(flow, curve)
    if sign == "mixed":
        raise MixedSign("curve has segments of both signs")
    slopes = segment_slopes(flow, curve)
    mags = [abs(s.value) for s in slopes]
    h, H = min(mags), max(mags)
    K = cutoff_K(flow, h / H)
    crossings = enumerate_crossings(flow, curve, curve, K, k_min=0)
    violations = [cr for cr in crossings if not _crossing_ok(flow, cr, sign)]
    verdict = "steady" if not violations else "unsteady"
    h_s = ExtendedSlope(h if sign == "positive" else -h)
    H_s = ExtendedSlope(H if sign == "positive" else -H)
    rep = SteadinessReport(verdict, sign, K, h_s, H_s, violations, len(crossings))
    if with_slack and verdict == "steady":
        rep.delta_star, rep.min_slack = c1_slack(flow, curve, sign, K)
    return rep


# --------------------------------------------------------------------------
# C^1 slack: a float side computation, never part of the exact verdict


def _float_slope_bounds(d: np.ndarray, s: np.ndarray, u: np.ndarray, eps: float):
    """Interval of slopes det(d', u)/det(s, d') over |d' - d|_inf <= eps."""
    N = d[0] * u[1] - d[1] * u[0]
    M = s[0] * d[1] - s[1] * d[0]
    dN = eps * (abs(u[0]) + abs(u[1]))
    dM = eps * (abs(s[0]) + abs(s[1]))
    if abs(M) <= dM:
        return -math.inf, math.inf
    vals = [(N + a) / (M + b) for a in (-dN, dN) for b in (-dM, dM)]
    return min(vals), max(vals)


def _seg_seg_distance(p0, p1, q0, q1) -> np.ndarray:
    """Euclidean distances between segment batches (arrays of shape (..., 2))."""

    def point_seg(p, a, b):
        ab = b - a
        L = np.sum(ab * ab, axis=-1)
        t = np.clip(np.sum((p - a) * ab, axis=-1) / np.where(L == 0, 1, L), 0, 1)
        proj = a + t[..., None] * ab
        return np.linalg.norm(p - proj, axis=-1)

    d = np.minimum.reduce([point_seg(p0, q0, q1), point_seg(p1, q0, q1),
                           point_seg(q0, p0, p1), point_seg(q1, p0, p1)])
    # proper intersections have distance zero
    def orient(a, b, c):
        return np.sign((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
                       - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))

    inter = (orient(p0, p1, q0) * orient(p0, p1, q1) < 0) & (orient(q0, q1, p0) * orient(q0, q1, p1) < 0)
    return np.where(inter, 0.0, d)


def _pair_gap(P, D, R, E, pad: float, skip_zero: bool, skip_touch: bool) -> float:
    """Minimal distance from segment P + [0,1] D to translates R + [0,1] E + n."""
    Q = P - R
    corners = np.array([Q, Q + D, Q - E, Q + D - E])
    lo = np.floor(corners.min(axis=0) - pad).astype(int)
    hi = np.ceil(corners.max(axis=0) + pad).astype(int)
    xs = np.arange(lo[0], hi[0] + 1)
    ys = np.arange(lo[1], hi[1] + 1)
    n = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2).astype(float)
    keep = np.ones(len(n), dtype=bool)
    if skip_zero:
        keep &= ~np.all(n == 0, axis=1)
    q0 = R + n
    q1 = R + E + n
    dist = _seg_seg_distance(np.broadcast_to(P, q0.shape), np.broadcast_to(P + D, q0.shape), q0, q1)
    if skip_touch:
        # segments sharing an endpoint through this translate: exclude the contact
        touch = (np.all(np.isclose(P + D, q0), axis=1) | np.all(np.isclose(P, q1), axis=1))
        keep &= ~touch
    dist = dist[keep]
    return float(dist.min()) if len(dist) else math.inf


def c1_slack(flow: SuspensionFlow, curve: PLCurve, sign: str, K: int,
             max_delta: float = 0.25) -> tuple[Fraction, float]:
    """Emit delta* such that moving each vertex by < delta* (sup norm) keeps steadiness.

    For every segment pair and 0 <= k <= K either the steadiness inequality
    holds robustly for all perturbed directions, or the pair stays apart by
    more than the displacement the perturbation can cause. The cutoff ratio
    h/H must also stay above lam^(-2K). delta_max is found by bisection and
    delta* = delta_max / 2, rounded down to a dyadic rational.
    """
    s, u = (np.array(x) for x in flow.float_frame())
    lam = float(flow.lam)
    A = flow.monodromy
    m = curve.m
    P = [np.array([float(c) for c in curve.vertex(i)]) for i in range(m)]
    D = [np.array([float(c) for c in curve.direction(i)]) for i in range(m)]
    sgn = 1.0 if sign == "positive" else -1.0
    Ak = [np.array((A ** k).rows(), dtype=float) for k in range(K + 1)]
    norms = [np.linalg.norm(M, 2) for M in Ak]
    pairs = []
    for k in range(K + 1):
        for i in range(m):
            for j in range(m):
                if k == 0 and i == j:
                    gap = _pair_gap(P[i], D[i], P[j], D[j], 1.0, True, False)
                else:
                    Pk, Dk = Ak[k] @ P[i], Ak[k] @ D[i]
                    gap = _pair_gap(Pk, Dk, P[j], D[j], 1.0, False, k == 0)
                pairs.append((k, i, j, gap))
    heights = curve.heights
    seg_h = [(min(heights[i], heights[(i + 1) % m]), max(heights[i], heights[(i + 1) % m]))
             for i in range(m)]

    def ok(delta: float) -> bool:
        eps = 2 * delta
        bounds = [_float_slope_bounds(d, s, u, eps) for d in D]
        if sign == "negative":
            bounds = [(-b, -a) for a, b in bounds]
        if any(lo <= 0 for lo, _ in bounds):
            return False
        h_lo = min(b[0] for b in bounds)
        H_hi = max(b[1] for b in bounds)
        if not lam ** (-2 * K) < h_lo / H_hi:
            return False
        for k, i, j, gap in pairs:
            move = (norms[k] + 1) * math.sqrt(2) * delta
            if k == 0:
                if gap > move:
                    continue
                if i == j:
                    continue
                # a projection crossing may live here: fixed height order, robust slopes
                if seg_h[i][1] < seg_h[j][0]:
                    under, over = i, j
                elif seg_h[j][1] < seg_h[i][0]:
                    under, over = j, i
                else:
                    return False
                if not bounds[over][0] > bounds[under][1]:
                    return False
                continue
            robust = bounds[j][0] > lam ** (-2 * k) * bounds[i][1]
            if not robust and gap <= move:
                return False
        return True

    if not ok(0.0):
        return Fraction(0), 0.0
    lo, hi = 0.0, max_delta
    if ok(hi):
        lo = hi
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
    delta_star = Fraction(math.floor(lo / 2 * 2 ** 40), 2 ** 40)
    slack = min((g for k, i, j, g in pairs if g > 0), default=math.inf)
    return delta_star, slack


# --------------------------------------------------------------------------
# genericity


def _reduce(p: Point) -> Point:
    return _mod1(p)


def point_period(A: Mat2Z, p: Point, bound: int) -> int | None:
    """Least k in 1..bound with A^k p = p mod Z^2, or None."""
    p0 = _reduce(p)
    q = p0
    for k in range(1, bound + 1):
        q = _reduce(A.apply(q))
        if q == p0:
            return k
    return None


@dataclass
class GenericReport:
    generic: bool
    witness: tuple[int, int, int] | None
    reason: str
    turns: list[int]
    periods: dict[int, int | None]


def check_generic(flow: SuspensionFlow, curve: PLCurve, period_bound: int) -> GenericReport:
    """No two turns on one closed orbit; strict slope-interval order on other orbit relations.

    Every rational point is periodic; a turn whose period exceeds the bound is
    treated as lying on an infinite orbit, and only relations q = A^k p with
    k <= period_bound are examined for it.
    """
    A = flow.monodromy
    turns = curve.turns()
    sign = classify_sign(flow, curve)
    slopes = segment_slopes(flow, curve)
    pts = {i: _reduce(curve.vertex(i)) for i in turns}
    periods = {i: point_period(A, pts[i], period_bound) for i in turns}

    def interval(i):
        a, b = slopes[(i - 1) % curve.m].value, slopes[i].value
        return (a, b) if a < b else (b, a)

    for i in turns:
        q = pts[i]
        per = periods[i]
        for k in range(1, (per if per is not None else period_bound) + 1):
            q = _reduce(A.apply(q))
            for j in turns:
                if j == i or q != pts[j]:
                    continue
                if per is not None:
                    return GenericReport(False, (i, j, k), "two turns on one closed orbit", turns, periods)
                lo_y, hi_y = interval(j)
                lo_x, hi_x = interval(i)
                f = flow.lam_power(-2 * k)
                good = (lo_y > hi_x * f) if sign == "positive" else (hi_y < lo_x * f)
                if not good:
                    return GenericReport(False, (i, j, k), "slope intervals out of order", turns, periods)
    return GenericReport(True, None, "", turns, periods)


# --------------------------------------------------------------------------
# braids


def _perp(d: Point) -> Point:
    return (-d[1], d[0])


def _sup_normalize(v: Point) -> Point:
    n = max(abs(v[0]), abs(v[1]))
    return (v[0] / n, v[1] / n)


def transverse_vector(curve: PLCurve) -> Point:
    """Rational vector crossing every segment from the same side, sup norm 1."""
    dirs = [curve.direction(i) for i in range(curve.m)]
    host = max(range(curve.m), key=lambda i: abs(dirs[i][0]) + abs(dirs[i][1]))
    cands = [_perp(dirs[host])] + [_perp(d) for d in dirs]
    cands += [(_perp(a)[0] + _perp(b)[0], _perp(a)[1] + _perp(b)[1]) for a in dirs for b in dirs]
    for c in cands:
        if c == (0, 0):
            continue
        sg = {sign_of(_cross(d, c)) for d in dirs}
        if sg in ({1}, {-1}):
            return _sup_normalize(c)
    raise ValueError("no rational vector is transverse to every segment")


def self_distance(curve: PLCurve, nu: Point, cap: Fraction = Fraction(2)) -> Fraction:
    """Least |t| > 0 such that curve + t nu meets curve mod Z^2 (capped)."""
    best = Fraction(cap)
    m = curve.m
    for i in range(m):
        P, D = curve.vertex(i), curve.direction(i)
        for j in range(m):
            R, E = curve.vertex(j), curve.direction(j)
            # P + a D + t nu = R + b E + n
            cD, cE = _cross(D, nu), _cross(E, nu)
            Q = (P[0] - R[0], P[1] - R[1])
            corners = [(Q[0] + a * D[0] - b * E[0] + t * nu[0], Q[1] + a * D[1] - b * E[1] + t * nu[1])
                       for a in (0, 1) for b in (0, 1) for t in (-best, best)]
            for nx in range(_ceil(min(c[0] for c in corners)), _floor(max(c[0] for c in corners)) + 1):
                for ny in range(_ceil(min(c[1] for c in corners)), _floor(max(c[1] for c in corners)) + 1):
                    W = (nx - Q[0], ny - Q[1])  # a D - b E + t nu = W
                    # cross with nu: a cD - b cE = W x nu
                    rhs = _cross(W, nu)
                    for t in _t_range_values(D, E, nu, W, cD, cE, rhs, i, j, (nx, ny), curve):
                        if 0 < abs(t) < best:
                            best = abs(t)
    return best


def _t_range_values(D, E, nu, W, cD, cE, rhs, i, j, n, curve):
    """Extreme values of t over solutions (a, b) in [0,1]^2 of a D - b E + t nu = W."""
    # t as a function of (a, b): dot with a vector orthogonal to... use D x: t = (W - aD + bE) x D? pick any.
    # Solutions form the segment {a cD - b cE = rhs} in the unit square; t is affine on it.
    pts = []
    if cD != 0:
        for b in (Fraction(0), Fraction(1)):
            a = (rhs + b * cE) / cD
            if 0 <= a <= 1:
                pts.append((a, b))
    if cE != 0:
        for a in (Fraction(0), Fraction(1)):
            b = (a * cD - rhs) / cE
            if 0 <= b <= 1:
                pts.append((a, b))
    vals = []
    for a, b in pts:
        ru = (W[0] - a * D[0] + b * E[0], W[1] - a * D[1] + b * E[1])
        t = ru[0] / nu[0] if nu[0] != 0 else ru[1] / nu[1]
        trivial = (i == j and n == (0, 0) and a == b) or (
            a == 1 and b == 0 and (j - i) % curve.m == 1 % curve.m and _shares(curve, i, j, n, "end")) or (
            a == 0 and b == 1 and (i - j) % curve.m == 1 % curve.m and _shares(curve, i, j, n, "start"))
        if t == 0 and trivial:
            continue
        vals.append(t)
    if len(vals) >= 2 and min(vals) < 0 < max(vals):
        vals.append(Fraction(0))
    return vals


def _shares(curve, i, j, n, which) -> bool:
    if which == "end":
        a, b = curve.vertex(i + 1), curve.vertex(j)
    else:
        a, b = curve.vertex(i), curve.vertex(j + 1)
    return (a[0] - b[0], a[1] - b[1]) == n


def insert_braid(flow: SuspensionFlow, curve: PLCurve, word: Sequence[int],
                 width: Fraction | None = None, strands: int | None = None) -> PLCurve:
    """Replace the curve by the closure of a braid inside a thin tube around it.

    ``word`` lists signed generators: +i is a positive crossing between
    strand positions i-1 and i (1-based i), -i a negative one. Strands are the
    translates curve + o_p nu; the crossings are placed on the longest
    segment, with the over strand lifted to height +1/8 and the under strand
    lowered to -1/8 on the crossing segments. For a crossing of sign e the
    over strand is the one of smaller slope when e > 0 and of larger slope
    when e < 0 (slopes compared in the sign of the host curve).
    """
    word = list(word)
    need = max((abs(g) for g in word), default=0) + 1
    s_count = strands if strands is not None else need
    if s_count < need:
        raise ValueError("braid word uses more strands than given")
    if any(g == 0 for g in word):
        raise ValueError("generator indices start at 1")
    nu = transverse_vector(curve)
    d_nu = self_distance(curve, nu)
    w = Fraction(width) if width is not None else d_nu / 64
    if w <= 0:
        raise ValueError("tube width must be positive")
    if 2 * w >= d_nu:
        raise TubeTooWide(f"tube width {w} is not below half the self-distance {d_nu}")
    if not word and s_count == 1:
        return curve
    sign = classify_sign(flow, curve)
    sg = 1 if sign == "positive" else -1
    offsets = [(2 * j - (s_count - 1)) * w / s_count for j in range(s_count)]
    m = curve.m
    host = max(range(m), key=lambda i: (abs(curve.direction(i)[0]) + abs(curve.direction(i)[1]), -i))
    # permutation of positions across the host segment
    perm = list(range(s_count))  # perm[p] = position at the end for start position p
    pos_of = list(range(s_count))
    for g in word:
        p = abs(g) - 1
        a = pos_of.index(p)
        b = pos_of.index(p + 1)
        pos_of[a], pos_of[b] = p + 1, p
    perm = pos_of
    # closure must be one component
    seen, p = set(), 0
    while p not in seen:
        seen.add(p)
        p = perm[p]
    if len(seen) != s_count:
        raise ValueError("braid closure has more than one component")

    L = len(word)
    P0, Dh = curve.vertex(host), curve.direction(host)

    def at(tau, off):
        return (P0[0] + tau * Dh[0] + off * nu[0], P0[1] + tau * Dh[1] + off * nu[1])

    zones = []
    for z in range(L):
        a = Fraction(1, 4) + Fraction(z, 2 * L) + Fraction(1, 8 * L)
        b = Fraction(1, 4) + Fraction(z + 1, 2 * L) - Fraction(1, 8 * L)
        zones.append((a, b))

    verts: list[Point] = []
    hts: list[Fraction] = []
    start_pos = 0
    pos = start_pos
    shift = (Fraction(0), Fraction(0))
    for lap in range(s_count):
        # walk the host segment from tau = 0 at the current position
        off = offsets[pos]
        verts.append((at(0, off)[0] + shift[0], at(0, off)[1] + shift[1]))
        hts.append(Fraction(0))
        cur = pos
        for z, g in enumerate(word):
            p = abs(g) - 1
            if cur not in (p, p + 1):
                continue
            other = p + 1 if cur == p else p
            a, b = zones[z]
            mine = (at(b, offsets[other])[0] - at(a, offsets[cur])[0], at(b, offsets[other])[1] - at(a, offsets[cur])[1])
            theirs = (at(b, offsets[cur])[0] - at(a, offsets[other])[0], at(b, offsets[cur])[1] - at(a, offsets[other])[1])
            sm = frame_slope(flow, mine).value * sg
            st = frame_slope(flow, theirs).value * sg
            over_is_mine = (sm > st) if g < 0 else (sm < st)
            hz = Fraction(1, 8) if over_is_mine else Fraction(-1, 8)
            for tau, o in ((a, offsets[cur]), (b, offsets[other])):
                pt = at(tau, o)
                verts.append((pt[0] + shift[0], pt[1] + shift[1]))
                hts.append(hz)
            cur = other
        # rest of the curve, translated to the exit position
        off = offsets[cur]
        for r in range(1, m):
            v = curve.vertex(host + r)
            verts.append((v[0] + off * nu[0] + shift[0], v[1] + off * nu[1] + shift[1]))
            hts.append(Fraction(0))
        shift = (shift[0] + curve.homology.x, shift[1] + curve.homology.y)
        pos = cur
    assert pos == start_pos
    H = HomologyClass(s_count * curve.homology.x, s_count * curve.homology.y)
    # drop collinear duplicates that would create zero-length segments
    out = PLCurve(tuple(verts), H, tuple(hts), name=(curve.name + "+braid") if curve.name else "braid")
    return out
