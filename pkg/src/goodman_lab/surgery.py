"""Surgery annuli on suspension flows, thin surgery profiles, the surgery
differential and the cone-contraction certificate.

Annuli are built around straight curves, so the leaves of both foliations
have constant slope and the frame functions a, b, c, d are constants in
Q(sqrt D). This makes every entry of the differential exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .curves import PLCurve, check_steadiness, classify_sign, NotEmbedded
from .exact_algebra import (ExtendedSlope, HomologyClass, Mat2Z, QuadExt, sign_of,
                           twist_matrix)
from .flow_model import SuspensionFlow, frame_slope


class LeafUnsteady(ValueError):
    pass


class DegenerateFrame(ValueError):
    pass


class QTooSmall(ValueError):
    pass


class WidthNotContracting(ValueError):
    pass


class EpsilonInfeasible(ValueError):
    pass


class InvalidProfile(ValueError):
    pass


def _det(v, w):
    return v[0] * w[1] - v[1] * w[0]


@dataclass(frozen=True)
class SurgeryAnnulus:
    flow: SuspensionFlow
    curve: PLCurve
    width: Fraction
    K_slope: ExtendedSlope
    sign: str
    T0: int
    H_slope: ExtendedSlope
    k_dir: tuple[QuadExt, QuadExt]
    frame: tuple[QuadExt, QuadExt, QuadExt, QuadExt]  # a, b, c, d

    @property
    def D(self) -> QuadExt:
        a, b, c, d = self.frame
        return a * d + b * c

    def cone_at_exit(self) -> tuple[QuadExt, QuadExt]:
        """Slope interval of the cu cone after one first return (flow factor lam^-2T0).

        Slopes are read in the mirrored frame for negative annuli, so the
        interval always runs from the K slope (< 0) to the H slope (> 0).
        """
        f = self.flow.lam_power(-2 * self.T0)
        k, h = self.K_slope.value, self.H_slope.value
        if self.sign == "negative":
            k, h = -k, -h
        return (k * f, h * f)


def build_annulus(flow: SuspensionFlow, curve: PLCurve, width, K_slope: ExtendedSlope) -> SurgeryAnnulus:
    """Parallel-leaf annulus {curve + k W v : k in [0, 1]} with K leaves along v.

    v is the fiber direction of slope K_slope, normalized to sup norm one.
    """
    width = Fraction(width)
    if width <= 0:
        raise ValueError("annulus width must be positive")
    if curve.m != 1 and len({_norm_dir(curve.direction(i)) for i in range(curve.m)}) != 1:
        raise ValueError("annuli are built around constant-slope curves")
    sign = classify_sign(flow, curve)
    if sign == "mixed":
        raise ValueError("base curve must be positive or negative")
    rep = check_steadiness(flow, curve, with_slack=False)
    if not rep.steady:
        raise LeafUnsteady("base leaf is not steady")
    if K_slope.is_infinite or K_slope.sign() == 0:
        raise DegenerateFrame("K leaves must be transverse to both foliations")
    h_sign = 1 if sign == "positive" else -1
    if K_slope.sign() != -h_sign:
        raise ValueError("K slope must have the sign opposite to the H leaves")
    H = curve.homology
    hvec = (QuadExt(H.x, 0, flow.D), QuadExt(H.y, 0, flow.D))
    H_slope = frame_slope(flow, (H.x, H.y))
    s, u = flow.stable_dir, flow.unstable_dir
    kval = K_slope.value
    v = (kval * s[0] + u[0], kval * s[1] + u[1])
    sup = max(abs(v[0]), abs(v[1]))
    v = (v[0] / sup, v[1] / sup)
    a, b = flow.frame_coords(hvec)
    al, be = flow.frame_coords(v)
    # reverse e^s or e^u so that a, b > 0; negative annuli use the mirrored e^u
    if a.sign() < 0:
        a, al = -a, -al
    if b.sign() < 0:
        b, be = -b, -be
    if al.sign() < 0:
        v = (-v[0], -v[1])
        al, be = -al, -be
    c, d = al * width, -be * width
    if not (a.sign() > 0 and b.sign() > 0 and c.sign() > 0 and d.sign() > 0):
        raise DegenerateFrame("frame coefficients a, b, c, d are not all positive")
    # the strip is embedded iff its transverse extent stays below one period
    area = abs(_det(hvec, (v[0] * width, v[1] * width)))
    if not area < 1:
        raise NotEmbedded(f"annulus of width {width} overlaps itself")
    A = flow.monodromy
    T0 = None
    hv = (H.x, H.y)
    img = hv
    for k in range(1, 64):
        img = A.apply(img)
        if _det(hv, img) != 0:
            T0 = k
            break
    if T0 is None:
        raise DegenerateFrame("annulus never returns to itself")
    return SurgeryAnnulus(flow, curve, width, K_slope, sign, T0, H_slope, v, (a, b, c, d))


def _norm_dir(d):
    g = max(abs(d[0]), abs(d[1]))
    return (d[0] / g, d[1] / g)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class SurgeryProfile:
    """Piecewise-linear twist function rho on I = [0, 1].

    ``breakpoints`` are (k, rho(k)) pairs with k increasing from 0 to 1.
    J is the plateau, the single interval where rho' = R0.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    R0: Fraction
    J: tuple[Fraction, Fraction] | None
    delta: Fraction
    R: Fraction
    name: str = ""

    def __post_init__(self):
        bp = tuple((Fraction(k), Fraction(v)) for k, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "R0", Fraction(self.R0))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "R", Fraction(self.R))
        if self.J is not None:
            object.__setattr__(self, "J", (Fraction(self.J[0]), Fraction(self.J[1])))
        if bp[0][0] != 0 or bp[-1][0] != 1 or any(b[0] >= c[0] for b, c in zip(bp, bp[1:])):
            raise InvalidProfile("breakpoints must increase from 0 to 1")

    @property
    def coefficient(self) -> int:
        n = self.breakpoints[0][1] - self.breakpoints[-1][1]
        if n.denominator != 1:
            raise InvalidProfile("rho(0) - rho(1) must be an integer")
        return int(n)

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """(k_lo, k_hi, rho(k_lo), rho') for each linear piece."""
        out = []
        for (k0, r0), (k1, r1) in zip(self.breakpoints, self.breakpoints[1:]):
            out.append((k0, k1, r0, (r1 - r0) / (k1 - k0)))
        return out

    def rho(self, k) -> Fraction:
        k = Fraction(k)
        for k0, k1, r0, slope in self.pieces():
            if k0 <= k <= k1:
                return r0 + slope * (k - k0)
        raise ValueError("k outside [0, 1]")

    def rho_prime(self, k, side: int = 1) -> Fraction:
        k = Fraction(k)
        for k0, k1, r0, slope in self.pieces():
            if (k0 <= k < k1) if side > 0 else (k0 < k <= k1):
                return slope
        return self.pieces()[-1 if side > 0 else 0][3]

    def is_identity(self) -> bool:
        return all(p[3] == 0 for p in self.pieces()) and self.coefficient == 0

    def validate(self, sign: str) -> None:
        pcs = self.pieces()
        if self.is_identity():
            return
        slopes = [p[3] for p in pcs]
        if sign == "positive" and any(s > 0 for s in slopes):
            raise InvalidProfile("rho must be non-increasing on a positive annulus")
        if sign == "negative" and any(s < 0 for s in slopes):
            raise InvalidProfile("rho must be non-decreasing on a negative annulus")
        if (self.R0 < 0) != (sign == "positive") or self.R0 == 0:
            raise InvalidProfile("plateau slope has the wrong sign")
        if any(abs(s) > abs(self.R0) for s in slopes):
            raise InvalidProfile("|rho'| exceeds |R0|")
        if pcs[0][3] != 0 or pcs[-1][3] != 0:
            raise InvalidProfile("rho must be constant near the boundary")
        if self.breakpoints[0][1].denominator != 1 or self.breakpoints[-1][1].denominator != 1:
            raise InvalidProfile("rho must be integer valued near the boundary")
        n = self.coefficient
        if (n > 0) != (sign == "positive"):
            raise InvalidProfile("coefficient sign does not match the annulus")
        if self.J is None or not any(p[0] == self.J[0] and p[1] == self.J[1] and p[3] == self.R0 for p in pcs):
            raise InvalidProfile("J must be a piece on which rho' = R0")

    def thin_data(self) -> tuple[Fraction, Fraction]:
        """(max image length of a component of rho(I \\ J), |R0|)."""
        if self.J is None:
            return Fraction(0), abs(self.R0)
        r_J0, r_J1 = self.rho(self.J[0]), self.rho(self.J[1])
        r0, r1 = self.breakpoints[0][1], self.breakpoints[-1][1]
        return max(abs(r_J0 - r0), abs(r1 - r_J1)), abs(self.R0)

    def is_thin(self) -> bool:
        length, slope = self.thin_data()
        return length < self.delta and slope > self.R

    def to_json(self) -> dict:
        fr = lambda x: [x.numerator, x.denominator]  # noqa: E731
        return {"breakpoints": [[fr(k), fr(v)] for k, v in self.breakpoints], "R0": fr(self.R0),
                "J": None if self.J is None else [fr(self.J[0]), fr(self.J[1])],
                "delta": fr(self.delta), "R": fr(self.R)}


def thin_profile(n: int, delta, R, sign: str = "positive") -> SurgeryProfile:
    """rho dropping by |n| with plateau slope 2R and two ramps of image length delta/2.

    Flat on [0, 1/8], ramp at slope R0/2, plateau at slope R0, ramp, flat to 1.
    """
    delta, R = Fraction(delta), Fraction(R)
    if n == 0:
        return identity_profile(delta, R)
    if (n > 0) != (sign == "positive"):
        raise InvalidProfile("coefficient sign does not match the annulus")
    if not 0 < delta < abs(n):
        raise InvalidProfile("need 0 < delta < |n|")
    R0 = -2 * R if sign == "positive" else 2 * R
    if (abs(n) + delta) / abs(R0) > Fraction(3, 4):
        raise InvalidProfile("profile does not fit in the unit interval")
    direction = -1 if sign == "positive" else 1
    k0 = Fraction(1, 8)
    ramp = delta / abs(R0)
    plateau = (abs(n) - delta) / abs(R0)
    k1, k2, k3 = k0 + ramp, k0 + ramp + plateau, k0 + 2 * ramp + plateau
    v1 = direction * delta / 2
    v2 = v1 + direction * (abs(n) - delta)
    v3 = Fraction(-n)
    bp = ((Fraction(0), Fraction(0)), (k0, Fraction(0)), (k1, v1), (k2, v2), (k3, v3), (Fraction(1), v3))
    return SurgeryProfile(bp, R0, (k1, k2), delta, R, name=f"thin(n={n})")


def identity_profile(delta=Fraction(1, 16), R=Fraction(1)) -> SurgeryProfile:
    return SurgeryProfile(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))), Fraction(0), None,
                          delta, R, name="identity")


# --------------------------------------------------------------------------
# differential


@dataclass(frozen=True)
class SurgeryDifferential:
    """d sigma in the basis (flow, e^s, e^u): [[1, S, U], [0, m, n], [0, p, q]]."""

    k: Fraction
    rho_prime: Fraction
    S: QuadExt
    U: QuadExt
    m: QuadExt
    n: QuadExt
    p: QuadExt
    q: QuadExt

    def block(self):
        return ((self.m, self.n), (self.p, self.q))

    def det(self) -> QuadExt:
        return self.m * self.q - self.n * self.p

    def full(self):
        z = self.m * 0
        one = z + 1
        return ((one, self.S, self.U), (z, self.m, self.n), (z, self.p, self.q))


def differential(annulus: SurgeryAnnulus, profile: SurgeryProfile, k, side: int = 1) -> SurgeryDifferential:
    """Exact (m, n, p, q) at annulus coordinate k from the frame product formula.

    For constant frames a(h + rho, k) = a(h, k) and so on, which gives
    m = 1 + ab rho'/D, n = -a^2 rho'/D, p = b^2 rho'/D, q = 1 - ab rho'/D with
    D = ad + bc. Negative annuli are read in the frame with e^u reversed,
    where rho' enters with the opposite sign.
    """
    a, b, c, d = annulus.frame
    D = a * d + b * c
    if D.sign() == 0:
        raise DegenerateFrame("ad + bc vanishes")
    rp = profile.rho_prime(k, side)
    r = rp if annulus.sign == "positive" else -rp
    x = a * b * r / D
    m = 1 + x
    n = -(a * a) * r / D
    p = (b * b) * r / D
    q = 1 - x
    zero = QuadExt(0, 0, annulus.flow.D)
    # sigma fixes the flow direction and the foliations are transverse, so no
    # flow component appears for straight leaves
    return SurgeryDifferential(Fraction(k), rp, zero, zero, m, n, p, q)


# --------------------------------------------------------------------------
# thinness certificate


@dataclass
class ThinnessCertificate:
    epsilon: Fraction
    delta: Fraction
    R: Fraction
    q_min: QuadExt
    width_L_factor_max: float
    M_T: float
    m_bar: float
    verdict: str
    L: int
    T0: int
    grid: list[Fraction]
    plateau_bound: QuadExt | None
    piece_factors: list[float] = field(default_factory=list)
    surgery_factor_max: float = 1.0

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def _width_factor(diff: SurgeryDifferential, L, lo: QuadExt, hi: QuadExt) -> QuadExt:
    """(mq - np) / (|pL max + q| |pL min + q|)."""
    det = diff.det()
    A1 = diff.p * L * hi + diff.q
    A2 = diff.p * L * lo + diff.q
    if A1.sign() == 0 or A2.sign() == 0:
        return None
    return det / (abs(A1) * abs(A2))


def certify_thinness(annulus: SurgeryAnnulus, profile: SurgeryProfile, epsilon,
                     L=None, L_cap: int = 2 ** 40) -> ThinnessCertificate:
    """Check q >= 1 - eps, the plateau bound, width_L contraction and the cu translation.

    With ``L=None`` the smallest power of two up to ``L_cap`` that contracts
    every sheared piece is used. Pieces with rho' = 0 act as the identity and
    are exempt from the width test (their factor is exactly 1).
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    flow = annulus.flow
    T0 = annulus.T0
    # lam^(-T0/2) / (1 - eps) < 1  <=>  lam^(-T0) < (1 - eps)^2
    if not flow.lam_power(-T0) < (1 - eps) ** 2:
        raise EpsilonInfeasible(f"lam^(-T0/2)/(1 - eps) >= 1 for eps = {eps}")
    ret = float(flow.lam_power(-2 * T0))
    lo, hi = annulus.cone_at_exit()
    grid = sorted({k for k, _ in profile.breakpoints} |
                  {(k0 + k1) / 2 for k0, k1, _, _ in profile.pieces()})
    if profile.is_identity():
        q = differential(annulus, profile, Fraction(1, 2)).q
        return ThinnessCertificate(eps, profile.delta, profile.R, q, ret, 0.0, 0.0, "certified",
                                   1, T0, grid, None, [ret], 1.0)
    profile.validate(annulus.sign)
    diffs = [differential(annulus, profile, (k0 + k1) / 2) for k0, k1, _, _ in profile.pieces()]
    # both one-sided values at every breakpoint are covered by the piece midpoints
    q_min = min(dd.q for dd in diffs)
    if not q_min >= 1 - eps:
        raise QTooSmall(f"q_min = {float(q_min):.6g} < 1 - eps")
    a, b, _, _ = annulus.frame
    plateau_bound = profile.R * a * b / annulus.D
    if not plateau_bound > 1:
        raise QTooSmall(f"plateau bound R ab/(ad + bc) = {float(plateau_bound):.6g} <= 1")
    if not profile.is_thin():
        raise QTooSmall("profile is not (delta, R)-thin")

    active = [dd for dd in diffs if dd.rho_prime != 0]
    Ls = [Fraction(L)] if L is not None else [Fraction(2) ** j for j in range(L_cap.bit_length())]
    chosen, fs = None, None
    for Lv in Ls:
        fs = [_width_factor(dd, Lv, lo, hi) for dd in active]
        if all(f is not None and f < 1 for f in fs):
            chosen = Lv
            break
    if chosen is None:
        raise WidthNotContracting(f"width_L factor >= 1 for every L tried up to {Ls[-1]}")
    surgery_max = max(float(f) for f in fs)
    piece_factors = [ret * (float(_width_factor(dd, chosen, lo, hi)) if dd.rho_prime != 0 else 1.0)
                     for dd in diffs]
    # S = U = 0 for straight frames, so the cu-slope translation bound vanishes
    M_T = max(float(abs(dd.S + dd.U)) for dd in diffs)
    m_bar = M_T / (1 - float(flow.lam) ** (-T0 / 2) / (1 - float(eps)))
    return ThinnessCertificate(eps, profile.delta, profile.R, q_min, max(piece_factors), M_T, m_bar,
                               "certified", chosen, T0, grid, plateau_bound, piece_factors, surgery_max)


# --------------------------------------------------------------------------
# cone iteration


@dataclass
class ConeTrajectory:
    widths: list[float]
    intervals: list[tuple[QuadExt, QuadExt]]
    decreasing: bool
    ratio: float
    bound: float
    within_bound: bool


def _mobius(dd: SurgeryDifferential, s: QuadExt) -> QuadExt:
    return (dd.m * s + dd.n) / (dd.p * s + dd.q)


def cone_iterate(annulus: SurgeryAnnulus, profile: SurgeryProfile, certificate: ThinnessCertificate,
                 initial, steps: int = 20) -> ConeTrajectory:
    """Alternate one return of the flow and one pass through the surgery annulus.

    ``initial`` is a width w (the exit cone [K, H] rescaled to width w) or an
    explicit (lo, hi) slope interval. Sheared pieces are visited cyclically.
    Everything is exact; widths are reported as floats. The ratio bound is
    2 lam^(-steps T0).
    """
    if certificate is None or not certificate.certified:
        raise ValueError("cone iteration needs a certified surgery")
    flow = annulus.flow
    f = flow.lam_power(-2 * annulus.T0)
    k_lo, k_hi = annulus.cone_at_exit()
    k_lo, k_hi = k_lo / f, k_hi / f
    if isinstance(initial, tuple):
        lo, hi = (x if isinstance(x, QuadExt) else QuadExt(x, 0, flow.D) for x in initial)
    else:
        scale = Fraction(initial) / (k_hi - k_lo)
        lo, hi = k_lo * scale, k_hi * scale
    if profile.is_identity():
        diffs = [differential(annulus, profile, Fraction(1, 2))]
    else:
        diffs = [differential(annulus, profile, (k0 + k1) / 2) for k0, k1, _, _ in profile.pieces()]
        diffs = [dd for dd in diffs if dd.rho_prime != 0] or diffs
    intervals = [(lo, hi)]
    for step in range(steps):
        lo, hi = lo * f, hi * f
        dd = diffs[step % len(diffs)]
        a1, a2 = dd.p * lo + dd.q, dd.p * hi + dd.q
        if a1.sign() == 0 or a1.sign() != a2.sign():
            raise WidthNotContracting("surgery map sends the cone through infinity")
        x, y = _mobius(dd, lo), _mobius(dd, hi)
        lo, hi = (x, y) if x <= y else (y, x)
        intervals.append((lo, hi))
    widths = [float(h - l) for l, h in intervals]
    bound = 2 * float(flow.lam) ** (-steps * annulus.T0)
    w0 = intervals[0][1] - intervals[0][0]
    if w0.sign() == 0:
        return ConeTrajectory(widths, intervals, True, 0.0, bound, True)
    exact = (intervals[-1][1] - intervals[-1][0]) / w0
    dec = all(b < a for a, b in zip(widths, widths[1:]))
    return ConeTrajectory(widths, intervals, dec, float(exact), bound,
                          exact < 2 * flow.lam_power(-steps * annulus.T0))


# --------------------------------------------------------------------------
# twisted return maps


def compose_return_map(flow: SuspensionFlow, c: HomologyClass, n: int) -> Mat2Z:
    """First return of the surgered suspension: monodromy times the n-th twist along c."""
    return flow.monodromy @ twist_matrix(c, n)


@dataclass
class TwistRow:
    monodromy: tuple[int, int, int, int]
    c: tuple[int, int]
    sign: str
    n: int
    trace: int
    hyperbolic: bool
    predicted: bool


def curve_sign(flow: SuspensionFlow, c: HomologyClass) -> str:
    sl = frame_slope(flow, (c.x, c.y))
    return "positive" if sl.sign() > 0 else "negative"


def primitive_classes(bound: int) -> list[HomologyClass]:
    out = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if (x, y) != (0, 0) and math.gcd(x, y) == 1 and (y > 0 or (y == 0 and x > 0)):
                out.append(HomologyClass(x, y))
    out.sort(key=lambda h: (abs(h.x) + abs(h.y), h.y, h.x))
    return out


def twist_battery(monodromies: Sequence[Mat2Z], per_sign: int = 8, n_max: int = 20,
                   wrong_sign: bool = True, class_bound: int = 6) -> list[TwistRow]:
    """Traces of f tau_c^n over classes of each sign and n of the predicted sign.

    With ``wrong_sign`` the opposite sign of n is tabulated too (predicted=False).
    """
    rows = []
    for A in monodromies:
        flow = SuspensionFlow(A)
        pos, neg = [], []
        for h in primitive_classes(class_bound):
            (pos if curve_sign(flow, h) == "positive" else neg).append(h)
        for label, classes, sgn in (("positive", pos[:per_sign], 1), ("negative", neg[:per_sign], -1)):
            for h in classes:
                for mag in range(1, n_max + 1):
                    for pred in ((True, False) if wrong_sign else (True,)):
                        n = sgn * mag if pred else -sgn * mag
                        M = compose_return_map(flow, h, n)
                        rows.append(TwistRow(A.key(), (h.x, h.y), label, n, M.trace,
                                             abs(M.trace) > 2, pred))
    return rows
