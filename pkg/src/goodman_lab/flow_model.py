"""Suspension flows of hyperbolic torus maps, the linear local model near a
closed orbit, and numerical averaging of a metric along orbits.

Conventions
-----------
Fiber vectors are written in the standard basis of R^2. The unstable
direction ``u`` satisfies ``A u = lam u`` and has positive second coordinate;
the stable direction ``s`` satisfies ``A s = s / lam`` and is oriented so that
``det(s, u) < 0``, which makes ``(e^s, flow, e^u)`` a positive frame for the
orientation ``(x, y, t)``. A fiber vector ``v = a s + c u`` has slope ``a / c``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact_algebra import ExtendedSlope, Mat2Z, QuadExt, sign_of, squarefree_decomposition


class ZeroDirection(ValueError):
    pass


class NotHyperbolic(ValueError):
    pass


class EscapedQuadrant(ValueError):
    pass


class NoSignChange(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class TTooSmall(ValueError):
    pass


def _det(v, w):
    return v[0] * w[1] - v[1] * w[0]


@dataclass(frozen=True)
class SuspensionFlow:
    monodromy: Mat2Z
    lam: QuadExt = field(init=False)
    lam_inv: QuadExt = field(init=False)
    unstable_dir: tuple[QuadExt, QuadExt] = field(init=False)
    stable_dir: tuple[QuadExt, QuadExt] = field(init=False)
    D: int = field(init=False)

    def __post_init__(self):
        A = self.monodromy
        if A.det != 1:
            raise NotHyperbolic("monodromy must lie in SL(2, Z)")
        tr = A.trace
        if tr <= 2:
            # |tr| > 2 with tr < -2 has negative eigenvalues; only tr > 2 is modelled
            raise NotHyperbolic(f"need trace > 2, got {tr}")
        f, D = squarefree_decomposition(tr * tr - 4)
        lam = QuadExt(Fraction(tr, 2), Fraction(f, 2), D)
        lam_inv = lam.conjugate()
        sgn = 1 if A.c > 0 else -1
        u = (sgn * (lam - A.d), QuadExt(sgn * A.c, 0, D))
        s = (sgn * (lam_inv - A.d), QuadExt(sgn * A.c, 0, D))
        if _det(s, u).sign() > 0:
            s = (-s[0], -s[1])
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "lam_inv", lam_inv)
        object.__setattr__(self, "unstable_dir", u)
        object.__setattr__(self, "stable_dir", s)
        object.__setattr__(self, "D", D)

    @classmethod
    def from_rows(cls, rows) -> "SuspensionFlow":
        return cls(Mat2Z.from_rows(rows))

    def frame_coords(self, v) -> tuple[QuadExt, QuadExt]:
        """(a, c) with v = a s + c u."""
        s, u = self.stable_dir, self.unstable_dir
        det_su = _det(s, u)
        a = _det(v, u) / det_su
        c = _det(s, v) / det_su
        return a, c

    def lam_power(self, k: int) -> QuadExt:
        return self.lam ** k

    def float_frame(self) -> tuple[np.ndarray, np.ndarray]:
        s = np.array([float(x) for x in self.stable_dir])
        u = np.array([float(x) for x in self.unstable_dir])
        return s, u


def _integer_time(t) -> int:
    t = Fraction(t)
    if t.denominator != 1:
        raise ValueError("frame slopes are exact only at integer heights")
    return int(t)


def frame_slope(flow: SuspensionFlow, direction, t=0) -> ExtendedSlope:
    """Slope a/c of ``direction = a s + c u`` scaled by lam^(2t)."""
    if all(sign_of(x) == 0 for x in direction):
        raise ZeroDirection("zero fiber direction")
    k = _integer_time(t)
    a, c = flow.frame_coords(direction)
    if c.sign() == 0:
        return ExtendedSlope.infinite()
    return ExtendedSlope(a / c * flow.lam_power(2 * k))


def slope_transport(flow: SuspensionFlow, slope: ExtendedSlope, k: int) -> ExtendedSlope:
    """Slope of the image after k returns: lam^(-2k) * slope."""
    if k < 0:
        raise ValueError("return count must be nonnegative")
    if slope.is_infinite:
        return slope
    return ExtendedSlope(slope.value * flow.lam_power(-2 * k))


# --------------------------------------------------------------------------
# local hyperbolic model


@dataclass(frozen=True)
class LocalHyperbolicModel:
    """The map (u, s) -> (lam u, s / lam) on the positive quadrant.

    The fundamental domain is 1 <= u < lam. The transversal is the segment
    {u = lam, 0 < s <= s_max}, identified with {u = 1} through the model map.
    Trajectories of the constant slope line field ds/du = m are followed from
    u = lam down to u = 1, which is the direction in which the unstable line
    field (m = 0) spirals into the orbit trace s = 0.
    """

    lam: Fraction | QuadExt
    s_max: Fraction = Fraction(2)
    quadrant: tuple[int, int] = (1, 1)

    def __post_init__(self):
        lam = self.lam if isinstance(self.lam, QuadExt) else Fraction(self.lam)
        if sign_of(lam - 1) <= 0:
            raise ValueError("model eigenvalue must exceed 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "s_max", Fraction(self.s_max))

    def model_map(self, point):
        u, s = point
        return (self.lam * u, s / self.lam)


def local_first_return(model: LocalHyperbolicModel, m, x):
    """First return f_m(x) of the slope-m line field to the transversal.

    ``m`` is a rational (or QuadExt) slope, or an ExtendedSlope; the infinite
    slope (stable leaves) never returns. Exact for exact inputs, and works on
    floats too.
    """
    if isinstance(m, ExtendedSlope):
        if m.is_infinite:
            raise EscapedQuadrant("stable leaves never return to the transversal")
        m = m.value
    if sign_of(x) <= 0 or sign_of(x - model.s_max) > 0:
        raise ValueError("x must lie on the transversal (0, s_max]")
    lam = model.lam
    if isinstance(x, float) or isinstance(m, float):
        lam = float(lam)
    s_end = x - m * (lam - 1)
    if sign_of(s_end) <= 0:
        raise EscapedQuadrant("trajectory left the quadrant through the unstable leaf")
    image = s_end / lam
    if sign_of(image - model.s_max) > 0:
        raise EscapedQuadrant("trajectory left the model domain")
    return image


@dataclass(frozen=True)
class InvariantSlope:
    m: float
    x: object
    residual: float
    iterations: int


def find_invariant_slope(family: Callable, x, target: Callable | None = None,
                         m_lo: float | None = None, m_hi: float = 0.0,
                         tolerance: float = 1e-9, max_iter: int = 200) -> InvariantSlope:
    """Bisect on m for family(m, x) == target(x).

    ``family`` may be a LocalHyperbolicModel. The displacement
    family(m, x) - target(x) must change sign between m_lo and m_hi. For a
    model, m_lo defaults to the steepest slope whose return still lands on
    the transversal (the return there is the far endpoint s_max).
    """
    if isinstance(family, LocalHyperbolicModel):
        model = family
        family = lambda m, y: local_first_return(model, m, y)  # noqa: E731
        if m_lo is None:
            lam = float(model.lam)
            m_lo = (float(x) - lam * float(model.s_max)) / (lam - 1)
    if m_lo is None:
        m_lo = -4.0
    target = target or (lambda y: y)
    xf = float(x)
    goal = float(target(x))

    def g(m):
        return float(family(m, xf)) - goal

    g_lo, g_hi = g(m_lo), g(m_hi)
    if g_lo == 0:
        return InvariantSlope(m_lo, x, 0.0, 0)
    if g_hi == 0:
        return InvariantSlope(m_hi, x, 0.0, 0)
    if (g_lo > 0) == (g_hi > 0):
        raise NoSignChange(f"no sign change on [{m_lo}, {m_hi}]: {g_lo}, {g_hi}")
    lo, hi = m_lo, m_hi
    it = 0
    while it < max_iter and hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        it += 1
        if gm == 0:
            lo = hi = mid
            break
        if (gm > 0) == (g_lo > 0):
            lo, g_lo = mid, gm
        else:
            hi = mid
    m = 0.5 * (lo + hi)
    return InvariantSlope(m, x, abs(g(m)), it)


# --------------------------------------------------------------------------
# metric averaging


@dataclass
class MetricSample:
    """Fiber metrics on the grid heights i/n_t and points (a/n, b/n).

    ``g`` has shape (n_t, n, n, 2, 2). With ``basis == "standard"`` the
    matrices act on standard fiber coordinates; with ``basis == "frame"`` they
    act on (stable, unstable) coordinates, where the monodromy pullback is a
    diagonal rescaling and no cancellation occurs.
    """

    g: np.ndarray
    flow: SuspensionFlow
    basis: str = "standard"

    @property
    def n_t(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.g.shape[1]

    @classmethod
    def flat(cls, flow: SuspensionFlow, n: int = 64, n_t: int = 16) -> "MetricSample":
        g = np.broadcast_to(np.eye(2), (n_t, n, n, 2, 2)).copy()
        return cls(g, flow)

    @classmethod
    def suspension(cls, flow: SuspensionFlow, n: int = 64, n_t: int = 16) -> "MetricSample":
        """The instantaneous metric lam^(-2t) a^2 + lam^(2t) c^2 for v = a s + c u."""
        lam = float(flow.lam)
        g = np.zeros((n_t, n, n, 2, 2))
        for i in range(n_t):
            t = i / n_t
            g[i, :, :, 0, 0] = lam ** (-2 * t)
            g[i, :, :, 1, 1] = lam ** (2 * t)
        return cls(g, flow, "frame")

    def _frame_matrix(self) -> np.ndarray:
        s, u = self.flow.float_frame()
        return np.column_stack([s, u])

    def in_frame(self) -> "MetricSample":
        if self.basis == "frame":
            return self
        P = self._frame_matrix()
        return MetricSample(np.einsum("ki,...kl,lj->...ij", P, self.g, P), self.flow, "frame")

    def in_standard(self) -> "MetricSample":
        if self.basis == "standard":
            return self
        Q = np.linalg.inv(self._frame_matrix())
        return MetricSample(np.einsum("ki,...kl,lj->...ij", Q, self.g, Q), self.flow, "standard")

    def is_positive_definite(self) -> bool:
        g = self.g
        sym = np.allclose(g[..., 0, 1], g[..., 1, 0], rtol=1e-12, atol=0.0)
        # Sylvester's criterion, scaled per sample so huge entries do not matter
        g00, g11, g01 = g[..., 0, 0], g[..., 1, 1], g[..., 0, 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = g01 * g01 / (g00 * g11)
        return bool(sym and np.all(g00 > 0) and np.all(g11 > 0) and np.all(corr < 1))


def _grid_permutation(A: Mat2Z, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps of p -> A p mod 1 on the grid (Z/n)^2."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return (A.a * i + A.b * j) % n, (A.c * i + A.d * j) % n


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("GOODMAN_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class AveragedMetric:
    sample: MetricSample
    T: Fraction
    lam_bar: float
    lam_bar_stable: float
    lam_bar_unstable: float
    margin: float
    quadrature_error: float
    C_empirical: float
    nodes_per_unit: int
    check_window: int


class _Pullbacks:
    """Frame-basis fields (phi^j)^* g0[idx] restricted to the source grid."""

    def __init__(self, g0: MetricSample):
        self.g = g0.in_frame().g
        self.flow = g0.flow
        self.lam = float(g0.flow.lam)
        self.perms: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def perm(self, j: int):
        if j not in self.perms:
            self.perms[j] = _grid_permutation(self.flow.monodromy ** j, self.g.shape[1])
        return self.perms[j]

    def __call__(self, j: int, idx: int) -> np.ndarray:
        pi, pj = self.perm(j)
        field = self.g[idx][pi, pj].copy()
        # A^j = diag(lam^-j, lam^j) in the frame basis
        field[..., 0, 0] *= self.lam ** (-2 * j)
        field[..., 1, 1] *= self.lam ** (2 * j)
        return field


def _simpson_coefficients(i: int, n_t: int, T: int, nodes_per_unit: int) -> dict[tuple[int, int], float]:
    """Simpson weights collected per (period j, height index) field.

    The integrand at node k is a convex combination of two sampled fields,
    so the composite rule is a linear combination of the distinct fields.
    """
    per_sample = nodes_per_unit // n_t
    h = 1.0 / nodes_per_unit
    total = T * nodes_per_unit
    coef: dict[tuple[int, int], float] = {}
    for k in range(total + 1):
        w = (1.0 if k in (0, total) else (4.0 if k % 2 else 2.0)) * h / 3.0
        node = i * per_sample + k  # tau_i + t_k in node units
        j, rem = divmod(node, nodes_per_unit)
        lo, off = divmod(rem, per_sample)
        frac = off / per_sample
        coef[(j, lo)] = coef.get((j, lo), 0.0) + w * (1 - frac)
        if off:
            key = (j, lo + 1) if lo + 1 < n_t else (j + 1, 0)
            coef[key] = coef.get(key, 0.0) + w * frac
    return coef


def _integrate_height(pull: "_Pullbacks", i: int, T: int, nodes_per_unit: int) -> np.ndarray:
    coef = _simpson_coefficients(i, pull.g.shape[0], T, nodes_per_unit)
    acc = np.zeros(pull.g.shape[1:])
    for key in sorted(coef):
        acc += coef[key] * pull(*key)
    return acc


def _pullback_integral(g0: MetricSample, T: int, nodes_per_unit: int) -> np.ndarray:
    """Composite Simpson for int_0^T (phi^t)^* g0 dt at every grid sample.

    Heights between samples are interpolated linearly; the pulled-back
    integrand is then piecewise linear with breaks on the node lattice, so
    every Simpson panel sees a single linear piece. Frame basis in and out.
    """
    n_t = g0.n_t
    if nodes_per_unit % (2 * n_t):
        raise ValueError("nodes per unit time must be a multiple of twice the height count")
    pull = _Pullbacks(g0)
    for j in range(T + 2):
        pull.perm(j)
    heights = range(n_t)
    workers = worker_count()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda i: _integrate_height(pull, i, T, nodes_per_unit), heights))
    else:
        parts = [_integrate_height(pull, i, T, nodes_per_unit) for i in heights]
    return np.stack(parts)


def _directional_margins(sample: MetricSample, window: int) -> tuple[float, float, float]:
    """Worst verified rates over transport times k / n_t, 1 <= k <= window * n_t.

    Returns (lam_bar_stable, lam_bar_unstable, C_empirical), where C_empirical
    is the largest ratio ||d phi^t v|| / (lam^-t ||v||) seen for stable v.
    """
    fr = sample.in_frame()
    flow = sample.flow
    A = flow.monodromy
    n_t, n = fr.n_t, fr.n
    lam = float(flow.lam)
    norms_s = fr.g[..., 0, 0]
    norms_u = fr.g[..., 1, 1]
    lb_s = lb_u = math.inf
    C_emp = 0.0
    perms = {}
    for i in range(n_t):
        for k in range(1, window * n_t + 1):
            j, r = divmod(i + k, n_t)
            t = k / n_t
            if j not in perms:
                perms[j] = _grid_permutation(A ** j, n)
            pi, pj = perms[j]
            # A^j s = lam^-j s and A^j u = lam^j u
            log_s = 0.5 * (np.log(norms_s[r][pi, pj]) - np.log(norms_s[i])) - j * math.log(lam)
            log_u = 0.5 * (np.log(norms_u[r][pi, pj]) - np.log(norms_u[i])) + j * math.log(lam)
            lb_s = min(lb_s, float(np.min(-log_s / t)))
            lb_u = min(lb_u, float(np.min(log_u / t)))
            C_emp = max(C_emp, float(np.max(log_s)) + t * math.log(lam))
    return math.exp(lb_s), math.exp(lb_u), math.exp(C_emp)


def metric_margin(sample: MetricSample, window: int = 2) -> tuple[float, float, float]:
    return _directional_margins(sample, window)


def average_metric(flow: SuspensionFlow, g0: MetricSample, T, nodes_per_unit: int = 256,
                   check_window: int = 2) -> AveragedMetric:
    """Average g0 along orbits for time T and verify instantaneous margins.

    The result is the time average (1/T) int_0^T (phi^t)^* g0 dt, which has
    the same margins as the unnormalized integral.
    """
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    if T.denominator != 1:
        raise ValueError("averaging time must be an integer number of periods")
    if g0.flow.monodromy != flow.monodromy:
        raise ValueError("metric sample belongs to a different flow")
    if not g0.is_positive_definite():
        raise NotPositiveDefinite("seed metric is not positive definite")
    Ti = int(T)
    fine = _pullback_integral(g0, Ti, nodes_per_unit)
    coarse = _pullback_integral(g0, Ti, nodes_per_unit // 2)
    scale = np.sqrt(np.abs(fine[..., 0, 0] * fine[..., 1, 1]))[..., None, None]
    err = float(np.max(np.abs(fine - coarse) / scale))
    out = MetricSample(fine / float(T), flow, "frame")
    if not out.is_positive_definite():
        raise NotPositiveDefinite("averaged metric lost positive definiteness")
    lb_s, lb_u, C_emp = _directional_margins(out, check_window)
    lam_bar = min(lb_s, lb_u)
    margin = math.log(lam_bar)
    if margin <= 0:
        raise TTooSmall(f"verified margin {margin:.3g} is not positive at T={T}")
    return AveragedMetric(out, T, lam_bar, lb_s, lb_u, margin, err, C_emp,
                          nodes_per_unit, check_window)
