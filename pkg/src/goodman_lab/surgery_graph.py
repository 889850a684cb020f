"""The directed graph G on SL(2, Z) gluing matrices with lower-left entry <= -1.

An edge v -> tau v comes from one horizontal surgery on the scalloped torus
along a curve of class (x0, y0), where tau is the positive or negative
single twist along (x0, y0). All checks here are exact integer algebra on
explicit bounded boxes.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .exact_algebra import HomologyClass, Mat2Z, twist_matrix


class BoxTooSmall(RuntimeError):
    pass


class InvalidVertex(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GVertex:
    matrix: Mat2Z

    def __post_init__(self):
        M = self.matrix
        if M.det != 1:
            raise InvalidVertex(f"det {M.det} != 1")
        if M.c > -1:
            raise InvalidVertex(f"lower-left entry {M.c} must be <= -1")

    @classmethod
    def of(cls, a, b, c, d) -> "GVertex":
        return cls(Mat2Z(a, b, c, d))

    @classmethod
    def g1(cls, a: int, d: int) -> "GVertex":
        return cls(Mat2Z(a, 1 - a * d, -1, d))

    @property
    def level(self) -> int:
        return -self.matrix.c

    def key(self):
        return self.matrix.key()

    def to_json(self):
        return [list(r) for r in self.matrix.rows()]


BRANCHES = ("positive", "negative")


def branch_valid(v: GVertex, w: tuple[int, int], branch: str) -> bool:
    M = v.matrix
    x0, y0 = w
    s = M.a * y0 - M.c * x0
    if y0 > 0:
        return False
    return s >= 0 if branch == "positive" else s <= 0


def edge_target(v: GVertex, w: tuple[int, int], branch: str) -> Mat2Z:
    """The displayed edge formula, written out entrywise."""
    a, b, c, d = v.matrix.key()
    x0, y0 = w
    e = 1 if branch == "positive" else -1
    s, t = a * y0 - c * x0, b * y0 - d * x0
    return Mat2Z(a + e * s * x0, b + e * t * x0, c + e * s * y0, d + e * t * y0)


@dataclass(frozen=True)
class GEdge:
    source: GVertex
    target: GVertex
    witness: HomologyClass
    branch: str

    def replay(self) -> bool:
        """target == twist_matrix(witness, +-1) @ source, recomputed exactly."""
        n = 1 if self.branch == "positive" else -1
        return (twist_matrix(self.witness, n) @ self.source.matrix).key() == self.target.key()

    def valid(self) -> bool:
        return branch_valid(self.source, tuple(self.witness), self.branch)

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "witness": [self.witness.x, self.witness.y], "branch": self.branch}


def make_edge(v: GVertex, w: tuple[int, int], branch: str) -> GEdge:
    if not branch_valid(v, w, branch):
        raise ValueError(f"witness {w} violates the {branch} branch at {v.key()}")
    return GEdge(v, GVertex(edge_target(v, w, branch)), HomologyClass(*w), branch)


def witnesses(B: int) -> list[tuple[int, int]]:
    """Primitive (x0, y0) with |x0|, |y0| <= B and y0 <= 0, in lexicographic order."""
    return [(x, y) for x in range(-B, B + 1) for y in range(-B, 1)
            if math.gcd(x, y) == 1]


def neighbors(v: GVertex, B: int) -> list[GEdge]:
    if B < 1:
        raise ValueError("witness bound must be >= 1")
    seen, out = set(), []
    for w in witnesses(B):
        for br in BRANCHES:
            if branch_valid(v, w, br):
                tgt = edge_target(v, w, br)
                if tgt.key() not in seen:
                    seen.add(tgt.key())
                    out.append(GEdge(v, GVertex(tgt), HomologyClass(*w), br))
    return out


# --------------------------------------------------------------------------
# random vertices


def vertex_with(a: int, c: int, d_hint: int = 0) -> GVertex:
    """The vertex with given a, c (coprime, c <= -1) whose d is closest to d_hint."""
    if math.gcd(a, c) != 1:
        raise InvalidVertex("a and c must be coprime")
    n = -c
    # a d = 1 (mod n)
    d0 = pow(a, -1, n) if n > 1 else 0
    d = d0 + n * round((d_hint - d0) / n)
    b = (a * d - 1) // c
    return GVertex(Mat2Z(a, b, c, d))


def random_vertex(rng: random.Random, entry_bound: int, level: int | None = None) -> GVertex:
    while True:
        n = level if level is not None else rng.randint(1, entry_bound)
        a = rng.randint(-entry_bound, entry_bound)
        if math.gcd(a, n) != 1:
            continue
        return vertex_with(a, -n, rng.randint(-entry_bound, entry_bound))


@dataclass
class LevelReport:
    edges_checked: int
    violations: list[GEdge]
    replay_failures: list[GEdge]
    entry_bound: int
    witness_bound: int
    edges: list[GEdge] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.replay_failures


def verify_level_monotone(sample_count: int, entry_bound: int, witness_bound: int,
                          seed: int = 0, keep_edges: bool = False) -> LevelReport:
    """Sample bounded random edges and check level(target) >= level(source)."""
    if min(sample_count, entry_bound, witness_bound) < 1:
        raise ValueError("bounds must be >= 1")
    rng = random.Random(seed)
    ws = witnesses(witness_bound)
    viol, bad, kept = [], [], []
    count = 0
    while count < sample_count:
        v = random_vertex(rng, entry_bound)
        w = ws[rng.randrange(len(ws))]
        br = BRANCHES[rng.randrange(2)]
        if not branch_valid(v, w, br):
            continue
        e = make_edge(v, w, br)
        count += 1
        if e.target.level < v.level:
            viol.append(e)
        if not e.replay():
            bad.append(e)
        if keep_edges:
            kept.append(e)
    return LevelReport(count, viol, bad, entry_bound, witness_bound, kept)


# --------------------------------------------------------------------------
# G_1 connectivity


def g1_generator_edges(v: GVertex) -> list[GEdge]:
    """The four generator edges: a +- 1 via (+-1, 0) and d +- 1 via (a, -1)."""
    a = v.matrix.a
    out = [make_edge(v, (1, 0), "positive"), make_edge(v, (-1, 0), "negative")]
    out.append(make_edge(v, (a, -1), "positive"))
    out.append(make_edge(v, (a, -1), "negative"))
    return sorted(out, key=lambda e: (e.witness.x, e.witness.y, BRANCHES.index(e.branch)))


@dataclass
class ConnectivityReport:
    box: int
    enlarged_box: int
    vertices: int
    pairs: int
    max_path_length: int
    paths_replayed: int
    edges_replayed: int
    replay_failures: int
    sample_paths: dict = field(default_factory=dict)
    edges: list[GEdge] = field(default_factory=list, repr=False)

    @property
    def connected(self) -> bool:
        return self.replay_failures == 0 and self.paths_replayed == self.pairs


def _mul(w, m):
    (p, q), (r, s) = w
    a, b, c, d = m
    return (p * a + q * c, p * b + q * d, r * a + s * c, r * b + s * d)


def verify_g1_connected(B: int, enlarge: int = 0, sample: int = 4) -> ConnectivityReport:
    """All-pairs reachability in G_1 within |a|, |d| <= B + enlarge, paths replayed.

    Every path is rebuilt from BFS parents and replayed by multiplying the
    twist matrices of its witnesses onto the source.
    """
    if B < 2:
        raise ValueError("box bound must be >= 2")
    E = B + enlarge
    inner = [GVertex.g1(a, d) for a in range(-B, B + 1) for d in range(-B, B + 1)]
    adj: dict = {}
    for a in range(-E, E + 1):
        for d in range(-E, E + 1):
            v = GVertex.g1(a, d)
            adj[v.key()] = [e for e in g1_generator_edges(v)
                            if abs(e.target.matrix.a) <= E and abs(e.target.matrix.d) <= E]
    all_edges = [e for es in adj.values() for e in es]
    twist = {}
    for e in all_edges:
        n = 1 if e.branch == "positive" else -1
        twist.setdefault((e.witness.x, e.witness.y, n), twist_matrix(e.witness, n).rows())
    inner_keys = {v.key() for v in inner}
    max_len, replayed, edges_replayed, failures = 0, 0, 0, 0
    samples = {}
    corners = {GVertex.g1(x, y).key() for x in (-B, B) for y in (-B, B)}
    for src in inner:
        parent = {src.key(): None}
        dq = deque([src.key()])
        while dq:
            k = dq.popleft()
            for e in adj[k]:
                t = e.target.key()
                if t not in parent:
                    parent[t] = e
                    dq.append(t)
        missing = inner_keys - parent.keys()
        if missing:
            raise BoxTooSmall(f"{len(missing)} vertices unreachable from {src.key()} inside |a|,|d| <= {E}")
        for tgt in inner_keys:
            path = []
            k = tgt
            while parent[k] is not None:
                path.append(parent[k])
                k = parent[k].source.key()
            path.reverse()
            cur = src.key()
            for e in path:
                n = 1 if e.branch == "positive" else -1
                cur = _mul(twist[(e.witness.x, e.witness.y, n)], cur)
            edges_replayed += len(path)
            if cur != tgt:
                failures += 1
            else:
                replayed += 1
            max_len = max(max_len, len(path))
            if src.key() in corners and tgt in corners and len(samples) < sample:
                if src.key() != tgt:
                    samples[f"{src.key()}->{tgt}"] = [e.to_json() for e in path]
    pairs = len(inner) ** 2
    return ConnectivityReport(B, E, len(inner), pairs, max_len, replayed, edges_replayed,
                              failures, samples, all_edges)


def g1_path(src: GVertex, tgt: GVertex) -> list[GEdge]:
    """A direct generator path: move a first, then d."""
    path, v = [], src
    while v.matrix.a != tgt.matrix.a:
        e = make_edge(v, (1, 0), "positive") if v.matrix.a < tgt.matrix.a else make_edge(v, (-1, 0), "negative")
        path.append(e)
        v = e.target
    while v.matrix.d != tgt.matrix.d:
        br = "positive" if v.matrix.d < tgt.matrix.d else "negative"
        e = make_edge(v, (v.matrix.a, -1), br)
        path.append(e)
        v = e.target
    return path


# --------------------------------------------------------------------------
# predecessors


@dataclass
class PredecessorChain:
    """Edges w -> ... -> v from a strictly lower level vertex w."""

    target: GVertex
    edges: list[GEdge]

    @property
    def head(self) -> GVertex:
        return self.edges[0].source if self.edges else self.target

    def replays(self) -> bool:
        cur = self.head
        for e in self.edges:
            if e.source != cur or not e.valid() or not e.replay():
                return False
            cur = e.target
        return cur == self.target

    @property
    def reduced(self) -> GVertex:
        return self.edges[0].target if self.edges else self.target

    def lexicographic_drops(self) -> bool:
        """(level, |d|) strictly drops from v to the reduced vertex, then to the head."""
        def rank(u):
            return (u.level, abs(u.matrix.d))
        red = self.reduced
        ok = rank(self.head) < rank(red)
        if red != self.target:
            ok = ok and rank(red) < rank(self.target)
        return ok


def verify_predecessor(v: GVertex) -> PredecessorChain:
    """Reduce d modulo c with (a, c)-witness edges, then step down one level."""
    if v.level < 2:
        raise ValueError("need level >= 2")
    a, b, c, d = v.matrix.key()
    n = -c
    d_red = d
    if abs(d) >= n:
        d_red = d % n
        if d_red > n // 2:
            d_red -= n
    j = (d - d_red) // c  # v = red with j copies of (a, c) added to the second column
    red = GVertex(Mat2Z(a, b - j * a, c, d_red))
    tail, cur = [], red
    for _ in range(abs(j)):
        e = make_edge(cur, (a, c), "negative" if j > 0 else "positive")
        tail.append(e)
        cur = e.target
    if cur != v:
        raise AssertionError(f"lemma counterexample: reduction failed at {v.key()}")
    ra, rb, rc, rd = red.matrix.key()
    if rd >= 0:
        w = GVertex(Mat2Z(ra + rb, rb, rc + rd, rd))
        first = make_edge(w, (-rb, -rd), "negative")
    else:
        w = GVertex(Mat2Z(ra - rb, rb, rc - rd, rd))
        first = make_edge(w, (rb, rd), "positive")
    if first.target != red or w.level >= v.level:
        raise AssertionError(f"lemma counterexample: predecessor step failed at {v.key()}")
    return PredecessorChain(v, [first] + tail)


# --------------------------------------------------------------------------
# bounded reachability


@dataclass
class ReachResult:
    status: str  # "found" | "exhausted"
    path: list[GEdge]
    explored: int
    box: int
    witness_bound: int
    depth_bound: int

    def replays(self, source: GVertex, target: GVertex) -> bool:
        cur = source.matrix
        for e in self.path:
            n = 1 if e.branch == "positive" else -1
            cur = twist_matrix(e.witness, n) @ cur
        return cur.key() == target.key()


def reachable(source: GVertex, target: GVertex, witness_bound: int, depth_bound: int,
              box: int | None = None) -> ReachResult:
    """Bounded BFS from source; 'exhausted' is inconclusive, never a proof of absence.

    Vertices of level above the target's, or with |a| or |d| beyond ``box``,
    are pruned (levels never decrease along edges).
    """
    if box is None:
        box = max(abs(x) for x in (source.matrix.a, source.matrix.d, target.matrix.a, target.matrix.d)) \
            + witness_bound
    if source == target:
        return ReachResult("found", [], 1, box, witness_bound, depth_bound)
    if target.level < source.level:
        return ReachResult("exhausted", [], 0, box, witness_bound, depth_bound)
    parent = {source.key(): None}
    frontier = [source]
    tkey = target.key()
    for _depth in range(depth_bound):
        nxt = []
        for v in frontier:
            for e in neighbors(v, witness_bound):
                t = e.target
                if t.level > target.level or abs(t.matrix.a) > box or abs(t.matrix.d) > box:
                    continue
                k = t.key()
                if k in parent:
                    continue
                parent[k] = e
                if k == tkey:
                    path = []
                    while parent[k] is not None:
                        path.append(parent[k])
                        k = parent[k].source.key()
                    return ReachResult("found", path[::-1], len(parent), box, witness_bound, depth_bound)
                nxt.append(t)
        if not nxt:
            break
        frontier = nxt
    return ReachResult("exhausted", [], len(parent), box, witness_bound, depth_bound)


def reebless_gluing(n: int) -> Mat2Z:
    """Gluing matrix [[1, 0], [n, 1]] after 1/n surgery on a Reebless torus."""
    return Mat2Z(1, 0, n, 1)


def all_edges(edges: Iterable[GEdge]) -> tuple[int, int]:
    """(edges checked, replay failures)."""
    n = bad = 0
    for e in edges:
        n += 1
        bad += not e.replay()
    return n, bad
