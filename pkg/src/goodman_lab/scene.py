"""Scene files: JSON descriptions of a flow, curves, annuli, profiles and queries.

Rationals are written as [numerator, denominator] pairs (plain integers
are accepted on input). ``Scene.from_json(s.to_json()) == s`` always.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .curves import PLCurve, insert_braid
from .exact_algebra import ExtendedSlope, HomologyClass, Mat2Z
from .flow_model import SuspensionFlow
from .surgery import SurgeryProfile, build_annulus, identity_profile, thin_profile


class SceneError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def rat(x, where: str = "") -> Fraction:
    if isinstance(x, bool):
        raise SceneError(where, "expected a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, int) and not isinstance(v, bool)
                                                          for v in x):
        if x[1] == 0:
            raise SceneError(where, "zero denominator")
        return Fraction(x[0], x[1])
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            pass
    raise SceneError(where, f"expected [num, den], got {x!r}")


def enc(x) -> list[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _ints(x, n, where):
    if not (isinstance(x, (list, tuple)) and len(x) == n and all(isinstance(v, int) for v in x)):
        raise SceneError(where, f"expected {n} integers")
    return tuple(x)


def _pt(x, where):
    if not (isinstance(x, (list, tuple)) and len(x) == 2):
        raise SceneError(where, "expected a point [x, y]")
    return (rat(x[0], where + "[0]"), rat(x[1], where + "[1]"))


@dataclass(frozen=True)
class CurveSpec:
    kind: str  # "vertices" | "straight" | "braid"
    homology: tuple[int, int] | None = None
    vertices: tuple | None = None
    heights: tuple | None = None
    base_point: tuple | None = None
    pieces: int = 1
    base: str | None = None
    word: tuple[int, ...] = ()
    width: Fraction | None = None
    strands: int | None = None

    @classmethod
    def parse(cls, d: dict, where: str) -> "CurveSpec":
        if not isinstance(d, dict):
            raise SceneError(where, "curve spec must be an object")
        if "straight" in d:
            s = d["straight"]
            return cls("straight", homology=_ints(s.get("homology"), 2, where + ".straight.homology"),
                       base_point=_pt(s.get("base", [0, 0]), where + ".straight.base"),
                       pieces=int(s.get("pieces", 1)))
        if "braid" in d:
            b = d["braid"]
            if not isinstance(b.get("base"), str):
                raise SceneError(where + ".braid.base", "expected a curve name")
            word = b.get("word", [])
            if not all(isinstance(g, int) and not isinstance(g, bool) and g != 0 for g in word):
                raise SceneError(where + ".braid.word", "generators are nonzero integers")
            return cls("braid", base=b["base"], word=tuple(word),
                       width=None if b.get("width") is None else rat(b["width"], where + ".braid.width"),
                       strands=b.get("strands"))
        if "vertices" in d:
            verts = tuple(_pt(v, f"{where}.vertices[{i}]") for i, v in enumerate(d["vertices"]))
            hts = None
            if d.get("heights") is not None:
                hts = tuple(rat(h, f"{where}.heights[{i}]") for i, h in enumerate(d["heights"]))
            return cls("vertices", homology=_ints(d.get("homology"), 2, where + ".homology"),
                       vertices=verts, heights=hts)
        raise SceneError(where, "curve needs one of 'vertices', 'straight', 'braid'")

    def to_json(self) -> dict:
        if self.kind == "straight":
            return {"straight": {"homology": list(self.homology), "base": [enc(x) for x in self.base_point],
                                 "pieces": self.pieces}}
        if self.kind == "braid":
            out: dict[str, Any] = {"base": self.base, "word": list(self.word)}
            if self.width is not None:
                out["width"] = enc(self.width)
            if self.strands is not None:
                out["strands"] = self.strands
            return {"braid": out}
        out = {"vertices": [[enc(x), enc(y)] for x, y in self.vertices], "homology": list(self.homology)}
        if self.heights is not None:
            out["heights"] = [enc(h) for h in self.heights]
        return out


@dataclass(frozen=True)
class AnnulusSpec:
    curve: str
    width: Fraction
    K_slope: Fraction

    def to_json(self):
        return {"curve": self.curve, "width": enc(self.width), "K_slope": enc(self.K_slope)}


@dataclass(frozen=True)
class ProfileSpec:
    kind: str  # "thin" | "identity" | "breakpoints"
    n: int = 0
    delta: Fraction = Fraction(1, 16)
    R: Fraction = Fraction(1)
    sign: str = "positive"
    breakpoints: tuple = ()
    R0: Fraction = Fraction(0)
    J: tuple | None = None

    @classmethod
    def parse(cls, d: dict, where: str) -> "ProfileSpec":
        if "thin" in d:
            t = d["thin"]
            return cls("thin", n=int(t["n"]), delta=rat(t["delta"], where + ".thin.delta"),
                       R=rat(t["R"], where + ".thin.R"), sign=t.get("sign", "positive"))
        if "identity" in d:
            t = d["identity"] or {}
            return cls("identity", delta=rat(t.get("delta", [1, 16]), where), R=rat(t.get("R", 1), where))
        if "breakpoints" in d:
            bp = tuple(_pt(p, f"{where}.breakpoints[{i}]") for i, p in enumerate(d["breakpoints"]))
            J = None if d.get("J") is None else _pt(d["J"], where + ".J")
            return cls("breakpoints", breakpoints=bp, R0=rat(d["R0"], where + ".R0"), J=J,
                       delta=rat(d["delta"], where + ".delta"), R=rat(d["R"], where + ".R"),
                       sign=d.get("sign", "positive"))
        raise SceneError(where, "profile needs one of 'thin', 'identity', 'breakpoints'")

    def build(self) -> SurgeryProfile:
        if self.kind == "thin":
            return thin_profile(self.n, self.delta, self.R, self.sign)
        if self.kind == "identity":
            return identity_profile(self.delta, self.R)
        return SurgeryProfile(self.breakpoints, self.R0, self.J, self.delta, self.R)

    def to_json(self):
        if self.kind == "thin":
            return {"thin": {"n": self.n, "delta": enc(self.delta), "R": enc(self.R), "sign": self.sign}}
        if self.kind == "identity":
            return {"identity": {"delta": enc(self.delta), "R": enc(self.R)}}
        return {"breakpoints": [[enc(k), enc(v)] for k, v in self.breakpoints], "R0": enc(self.R0),
                "J": None if self.J is None else [enc(x) for x in self.J], "delta": enc(self.delta),
                "R": enc(self.R), "sign": self.sign}


@dataclass(frozen=True)
class SurgerySpec:
    annulus: str
    profile: str
    epsilon: Fraction = Fraction(1, 8)
    L: Fraction | None = None
    cone_steps: int = 20
    cone_initial: Fraction = Fraction(1)

    def to_json(self):
        return {"annulus": self.annulus, "profile": self.profile, "epsilon": enc(self.epsilon),
                "L": None if self.L is None else enc(self.L), "cone_steps": self.cone_steps,
                "cone_initial": enc(self.cone_initial)}


def _canon(obj):
    """Tuples to lists so the raw blocks compare equal after a JSON trip."""
    if isinstance(obj, (list, tuple)):
        return [_canon(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _canon(v) for k, v in obj.items()}
    return obj


@dataclass
class Scene:
    name: str
    monodromy: tuple[tuple[int, int], tuple[int, int]] | None
    curves: dict[str, CurveSpec] = field(default_factory=dict)
    annuli: dict[str, AnnulusSpec] = field(default_factory=dict)
    profiles: dict[str, ProfileSpec] = field(default_factory=dict)
    surgeries: list[SurgerySpec] = field(default_factory=list)
    twist_scan: dict | None = None
    graph: dict | None = None
    metric: dict | None = None
    tolerances: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)

    # parsing --------------------------------------------------------------
    @classmethod
    def from_json(cls, d: dict) -> "Scene":
        if not isinstance(d, dict):
            raise SceneError("$", "scene must be a JSON object")
        mono = None
        if d.get("flow") is not None:
            rows = d["flow"].get("monodromy")
            if not (isinstance(rows, list) and len(rows) == 2):
                raise SceneError("$.flow.monodromy", "expected [[a, b], [c, d]]")
            mono = (_ints(rows[0], 2, "$.flow.monodromy[0]"), _ints(rows[1], 2, "$.flow.monodromy[1]"))
        curves = {k: CurveSpec.parse(v, f"$.curves.{k}") for k, v in (d.get("curves") or {}).items()}
        for k, c in curves.items():
            if c.kind == "braid" and c.base not in curves:
                raise SceneError(f"$.curves.{k}.braid.base", f"unknown curve {c.base!r}")
        annuli = {}
        for k, v in (d.get("annuli") or {}).items():
            where = f"$.annuli.{k}"
            if v.get("curve") not in curves:
                raise SceneError(where + ".curve", f"unknown curve {v.get('curve')!r}")
            annuli[k] = AnnulusSpec(v["curve"], rat(v.get("width"), where + ".width"),
                                    rat(v.get("K_slope"), where + ".K_slope"))
        profiles = {k: ProfileSpec.parse(v, f"$.profiles.{k}") for k, v in (d.get("profiles") or {}).items()}
        surgeries = []
        for i, s in enumerate(d.get("surgeries") or []):
            where = f"$.surgeries[{i}]"
            if s.get("annulus") not in annuli:
                raise SceneError(where + ".annulus", f"unknown annulus {s.get('annulus')!r}")
            if s.get("profile") not in profiles:
                raise SceneError(where + ".profile", f"unknown profile {s.get('profile')!r}")
            surgeries.append(SurgerySpec(s["annulus"], s["profile"], rat(s.get("epsilon", [1, 8]), where),
                                         None if s.get("L") is None else rat(s["L"], where + ".L"),
                                         int(s.get("cone_steps", 20)), rat(s.get("cone_initial", 1), where)))
        if (curves or annuli) and mono is None:
            raise SceneError("$.flow", "curves need a flow")
        return cls(d.get("name", ""), mono, curves, annuli, profiles, surgeries,
                   _canon(d.get("twist_scan")), _canon(d.get("graph")), _canon(d.get("metric")),
                   _canon(d.get("tolerances") or {}), _canon(d.get("expect") or {}))

    @classmethod
    def load(cls, path: str | Path) -> "Scene":
        p = Path(path)
        if not p.exists():
            bundled = resources.files("goodman_lab") / "scenes" / f"{path}.json"
            if bundled.is_file():
                return cls.from_json(json.loads(bundled.read_text()))
            raise SceneError(str(path), "no such scene file")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise SceneError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
        return cls.from_json(data)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name}
        if self.monodromy is not None:
            out["flow"] = {"monodromy": [list(r) for r in self.monodromy]}
        if self.curves:
            out["curves"] = {k: v.to_json() for k, v in self.curves.items()}
        if self.annuli:
            out["annuli"] = {k: v.to_json() for k, v in self.annuli.items()}
        if self.profiles:
            out["profiles"] = {k: v.to_json() for k, v in self.profiles.items()}
        if self.surgeries:
            out["surgeries"] = [s.to_json() for s in self.surgeries]
        for key in ("twist_scan", "graph", "metric"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.tolerances:
            out["tolerances"] = self.tolerances
        if self.expect:
            out["expect"] = self.expect
        return out

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    # building -------------------------------------------------------------
    def flow(self) -> SuspensionFlow:
        if self.monodromy is None:
            raise SceneError("$.flow", "scene has no flow")
        try:
            return SuspensionFlow(Mat2Z.from_rows(self.monodromy))
        except ValueError as e:
            raise SceneError("$.flow.monodromy", str(e)) from None

    def curve(self, name: str, _flow: SuspensionFlow | None = None) -> PLCurve:
        if name not in self.curves:
            raise SceneError(f"$.curves.{name}", "unknown curve")
        spec = self.curves[name]
        where = f"$.curves.{name}"
        try:
            if spec.kind == "straight":
                return PLCurve.straight(HomologyClass(*spec.homology), spec.base_point, spec.pieces, name=name)
            if spec.kind == "braid":
                fl = _flow or self.flow()
                base = self.curve(spec.base, fl)
                kw = {} if spec.strands is None else {"strands": spec.strands}
                c = insert_braid(fl, base, list(spec.word), width=spec.width, **kw)
                return PLCurve(c.vertices, c.homology, c.heights, name)
            return PLCurve(spec.vertices, HomologyClass(*spec.homology), spec.heights, name)
        except SceneError:
            raise
        except ValueError as e:
            raise SceneError(where, f"{type(e).__name__}: {e}") from None

    def annulus(self, name: str, _flow=None):
        if name not in self.annuli:
            raise SceneError(f"$.annuli.{name}", "unknown annulus")
        a = self.annuli[name]
        fl = _flow or self.flow()
        return build_annulus(fl, self.curve(a.curve, fl), a.width, ExtendedSlope.finite(a.K_slope, fl.D))

    def profile(self, name: str) -> SurgeryProfile:
        if name not in self.profiles:
            raise SceneError(f"$.profiles.{name}", "unknown profile")
        try:
            return self.profiles[name].build()
        except ValueError as e:
            raise SceneError(f"$.profiles.{name}", f"{type(e).__name__}: {e}") from None


def bundled_scenes() -> list[str]:
    root = resources.files("goodman_lab") / "scenes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str):
    return resources.files("goodman_lab") / "scenes" / f"{name}.json"
