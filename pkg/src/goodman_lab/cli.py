"""goodman-lab command line.

    python3 -m goodman_lab.cli steadiness --scene constant_slope_1
    python3 -m goodman_lab.cli certify --scene cat_map_reference
    python3 -m goodman_lab.cli graph verify-lemma --scene graph_lemma
    python3 -m goodman_lab.cli accept

Exit codes: 0 verified, 1 violation found, 2 inconclusive or not applicable,
3 input error. Reports are JSON with sorted keys; rationals are [num, den].
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .curves import (Crossing, MixedSign, PLCurve, check_generic, check_steadiness, insert_braid)
from .exact_algebra import ExtendedSlope, Mat2Z, NonPrimitiveClass, QuadExt
from .flow_model import MetricSample, NotPositiveDefinite, TTooSmall, average_metric
from .scene import Scene, SceneError, bundled_scenes, enc, rat
from .surgery import (EpsilonInfeasible, QTooSmall, WidthNotContracting, certify_thinness,
                      cone_iterate, twist_battery)
from .surgery_graph import (BoxTooSmall, GVertex, neighbors, reachable, verify_g1_connected,
                            verify_level_monotone, verify_predecessor)

OK, VIOLATION, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3


# --------------------------------------------------------------------------
# encoding


def enc_q(x: QuadExt | Fraction | int) -> dict:
    if not isinstance(x, QuadExt):
        x = Fraction(x)
        return {"p": enc(x), "q": [0, 1], "D": 1, "approx": _f(float(x))}
    return {"p": enc(x.p), "q": enc(x.q), "D": x.D, "approx": _f(float(x))}


def enc_slope(s: ExtendedSlope | None):
    if s is None:
        return None
    return "inf" if s.is_infinite else enc_q(s.value)


def _f(x: float) -> float:
    # 15 significant digits keeps reports stable across platforms
    return float(f"{x:.15g}")


def enc_crossing(c: Crossing) -> dict:
    return {"k": c.k, "t": enc(c.t), "x": [c.x_param[0], enc(c.x_param[1])],
            "y": [c.y_param[0], enc(c.y_param[1])],
            "x_point": [enc(v) for v in c.x_point], "y_point": [enc(v) for v in c.y_point],
            "under_slopes": [enc_slope(s) for s in c.under_slopes],
            "over_slopes": [enc_slope(s) for s in c.over_slopes]}


def _rows(M: Mat2Z):
    return [list(r) for r in M.rows()]


def _vertex(x, where) -> GVertex:
    try:
        return GVertex(Mat2Z.from_rows(x))
    except (TypeError, ValueError) as e:
        raise SceneError(where, str(e)) from None


class Timer:
    def __init__(self):
        self.t = {}

    def __call__(self, key):
        timer = self

        class _T:
            def __enter__(self):
                self.s = time.perf_counter()

            def __exit__(self, *a):
                timer.t[key] = round(time.perf_counter() - self.s, 4)
        return _T()


def _base(cmd: str, scene: Scene) -> dict:
    return {"command": cmd, "scene": scene.name, "scene_hash": scene.digest(), "tool_version": __version__}


# --------------------------------------------------------------------------
# commands; each returns (report, exit code)


def steadiness_record(flow, curve: PLCurve, with_slack: bool = True) -> dict:
    try:
        rep = check_steadiness(flow, curve, with_slack=with_slack)
    except MixedSign:
        return {"verdict": "not-applicable", "sign": "mixed"}
    out = {"verdict": rep.verdict, "sign": rep.sign, "K": rep.K, "h": enc_slope(rep.h), "H": enc_slope(rep.H),
           "crossings_checked": rep.crossings_checked, "violations": [enc_crossing(c) for c in rep.violations]}
    if rep.delta_star is not None:
        out["delta_star"] = enc(rep.delta_star)
    return out


def _code(verdicts: list[str], good: str) -> int:
    if any(v in ("unsteady", "violation", "failed", "non-generic") for v in verdicts):
        return VIOLATION
    if any(v != good for v in verdicts):
        return INCONCLUSIVE
    return OK


def cmd_steadiness(scene: Scene, curve: str | None = None, timer: Timer | None = None):
    flow = scene.flow()
    names = [curve] if curve else list(scene.curves)
    results = {}
    for n in names:
        c = scene.curve(n, flow)
        results[n] = steadiness_record(flow, c)
        results[n]["vertices"] = c.m
    rep = _base("steadiness", scene)
    rep["curves"] = results
    return rep, _code([r["verdict"] for r in results.values()], "steady")


def cmd_generic(scene: Scene, curve: str | None = None, bound: int | None = None):
    flow = scene.flow()
    bound = bound or int(scene.tolerances.get("period_bound", 10))
    names = [curve] if curve else list(scene.curves)
    results = {}
    for n in names:
        c = scene.curve(n, flow)
        if not c.turns():
            results[n] = {"verdict": "not-applicable", "reason": "no turns"}
            continue
        try:
            g = check_generic(flow, c, bound)
        except ValueError as e:
            results[n] = {"verdict": "not-applicable", "reason": str(e)}
            continue
        results[n] = {"verdict": "generic" if g.generic else "non-generic", "reason": g.reason,
                      "witness": None if g.witness is None else list(g.witness), "turns": g.turns,
                      "periods": {str(k): v for k, v in sorted(g.periods.items())}}
    rep = _base("generic", scene)
    rep.update({"period_bound": bound, "curves": results})
    return rep, _code([r["verdict"] for r in results.values()], "generic")


def cmd_braid(scene: Scene, curve: str | None = None, word: list[int] | None = None, width=None):
    flow = scene.flow()
    results = {}
    if word is not None:
        if curve is None:
            raise SceneError("--curve", "braid insertion needs a base curve")
        base = scene.curve(curve, flow)
        try:
            braided = insert_braid(flow, base, word, width=width)
        except ValueError as e:
            raise SceneError("--word", f"{type(e).__name__}: {e}") from None
        items = [(f"{curve}+{word}", braided)]
    else:
        items = [(n, scene.curve(n, flow)) for n, s in scene.curves.items() if s.kind == "braid"]
    for n, c in items:
        r = steadiness_record(flow, c, with_slack=False)
        r["curve"] = c.to_json()
        results[n] = r
    rep = _base("braid", scene)
    rep["curves"] = results
    return rep, _code([r["verdict"] for r in results.values()], "steady")


def annulus_record(A) -> dict:
    a, b, c, d = A.frame
    return {"sign": A.sign, "T0": A.T0, "width": enc(A.width), "K_slope": enc_slope(A.K_slope),
            "H_slope": enc_slope(A.H_slope), "frame": {"a": enc_q(a), "b": enc_q(b), "c": enc_q(c), "d": enc_q(d)},
            "ad_plus_bc": enc_q(A.D), "k_direction": [enc_q(x) for x in A.k_dir]}


def cmd_annulus(scene: Scene, name: str | None = None):
    flow = scene.flow()
    results = {}
    for n in ([name] if name else list(scene.annuli)):
        try:
            results[n] = {"verdict": "built", **annulus_record(scene.annulus(n, flow))}
        except SceneError:
            raise
        except ValueError as e:
            results[n] = {"verdict": "failed", "error": type(e).__name__, "message": str(e)}
    rep = _base("annulus", scene)
    rep["annuli"] = results
    return rep, _code([r["verdict"] for r in results.values()], "built")


def certificate_record(cert) -> dict:
    return {"verdict": cert.verdict, "epsilon": enc(cert.epsilon), "delta": enc(cert.delta), "R": enc(cert.R),
            "q_min": enc_q(cert.q_min), "width_L_factor_max": _f(cert.width_L_factor_max),
            "surgery_factor_max": _f(cert.surgery_factor_max), "M_T": _f(cert.M_T), "m_bar": _f(cert.m_bar),
            "L": cert.L, "T0": cert.T0, "grid": [enc(k) for k in cert.grid],
            "plateau_bound": None if cert.plateau_bound is None else enc_q(cert.plateau_bound),
            "piece_factors": [_f(x) for x in cert.piece_factors]}


def cone_record(tr) -> dict:
    return {"widths": [_f(w) for w in tr.widths], "decreasing": tr.decreasing, "ratio": _f(tr.ratio),
            "bound": _f(tr.bound), "within_bound": tr.within_bound}


CERT_ERRORS = (QTooSmall, WidthNotContracting, EpsilonInfeasible)


def _surgery(scene: Scene, i: int, flow, cones: bool, steps: int | None):
    s = scene.surgeries[i]
    where = f"$.surgeries[{i}]"
    out = {"annulus": s.annulus, "profile": s.profile}
    try:
        A = scene.annulus(s.annulus, flow)
    except SceneError:
        raise
    except ValueError as e:
        out.update({"verdict": "failed", "error": type(e).__name__, "message": str(e)})
        return out
    P = scene.profile(s.profile)
    try:
        cert = certify_thinness(A, P, s.epsilon, s.L)
    except CERT_ERRORS as e:
        out.update({"verdict": "failed", "error": type(e).__name__, "message": str(e)})
        return out
    except ValueError as e:
        raise SceneError(where, f"{type(e).__name__}: {e}") from None
    out["certificate"] = certificate_record(cert)
    out["verdict"] = cert.verdict
    if cones:
        n = steps if steps is not None else s.cone_steps
        tr = cone_iterate(A, P, cert, s.cone_initial, n)
        zero = cone_iterate(A, P, cert, 0, min(n, 5))
        out["cones"] = cone_record(tr)
        out["cones_zero_width"] = [_f(w) for w in zero.widths]
        if not (tr.decreasing and tr.within_bound):
            out["verdict"] = "failed"
            out["error"] = "ConeNotContracting"
    return out


def cmd_certify(scene: Scene, index: int | None = None, cones: bool = True, steps: int | None = None,
                command: str = "certify"):
    flow = scene.flow()
    idx = [index] if index is not None else range(len(scene.surgeries))
    results = []
    for i in idx:
        if not 0 <= i < len(scene.surgeries):
            raise SceneError(f"$.surgeries[{i}]", "no such surgery")
        results.append(_surgery(scene, i, flow, cones, steps))
    rep = _base(command, scene)
    rep["surgeries"] = results
    return rep, _code([r["verdict"] for r in results], "certified")


def cmd_cones(scene: Scene, index: int | None = None, steps: int | None = None):
    rep, code = cmd_certify(scene, index, True, steps, command="cones")
    for r in rep["surgeries"]:
        r.pop("certificate", None)
    return rep, code


def cmd_twist_scan(scene: Scene):
    cfg = scene.twist_scan
    if not cfg:
        raise SceneError("$.twist_scan", "scene has no twist scan")
    monos = []
    for i, rows in enumerate(cfg.get("monodromies", [])):
        try:
            monos.append(Mat2Z.from_rows(rows))
        except (TypeError, ValueError) as e:
            raise SceneError(f"$.twist_scan.monodromies[{i}]", str(e)) from None
    try:
        rows = twist_battery(monos, int(cfg.get("per_sign", 8)), int(cfg.get("n_max", 20)),
                             class_bound=int(cfg.get("class_bound", 6)))
    except NonPrimitiveClass:
        raise
    pred = [r for r in rows if r.predicted]
    wrong = [r for r in rows if not r.predicted and not r.hyperbolic]
    zero = [m.trace for m in monos]
    summary = {"predicted_rows": len(pred), "predicted_hyperbolic": sum(r.hyperbolic for r in pred),
               "wrong_sign_rows": sum(not r.predicted for r in rows),
               "wrong_sign_non_hyperbolic": len(wrong), "n0_traces": zero,
               "first_counterexample": None if not wrong else
               {"monodromy": list(wrong[0].monodromy), "c": list(wrong[0].c), "n": wrong[0].n,
                "trace": wrong[0].trace}}
    rep = _base("twist-scan", scene)
    rep["summary"] = summary
    rep["rows"] = [{"monodromy": list(r.monodromy), "c": list(r.c), "sign": r.sign, "n": r.n,
                    "trace": r.trace, "hyperbolic": r.hyperbolic, "predicted": r.predicted} for r in rows]
    ok = summary["predicted_hyperbolic"] == summary["predicted_rows"]
    return rep, OK if ok else VIOLATION


def twist_csv(rep: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "c", "d", "x0", "y0", "sign", "n", "trace", "hyperbolic", "predicted"])
    for r in rep["rows"]:
        w.writerow([*r["monodromy"], *r["c"], r["sign"], r["n"], r["trace"], int(r["hyperbolic"]),
                    int(r["predicted"])])
    return buf.getvalue()


def cmd_graph(scene: Scene, sub: str, bound: int | None = None, seed: int | None = None):
    g = scene.graph or {}
    rep = _base(f"graph {sub}", scene)
    if sub == "neighbors":
        out = []
        for i, q in enumerate(g.get("neighbors", [])):
            v = _vertex(q["vertex"], f"$.graph.neighbors[{i}].vertex")
            B = bound or int(q.get("bound", 2))
            es = neighbors(v, B)
            out.append({"vertex": v.to_json(), "bound": B, "edges": [e.to_json() for e in es],
                        "all_replay": all(e.replay() for e in es),
                        "level_monotone": all(e.target.level >= v.level for e in es)})
        rep["queries"] = out
        good = all(q["all_replay"] and q["level_monotone"] for q in out)
        return rep, OK if good else VIOLATION
    if sub == "reach":
        out, codes = [], []
        for i, q in enumerate(g.get("reach", [])):
            s = _vertex(q["source"], f"$.graph.reach[{i}].source")
            t = _vertex(q["target"], f"$.graph.reach[{i}].target")
            res = reachable(s, t, bound or int(q.get("witness_bound", 2)), int(q.get("depth_bound", 4)),
                            q.get("box"))
            ok = res.status != "found" or res.replays(s, t)
            out.append({"source": s.to_json(), "target": t.to_json(), "status": res.status,
                        "path": [e.to_json() for e in res.path], "replays": ok, "box": res.box,
                        "witness_bound": res.witness_bound, "depth_bound": res.depth_bound,
                        "explored": res.explored})
            codes.append(VIOLATION if not ok else OK if res.status == "found" else INCONCLUSIVE)
        rep["queries"] = out
        return rep, max(codes, default=OK)
    if sub == "verify-lemma":
        cfg = g.get("verify_lemma", {})
        sd = seed if seed is not None else int(cfg.get("seed", 0))
        rep.update(verify_lemma(int(cfg.get("edges", 10000)), int(cfg.get("entry_bound", 20)),
                                bound or int(cfg.get("witness_bound", 10)), int(cfg.get("box", 10)),
                                int(cfg.get("predecessors", 100)), tuple(cfg.get("levels", [2, 10])), sd))
        return rep, OK if rep["verdict"] == "verified" else VIOLATION
    raise SceneError("graph", f"unknown graph subcommand {sub!r}")


def verify_lemma(edges: int, entry_bound: int, witness_bound: int, box: int, preds: int,
                 levels: tuple[int, int], seed: int, keep: list | None = None) -> dict:
    import random
    lv = verify_level_monotone(edges, entry_bound, witness_bound, seed=seed, keep_edges=keep is not None)
    try:
        conn = verify_g1_connected(box)
        part2 = {"box": conn.box, "enlarged_box": conn.enlarged_box, "vertices": conn.vertices,
                 "pairs": conn.pairs, "paths_replayed": conn.paths_replayed,
                 "edges_replayed": conn.edges_replayed, "replay_failures": conn.replay_failures,
                 "max_path_length": conn.max_path_length, "sample_paths": conn.sample_paths,
                 "connected": conn.connected}
    except BoxTooSmall as e:
        conn = None
        part2 = {"box": box, "connected": False, "error": str(e)}
    rng = random.Random(seed + 1)
    chains, failures = [], []
    for _ in range(preds):
        v = _random_level_vertex(rng, entry_bound, levels)
        ch = verify_predecessor(v)
        good = ch.replays() and ch.head.level < v.level and ch.lexicographic_drops()
        chains.append((v, ch, good))
        if not good:
            failures.append(v.to_json())
    if keep is not None:
        keep.extend(lv.edges)
        if conn is not None:
            keep.extend(conn.edges)
        for _, ch, _ in chains:
            keep.extend(ch.edges)
    part3 = {"samples": preds, "levels": list(levels), "failures": failures,
             "max_chain_length": max((len(ch.edges) for _, ch, _ in chains), default=0),
             "example": None if not chains else {"vertex": chains[0][0].to_json(),
                                                 "chain": [e.to_json() for e in chains[0][1].edges]}}
    part1 = {"edges_checked": lv.edges_checked, "violations": [e.to_json() for e in lv.violations],
             "replay_failures": len(lv.replay_failures), "entry_bound": entry_bound,
             "witness_bound": witness_bound}
    ok = lv.passed and part2.get("connected") and not failures
    return {"level_monotone": part1, "g1_connected": part2, "predecessors": part3,
            "verdict": "verified" if ok else "violation", "seed": seed}


def _random_level_vertex(rng, entry_bound, levels):
    from .surgery_graph import random_vertex
    return random_vertex(rng, entry_bound, level=rng.randint(levels[0], levels[1]))


def metric_run(flow, cfg: dict, tolerance: Fraction | None = None) -> dict:
    n, n_t = cfg.get("grid", [64, 16])
    seed = cfg.get("seed", "flat")
    g0 = MetricSample.flat(flow, n, n_t) if seed == "flat" else MetricSample.suspension(flow, n, n_t)
    tol = float(tolerance) if tolerance is not None else float(rat(cfg.get("tolerance", [1, 10 ** 6])))
    target = float(rat(cfg.get("target", [21, 20])))
    res = average_metric(flow, g0, int(cfg.get("T", 10)))
    sweep = []
    for T in cfg.get("sweep", []):
        r = average_metric(flow, g0, int(T))
        sweep.append({"T": int(T), "lam_bar": _f(r.lam_bar), "margin": _f(r.margin),
                      "quadrature_error": _f(r.quadrature_error)})
    mono = all(b["lam_bar"] >= a["lam_bar"] - tol for a, b in zip(sweep, sweep[1:]))
    return {"seed": seed, "grid": [n, n, n_t], "T": int(cfg.get("T", 10)), "lam_bar": _f(res.lam_bar),
            "lam_bar_stable": _f(res.lam_bar_stable), "lam_bar_unstable": _f(res.lam_bar_unstable),
            "margin": _f(res.margin), "quadrature_error": _f(res.quadrature_error),
            "C_empirical": _f(res.C_empirical), "positive_definite": bool(res.sample.is_positive_definite()),
            "target": target, "sweep": sweep, "sweep_nondecreasing": mono, "tolerance": tol,
            "verdict": "verified" if res.lam_bar >= target and mono else "violation"}


def cmd_metric_average(scene: Scene, T: int | None = None, tolerance: Fraction | None = None):
    cfg = dict(scene.metric or {})
    if T is not None:
        cfg["T"] = T
    try:
        out = metric_run(scene.flow(), cfg, tolerance)
    except (TTooSmall, NotPositiveDefinite) as e:
        rep = _base("metric-average", scene)
        rep.update({"verdict": "failed", "error": type(e).__name__, "message": str(e)})
        return rep, VIOLATION
    rep = _base("metric-average", scene)
    rep.update(out)
    return rep, OK if out["verdict"] == "verified" else VIOLATION


# --------------------------------------------------------------------------
# driver


def dumps(rep: dict) -> str:
    def default(o):
        if isinstance(o, Fraction):
            return enc(o)
        if isinstance(o, QuadExt):
            return enc_q(o)
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")
    return json.dumps(rep, sort_keys=True, indent=2, default=default) + "\n"


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="scene file, or the name of a bundled scene")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--bound", type=int, help="period bound (generic) or witness bound (graph)")
    common.add_argument("--seed", type=int, help="random seed for sampled checks")
    common.add_argument("--tolerance", help="rational tolerance, e.g. 1/1000000")
    common.add_argument("--timings", action="store_true", help="append a timings block")

    p = argparse.ArgumentParser(prog="goodman-lab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("steadiness", parents=[common])
    s.add_argument("--curve")
    s = sub.add_parser("generic", parents=[common])
    s.add_argument("--curve")
    s = sub.add_parser("braid", parents=[common])
    s.add_argument("--curve")
    s.add_argument("--word", help="comma separated signed generators, e.g. 1,-2")
    s.add_argument("--width", help="tube width as a rational")
    s = sub.add_parser("annulus", parents=[common])
    s.add_argument("--annulus")
    for name in ("certify", "cones"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--surgery", type=int, help="index into the scene's surgeries")
        s.add_argument("--steps", type=int)
    sub.add_parser("twist-scan", parents=[common])
    s = sub.add_parser("graph", parents=[common])
    s.add_argument("action", choices=["neighbors", "reach", "verify-lemma"])
    s = sub.add_parser("metric-average", parents=[common])
    s.add_argument("--T", type=int)
    s = sub.add_parser("accept", parents=[common])
    s.add_argument("--list", action="store_true", help="list bundled scenes and exit")
    return p


def run(args) -> tuple[str, int]:
    tol = None if args.tolerance is None else rat(args.tolerance, "--tolerance")
    if args.command == "accept":
        if args.list:
            return "\n".join(bundled_scenes()) + "\n", OK
        from .acceptance import run_acceptance
        suite = run_acceptance(seed=args.seed or 0, stream=sys.stderr, timings=args.timings)
        return dumps(suite.report(args.timings)), OK if suite.passed else VIOLATION
    if not args.scene:
        raise SceneError("--scene", "a scene is required")
    scene = Scene.load(args.scene)
    t0 = time.perf_counter()
    cmd = args.command
    if cmd == "steadiness":
        rep, code = cmd_steadiness(scene, args.curve)
    elif cmd == "generic":
        rep, code = cmd_generic(scene, args.curve, args.bound)
    elif cmd == "braid":
        word = None if args.word is None else [int(x) for x in args.word.split(",") if x.strip()]
        width = None if args.width is None else rat(args.width, "--width")
        rep, code = cmd_braid(scene, args.curve, word, width)
    elif cmd == "annulus":
        rep, code = cmd_annulus(scene, args.annulus)
    elif cmd == "certify":
        rep, code = cmd_certify(scene, args.surgery, True, args.steps)
    elif cmd == "cones":
        rep, code = cmd_cones(scene, args.surgery, args.steps)
    elif cmd == "twist-scan":
        rep, code = cmd_twist_scan(scene)
        if args.format == "csv":
            return twist_csv(rep), code
    elif cmd == "graph":
        rep, code = cmd_graph(scene, args.action, args.bound, args.seed)
    elif cmd == "metric-average":
        rep, code = cmd_metric_average(scene, args.T, tol)
    else:  # pragma: no cover
        raise SceneError(cmd, "unknown command")
    if args.timings:
        rep["timings"] = {"total_s": round(time.perf_counter() - t0, 4)}
    if args.format == "csv":
        return _flat_csv(rep), code
    return dumps(rep), code


def _flat_csv(rep: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else k, obj[k])
        elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
            for i, x in enumerate(obj):
                walk(f"{prefix}[{i}]", x)
        else:
            w.writerow([prefix, json.dumps(obj, sort_keys=True)])
    walk("", json.loads(dumps(rep)))
    return buf.getvalue()


def main(argv: list[str] | None = None, out: Callable[[str], None] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        text, code = run(args)
    except (SceneError, NonPrimitiveClass) as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except BoxTooSmall as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return INCONCLUSIVE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    elif out is not None:
        out(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
