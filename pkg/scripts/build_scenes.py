"""Regenerate the bundled scene files under src/goodman_lab/scenes/.

    python3 scripts/build_scenes.py

The data below is frozen; the seeds were picked so that no vertex sits on a
low-period point of the monodromy.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "goodman_lab" / "scenes"

CAT = [[2, 1], [1, 1]]


def r(n, d=1):
    return [n, d]


def straight(h, base=(r(0), r(0)), pieces=1):
    return {"straight": {"homology": list(h), "base": list(base), "pieces": pieces}}


def curve(verts, h, heights=None):
    out = {"vertices": [[r(*a), r(*b)] for a, b in verts], "homology": list(h)}
    if heights is not None:
        out["heights"] = heights
    return out


def reference(R, name):
    return {
        "name": name,
        "flow": {"monodromy": CAT},
        "curves": {"c01": straight((0, 1)), "c10": straight((1, 0))},
        "annuli": {"A": {"curve": "c01", "width": r(1, 2), "K_slope": r(-1)},
                   "B": {"curve": "c10", "width": r(1, 2), "K_slope": r(1)}},
        "profiles": {"thin": {"thin": {"n": 1, "delta": r(1, 16), "R": r(R), "sign": "positive"}},
                     "thin_neg": {"thin": {"n": -1, "delta": r(1, 16), "R": r(R), "sign": "negative"}},
                     "identity": {"identity": {"delta": r(1, 16), "R": r(1)}}},
        "surgeries": [{"annulus": "A", "profile": "thin", "epsilon": r(1, 8), "L": None,
                       "cone_steps": 20, "cone_initial": r(1)}],
    }


SCENES = {}

ref = reference(64, "cat-map reference annulus, n = 1")
ref["surgeries"] += [
    {"annulus": "A", "profile": "identity", "epsilon": r(1, 8), "L": None, "cone_steps": 20,
     "cone_initial": r(1)},
    {"annulus": "B", "profile": "thin_neg", "epsilon": r(1, 8), "L": None, "cone_steps": 20,
     "cone_initial": r(1)},
]
ref["expect"] = {"certify": ["certified", "certified", "certified"]}
SCENES["cat_map_reference"] = ref

low = reference(1, "cat-map annulus with a shallow plateau, R = 1")
low["expect"] = {"certify": ["QTooSmall"]}
SCENES["cat_map_R1"] = low

SCENES["identity_profile"] = {
    "name": "identity regluing",
    "flow": {"monodromy": CAT},
    "curves": {"c01": straight((0, 1), (r(1, 3), r(0)))},
    "annuli": {"A": {"curve": "c01", "width": r(1, 4), "K_slope": r(-1)}},
    "profiles": {"identity": {"identity": {"delta": r(1, 16), "R": r(1)}}},
    "surgeries": [{"annulus": "A", "profile": "identity", "epsilon": r(1, 8), "L": None, "cone_steps": 20,
                   "cone_initial": r(1)}],
    "expect": {"certify": ["certified"]},
}

for sign, word in (("positive", [1]), ("negative", [-1])):
    SCENES[f"braid_{sign}"] = {
        "name": f"{sign} crossing braid in a tube around the (0, 1) curve",
        "flow": {"monodromy": CAT},
        "curves": {"core": straight((0, 1)), "braided": {"braid": {"base": "core", "word": word}}},
        "expect": {"steadiness": {"core": "steady",
                                  "braided": "unsteady" if sign == "positive" else "steady"}},
    }

SCENES["mixed_sign"] = {
    "name": "staircase with one stable-side and one unstable-side segment",
    "flow": {"monodromy": CAT},
    "curves": {"stair": curve([((0, 1), (0, 1)), ((1, 2), (0, 1))], (1, 1))},
    "expect": {"steadiness": {"stair": "not-applicable"}},
}

CONSTANT = [
    ([[2, 1], [1, 1]], [(0, 1), (1, 1), (1, 0), (-1, 1)]),
    ([[3, 1], [2, 1]], [(0, 1), (1, 1), (1, 0), (-1, 1)]),
    ([[1, 1], [1, 2]], [(0, 1), (-1, 1), (1, 0), (1, 1)]),
    ([[3, 2], [1, 1]], [(0, 1), (1, 1), (1, 0), (-1, 1)]),
    ([[4, 1], [3, 1]], [(0, 1), (1, 1), (1, 0), (-1, 1)]),
]
BASES = [(r(0), r(0)), (r(1, 3), r(1, 5)), (r(2, 7), r(0)), (r(0), r(3, 8))]
for idx, (mono, classes) in enumerate(CONSTANT, start=1):
    curves = {}
    for j, h in enumerate(classes):
        curves[f"s{j}_{h[0]}_{h[1]}".replace("-", "m")] = straight(h, BASES[j], pieces=1 + j % 2)
    SCENES[f"constant_slope_{idx}"] = {
        "name": f"constant-slope curves, monodromy {mono}",
        "flow": {"monodromy": mono},
        "curves": curves,
        "expect": {"steadiness": {k: "steady" for k in curves}},
    }

SCENES["c1_seeds"] = {
    "name": "steady piecewise seeds for the perturbation battery",
    "flow": {"monodromy": CAT},
    "curves": {
        "seed_a": curve([((88, 97), (59, 89)), ((18403, 9700), (3166, 2225))], (1, 1)),
        "seed_b": curve([((88, 97), (65, 89)), ((17627, 9700), (18337, 8900))], (1, 2)),
        "seed_c": curve([((5, 97), (38, 89)), ((929, 4850), (2018, 2225)), ((1483, 2425), (6261, 4450))],
                        (1, 2)),
    },
    "expect": {"steadiness": {"seed_a": "steady", "seed_b": "steady", "seed_c": "steady"}},
}

SCENES["generic_period5"] = {
    "name": "two turns on one period-5 orbit of the cat map",
    "flow": {"monodromy": CAT},
    "curves": {"pair": curve([((0, 1), (1, 11)), ((3, 11), (-9, 11))], (0, 1)),
               "single": curve([((88, 97), (65, 89)), ((17627, 9700), (18337, 8900))], (1, 2))},
    "tolerances": {"period_bound": 5},
    "expect": {"generic": {"pair": False}},
}

SCENES["twist_battery"] = {
    "name": "twist battery over ten hyperbolic monodromies",
    "twist_scan": {
        "monodromies": [[[2, 1], [1, 1]], [[3, 1], [2, 1]], [[1, 1], [1, 2]], [[3, 2], [1, 1]],
                        [[2, 3], [1, 2]], [[4, 1], [3, 1]], [[5, 2], [2, 1]], [[1, 2], [1, 3]],
                        [[3, 1], [5, 2]], [[2, 1], [3, 2]]],
        "per_sign": 8, "n_max": 20, "class_bound": 6,
    },
}

SCENES["graph_lemma"] = {
    "name": "surgery graph queries and the structure lemma",
    "graph": {
        "neighbors": [{"vertex": [[0, 1], [-1, 0]], "bound": 2}],
        "reach": [
            {"source": [[0, 1], [-1, 0]], "target": [[1, 1], [-1, 0]], "witness_bound": 2, "depth_bound": 4},
            {"source": [[1, 1], [-1, 0]], "target": [[0, 1], [-1, 0]], "witness_bound": 2, "depth_bound": 4},
            {"source": [[0, 1], [-1, 0]], "target": [[0, 1], [-1, 0]], "witness_bound": 2, "depth_bound": 4},
            {"source": [[1, 0], [-2, 1]], "target": [[0, 1], [-1, 0]], "witness_bound": 4, "depth_bound": 8},
        ],
        "verify_lemma": {"edges": 10000, "entry_bound": 20, "witness_bound": 10, "box": 10,
                         "predecessors": 100, "levels": [2, 10], "seed": 0},
    },
}

SCENES["metric_flat"] = {
    "name": "flat seed metric on the cat-map suspension",
    "flow": {"monodromy": CAT},
    "metric": {"seed": "flat", "T": 10, "grid": [64, 16], "sweep": [2, 4, 8, 16], "target": r(21, 20)},
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in SCENES.items():
        (OUT / f"{name}.json").write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {len(SCENES)} scenes to {OUT}")


if __name__ == "__main__":
    main()
