import json
import subprocess
import sys

import pytest

from goodman_lab import cli
from goodman_lab.scene import Scene, SceneError, bundled_path, bundled_scenes


def run(argv):
    out = []
    code = cli.main(argv, out=out.append)
    return code, "".join(out)


@pytest.mark.parametrize("name", bundled_scenes())
def test_scene_round_trip(name):
    sc = Scene.load(name)
    again = Scene.from_json(json.loads(json.dumps(sc.to_json())))
    assert again.to_json() == sc.to_json()
    assert again.digest() == sc.digest()


@pytest.mark.parametrize("argv,code", [
    (["steadiness", "--scene", "constant_slope_1"], 0),
    (["steadiness", "--scene", "braid_positive", "--curve", "braided"], 1),
    (["steadiness", "--scene", "braid_negative"], 0),
    (["steadiness", "--scene", "mixed_sign"], 2),
    (["generic", "--scene", "generic_period5", "--curve", "pair"], 1),
    (["generic", "--scene", "generic_period5", "--curve", "single"], 0),
    (["certify", "--scene", "cat_map_reference"], 0),
    (["certify", "--scene", "cat_map_R1"], 1),
    (["certify", "--scene", "identity_profile"], 0),
    (["cones", "--scene", "cat_map_reference", "--steps", "5"], 0),
    (["annulus", "--scene", "cat_map_reference"], 0),
    (["twist-scan", "--scene", "twist_battery"], 0),
    (["graph", "neighbors", "--scene", "graph_lemma"], 0),
    (["graph", "reach", "--scene", "graph_lemma"], 2),
    (["steadiness", "--scene", "no_such_scene"], 3),
    (["certify", "--scene", "cat_map_reference", "--surgery", "9"], 3),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_report_fields_and_determinism():
    code1, a = run(["certify", "--scene", "cat_map_reference"])
    code2, b = run(["certify", "--scene", "cat_map_reference"])
    assert code1 == code2 == 0 and a == b
    rep = json.loads(a)
    assert {"command", "scene", "scene_hash", "tool_version", "surgeries"} <= set(rep)
    assert "timings" not in rep
    cert = rep["surgeries"][0]["certificate"]
    assert cert["q_min"]["p"] == [1, 1] and cert["L"] == [1, 1]
    _, t = run(["certify", "--scene", "cat_map_reference", "--timings"])
    assert "timings" in json.loads(t)


def test_reach_paths_replay():
    _, text = run(["graph", "reach", "--scene", "graph_lemma"])
    qs = json.loads(text)["queries"]
    assert [q["status"] for q in qs] == ["found", "found", "found", "exhausted"]
    assert [len(q["path"]) for q in qs[:3]] == [1, 1, 0]
    assert all(q["replays"] for q in qs)


def test_twist_csv_and_out_file(tmp_path):
    out = tmp_path / "t.csv"
    assert cli.main(["twist-scan", "--scene", "twist_battery", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("a,b,c,d,x0,y0,sign,n")
    assert len(lines) == 1 + 6400


def test_bad_scene_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["steadiness", "--scene", str(p)])[0] == 3
    data = json.loads(bundled_path("cat_map_reference").read_text())
    data["annuli"]["A"]["curve"] = "missing"
    p.write_text(json.dumps(data))
    with pytest.raises(SceneError, match=r"annuli"):
        Scene.load(p)
    data = json.loads(bundled_path("constant_slope_1").read_text())
    first = next(iter(data["curves"]))
    data["curves"][first]["straight"]["homology"] = [2, 2]
    p.write_text(json.dumps(data))
    assert run(["steadiness", "--scene", str(p)])[0] == 3


def test_rationals_must_be_pairs(tmp_path):
    data = json.loads(bundled_path("cat_map_reference").read_text())
    data["annuli"]["A"]["width"] = 0.5
    p = tmp_path / "f.json"
    p.write_text(json.dumps(data))
    with pytest.raises(SceneError):
        Scene.load(p)


def test_braid_word_flag():
    code, text = run(["braid", "--scene", "braid_positive", "--curve", "core", "--word", "-1"])
    assert code == 0
    assert next(iter(json.loads(text)["curves"].values()))["verdict"] == "steady"
    assert run(["braid", "--scene", "braid_positive", "--curve", "core", "--word", "1"])[0] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "goodman_lab.cli", "steadiness", "--scene", "constant_slope_2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "steadiness"
