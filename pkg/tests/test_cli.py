import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from convextime.cli import evaluate, fmt, load_scene, main
from convextime.fixtures import box_scene


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def scene(tmp_path):
    path = tmp_path / "box.json"
    path.write_text(json.dumps(box_scene()))
    return str(path)


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


class TestEval:
    def test_sdist_exterior(self, scene):
        code, out = run("eval", "--scene", scene, "--fn", "sdist", "--point", "3,1")
        first, record = out.splitlines()
        assert code == 0 and first == "2.0 exterior"
        rec = json.loads(record)
        assert rec["value"] == 2.0 and rec["witness"] == [1.0, 1.0]

    def test_mintime_on_target(self, scene):
        code, out = run("eval", "--scene", scene, "--fn", "mintime", "--point", "0,0")
        assert code == 0 and out.splitlines()[0] == "0.0"

    def test_mu_exterior(self, scene):
        code, out = run("eval", "--scene", scene, "--fn", "mu", "--point", "3,1")
        assert out.splitlines()[0] == "inf"
        assert json.loads(out.splitlines()[1])["value"] == "inf"

    def test_negative_coordinates(self, scene):
        code, out = run("eval", "--scene", scene, "--fn", "signed", "--point", "-0.5,-0.25")
        assert code == 0 and out.splitlines()[0] == "-0.5 interior"

    def test_round_trip_formatting(self):
        assert fmt(0.1 + 0.2) == "0.30000000000000004"
        assert float(fmt(np.pi)) == np.pi

    def test_missing_set(self, tmp_path):
        path = write(tmp_path, "only.json", {"omega": box_scene()["omega"]})
        code, _ = run("eval", "--scene", path, "--fn", "gauge", "--point", "1,1")
        assert code == 2


class TestErrors:
    def test_schema_field(self, tmp_path, capsys):
        path = write(tmp_path, "bad.json", {"omega": {"type": "hpoly", "A": [[1, 0]], "b": [1, 2]}})
        code, _ = run("eval", "--scene", path, "--fn", "sdist", "--point", "1,1")
        assert code == 2
        assert "field 'omega'" in capsys.readouterr().err

    def test_json_line_column(self, tmp_path, capsys):
        path = write(tmp_path, "broken.json", '{\n  "omega": \n')
        code, _ = run("eval", "--scene", path, "--fn", "sdist", "--point", "1,1")
        assert code == 2
        assert "broken.json:3:" in capsys.readouterr().err

    def test_dynamics_without_interior_origin(self, tmp_path):
        doc = box_scene()
        doc["dynamics"] = {"type": "ball", "center": [2, 0], "radius": 1}
        code, _ = run("eval", "--scene", write(tmp_path, "s.json", doc), "--fn", "gauge", "--point", "1,0")
        assert code == 2

    def test_bad_point(self, scene):
        assert run("eval", "--scene", scene, "--fn", "sdist", "--point", "a,b")[0] == 2
        assert run("eval", "--scene", scene, "--fn", "sdist", "--point", "1,2,3")[0] == 2

    def test_unsupported(self, tmp_path):
        doc = {"omega": {"type": "ball", "center": [0, 0], "radius": 1}}
        code, _ = run("eval", "--scene", write(tmp_path, "b.json", doc), "--fn", "sdist", "--point", "2,0")
        assert code == 3

    def test_missing_file(self):
        assert run("eval", "--scene", "/nonexistent.json", "--fn", "sdist", "--point", "1,1")[0] == 2


class TestGrid:
    def test_rows_and_order(self, scene, tmp_path):
        out_path = tmp_path / "g.csv"
        code, _ = run("grid", "--scene", scene, "--fn", "signed", "--bbox", "-3,-3,3,3",
                      "--res", "101", "--out", str(out_path))
        assert code == 0
        rows = list(csv.reader(out_path.open()))
        assert rows[0] == ["x", "y", "value", "region"]
        assert len(rows) - 1 == 101 * 101
        # y is the outer loop
        assert rows[1][1] == rows[101][1] and rows[1][1] != rows[102][1]

    def test_node_matches_eval_bitwise(self, scene):
        _, text = run("grid", "--scene", scene, "--fn", "signed", "--bbox", "-3,-3,3,3", "--res", "61")
        rows = {(r["x"], r["y"]): r for r in csv.DictReader(io.StringIO(text))}
        node = rows[("3.0", "1.0")]
        _, out = run("eval", "--scene", scene, "--fn", "signed", "--point", "3,1")
        assert out.splitlines()[0] == f"{node['value']} {node['region']}"

    def test_region_matches_sign(self, scene):
        _, text = run("grid", "--scene", scene, "--fn", "signed", "--bbox", "-2,-2,2,2", "--res", "41")
        for r in csv.DictReader(io.StringIO(text)):
            v = float(r["value"])
            want = "interior" if v < -1e-7 else "exterior" if v > 1e-7 else "boundary"
            assert r["region"] == want

    def test_rejects_3d(self, tmp_path):
        doc = {"omega": {"type": "hpoly", "A": np.vstack([np.eye(3), -np.eye(3)]).tolist(), "b": [1] * 6}}
        code, _ = run("grid", "--scene", write(tmp_path, "c.json", doc), "--fn", "sdist",
                      "--bbox", "0,0,1,1", "--res", "3")
        assert code == 2


class TestSubdiff:
    def test_outside_member(self, scene):
        assert run("subdiff", "--scene", scene, "--point", "3,0", "--candidate", "1,0")[1] == "outside: member\n"
        assert run("subdiff", "--scene", scene, "--point", "3,0", "--candidate", "0,1")[1] == "outside: non-member\n"

    def test_in_target(self, scene):
        assert run("subdiff", "--scene", scene, "--point", "1,0", "--candidate", "0.5,0")[1] == "in_target: member\n"

    def test_describe_interior(self, scene):
        _, out = run("subdiff", "--scene", scene, "--point", "0,0", "--describe", "--fn", "sdist")
        doc = json.loads(out)
        assert doc["kind"] == "polytope"
        assert sorted(map(tuple, doc["vertices"])) == [(-1, 0), (0, -1), (0, 1), (1, 0)]

    def test_describe_corner(self, scene):
        _, out = run("subdiff", "--scene", scene, "--point", "1,1", "--describe", "--fn", "sdist")
        assert json.loads(out) == {"kind": "cone_sphere_hull", "generators": [[1.0, 0.0], [0.0, 1.0]]}

    def test_sdist_candidate(self, scene):
        assert run("subdiff", "--scene", scene, "--fn", "sdist", "--point", "1,1",
                   "--candidate", "0.4,0.4")[1] == "boundary: non-member\n"

    def test_five_dims_unsupported(self, tmp_path):
        doc = {"omega": {"type": "hpoly", "A": np.vstack([np.eye(5), -np.eye(5)]).tolist(), "b": [1] * 10}}
        code, _ = run("subdiff", "--scene", write(tmp_path, "d5.json", doc), "--fn", "sdist",
                      "--point", "1,1,0,0,0", "--describe")
        assert code == 3

    def test_needs_candidate_or_describe(self, scene):
        assert run("subdiff", "--scene", scene, "--point", "1,1")[0] == 2


class TestVerify:
    def test_sdist_seed_7_deterministic(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            assert run("verify", "sdist", "--seed", "7", "--out", str(p))[0] == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert json.loads(paths[0].read_text())["seed"] == 7

    def test_hex_seed_and_stdout(self):
        code, out = run("verify", "gauge", "--seed", "0x5EED", "--scale", "0.05")
        assert code == 0 and json.loads(out)["seed"] == 0x5EED

    def test_fault_exit_code(self):
        code, out = run("verify", "gauge", "--scale", "0.05", "--inject-fault", "gauge-scale")
        assert code == 1 and not json.loads(out)["passed"]


def test_module_entry_point(scene):
    out = subprocess.run([sys.executable, "-m", "convextime", "eval", "--scene", scene,
                          "--fn", "sdist", "--point", "3,1"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("2.0 exterior")


def test_load_scene_defaults(scene):
    s = load_scene(scene)
    assert s["seed"] == 0x5EED and s["tol"] == 1e-7
    assert evaluate(s, "gauge", np.array([3.0, 4.0]))[0] == 5.0
