import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from crossk.cli import main
from crossk.errors import InvalidArgument
from crossk.io import config_hash, jsonable, map_from_json, parse_family, resolve_map
from crossk.symbolic import SymReal


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def body(report):
    return {k: v for k, v in report.items() if k != "wall_time_s"}


def test_ktheory_report(capsys):
    code, rep, _ = run(capsys, "ktheory", "ji:2,3")
    assert code == 0
    assert rep["results"]["crossed_k"]["K0"]["pretty"] == "Z^4 + Z/6"
    assert rep["command"] == ["crossk", "ktheory", "ji:2,3"]
    assert set(rep["conventions"]) == {"column_map", "transpose", "convolution"}
    assert len(rep["config_hash"]) == 64
    code, rep, _ = run(capsys, "ktheory", "putnam")
    assert rep["results"]["crossed_k"]["K1"]["pretty"] == "Z^3"


def test_elliott_compare(capsys):
    _, rep, _ = run(capsys, "elliott", "compare", "ji:2,3", "ji:6,1")
    assert rep["results"]["verdict"]["equivalent"] is True
    _, rep, _ = run(capsys, "elliott", "compare", "rotation:theta", "rotation:phi",
                    "--identify", "union")
    assert rep["results"]["verdict"]["equivalent"] is False
    _, rep, _ = run(capsys, "elliott", "compare", "rotation:theta", "rotation:phi",
                    "--identify", "phi=theta")
    assert rep["results"]["verdict"]["equivalent"] is True
    code, _, err = run(capsys, "elliott", "compare", "rotation:theta", "rotation:phi")
    assert code == 2 and json.loads(err)["error"] == "InvalidArgument"


def test_tempered_reports(capsys):
    _, rep, _ = run(capsys, "tempered", "ji:1,1")
    assert rep["results"]["verdict"]["summary"] == "polynomial(2)"
    _, rep, _ = run(capsys, "tempered", "circle:0.1", "--max-n", "60")
    assert rep["results"]["verdict"]["class"] == "exponential"
    code, _, _ = run(capsys, "tempered", "circle:0.1", "--exact")
    assert code == 2


def test_conjugacy_and_limits(capsys):
    _, rep, _ = run(capsys, "conjugacy", "--ji", "2", "3")
    assert rep["results"]["verdict"]["status"] == "excluded"
    _, rep, _ = run(capsys, "--bound", "2", "conjugacy", "[[1,1],[0,1]]", "[[1,0],[1,1]]",
                    "--no-flip")
    assert rep["results"]["verdict"]["status"] == "similar"
    assert rep["config"]["bound"] == 2
    code, _, err = run(capsys, "conjugacy", "--ji", "2", "3", "--modcap", "65")
    assert code == 3 and json.loads(err)["error"] == "ResourceLimit"
    code, _, _ = run(capsys, "conjugacy", "[[1,2]", "[[1]]")
    assert code == 2


def test_global_flags_in_either_position(capsys):
    _, a, _ = run(capsys, "--seed", "4", "schweitzer", "suite", "--cases", "30",
                  "--search-prefix", "2")
    _, b, _ = run(capsys, "schweitzer", "suite", "--cases", "30", "--search-prefix", "2",
                  "--seed", "4")
    assert a["config"]["seed"] == b["config"]["seed"] == 4
    assert a["results"] == b["results"]
    assert a["results"]["passed"]


def test_reports_are_deterministic(capsys):
    argv = ["--seed", "3", "smoothcp", "bench", "rotation", "--samples", "5",
            "--axiom-cases", "3", "--d", "1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert body(a) == body(b)
    res = a["results"]
    assert res["unit_norm"] == 1.0
    assert res["axioms"]["associativity_max_error"] < 1e-9
    assert res["probe"]["max_ratio"] <= 1.0


def test_dynamics(capsys, tmp_path):
    out = tmp_path / "dyn.json"
    code = main(["--out", str(out), "dynamics", "rouhani:0.05", "--iterations", "2000",
                 "--f0", "0,0.5"])
    assert code == 0 and capsys.readouterr().out == ""
    rep = json.loads(out.read_text())["results"]
    assert rep["collapse_f0"][0]["image"] == [0.0, 0.0]
    assert math.hypot(*rep["ergodic_average"]) < 1e-2
    assert len(rep["winding_averages"]) == 2
    code, _, _ = run(capsys, "dynamics")
    assert code == 2


def test_map_files(capsys, tmp_path):
    good = tmp_path / "map.json"
    good.write_text(json.dumps({"kind": "torus", "basis": {"theta": 0.618},
                                "translation": [{"theta": "1"}, "0"],
                                "linear": [[1, 0], [3, 1]]}))
    code, rep, _ = run(capsys, "ktheory", str(good))
    assert code == 0
    assert rep["results"]["crossed_k"]["K0"]["pretty"] == "Z^3"
    assert rep["results"]["crossed_k"]["K1"]["pretty"] == "Z^3 + Z/3"
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "torus",\n "linear": [[1, 0], [0, 1]')
    code, _, err = run(capsys, "ktheory", str(bad))
    assert code == 2 and "line 2" in json.loads(err)["message"]
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"translation": [0.1, 0.2], "linear": [[2, 0], [0, 1]]}))
    code, _, _ = run(capsys, "ktheory", str(wrong))
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crossk.cli", "ktheory", "point"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["crossed_k"]["K0"]["pretty"] == "Z"


def test_io_helpers():
    assert parse_family("ji:2,3") == {"family": "ji", "m": 2, "n": 3}
    assert parse_family("putnam")["alpha"] == "alpha"
    with pytest.raises(InvalidArgument):
        parse_family("ji:2")
    with pytest.raises(InvalidArgument):
        parse_family("unknown")
    m = resolve_map("rotation:a,b")
    assert m.dim == 2 and m.basis["a"] != m.basis["b"]
    assert jsonable({"q": Fraction(1, 3), "z": 1 + 2j, "x": float("inf")}) == \
        {"q": "1/3", "z": [1.0, 2.0], "x": "inf"}
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    circ = map_from_json({"kind": "circle", "theta": 0.2,
                          "g": {"dimension": 1, "terms": [[[1], [0, -0.01]], [[-1], [0, 0.01]]]}})
    assert not circ.is_affine()
    sym = map_from_json({"translation": [{"theta": "1"}], "linear": [[1]]})
    assert sym.translation[0] == SymReal.symbol("theta")
