import json

import pytest
from typer.testing import CliRunner

from console_cli import app
from services.palp_service import emit_fan, emit_palp, emit_polytope

runner = CliRunner()


@pytest.fixture
def files(tmp_path, cross_polytope, cube, delta0_points, p3_fan):
    paths = {
        "cross": tmp_path / "cross.palp",
        "cube": tmp_path / "cube.palp",
        "delta0": tmp_path / "delta0.palp",
        "fan": tmp_path / "p3.json",
        "fermat": tmp_path / "fermat.mat",
    }
    paths["cross"].write_text(emit_polytope(cross_polytope))
    paths["cube"].write_text(emit_polytope(cube))
    paths["delta0"].write_text(emit_palp(delta0_points))
    paths["fan"].write_text(emit_fan(p3_fan))
    paths["fermat"].write_text(
        "5 5\n5 0 0 0 0\n0 5 0 0 0\n0 0 5 0 0\n0 0 0 5 0\n0 0 0 0 5\n"
    )
    return paths


def test_reflexive(files):
    result = runner.invoke(app, ["polytope", "reflexive", str(files["cross"])])
    assert result.exit_code == 0
    assert result.output.strip() == "reflexive: true"


def test_json_format(files):
    result = runner.invoke(app, ["--format", "json", "polytope", "reflexive", str(files["cross"])])
    assert result.exit_code == 0
    assert json.loads(result.output) == {"kind": "reflexive", "value": True}


def test_points(files):
    result = runner.invoke(app, ["polytope", "points", str(files["delta0"])])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "lattice_points: 5"
    assert "point: (0,0,0)" in lines


def test_iso(files):
    result = runner.invoke(app, ["polytope", "iso", str(files["cross"]), str(files["cube"])])
    assert result.exit_code == 0
    assert result.output.strip() == "isomorphic: false"


def test_polar(files, cube):
    result = runner.invoke(app, ["polytope", "polar", str(files["cross"])])
    assert result.exit_code == 0
    assert result.output == emit_polytope(cube)


def test_quasismooth():
    result = runner.invoke(app, ["wps", "quasismooth", "1,1,1,1"])
    assert result.exit_code == 0
    assert result.output.strip() == "quasismooth: true violating=none subsets=15"


def test_bad_weights():
    result = runner.invoke(app, ["wps", "delta", "2,4"])
    assert result.exit_code == 1
    assert "error:" in result.output
    assert "gcd 2" in result.output


def test_bhk(files):
    result = runner.invoke(app, ["mirror", "bhk", str(files["fermat"])])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "weights: (1,1,1,1,1) degree=5 calabi_yau=true"
    assert lines[2] == "dual_group: (5,5,5) free=0"


def test_resolve(files):
    result = runner.invoke(app, ["resolve", str(files["fan"]), str(files["delta0"])])
    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "rays: 34 cones=64"


def test_malformed_input(tmp_path):
    path = tmp_path / "broken.palp"
    path.write_text("3 4\n1 0 0\n")
    result = runner.invoke(app, ["polytope", "points", str(path)])
    assert result.exit_code == 1
    assert "line 2" in result.output


def test_audit_log(files, tmp_path):
    result = runner.invoke(app, ["polytope", "reflexive", str(files["cross"])])
    assert result.exit_code == 0
    events = [json.loads(x) for x in (tmp_path / "cache" / "audit.jsonl").read_text().splitlines()]
    assert events[-1]["event_type"] == "POLYTOPE_QUERY"
    assert "query=reflexive" in events[-1]["payload"]


def test_audit_off(files, tmp_path, monkeypatch):
    monkeypatch.setenv("RK_AUDIT", "off")
    result = runner.invoke(app, ["polytope", "reflexive", str(files["cross"])])
    assert result.exit_code == 0
    assert not (tmp_path / "cache" / "audit.jsonl").exists()


@pytest.mark.slow
def test_reid_classify():
    result = runner.invoke(app, ["reid", "classify"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "classes: 81"
    assert "group: (68,83,92)" in lines
