import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from hlab import spec_to_dict
from hlab.cli import main

from conftest import (
    make_cantor_spec,
    make_diamond_spec,
    make_overlapping_spec,
    make_sierpinski_spec,
)


@pytest.fixture()
def cantor_file(tmp_path):
    path = tmp_path / "cantor.json"
    path.write_text(json.dumps(spec_to_dict(make_cantor_spec())))
    return str(path)


def run_cli(*argv):
    return main(list(argv))


def test_render_writes_csv_and_sidecar(tmp_path, cantor_file, capsys):
    out = str(tmp_path / "render")
    assert run_cli("render", cantor_file, "--steps", "10", "--out", out) == 0
    capsys.readouterr()
    sidecar = json.loads(Path(out + ".json").read_text())
    assert sidecar == {
        "c": "1/3",
        "error_bound": "1/118098",
        "h01": "1/3",
        "n": 10,
        "pruning_slack": 0,
        "truncation": None,
    }
    rows = [
        line
        for line in Path(out + ".csv").read_text().splitlines()
        if not line.startswith("#")
    ]
    assert len(rows) == 2**10


def test_render_is_byte_deterministic(tmp_path, cantor_file, capsys):
    out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
    run_cli("render", cantor_file, "--steps", "8", "--out", out1, "--png", "64")
    run_cli("render", cantor_file, "--steps", "8", "--out", out2, "--png", "64")
    capsys.readouterr()
    for ext in (".csv", ".json", ".png"):
        assert Path(out1 + ext).read_bytes() == Path(out2 + ext).read_bytes()


def test_render_2d_png(tmp_path, capsys):
    spec_path = tmp_path / "s.json"
    spec_path.write_text(json.dumps(spec_to_dict(make_sierpinski_spec())))
    out = str(tmp_path / "tri")
    assert run_cli("render", str(spec_path), "--steps", "6", "--out", out,
                   "--png", "128") == 0
    capsys.readouterr()
    from PIL import Image

    img = Image.open(out + ".png")
    assert img.size[0] == 128


def test_render_needs_stopping_rule(cantor_file, capsys):
    assert run_cli("render", cantor_file) == 1
    assert "usage error" in capsys.readouterr().err


def test_verify_exit_codes(tmp_path, cantor_file, capsys):
    assert run_cli("verify", "non-overlapping", cantor_file) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "holds"
    assert report["margin"] == "1/3"

    bad = tmp_path / "overlap.json"
    bad.write_text(json.dumps(spec_to_dict(make_overlapping_spec())))
    assert run_cli("verify", "non-overlapping", str(bad)) == 2
    capsys.readouterr()

    maybe = tmp_path / "diamond.json"
    maybe.write_text(json.dumps(spec_to_dict(make_diamond_spec())))
    assert run_cli("verify", "non-overlapping", str(maybe)) == 3
    capsys.readouterr()


def test_verify_strongly_and_ssc(cantor_file, capsys):
    assert run_cli("verify", "strongly-non-overlapping", cantor_file, "--depth", "4") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["margin"] == "1/81"

    assert run_cli("verify", "ssc", cantor_file, "--steps", "8") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["property"] == "ssc"
    assert report["verdict"] == "holds"


def test_verify_locally_finite_family(tmp_path, capsys):
    from conftest import make_geometric_family_spec

    path = tmp_path / "family.json"
    path.write_text(json.dumps(spec_to_dict(make_geometric_family_spec())))
    assert run_cli("verify", "locally-finite", str(path)) == 2
    report = json.loads(capsys.readouterr().out)
    assert report["witness"] == ["0"]

    assert run_cli("verify", "non-overlapping", str(path), "--truncate", "12") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["details"]["truncation"] == 12


def test_code_subcommand(cantor_file, capsys):
    assert run_cli("code", cantor_file, "--word", "1.2", "--steps", "10") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["point"] == ["2/9"]
    assert F(data["error_bound"]) <= F(1, 9) * 2

    assert run_cli("code", cantor_file, "--word", "1.2.1", "--depth", "2") == 0
    assert json.loads(capsys.readouterr().out)["point"] == ["2/9"]

    assert run_cli("code", cantor_file, "--word", "1", "--depth", "3") == 1
    capsys.readouterr()


def test_bounds_subcommand(cantor_file, capsys):
    assert run_cli("bounds", cantor_file, "--steps", "8", "--depth", "8") == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["property"] for r in reports] == [
        "convergence-rate",
        "coding-lipschitz",
        "inverse-modulus",
    ]
    assert all(r["verdict"] == "holds" for r in reports)


def test_lattice_file_mode(tmp_path, capsys):
    path = tmp_path / "lat.json"
    path.write_text(
        json.dumps(
            {
                "universe": ["0", "1", "2", "3"],
                "maps": {
                    "a": {"0": "0", "1": "0", "2": "0", "3": "0"},
                    "b": {"0": "1", "1": "1", "2": "1", "3": "1"},
                },
            }
        )
    )
    assert run_cli("lattice", str(path)) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["gfp"] == ["0", "1"]
    assert data["steps"] == 1
    assert data["premises"]["verdict"] == "holds"


def test_lattice_demos(capsys):
    assert run_cli("lattice", "--demo", "remark31", "10", "10") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["property"] == "gfp-continuity-counterexample"
    assert data["details"]["intersection"] == "[0, 1/10] u [9/10, 1)"

    assert run_cli("lattice", "--demo", "image-closure", "5") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["details"]["inf_of_union"] == "1/512"

    assert run_cli("lattice", "--demo", "remark42", "5") == 0
    capsys.readouterr()

    assert run_cli("lattice", "--demo", "nope", "1") == 1
    capsys.readouterr()


def test_usage_and_spec_errors(tmp_path, capsys):
    assert run_cli("render", str(tmp_path / "missing.json"), "--steps", "2") == 1
    err = capsys.readouterr().err
    assert "error" in err

    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run_cli("verify", "ssc", str(bad)) == 1
    capsys.readouterr()

    assert run_cli("render", str(bad), "--steps", "-3") == 1
    capsys.readouterr()


def test_exact_flag_rejects_float_spec(tmp_path, capsys):
    path = tmp_path / "float.json"
    path.write_text(json.dumps(spec_to_dict(make_sierpinski_spec())))
    assert run_cli("render", str(path), "--steps", "3", "--exact") == 1
    capsys.readouterr()
