import json
import math
import subprocess
import sys

import pytest

from loewner_range import cli, t_star


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_time():
    assert cli.parse_time("ln:2") == math.log(2)
    assert cli.parse_time("1.5") == 1.5
    for bad in ("ln:0.5", "-1", "abc", "nan"):
        with pytest.raises(Exception):
            cli.parse_time(bad)


def test_region_value_family(tmp_path, capsys):
    prefix = tmp_path / "v065"
    code, out, _ = run(capsys, "region", "--family", "v", "--z0", "0.65", "--T", "1.2", "--out", str(prefix))
    assert code == 0
    assert json.loads(out)["case"] == "SimplyConnected"
    doc = json.loads((tmp_path / "v065.json").read_text())
    assert list(doc) == ["family", "z0", "T", "case", "outer", "inner", "circle_arc", "markers"]
    assert doc["family"] == "ValueForward" and doc["inner"] is None
    csv = (tmp_path / "v065.csv").read_text().splitlines()
    assert csv[0] == "x0,r,sigma,re,im" and len(csv) == 1025
    first = csv[1].split(",")
    assert float(first[0]) == -1.0 and float(first[2]) == 0.0
    svg = (tmp_path / "v065.svg").read_text()
    assert svg.startswith("<svg") and "<circle" in svg


def test_region_preimage_with_marker(tmp_path, capsys):
    code, out, _ = run(capsys, "region", "--family", "w", "--z0", "0.4", "--T", "3",
                       "--out", str(tmp_path / "w04"), "--format", "json,svg")
    assert code == 0 and json.loads(out)["case"] == "CircleWithInnerBoundary"
    doc = json.loads((tmp_path / "w04.json").read_text())
    assert -1 < doc["markers"]["chi"] < 1
    assert doc["circle_arc"] == [-math.pi, math.pi]
    assert not (tmp_path / "w04.csv").exists()
    assert "χ" in (tmp_path / "w04.svg").read_text()


def test_region_free_family(tmp_path, capsys):
    code, out, _ = run(capsys, "region", "--family", "wfree", "--z0", "0.4", "--out", str(tmp_path / "f"),
                       "--n", "64")
    assert code == 0 and json.loads(out)["case"] == "CircleWithInnerBoundary"
    rows = [r.split(",") for r in (tmp_path / "f.csv").read_text().splitlines()[1:]]
    assert len(rows) == 64
    sig = [float(r[2]) for r in rows]
    assert sig[0] == 0.0 and sig[-1] == pytest.approx(math.pi)
    assert float(rows[0][1]) == pytest.approx(0.4)


def test_region_is_byte_identical(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(capsys, "region", "--family", "v", "--z0", "0.95", "--T", "3.5",
                   "--out", str(tmp_path / name))[0] == 0
    for ext in ("csv", "json", "svg"):
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def test_member(capsys):
    code, out, _ = run(capsys, "member", "--family", "wfree", "--z0", "0.4", "--point", "0.4,0")
    assert code == 0 and json.loads(out)["verdict"] == "Boundary"
    code, out, _ = run(capsys, "member", "--family", "wfree", "--z0", "0.4", "--point", "-0.5,0")
    assert code == 3 and json.loads(out)["verdict"] == "Outside"
    code, out, _ = run(capsys, "member", "--family", "v", "--z0", "0.5", "--T", "0.693147",
                       "--point", "0.381966,0")
    assert code == 0 and json.loads(out)["verdict"] == "Boundary"
    code, _, err = run(capsys, "member", "--family", "v", "--z0", "0.5", "--T", "1", "--point", "1,0")
    assert code == 2 and "unit disc" in err


def test_simulate(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--direction", "fwd", "--z0", "0.5", "--T", "0.693147",
                       "--driver", "const:3.14159265358979", "--out", str(tmp_path / "k"))
    assert code == 0
    rows = (tmp_path / "k.csv").read_text().splitlines()
    assert rows[0] == "t,re,im"
    t, re_, im_ = map(float, rows[-1].split(","))
    assert t == 0.693147 and re_ == pytest.approx(0.381966, abs=1e-6) and abs(im_) < 1e-8
    assert json.loads((tmp_path / "k.json").read_text())["blow_up"] is None

    code, out, _ = run(capsys, "simulate", "--direction", "inv", "--z0", "0.4", "--T", "0.5",
                       "--driver", "const:0", "--out", str(tmp_path / "b"))
    assert code == 0
    blow = json.loads((tmp_path / "b.json").read_text())["blow_up"]
    assert blow == pytest.approx(t_star(0.4), abs=1e-6)
    assert float((tmp_path / "b.csv").read_text().splitlines()[-1].split(",")[0]) == blow


def test_simulate_random_and_file_drivers(tmp_path, capsys):
    args = ["simulate", "--direction", "fwd", "--z0", "0.65", "--T", "1.2", "--driver", "random:8",
            "--seed", "7"]
    run(capsys, *args, "--out", str(tmp_path / "r1"))
    run(capsys, *args, "--out", str(tmp_path / "r2"))
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
    side = json.loads((tmp_path / "r1.json").read_text())
    (tmp_path / "drv.json").write_text(json.dumps(side["driver"]))
    run(capsys, "simulate", "--direction", "fwd", "--z0", "0.65", "--T", "1.2",
        "--driver", f"file:{tmp_path / 'drv.json'}", "--out", str(tmp_path / "r3"))
    assert (tmp_path / "r3.csv").read_bytes() == (tmp_path / "r1.csv").read_bytes()


def test_seed_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "7")
    run(capsys, "simulate", "--direction", "fwd", "--z0", "0.65", "--T", "1.2", "--driver", "random:8",
        "--out", str(tmp_path / "env"))
    monkeypatch.delenv(cli.SEED_ENV)
    run(capsys, "simulate", "--direction", "fwd", "--z0", "0.65", "--T", "1.2", "--driver", "random:8",
        "--seed", "7", "--out", str(tmp_path / "flag"))
    assert (tmp_path / "env.csv").read_bytes() == (tmp_path / "flag.csv").read_bytes()


def test_verify(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--suite", "duality", "--z0", "0.5", "--T", "0.693147")
    doc = json.loads(out)
    assert code == 0 and doc["max_error"] < 1e-10
    assert list(doc) == ["name", "trials", "failures", "max_error", "worst_margin", "elapsed_ms", "details"]
    args = ["verify", "--suite", "inclusion", "--trials", "100", "--seed", "1", "--no-timing"]
    code, first, _ = run(capsys, *args, "--out", str(tmp_path / "rep.json"))
    assert code == 0
    assert run(capsys, *args)[1] == first == (tmp_path / "rep.json").read_text()
    code, neg, _ = run(capsys, "verify", "--suite", "hamiltonian", "--beta", "-0.5", "--no-timing")
    code2, pos, _ = run(capsys, "verify", "--suite", "hamiltonian", "--beta", str(2 * math.pi - 0.5),
                        "--no-timing")
    assert code == code2 == 0 and json.loads(neg)["max_error"] == pytest.approx(json.loads(pos)["max_error"])


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--trials", "50", "--extremals", "2",
                       "--nodes", "5", "--no-timing")
    docs = json.loads(out)
    assert code == 0
    assert [d["name"] for d in docs] == ["inclusion", "extremal", "hamiltonian", "duality", "freetime"]


def test_usage_errors(capsys):
    assert run(capsys, "region", "--family", "v", "--z0", "0.5")[0] == 1
    assert run(capsys, "region", "--family", "v", "--z0", "0.5", "--T", "1", "--format", "png")[0] == 1
    assert run(capsys, "simulate", "--direction", "fwd", "--z0", "0.5", "--T", "1", "--driver", "x")[0] == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["region", "--family", "q", "--z0", "0.5"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 1


def test_numerical_errors(capsys):
    code, _, err = run(capsys, "region", "--family", "v", "--z0", "1.5", "--T", "1", "--format", "json")
    assert code == 2 and "error" in err


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "loewner_range", "member", "--family", "wfree",
                          "--z0", "0.4", "--point", "0.9,0"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["verdict"] == "Inside"
