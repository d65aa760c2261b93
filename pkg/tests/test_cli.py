import json
import subprocess
import sys

import numpy as np
import pytest

from symroof import cli, roofs
from symroof.records import OutputRecord, read_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def field(out, name):
    for line in out.splitlines():
        if line.startswith(name + ":"):
            return line.split(":", 1)[1].strip()
    raise KeyError(name)


def test_eval_roof_werner(capsys):
    code, out, _ = run(capsys, "eval-roof", "--family", "werner", "--a", "0.75", "--monotone", "vidal:1")
    assert code == 0
    assert float(field(out, "value")) == pytest.approx(0.066987, abs=1e-6)
    assert field(out, "profile_kind") == "werner_psi"


def test_eval_roof_isotropic(capsys):
    code, out, _ = run(capsys, "eval-roof", "--family", "iso", "--b", "0.4", "--d", "5", "--monotone", "vidal:2")
    assert code == 0
    assert float(field(out, "value")) == 0


def test_eval_roof_open_region(capsys):
    code, _, err = run(capsys, "eval-roof", "--family", "oo", "--a", "0.7", "--b", "0.3", "--d", "3",
                       "--monotone", "entropy")
    assert code == 2
    assert "region C" in err


def test_eval_roof_json(capsys):
    code, out, _ = run(capsys, "eval-roof", "--family", "oo", "--a", "0.05", "--b", "0.9", "--d", "5",
                       "--monotone", "vidal:3", "--json")
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == "symroof/1"
    assert body["metadata"]["region"] == "iso_orbit"
    assert body["columns"]["value"][0] == pytest.approx(roofs.iso_vidal_roof(3, 0.9, 5), abs=1e-15)


def test_eval_roof_bad_monotone(capsys):
    code, _, _ = run(capsys, "eval-roof", "--family", "werner", "--a", "0.5", "--monotone", "bogus")
    assert code == 2


@pytest.mark.parametrize("argv,verdict", [
    (["--lambda", "0.5,0.5", "--target", "werner:0.9"], "Go"),
    (["--lambda", "0.6,0.3,0.1", "--target", "iso:0.95", "--d", "3"], "NoGo"),
    (["--lambda", "1,0", "--target", "werner:0.75"], "NoGo"),
])
def test_eval_witness_examples(capsys, argv, verdict):
    code, out, _ = run(capsys, "eval-witness", *argv)
    assert code == 0
    assert field(out, "verdict") == verdict


def test_eval_witness_two_qubit_file(capsys, tmp_path):
    rho = np.zeros((4, 4))
    rho[np.ix_([0, 3], [0, 3])] = 0.5
    path = tmp_path / "bell.npy"
    np.save(path, rho)
    code, out, _ = run(capsys, "eval-witness", "--lambda", "1,0", "--target", f"twoqubit:{path}")
    assert code == 0
    assert float(field(out, "value")) == pytest.approx(-0.5)


@pytest.mark.parametrize("lam", ["0.6,0.3,x", "", "0.6,0.3", "0.7,-0.1,0.4"])
def test_eval_witness_malformed_lambda(capsys, lam):
    code, _, err = run(capsys, "eval-witness", "--lambda", lam, "--target", "werner:0.8")
    assert code == 2
    assert err.startswith("error:")


def test_lambda_sum_tolerance(capsys):
    assert run(capsys, "eval-witness", "--lambda", "0.6,0.3,0.1000000005", "--target", "werner:0.8")[0] == 0
    assert run(capsys, "eval-witness", "--lambda", "0.6,0.3,0.100001", "--target", "werner:0.8")[0] == 2
    assert run(capsys, "eval-witness", "--lambda", "6,3,1", "--normalize", "--target", "werner:0.8")[0] == 0


def test_unknown_target(capsys):
    assert run(capsys, "eval-witness", "--lambda", "1", "--target", "gauss:1")[0] == 2


def test_vidal_iso_figure(capsys, tmp_path):
    path = tmp_path / "v.csv"
    code, out, _ = run(capsys, "emit-figure", "vidal-iso", "--d", "5", "--out", str(path))
    assert code == 0 and "wrote" in out
    meta, cols = read_csv(path)
    assert list(cols) == ["b", "E1", "E2", "E3", "E4"]
    assert cols["b"].size == 201
    assert meta["schema"] == "symroof/1"
    for k in range(1, 5):
        ref = [roofs.iso_vidal_roof(k, b, 5) for b in cols["b"]]
        assert np.array_equal(cols[f"E{k}"], ref)


def test_t_opt_figure(capsys, tmp_path):
    path = tmp_path / "t.csv"
    assert run(capsys, "emit-figure", "t-opt", "--d", "5", "--points", "51", "--out", str(path))[0] == 0
    _, cols = read_csv(path)
    assert cols["t_top_heavy"][-1] == pytest.approx(0.2)
    assert cols["t_truncated"][-1] == pytest.approx(0.2)
    assert cols["b"][0] == pytest.approx(0.2)


def test_surface_figure(capsys, tmp_path):
    path = tmp_path / "s.json"
    assert run(capsys, "emit-figure", "oo-vidal-surface", "--d", "3", "--points", "11", "--out", str(path))[0] == 0
    body = json.loads(path.read_text())
    regions = body["metadata"]["region"]
    assert len(regions) == 121
    assert {"werner_orbit", "iso_orbit", "unknown", "invalid"} <= set(regions)
    e1 = body["columns"]["E1"]
    assert all((v is None) == (r in ("unknown", "invalid")) for v, r in zip(e1, regions))


def test_witness_curve_figure(capsys, tmp_path):
    path = tmp_path / "w.csv"
    code, out, _ = run(capsys, "--seed", "3", "emit-figure", "witness-curve", "--d", "3", "--lambda", "0.6,0.3,0.1",
                       "--points", "11", "--starts", "16", "--out", str(path))
    assert code == 0
    b0 = float(field(out, "zero_crossing"))
    assert 0.890 <= b0 <= 0.900
    meta, cols = read_csv(path)
    assert json.loads(meta["seed"]) == 3
    assert cols["W"][-1] < 0 < cols["W"][0]


def test_figures_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "emit-figure", "t-opt", "--points", "21", "--out", str(a))
    run(capsys, "emit-figure", "t-opt", "--points", "21", "--out", str(b))
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith(("# timestamp", "# command"))]  # noqa: E731
    assert strip(a) == strip(b)


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "emit-figure", "t-opt", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 3
    assert "cannot write" in err


def test_too_few_points(capsys):
    assert run(capsys, "emit-figure", "t-opt", "--points", "1")[0] == 2


def test_record_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    cols = {"x": rng.standard_normal(50), "y": rng.uniform(size=50) * 1e-300}
    rec = OutputRecord("test", cols, {"note": "x"})
    rec.write(tmp_path / "r.csv")
    _, back = read_csv(tmp_path / "r.csv")
    for k in cols:
        assert np.array_equal(back[k], cols[k])
    rec.write(tmp_path / "r.json")
    body = json.loads((tmp_path / "r.json").read_text())
    assert np.array_equal(body["columns"]["x"], cols["x"])
    with pytest.raises(ValueError):
        OutputRecord("bad", {"a": [1, 2], "b": [1]})


def test_verify_fast_is_deterministic(capsys, tmp_path):
    code1, out1, _ = run(capsys, "verify", "fast", "--seed", "7", "--out", str(tmp_path / "r.json"))
    code2, out2, _ = run(capsys, "verify", "fast", "--seed", "7")
    assert code1 == 0 and code2 == 0
    assert out1 == out2
    assert "all" in out1.splitlines()[-1]
    report = json.loads((tmp_path / "r.json").read_text())
    assert all(c["passed"] for c in report["metadata"]["checks"])


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SYMROOF_SEED", "11")
    args = cli.build_parser().parse_args(["verify", "fast"])
    assert args.seed is None
    assert cli._default_seed() == 11


def test_help_lists_exit_codes():
    text = cli.build_parser().format_help()
    for code in ("0", "1", "2", "3"):
        assert f"  {code}  " in text


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "symroof.cli", "eval-roof", "--family", "werner", "--a", "1",
                          "--monotone", "entropy"], capture_output=True, text=True)
    assert out.returncode == 0
    assert float(field(out.stdout, "value")) == pytest.approx(1)
