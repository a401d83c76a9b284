import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from pflr_el.bspline import functional_design, make_basis
from pflr_el.cli import main, parse_knots
from pflr_el.dataio import read_dataset, write_dataset
from pflr_el.numerics import derive_seed
from pflr_el.pflr import Dataset


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def model2_csv(tmp_path, capsys):
    path = tmp_path / "m2.csv"
    assert run(capsys, "simulate", "--model", "2", "--n", "80", "--seed", "3", "--out", str(path))[0] == 0
    return path


class TestSimulate:
    def test_shape(self, model2_csv):
        data = read_dataset(model2_csv)
        assert data.n == 80 and data.p == 2 and data.X.curves.shape == (80, 101)

    def test_deterministic(self, capsys):
        a = run(capsys, "simulate", "--model", "1", "--n", "15", "--seed", "7", "--error", "skew")[1]
        b = run(capsys, "simulate", "--model", "1", "--n", "15", "--seed", "7", "--error", "skew")[1]
        c = run(capsys, "simulate", "--model", "1", "--n", "15", "--seed", "8", "--error", "skew")[1]
        assert a == b and a != c

    def test_unknown_model(self, capsys):
        assert run(capsys, "simulate", "--model", "9", "--n", "30")[0] == 2


class TestFit:
    def test_noiseless(self, tmp_path, capsys, model2_csv):
        data = read_dataset(model2_csv)
        beta = np.array([0.5, 2.0])
        clean = Dataset(data.Z, data.Z @ beta, data.X)
        path, js = tmp_path / "clean.csv", tmp_path / "fit.json"
        write_dataset(clean, path)
        code, out, _ = run(capsys, "fit", str(path), "--knots", "fixed:3", "--json", str(js))
        assert code == 0 and "beta_hat" in out
        summary = json.loads(js.read_text())
        np.testing.assert_allclose(summary["beta_hat"], beta, atol=1e-8)
        assert summary["k_n"] == 6 and summary["sigma2_hat"] < 1e-16

    def test_model2(self, tmp_path, capsys, model2_csv):
        js = tmp_path / "fit.json"
        assert run(capsys, "fit", str(model2_csv), "--json", str(js))[0] == 0
        np.testing.assert_allclose(json.loads(js.read_text())["beta_hat"], [5.0, -1.7], atol=0.5)

    def test_too_many_knots(self, capsys, tmp_path):
        path = tmp_path / "d.csv"
        run(capsys, "simulate", "--model", "2", "--n", "30", "--out", str(path))
        code, _, err = run(capsys, "fit", str(path), "--knots", "fixed:40")
        assert code == 2 and "error" in err

    def test_bad_knots_spec(self, capsys, model2_csv):
        assert run(capsys, "fit", str(model2_csv), "--knots", "many")[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "fit", str(tmp_path / "absent.csv"))[0] == 3

    def test_malformed_file(self, capsys, tmp_path, model2_csv):
        lines = model2_csv.read_text().splitlines()
        lines[4] = "oops," + lines[4].split(",", 1)[1]
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines))
        code, _, err = run(capsys, "fit", str(bad))
        assert code == 3 and "line 5" in err


def test_parse_knots():
    assert parse_knots("auto") is None and parse_knots("fixed:4") == 4


class TestRegion:
    def test_na_critical_value(self, capsys, model2_csv):
        code, out, _ = run(capsys, "region", str(model2_csv), "--beta", "5,-1.7", "--method", "NA",
                           "--gamma", "0.05")
        assert code == 0
        crit = float(next(l for l in out.splitlines() if l.startswith("critical value")).split("=")[1])
        assert crit == pytest.approx(5.99146, abs=1e-5)

    def test_el_hull_failure_verdict(self, capsys, tmp_path, model2_csv):
        # a covariate orthogonal to the spline design makes every score share the
        # sign of -(beta - beta_hat) once beta is far away
        data = read_dataset(model2_csv)
        B = functional_design(make_basis(2, 2), data.X)
        z = data.Z[:, :1] - B @ np.linalg.lstsq(B, data.Z[:, :1], rcond=None)[0]
        path = tmp_path / "orth.csv"
        write_dataset(Dataset(z, data.Y, data.X), path)
        code, out, _ = run(capsys, "region", str(path), "--beta", "1000", "--method", "EL",
                           "--knots", "fixed:2", "--mc-draws", "2000")
        assert code == 0
        assert "hull = failure" in out and "verdict: not contained (hull failure)" in out

    def test_beta_length_mismatch(self, capsys, model2_csv):
        assert run(capsys, "region", str(model2_csv), "--beta", "1,2,3")[0] == 2


class TestCoverage:
    ARGS = ["coverage", "--model", "2", "--n", "30", "--reps", "6", "--mc-draws", "1000",
            "--error", "normal", "--knots", "fixed:2"]

    def test_thread_count_invariant(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, *self.ARGS, "--threads", "1", "--out", str(a))[0] == 0
        assert run(capsys, *self.ARGS, "--threads", "4", "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert lines[0] == "model,n,gamma,error,method,coverage,reps,hull_failures,failures,elapsed_ms"
        assert len(lines) == 1 + 2 * 2

    def test_config_file_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": [2], "n": [30], "reps": 4, "gamma": [0.1],
                                   "error": "normal", "mc_draws": 1000, "knots": "fixed:2"}))
        code, out, _ = run(capsys, "coverage", "--config", str(cfg), "--reps", "3")
        assert code == 0
        rows = out.splitlines()[1:]
        assert len(rows) == 2 and all(r.split(",")[6] == "3" for r in rows)

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        assert run(capsys, "coverage", "--config", str(cfg))[0] == 2

    def test_model1_error_sd_override(self, capsys):
        base = ["coverage", "--model", "1", "--n", "30", "--reps", "20", "--mc-draws", "1000",
                "--error", "normal", "--knots", "fixed:1", "--gamma", "0.1"]
        default = run(capsys, *base)[1]
        assert run(capsys, *base, "--model1-error-sd", "0.6")[1] == default
        assert run(capsys, *base, "--model1-error-sd", "0")[0] == 2

    def test_bad_gamma(self, capsys):
        assert run(capsys, "coverage", "--gamma", "1.5", "--reps", "1")[0] == 2


def test_seed_keys_injective():
    seen = {}
    for model in (1, 2, 3):
        for n in (30, 50, 80, 150, 500):
            for e in (0, 1):
                for r in range(200):
                    s = derive_seed(20240101, model, n, e, r)
                    assert s not in seen, (seen.get(s), (model, n, e, r))
                    seen[s] = (model, n, e, r)


@pytest.mark.skipif(shutil.which("pflr-el") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["pflr-el", "simulate", "--model", "9", "--n", "30"], capture_output=True)
    assert res.returncode == 2
    res = subprocess.run([sys.executable, "-m", "pflr_el", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
