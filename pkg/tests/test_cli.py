import csv
import io as _io
import json

import numpy as np
import pytest

from tddnn.cli import main
from tddnn.config import PRESETS


def _rc(argv):
    # argparse reports its own errors through SystemExit
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def _rows(text):
    rows = list(csv.reader(_io.StringIO(text)))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def _rho(capsys, *argv):
    assert main(["rho", *argv]) == 0
    header, data = _rows(capsys.readouterr().out)
    assert header == ["d", "rho"]
    return data[:, 0], data[:, 1]


def test_rho_nn2b_case_a_scale(capsys):
    _, rho = _rho(capsys, "--variant", "nn2b", "--theta", "0.25", "--case", "case-a")
    assert 5e2 <= rho.max() <= 2e3


def test_rho_nn3b_case_b_scale(capsys):
    _, rho = _rho(capsys, "--variant", "nn3b", "--theta", "0.25", "--case", "case-b")
    assert 5e4 <= rho.max() <= 2e5


def test_rho_theta_zero_is_identity(capsys):
    d, rho = _rho(capsys, "--variant", "nn1b", "--theta", "0", "--case", "case-a")
    assert len(d) == 200 and np.all(rho == 1.0)


def test_rho_grid_flags_and_json(tmp_path, capsys):
    out = tmp_path / "r.csv"
    argv = ["rho", "--variant", "NN1A", "--theta1", "0.8", "--theta2", "0.2"]
    assert main([*argv, "--dmin", "1", "--dmax", "10", "--points", "7", "--out", str(out), "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["thetas"] == [0.8, 0.2]
    header, data = _rows(out.read_text())
    assert data.shape == (7, 2) and data[0, 0] == pytest.approx(1.0) and data[-1, 0] == pytest.approx(10.0)


def test_rho_is_byte_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["rho", "--variant", "nn3c", "--theta", "0.3", "--case", "case-b", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def _theta(capsys, *argv):
    assert main(["theta-opt", *argv]) == 0
    return json.loads(capsys.readouterr().out)


def test_theta_opt_nn2c_case_b(capsys):
    rep = _theta(capsys, "--variant", "nn2c", "--case", "case-b", "--mode", "both")
    assert rep["formula"]["theta"] == pytest.approx(0.285, abs=0.005)
    assert rep["numeric"]["theta"] == pytest.approx(0.265, abs=0.01)
    assert rep["gap"] > 0.015


def test_theta_opt_nn3a_case_b_numeric(capsys):
    rep = _theta(capsys, "--variant", "nn3a", "--case", "case-b", "--mode", "numeric")
    # 0.214 is the d -> 0 equioscillation; the [1e-2, 1e2] grid optimum sits near 0.22
    assert rep["numeric"]["theta"] == pytest.approx(0.214, abs=0.01)
    assert "formula" not in rep


def test_theta_opt_nn1c_case_a_flag(capsys):
    rep = _theta(capsys, "--variant", "nn1c", "--case", "case-a")
    assert rep["numeric"]["theta"] <= 0.01
    assert rep["flag"] == "no positive equioscillation"


@pytest.mark.parametrize("variant", ["nn2b", "nn3b"])
def test_theta_opt_divergent(capsys, variant):
    rep = _theta(capsys, "--variant", variant, "--case", "case-a")
    assert rep["status"] == "divergent for all theta>0"


def test_theta_opt_analysis_only_is_usage_error(capsys):
    assert main(["theta-opt", "--variant", "raw1b"]) == 1


def _iterate(tmp_path, *argv):
    out = tmp_path / "it"
    assert main(["iterate", *argv, "--out", str(out)]) == 0
    return out, json.loads((out / "summary.json").read_text())


def test_iterate_nn2a_rates(tmp_path):
    out, summary = _iterate(tmp_path, "--variant", "nn2a", "--theta", "0.249", "--points", "20")
    assert len(summary["modes"]) == 20
    assert all(m["relative_gap"] <= 0.01 for m in summary["modes"])
    traces = sorted((out / "traces").glob("*.csv"))
    assert len(traces) == 20
    assert traces[0].read_text().splitlines()[0] == "k,f,g,error_norm"


def test_iterate_raw1b_stagnation(tmp_path):
    _, summary = _iterate(tmp_path, "--variant", "raw1b", "--theta", "0.5", "--d", "1", "--max-iter", "30")
    assert summary["stagnation"] == "unit eigenvalue"
    (mode,) = summary["modes"]
    assert not mode["converged"]
    assert max(abs(complex(*e)) for e in mode["eigenvalues"]) == pytest.approx(1.0, abs=1e-10)


def test_iterate_loose_tolerance(tmp_path):
    _, summary = _iterate(tmp_path, "--variant", "nn2a", "--theta", "0.249", "--d", "1", "--tol", "0.5")
    (mode,) = summary["modes"]
    assert mode["rho_theory"] < 0.5
    assert mode["converged"] and mode["iterations"] <= 2


def test_iterate_divergence_is_a_finding(tmp_path):
    _, summary = _iterate(tmp_path, "--variant", "nn2b", "--theta", "0.25", "--d", "50", "--max-iter", "50")
    assert summary["modes"][0]["diverged"]


def test_iterate_init_arity(tmp_path, capsys):
    assert main(["iterate", "--variant", "nn2a", "--theta", "0.2", "--d", "1", "--init", "1", "2",
                 "--out", str(tmp_path)]) == 1


@pytest.fixture(scope="module")
def figures_a(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig")
    assert main(["figures", "--case", "case-a", "--out", str(out)]) == 0
    return out


def _fig(path):
    rows = list(csv.DictReader(path.open()))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def test_figures_files(figures_a):
    names = sorted(p.name for p in figures_a.iterdir())
    assert names == [
        "divergence_case-a.csv",
        "half_case-a.csv",
        "nn1a_case-a.csv",
        "optimal_case-a.csv",
        "optimal_thetas_case-a.json",
        "plot_figures.py",
    ]


def test_figures_optimal_nn2a_scale(figures_a):
    # the convergence factor of the method is the max over the spectrum; the
    # pointwise min sits next to a root of the factor and is far smaller
    rho = _fig(figures_a / "optimal_case-a.csv")["NN2a"]
    assert 1e-3 <= rho.max() < 1e-2
    assert rho.min() < rho.max()


def test_figures_half_nn2a_equals_nn3a(figures_a):
    cols = _fig(figures_a / "half_case-a.csv")
    assert np.max(np.abs(cols["NN2a"] - cols["NN3a"])) <= 1e-10


def test_figures_nn1a_shared_limit(figures_a):
    cols = _fig(figures_a / "nn1a_case-a.csv")
    assert cols["theta_0.8_0.2"][-1] == pytest.approx(0.8, abs=0.02)
    assert cols["theta_1.2_1.8"][-1] == pytest.approx(0.8, abs=0.02)


def test_figures_script_compiles(figures_a):
    compile((figures_a / "plot_figures.py").read_text(), "plot_figures.py", "exec")


def test_figures_deterministic(figures_a, tmp_path):
    assert main(["figures", "--case", "case-a", "--out", str(tmp_path), "--no-script"]) == 0
    for p in tmp_path.iterdir():
        assert p.read_bytes() == (figures_a / p.name).read_bytes()


def test_presets_are_immutable_constants():
    a, b = PRESETS["case-a"], PRESETS["case-b"]
    assert (a.nu, a.gamma, a.T, a.alpha) == (0.1, 0.0, 1.0, 0.5)
    assert (b.nu, b.gamma, b.T, b.alpha) == (10.0, 10.0, 5.0, 1.0)
    with pytest.raises(TypeError):
        PRESETS["case-a"] = b
    with pytest.raises(AttributeError):
        a.nu = 1.0


def test_json_case_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "case.json"
    cfg.write_text(json.dumps({"name": "mine", "nu": 0.1, "gamma": 0.0, "T": 1.0, "alpha": 0.5,
                               "d_grid": {"dmin": 0.1, "dmax": 10, "points": 5}}))
    d, _ = _rho(capsys, "--variant", "nn2a", "--theta", "0.2", "--case", str(cfg))
    assert len(d) == 5
    d, _ = _rho(capsys, "--variant", "nn2a", "--theta", "0.2", "--case", str(cfg), "--points", "9")
    assert len(d) == 9


def test_json_case_explicit_eigenvalues(tmp_path, capsys):
    cfg = tmp_path / "case.json"
    cfg.write_text(json.dumps({"name": "e", "nu": 1, "gamma": 1, "T": 2, "alpha": 1, "d_grid": [3, 1, 2]}))
    d, _ = _rho(capsys, "--variant", "nn2c", "--theta", "0.3", "--case", str(cfg))
    assert list(d) == [1.0, 2.0, 3.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["rho", "--variant", "nn9z", "--theta", "0.1"],
        ["rho", "--variant", "nn2a"],
        ["rho", "--variant", "nn2a", "--theta", "0.1", "--case", "case-z"],
        ["rho", "--variant", "nn2a", "--theta", "0.1", "--points", "0"],
        ["rho", "--variant", "nn2a", "--theta", "0.1", "--theta2", "0.2"],
        ["rho", "--variant", "nn2a", "--theta", "0.1", "--out", "/nonexistent/dir/r.csv"],
        ["spectrum", "--n", "0"],
        ["oracle", "--nt", "1"],
        ["bogus"],
    ],
)
def test_usage_errors(argv, capsys):
    assert _rc(argv) == 1
    assert capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, capsys):
    # nu = 1, gamma = 6: sigma gamma sinh b + beta cosh b has a root, where NN2b's
    # Omega2 flux condition is singular
    from scipy.optimize import brentq

    from tddnn import ControlProblem, mode_params
    from tddnn.closed_form import _terms

    p = ControlProblem(1.0, 6.0, 1.0, 0.5)
    d0 = brentq(lambda d: float(_terms(mode_params(p, d)).Gs), 0.2, 2.0, xtol=1e-15)
    cfg = tmp_path / "case.json"
    cfg.write_text(json.dumps({"name": "sing", "nu": 1, "gamma": 6, "T": 1, "alpha": 0.5}))
    argv = ["iterate", "--variant", "nn2b", "--theta", "0.25", "--case", str(cfg), "--d", repr(d0), "--d", "0.1"]
    assert main([*argv, "--out", str(tmp_path / "it")]) == 2
    assert "vanishing interface coefficient" in capsys.readouterr().err
    summary = json.loads((tmp_path / "it" / "summary.json").read_text())
    assert "failure" in summary and [m["d"] for m in summary["modes"]] == [0.1]


def test_spectrum_command(capsys):
    assert main(["spectrum", "--n", "3"]) == 0
    lines = capsys.readouterr().out.split()
    assert lines[0] == "d" and len(lines) == 4
    assert float(lines[1]) == pytest.approx(16 * (2 - np.sqrt(2)), rel=1e-12)


def test_oracle_command(capsys):
    assert main(["oracle", "--case", "case-a", "--d", "0.5", "--nt", "50", "--json"]) == 0
    captured = capsys.readouterr()
    header, data = _rows(captured.out)
    assert header == ["t", "z", "mu"] and data.shape == (51, 3)
    assert data[0, 1] == 1.0
    assert json.loads(captured.err)["residual"] <= 1e-9
