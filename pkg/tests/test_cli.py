import numpy as np
import pytest

from heatwiener.cli import RunConfig, main
from heatwiener.errors import SpecError

PAIR = {"geometry": "torus-1", "type": "atomic", "atoms": [{"point": 0, "weight": 0.5}, {"point": 0.5, "weight": 0.5}]}
CANTOR = {"geometry": "torus-1", "type": "cantor"}
SU2_E = {"geometry": "su2", "type": "atomic", "atoms": [{"point": [1, 0, 0, 0], "weight": 1}]}
SU2_G = {"geometry": "su2", "type": "atomic", "atoms": [{"point": [0.6, 0.0, 0.8, 0.0], "weight": 1}]}
HEIS_U = {"geometry": "heisenberg-1", "type": "uniform"}


def report_value(text, key):
    for line in text.splitlines():
        if line.startswith(key + " "):
            return float(line.split()[1])
    raise KeyError(key)


@pytest.mark.parametrize(
    "kw",
    [dict(ratio=1.0), dict(ratio=0.0), dict(samples=3), dict(eps=0.0), dict(eps=0.02), dict(functional="both")],
)
def test_run_config_invariants(kw):
    with pytest.raises(SpecError):
        RunConfig("estimate", spec="x.json", **kw)


def test_estimate_pair(write_spec, capsys):
    assert main(["estimate", "--spec", write_spec(PAIR)]) == 0
    out = capsys.readouterr().out
    assert report_value(out, "estimate") == pytest.approx(0.5, abs=1e-3)
    assert report_value(out, "ground_truth") == 0.5
    assert report_value(out, "deviation") < 1e-3


def test_estimate_su2_generic_atom(write_spec, capsys):
    spec = {"geometry": "su2", "type": "atomic", "atoms": [{"point": [0.3, 0.5, -0.2, 0.7874007874011811], "weight": 1}]}
    assert main(["estimate", "--spec", write_spec(spec), "--functional", "matrix"]) == 0
    assert report_value(capsys.readouterr().out, "estimate") == pytest.approx(1.0, abs=1e-3)


def test_estimate_heisenberg_uniform(write_spec, capsys):
    assert main(["estimate", "--spec", write_spec(HEIS_U)]) == 0
    assert abs(report_value(capsys.readouterr().out, "estimate")) <= 1e-3


def test_sweep_header_and_determinism(write_spec, tmp_path):
    spec = write_spec(CANTOR)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--spec", spec, "--out", str(a), "--seed", "7"]) == 0
    assert main(["sweep", "--spec", spec, "--out", str(b), "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "t,ratio,trace,trunc_bound"
    ratios = np.array([float(r.split(",")[1]) for r in lines[1:]])
    assert np.all(ratios > 0) and np.all(np.diff(ratios) < 0)


def test_sweep_three_samples_is_input_error(write_spec):
    assert main(["sweep", "--spec", write_spec(CANTOR), "--samples", "3"]) == 2


@pytest.mark.parametrize(
    "spec, code",
    [
        ({"geometry": "torus-1", "type": "atomic", "atoms": [{"point": 0, "weight": 0.7}]}, 2),
        ({"geometry": "su2", "type": "cantor"}, 2),
        ({"geometry": "torus-1", "type": "uniform", "extra": 1}, 2),
    ],
)
def test_spec_errors_exit_2(write_spec, spec, code, capsys):
    assert main(["estimate", "--spec", write_spec(spec)]) == code
    assert "error" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["estimate", "--spec", str(tmp_path / "none.json")]) == 2


def test_geometry_conflict_exit_2(write_spec):
    assert main(["estimate", "--spec", write_spec(PAIR), "--geometry", "su2"]) == 2


def test_numeric_failure_exit_3(write_spec, capsys):
    code = main(["sweep", "--spec", write_spec({"geometry": "torus-2", "type": "uniform"}), "--t0", "1e-6", "--samples", "4"])
    assert code == 3
    assert "t=1e-06" in capsys.readouterr().err


def test_compare_su2_identity(write_spec, tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--spec", write_spec(SU2_E), "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "t,W_character,W_matrix,trace_character,trace_matrix"
    vals = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    np.testing.assert_allclose(vals[:, 1], 1.0, atol=1e-12)
    np.testing.assert_allclose(vals[:, 2], 1.0, atol=1e-12)
    assert "DISCREPANCY" not in capsys.readouterr().out


def test_compare_su2_noncentral_flags_discrepancy(write_spec, capsys):
    assert main(["compare", "--spec", write_spec(SU2_G)]) == 0
    out = capsys.readouterr().out
    assert report_value(out, "matrix.estimate") == pytest.approx(1.0, abs=1e-3)
    assert "DISCREPANCY functional=character" in out
    assert "DISCREPANCY functional=matrix" not in out


def test_compare_torus_agreement(write_spec, tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--spec", write_spec(PAIR), "--out", str(out)]) == 0
    report = capsys.readouterr().out
    assert "cesaro N=4096" in report
    assert report.strip().splitlines()[-1].endswith("PASS")
    assert out.read_text().splitlines()[0] == "N,cesaro,t,heat_ratio"


def test_compare_heisenberg_is_input_error(write_spec):
    assert main(["compare", "--spec", write_spec(HEIS_U)]) == 2


@pytest.mark.parametrize("geometry", ["torus-1", "torus-2", "su2"])
def test_validate_passes(geometry, capsys):
    assert main(["validate", "--geometry", geometry]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("CHECK")]
    assert lines and all(ln.endswith("PASS") for ln in lines)
    assert all(" tol=" in ln and " margin=" in ln for ln in lines)


def test_validate_heisenberg_reports_each_check(capsys):
    code = main(["validate", "--geometry", "heisenberg-1", "--seed", "0"])
    out = capsys.readouterr().out
    status = {ln.split()[1]: ln.split()[-1] for ln in out.splitlines() if ln.startswith("CHECK")}
    assert status["orthonormality"] == "PASS"
    assert status["type2_multiplicity"] == "PASS"
    assert status["trace_slope"] == "PASS"
    assert status["diagonal_constancy_t=0.4"] == "PASS"
    # the diagonal is not constant at t = 0.2 (see test_heisenberg); the command reports it
    assert status["diagonal_constancy_t=0.2"] == "FAIL"
    assert code == 1


def test_validate_needs_geometry():
    assert main(["validate"]) == 2


def test_budget_scale_flag(write_spec, tmp_path):
    spec = write_spec(CANTOR)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--spec", spec, "--out", str(a)]) == 0
    assert main(["sweep", "--spec", spec, "--out", str(b), "--budget-scale", "2"]) == 0
    ra = np.loadtxt(a, delimiter=",", skiprows=1)[:, 1]
    rb = np.loadtxt(b, delimiter=",", skiprows=1)[:, 1]
    assert np.max(np.abs(ra - rb)) < 1e-9
