import json
import subprocess
import sys

import pytest

from mdsforge.cli import _clean, build_parser, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_verify_weyl(capsys):
    code, rep, _ = run(["verify", "weyl"], capsys)
    assert code == 0 and rep["pass"] and rep["schema"] == 1
    assert set(rep) == {"schema", "command", "config", "results", "pass", "wall_time"}
    assert all(rep["results"]["invariance"].values())


def test_verify_corr_with_form_after_subcommand(capsys):
    code, rep, _ = run(["verify", "corr", "--form", "level9w4"], capsys)
    assert code == 0 and rep["config"]["form"] == "level9w4"
    assert rep["results"]["max_residual_P"] < 1e-10


def test_eval_z_report(capsys, tmp_path):
    out = tmp_path / "z.json"
    code, rep, _ = run(["--output", str(out), "eval", "z", "--s", "3", "--w", "3", "--rep", "all",
                        "--a2c2=-1,1", "--cutoff", "800"], capsys)
    assert code == 0
    evals = rep["results"]["evaluations"]
    assert [e["representation"] for e in evals] == ["raw", "rep1", "rep2"]
    for e in evals:
        assert set(e["residuals"]) == {"raw", "rep1", "rep2"} - {e["representation"]}
    assert json.loads(out.read_text()) == rep


def test_eval_region_guard_exit_code(capsys):
    code, rep, err = run(["eval", "z", "--s", "1", "--w", "3", "--rep", "raw"], capsys)
    assert code == 2 and rep is None and "region guard" in err


def test_lvalue(capsys):
    code, rep, _ = run(["lvalue", "--s", "0.5", "--d0", "5"], capsys)
    assert code == 0 and rep["results"]["root_number"] == 1
    assert rep["results"]["fe_residual"] < 1e-6


def test_scatter(capsys):
    code, rep, _ = run(["scatter", "phi", "--point", "0.5"], capsys)
    assert code == 0
    assert len(rep["results"]["entries"]) == 8
    assert abs(rep["results"]["entries"][0][0]) < 1e-8
    code, rep, _ = run(["scatter", "psi", "--point", "0.3+0.4i", "--row", "1,11"], capsys)
    assert code == 0 and len(rep["results"]["entries"]) == 8


def test_search_twist(capsys):
    code, rep, _ = run(["search-twist", "--form", "level11w2", "--max-d", "100"], capsys)
    assert code == 0 and rep["results"]["least_d0"] == 1


def test_moment_csv(capsys, tmp_path):
    csv = tmp_path / "m.csv"
    code, rep, _ = run(["moment", "--X", "64", "--csv", str(csv)], capsys)
    assert code == 0 and rep["results"]["reports"][0]["X"] == 64
    lines = csv.read_text().splitlines()
    assert lines[0] == "X,d0,L,root_number" and len(lines) > 5


def test_invalid_form(capsys, tmp_path):
    code, _, err = run(["--form", str(tmp_path / "missing.csv"), "lvalue"], capsys)
    assert code == 2 and err.startswith("mdsforge: error")


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["frobnicate"])
    assert exc.value.code == 2


def test_determinism_modulo_wall_time():
    cmd = [sys.executable, "-m", "mdsforge.cli", "verify", "corr"]
    outs = []
    for _ in range(2):
        rep = json.loads(subprocess.run(cmd, capture_output=True, text=True, check=True).stdout)
        rep.pop("wall_time")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_float_cleaning():
    assert _clean(0.1 + 0.2) == 0.3
    assert _clean(1 + 2j) == {"re": 1.0, "im": 2.0}
    assert _clean(float("nan")) == "nan"
