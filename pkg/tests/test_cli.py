import io
import json

import numpy as np
import pytest

from qwsimplex import cli, experiments
from qwsimplex.records import RunRecord


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv", [
    ("dtqw", "--m", "20", "--coin", "flip", "--steps", "30"),
    ("ctqw", "--m", "20", "--gamma-mode", "exact", "--t-max", "2", "--dt", "0.1"),
    ("ctqw", "--m", "20", "--gamma-mode", "value:0.7", "--t-max", "1"),
    ("multistep", "--m", "50", "--steps", "8"),
    ("multistep", "--m", "50", "--steps", "8", "--k", "13"),
    ("classical", "--m", "8", "--steps-per-query", "2", "--trials", "50", "--seed", "4"),
])
def test_run_commands_emit_self_describing_csv(argv):
    code, out, _ = run(*argv)
    assert code == 0
    rec = RunRecord.from_csv(out)
    assert rec.metadata["cfg_command"] == argv[0]
    assert "version" in rec.metadata
    assert np.all(rec.success_probability <= 1 + 1e-9)


def test_csv_is_byte_stable_for_fixed_seed(tmp_path):
    argv = ("classical", "--m", "12", "--steps-per-query", "3", "--trials", "200", "--seed", "9")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*argv, "--out", str(a))[0] == 0
    assert run(*argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    run(*argv[:-1], "10", "--out", str(c))
    assert c.read_bytes() != a.read_bytes()


def test_json_format():
    code, out, _ = run("multistep", "--m", "100", "--steps", "10", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    probs = [row[1] for row in doc["rows"]]
    assert max(probs) >= 0.95
    assert doc["metadata"]["k"] == 22


def test_classical_walk_steps_column():
    _, out, _ = run("classical", "--m", "8", "--steps-per-query", "4", "--trials", "20", "--steps", "3")
    rec = RunRecord.from_csv(out)
    assert rec.walk_steps.tolist() == [0, 0, 4, 8]


@pytest.mark.parametrize("argv", [
    (),
    ("nonsense",),
    ("dtqw",),
    ("dtqw", "--m", "1"),
    ("dtqw", "--m", "x"),
    ("dtqw", "--m", "5", "--coin", "other"),
    ("ctqw", "--m", "5", "--gamma-mode", "value:-2"),
    ("ctqw", "--m", "5", "--gamma-mode", "fast"),
    ("ctqw", "--m", "5", "--dt", "0"),
    ("multistep", "--m", "2"),
    ("classical", "--m", "5", "--trials", "0"),
    ("figure", "fig9"),
    ("scaling", "quantum-dtqw", "--m-list", "16,32"),
    ("scaling", "quantum-dtqw", "--m-list", "a,b"),
])
def test_usage_errors_exit_1(argv):
    code, _, err = run(*argv)
    assert code == 1
    assert err.startswith("qwsim:")


def test_io_error_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run("dtqw", "--m", "5", "--steps", "2", "--out", str(blocker / "sub" / "x.csv"))
    assert code == 3
    assert "I/O error" in err


def test_figure_writes_curves_and_summary(tmp_path):
    code, out, _ = run("figure", "fig4", "--m-list", "100,200", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig4_multistep_M100.csv", "fig4_multistep_M200.csv", "fig4_summary.csv"]
    summary = (tmp_path / "fig4_summary.csv").read_text().splitlines()
    assert summary[0] == "curve,peak_index,peak_probability,predicted_peak_index"
    name, idx, p, _ = summary[1].split(",")
    assert name == "fig4_multistep_M100" and int(idx) == 7 and float(p) >= 0.95


def test_fig2_has_flip_and_skw_curves():
    curves = experiments.figure_curves("fig2", [100, 200], steps=250)
    assert [c.name for c in curves] == ["fig2_flip_M100", "fig2_skw_M100", "fig2_skw_M200"]
    idx, p = curves[1].peak
    assert abs(idx - 111) <= 3 and p == pytest.approx(0.5, abs=0.05)


def test_fig3_peak():
    (curve,) = experiments.figure_curves("fig3", [100], t_max=25)
    t, p = curve.peak
    assert p >= 0.9 and abs(t - 15.7) < 1.0


def test_scaling_quantum_multistep_cli():
    code, out, _ = run("scaling", "quantum-multistep", "--m-list", "64,100,144,196")
    assert code == 0
    assert "exponent=" in out.splitlines()[-1]
    exponent = float(out.splitlines()[-1].split("exponent=")[1].split()[0])
    assert exponent == pytest.approx(0.5, abs=0.1)


def test_scaling_metric_choice_recorded():
    res = experiments.run_scaling("quantum-dtqw", [16, 32, 64], metric="p50")
    assert res.metadata["metric"] == "p50"
    assert all(r["queries"] == r["first_p50"] for r in res.rows)
    with pytest.raises(ValueError):
        experiments.run_scaling("quantum-dtqw", [16, 32, 64], metric="median")


def test_scaling_all_prints_speedup_table(tmp_path):
    code, out, _ = run("scaling", "all", "--m-list", "8,12,16", "--trials", "40", "--out", str(tmp_path))
    assert code == 0
    assert "sqrt(M) steps/query" in out
    assert len(list(tmp_path.glob("scaling_*.csv"))) == len(experiments.SCALING_KINDS)


def test_verify_quick_passes(tmp_path):
    code, out, _ = run("verify", "--profile", "quick", "--max-m-fullspace", "8")
    assert code == 0
    assert out.splitlines()[-1].endswith("checks passed")
    target = tmp_path / "report.json"
    code, _, _ = run("verify", "--profile", "quick", "--max-m-fullspace", "3", "--format", "json",
                     "--out", str(target))
    assert code == 0 and json.loads(target.read_text())["passed"] is True


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert "qwsim" in capsys.readouterr().out
