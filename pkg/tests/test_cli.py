import io
import json
from contextlib import redirect_stdout

import pytest

from sicineq.builtin_scenarios import yu_oh
from sicineq.cli import extract_report, main
from sicineq.certify import table_inequality
from sicineq.document import export_scenario, inequality_document


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_solve_yu_oh():
    code, out = run("solve", "--scenario", "yu-oh", "--contexts", "C_YO")
    assert code == 0
    report = extract_report(out)
    assert report["eta"] == "12/13" and report["violation"] == "1/12"
    assert report["tightness"]["polytope_dim"] == 37
    assert "eta = 12/13" in out


def test_solve_auto_contexts_and_out_file(tmp_path):
    target = tmp_path / "report.txt"
    code, out = run("solve", "--scenario", "yu-oh", "--contexts", "auto:max_size=3",
                    "--no-tightness", "--out", str(target))
    assert code == 0 and out == ""
    assert extract_report(target.read_text())["eta"] == "75/83"


def test_no_sic_and_infeasible_exit_codes(tmp_path):
    doc = {"dimension": 3, "observables": [{"vector": [1, 0, 0]}, {"vector": [0, 1, 0]}]}
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    code, out = run("solve", "--scenario", str(path), "--contexts", "auto:max_size=2")
    assert code == 2 and extract_report(out)["status"] == "no_sic"
    code, out = run("solve", "--scenario", str(path), "--contexts", "{1}")
    assert code == 3 and extract_report(out)["status"] == "infeasible"


def test_parse_errors_exit_64(tmp_path, capsys):
    assert main(["solve", "--scenario", "nowhere"]) == 64
    assert main(["solve", "--scenario", "yu-oh", "--contexts", "{1,5}"]) == 64
    assert main(["bogus"]) == 64
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "observables": [{"matrix": [[1, 1], [0, 1]]}]}')
    assert main(["solve", "--scenario", str(bad)]) == 64
    assert "observables[0]" in capsys.readouterr().err


def test_guard_exit_65():
    assert main(["solve", "--scenario", "yu-oh", "--contexts", "C_YO", "--guard", "10"]) == 65


def test_certify_table_and_file(tmp_path):
    code, out = run("certify", "--scenario", "yu-oh", "--table", "opt3", "--tightness")
    assert code == 0
    report = extract_report(out)
    assert report["passed"] and report["tightness"]["tight"]
    scenario, contexts, lam = table_inequality("opt2")
    path = tmp_path / "ineq.json"
    path.write_text(inequality_document(scenario, contexts, [2 * x for x in lam]))
    code, out = run("certify", "--scenario", "yu-oh", "--inequality", str(path))
    assert code == 1
    report = extract_report(out)
    assert not report["checks"]["state_independent"]
    assert report["residual"][0][0] == "1"


def test_tightness_command():
    code, out = run("tightness", "--scenario", "yu-oh", "--table", "YO")
    assert code == 1 and extract_report(out)["tight"] is False
    code, out = run("tightness", "--scenario", "yu-oh", "--table", "opt2")
    assert code == 0 and extract_report(out)["eta"] == "12/13"


def test_sparsify_commands():
    code, out = run("sparsify", "--scenario", "yu-oh", "--contexts", "C_YO", "--zero", "{4,7}", "--tight")
    report = extract_report(out)
    assert code == 0 and report["feasible"] and report["tightness"]["tight"]
    code, out = run("sparsify", "--scenario", "yu-oh", "--contexts", "C_YO", "--zero", "{1}")
    report = extract_report(out)
    assert code == 3 and report["constrained_optimum"] == "1"
    code, out = run("sparsify", "--scenario", "yu-oh", "--contexts", "C_YO", "--zero", "all")
    assert code == 3


@pytest.mark.slow
def test_sparsify_sweep_parallel():
    code, out = run("sparsify", "--scenario", "yu-oh", "--contexts", "C_YO", "--zero", "sweep", "--jobs", "2")
    assert code == 0
    omissible = {row["context"] for row in extract_report(out)["sweep"] if row["omissible"]}
    assert omissible == {"{4,7}", "{5,8}", "{6,9}"}


def test_scenarios_list_and_export(tmp_path):
    code, out = run("scenarios", "list")
    assert code == 0 and "yu-oh" in out and "ks-18" in out
    code, out = run("scenarios", "export", "yu-oh", "--contexts", "C_YO")
    assert code == 0
    scenario, sets = yu_oh()
    assert out.strip() == export_scenario(scenario, sets["C_YO"])
    path = tmp_path / "yo.json"
    path.write_text(out)
    code, out = run("solve", "--scenario", str(path), "--no-tightness")
    assert code == 0 and extract_report(out)["eta"] == "12/13"
    assert main(["scenarios", "export"]) == 64


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "sicineq", "scenarios", "list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "peres-mermin-15" in proc.stdout
