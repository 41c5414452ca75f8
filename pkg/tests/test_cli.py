import json
import subprocess
import sys

import pytest

from csverify.cli import main


def run(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "csverify", *args], capture_output=True, text=True, timeout=600
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_xn_json_report():
    code, out, _ = run("xn", "--n", "5", "--s", "2", "--t", "0", "--emit", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["job"] == "xn n=5 s=2 t=0"
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert {c["name"] for c in rep["checks"]} >= {"J[1,2,3]", "pfaffian", "degrees", "kernel"}


def test_surface_e8_text():
    code, out, _ = run("surface", "--family", "E8")
    assert code == 0
    assert out.startswith("== surface E8 [1, 6, 10, 15]: PASS")


def test_orbifold_atlas_json():
    code, out, _ = run("orbifold", "--max-index", "30", "--emit", "json")
    assert code == 0
    atlas = json.loads(out)["data"]["atlas"]
    row = [r for r in atlas if r["e"] == [2, 3, 5]][0]
    assert row["deg_K"] == "-1/30"


def test_eliminate_exceptional_reports_verdict_and_failures():
    code, out, _ = run("eliminate-exceptional", "--order", "grevlex", "--timeout", "1800", "--emit", "json")
    rep = json.loads(out)
    assert rep["data"]["verdict"] == "eliminated"
    statuses = {c["name"]: c["status"] for c in rep["checks"]}
    assert statuses["a18 in saturation"] == "pass"
    # the displayed line is not the saturated ideal, so the run as a whole fails
    assert statuses["line ideal in saturation"] == "fail"
    assert code == 1


def test_timeout_exit_code():
    code, _, err = run("eliminate-exceptional", "--timeout", "0.001")
    assert code == 3
    assert "timeout" in err


@pytest.mark.parametrize(
    "args",
    [
        ["bogus"],
        ["xn", "--n", "2", "--s", "3"],
        ["surface", "--family", "A2", "--weights", "1,1,1,1"],
        ["surface", "--family", "F4"],
        ["surface", "--weights", "1,2,3"],
        ["orbifold", "--max-index", "1"],
        ["xn", "--emit", "yaml"],
    ],
)
def test_usage_errors_exit_2(args):
    code, _, _ = run(*args)
    assert code == 2


def test_failure_exit_code_in_process(capsys):
    # D5 with the E6 weights is illegal; D4 with doubled weights is legal
    assert main(["surface", "--family", "D4", "--weights", "2,4,4,6"]) == 0
    assert main(["surface", "--family", "D5", "--weights", "1,3,4,6"]) == 2
    capsys.readouterr()


def test_output_is_deterministic():
    a = run("whomog", "--seed", "7", "--count", "10", "--emit", "json")
    b = run("whomog", "--seed", "7", "--count", "10", "--emit", "json")
    assert a == b and a[0] == 0


def test_parallel_jobs_match_serial():
    a = run("surface", "--emit", "json")
    b = run("surface", "--emit", "json", "--jobs", "2")
    assert a == b and a[0] == 0
    assert len(json.loads(a[1])["reports"]) >= 12


def test_help_exits_zero():
    code, out, _ = run("--help")
    assert code == 0 and "eliminate-exceptional" in out


def test_all_runs_every_job_sorted_by_name():
    code, out, _ = run("all", "--emit", "json")
    payload = json.loads(out)
    jobs = [r["job"] for r in payload["reports"]]
    assert jobs == sorted(jobs)
    failed = {r["job"] for r in payload["reports"] if any(c["status"] == "fail" for c in r["checks"])}
    assert failed == {"eliminate-exceptional"}
    assert code == 1
