import csv
import io
import json
from pathlib import Path

import pytest

from mod4sum.cli import dispatch

GOLDEN = Path(__file__).parent / "golden"


def run(argv):
    buf = io.StringIO()
    code = dispatch(argv, stdout=buf)
    return code, (json.loads(buf.getvalue()) if buf.getvalue() else None)


def strip(report):
    report = dict(report)
    report.pop("wall_time")
    report.pop("tool_version")
    return report


@pytest.mark.parametrize(
    "name, argv",
    [
        ("search_n3", ["search", "--parties", "3", "--mode", "exhaustive", "--jobs", "1"]),
        ("threshold_paper", ["threshold", "--pc", "5/8", "--t", "0.975", "--mu", "0.01", "--s", "0.9"]),
        ("eval_ref5", ["eval", "--parties", "5", "--chain", "0011|01011010|01011010|01011010"]),
    ],
)
def test_golden_reports(name, argv):
    code, report = run(argv)
    assert code == 0
    assert strip(report) == json.loads((GOLDEN / f"{name}.json").read_text())


def test_search_report_values():
    _, report = run(["search", "--parties", "3", "--mode", "exhaustive"])
    assert report["results"]["optimum"] == {"num": 3, "den": 4, "approx": 0.75}
    assert report["results"]["chains_examined"] == 4096
    assert set(report) == {"command", "inputs", "results", "tool_version", "wall_time"}


def test_threshold_report_value():
    _, report = run(["threshold", "--pc", "0.625", "--t", "0.975", "--mu", "0.01", "--s", "0.9"])
    assert report["inputs"]["pc"] == {"num": 5, "den": 8, "approx": 0.625}
    assert report["results"]["eta_min"] == pytest.approx(0.3237, abs=1e-4)


def test_threshold_per_plate():
    _, report = run(["threshold", "--pc", "5/8", "--per-plate", "0.995", "--mu", "0.01", "--s", "0.9"])
    assert report["results"]["t"] == pytest.approx(0.995**5)
    assert report["results"]["eta_min"] == pytest.approx(0.32367, abs=1e-5)


def test_heuristic_search():
    code, report = run(["search", "--parties", "6", "--mode", "heuristic", "--budget", "50", "--seed", "2"])
    assert code == 0
    r = report["results"]
    assert r["mode"] == "heuristic" and r["optimum"]["num"] * 8 >= 5 * r["optimum"]["den"]


def test_quantum_verify():
    code, report = run(["quantum-verify", "--parties", "8"])
    assert code == 0
    assert report["results"]["verified"] is True
    assert report["results"]["tuples_checked"] == 32768


def test_bounds_and_csv(tmp_path):
    out = tmp_path / "bounds.csv"
    code, report = run([
        "bounds", "--exact", "3=3/4,4=3/4,5=5/8", "--lower", "6=5/8,7=9/16,8=9/16",
        "--t", "0.975", "--mu", "0.01", "--s", "0.9", "--csv", str(out),
    ])
    assert code == 0
    by_n = {b["n_parties"]: b for b in report["results"]["bounds"]}
    assert by_n[6]["status"] == "exact" and by_n[6]["lower"]["num"] == 5
    assert by_n[7]["status"] == "interval"
    rows = list(csv.DictReader(out.open()))
    assert [r["n_parties"] for r in rows] == ["3", "4", "5", "6", "7", "8"]
    assert float(rows[3]["eta_min"]) == pytest.approx(0.32375, abs=1e-5)


def test_eval_chain_file(tmp_path):
    path = tmp_path / "chains.txt"
    path.write_text("# candidates\n0000|00000000\n0011|01011010\n")
    code, report = run(["eval", "--parties", "3", "--chain-file", str(path)])
    assert code == 0
    assert report["results"]["best"]["chain"] == "0011|01011010"
    assert len(report["results"]["evaluations"]) == 2


def test_montecarlo_reproducible():
    argv = ["montecarlo", "--kind", "quantum", "--parties", "5", "--trials", "70000",
            "--seed", "4", "--eta", "0.33", "--t", "0.975", "--mu", "0.01", "--s", "0.9"]
    _, a = run(argv + ["--jobs", "1"])
    _, b = run(argv + ["--jobs", "2"])
    assert json.dumps(a["results"], sort_keys=True) == json.dumps(b["results"], sort_keys=True)
    assert a["results"]["analytic"] == pytest.approx(0.627413)


def test_montecarlo_classical_default_chain():
    code, report = run(["montecarlo", "--kind", "classical", "--parties", "3",
                        "--trials", "20000", "--seed", "1"])
    assert code == 0
    assert report["inputs"]["chain"] == "0011|01011010"
    assert report["results"]["analytic"]["num"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["search", "--parties", "3"],
        ["search", "--parties", "2", "--mode", "exhaustive"],
        ["eval", "--parties", "3", "--chain", "0011|0101101"],
        ["eval", "--parties", "4", "--chain", "0011|01011010"],
        ["threshold", "--pc", "abc"],
        ["threshold", "--pc", "5/8", "--t", "0.9", "--per-plate", "0.99"],
        ["threshold", "--pc", "5/8", "--s", "0.5"],
        ["bounds", "--exact", "5:5/8"],
        ["nonsense"],
    ],
)
def test_argument_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_resource_guard_exit_3():
    assert run(["search", "--parties", "6", "--mode", "exhaustive"])[0] == 3


def test_inconsistent_bounds_exit_1():
    assert run(["bounds", "--exact", "5=5/8", "--lower", "6=3/4"])[0] == 1
