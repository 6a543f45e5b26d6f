import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from matroid_fairdiv.cli import main

FIXTURES = resources.files("matroid_fairdiv") / "fixtures"
APPD = str(FIXTURES / "ef1-not-pmms.json")
APPD_ALLOC = str(FIXTURES / "ef1-not-pmms.allocation.json")
XOS = str(FIXTURES / "xos-4.json")
WRANK = str(FIXTURES / "wrank-4.json")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return [line.split("\t") for line in text.splitlines()]


@pytest.fixture
def single(tmp_path):
    p = tmp_path / "single.json"
    p.write_text('{"schema": 1, "m": 3, "agents": [{"kind": "uniform", "k": 2}]}')
    return str(p)


def test_solve_mms_verify():
    code, out, _ = run("solve", "--fairness", "mms", "--input", APPD, "--verify")
    assert code == 0
    table = rows(out)
    assert ["welfare", "6"] in table
    assert ["verify", "welfare", "6"] in table
    assert ["verify", "mms", "holds"] in table


def test_solve_non_rank_exit_2():
    code, _, err = run("solve", "--fairness", "mms", "--input", XOS)
    assert code == 2
    assert "binary-xos" in err


def test_solve_pmms_single_agent(single):
    code, out, _ = run("solve", "--fairness", "pmms", "--input", single, "--json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["bundles"]) == 1 and doc["welfare"] == 2


def test_solve_json_has_every_report_field():
    code, out, _ = run("solve", "--fairness", "mms", "--input", APPD, "--json", "--verify")
    doc = json.loads(out)
    assert {"algorithm", "bundles", "values", "welfare", "shares", "steps", "trace",
            "unassigned", "verify", "m", "n"} <= doc.keys()
    assert doc["shares"]["values"] == [3, 3]
    code, out, _ = run("solve", "--fairness", "pmms", "--input", APPD, "--json")
    assert "pair_shares" in json.loads(out)


def test_shares_command():
    code, out, _ = run("shares", "--k", "2", "--input", APPD)
    assert code == 0
    table = rows(out)
    assert table[2][:3] == ["0", "3", "3"] and table[3][:3] == ["1", "3", "3"]
    assert ["cross_check", "checked"] in table
    code, _, _ = run("shares", "--k", "2", "--input", XOS)
    assert code == 2
    assert run("shares", "--k", "0", "--input", APPD)[0] == 1


def test_check_command():
    code, out, _ = run("check", "--property", "ef1", "--input", APPD, "--allocation", APPD_ALLOC)
    assert code == 0 and ["holds", "yes"] in rows(out)
    code, out, _ = run("check", "--property", "pmms", "--input", APPD, "--allocation", APPD_ALLOC,
                       "--json")
    doc = json.loads(out)
    assert doc["holds"] is False and doc["witness"]["share"] == 3
    code, out, _ = run("check", "--property", "mms", "--alpha", "2/3", "--input", APPD,
                       "--allocation", APPD_ALLOC, "--brute")
    assert ["holds", "yes"] in rows(out)  # 2 >= 2/3 * 3
    assert run("check", "--property", "mms", "--alpha", "3/2", "--input", APPD,
               "--allocation", APPD_ALLOC)[0] == 1


def test_certify_command():
    code, out, _ = run("certify-no-mms", "--input", WRANK)
    assert code == 0 and rows(out)[1][0] == "certified"
    code, out, _ = run("certify-no-mms", "--input", XOS, "--json")
    assert json.loads(out) == {"holds": True, "predicate": "no-mms",
                               "witness": {"allocations": 16, "shares": [2, 2]}}
    code, out, _ = run("certify-no-mms", "--input", APPD)
    assert code == 0 and rows(out)[1][0] == "counterexample"


def test_gen_and_validate(tmp_path):
    target = tmp_path / "g.json"
    args = ["gen", "--family", "mixed", "--n", "3", "--m", "7", "--seed", "42"]
    assert run(*args, "--output", str(target))[0] == 0
    assert run(*args)[1] == target.read_text()
    code, out, _ = run("validate", "--input", str(target))
    assert code == 0 and all(r[2] == "ok" for r in rows(out)[3:])
    assert run("gen", "--fixture", "xos-4")[1] == (FIXTURES / "xos-4.json").read_text()
    assert run("gen", "--fixture", "ef1-not-pmms", "--reference")[1] == \
        (FIXTURES / "ef1-not-pmms.allocation.json").read_text()
    assert run("gen", "--fixture", "xos-4", "--reference")[0] == 1
    assert run("gen", "--family", "mixed")[0] == 1


def test_validate_reports_broken_matroid(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"schema": 1, "m": 4, "agents": [{"kind": "explicit", "family": [[0, 2], [1, 3]]}]}')
    code, _, err = run("validate", "--input", str(p))
    assert code == 1 and "augmentation" in err


@pytest.mark.parametrize("argv", [
    [], ["solve"], ["solve", "--fairness", "ef", "--input", APPD], ["bogus"],
    ["solve", "--fairness", "mms", "--input", "/nonexistent.json"],
])
def test_usage_errors_exit_1(argv):
    assert run(*argv)[0] == 1


def test_capability_exit_2_on_brute_cap(tmp_path, monkeypatch):
    p = tmp_path / "big.json"
    p.write_text('{"schema": 1, "m": 12, "agents": [{"kind": "uniform", "k": 4},'
                 ' {"kind": "uniform", "k": 4}, {"kind": "uniform", "k": 4}, {"kind": "uniform", "k": 4}]}')
    assert run("certify-no-mms", "--input", str(p))[0] == 2


def test_verify_mismatch_exit_3(monkeypatch):
    import matroid_fairdiv.cli as cli

    monkeypatch.setattr(cli, "exhaustive_max_welfare", lambda inst: (99, ()))
    code, _, err = run("solve", "--fairness", "mms", "--input", APPD, "--verify")
    assert code == 3 and "VERIFICATION FAILED" in err


def test_figures_written(tmp_path):
    fig = tmp_path / "solve.png"
    assert run("solve", "--fairness", "pmms", "--input", APPD, "--figure", str(fig))[0] == 0
    assert fig.stat().st_size > 0
    fig2 = tmp_path / "shares.png"
    assert run("shares", "--k", "2", "--input", APPD, "--figure", str(fig2))[0] == 0
    assert fig2.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matroid_fairdiv", "shares", "--k", "2",
                           "--input", APPD], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("k\t2\n")
