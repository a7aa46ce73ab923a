import json

import pytest

from faults import load_with, write_with
from wzpi.cli import main
from wzpi.harness import FAIL, PASS, SKIPPED, verify_all


@pytest.fixture(scope="module")
def full_report(catalog):
    return verify_all(catalog, 50, "full")


def test_full_run_has_no_failures(full_report):
    assert full_report.exit_code == 0
    assert full_report.count(FAIL) == 0


def test_expected_skips(full_report):
    skipped = sorted((r.id, r.check) for r in full_report.records if r.status == SKIPPED)
    assert skipped == [("eq-n4-2", "constant"), ("rama-n4-0", "series"), ("rama-n4-1", "series")]


def test_symbolic_mode_checks_only_exact_things(catalog):
    report = verify_all(catalog, 50, "symbolic")
    checks = {r.check for r in report.records}
    assert checks == {"certificate", "clausen", "clausen-derivative"}
    assert report.count(PASS) == len(report.records) == 26 + 6


def test_numeric_mode(catalog):
    report = verify_all(catalog, 50, "numeric")
    assert "certificate" not in {r.check for r in report.records}
    assert report.status_of("rama-n4-0") == SKIPPED
    assert report.status_of("rama-n1-1") == PASS


def test_bad_mode(catalog):
    with pytest.raises(ValueError):
        verify_all(catalog, 50, "everything")


def test_structured_report_is_deterministic(catalog):
    a = verify_all(catalog, 30, "numeric").render_structured(timing=False)
    b = verify_all(catalog, 30, "numeric").render_structured(timing=False)
    assert a == b
    rows = [json.loads(line) for line in a.splitlines()]
    assert set(rows[0]) == {"id", "check", "status", "residual_exp", "terms", "reason"}
    assert rows == sorted(rows, key=lambda r: (r["id"], r["check"]))


def test_text_and_structured_agree(full_report):
    text = full_report.render_text().splitlines()[:-1]
    rows = [json.loads(line) for line in full_report.render_structured().splitlines()]
    assert [line.split()[0] for line in text] == [r["status"] for r in rows]


def test_assembly_skipped_when_member_fails():
    cat = load_with("s3-z1over2.cat", "pi*4^(1/3)", "pi*5^(1/3)")
    report = verify_all(cat, 30, "numeric")
    assert [(r.id, r.check) for r in report.failures] == [("eq1", "constant")]
    assert report.status_of("assembly-1over2-0") == SKIPPED
    assert report.exit_code == 1


# command line -------------------------------------------------------------------------

def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_cli_list(capsys):
    code, out = run(capsys, "list")
    assert code == 0 and "eq-n4-1" in out and "analytic_continuation" in out


def test_cli_certify(capsys):
    code, out = run(capsys, "certify", "eq5")
    assert code == 0
    assert "identity eq5: PASS" in out and "telescoper:" in out and "certificate R(n,k)" in out


def test_cli_certify_structured(capsys):
    code, out = run(capsys, "certify", "eq2", "--structured")
    rec = json.loads(out)
    assert code == 0 and rec["status"] == PASS and rec["constant"] == "PASS"


def test_cli_numeric(capsys):
    code, out = run(capsys, "numeric", "rama-32over81-1", "--digits", "50")
    assert code == 0 and out.startswith("PASS") and "9/(2*pi)" in out


def test_cli_numeric_divergent_is_skip(capsys):
    code, out = run(capsys, "numeric", "rama-n4-1")
    assert code == 0 and out.startswith("SKIPPED")


def test_cli_complement_from_file(capsys, tmp_path):
    p = tmp_path / "eq3.term"
    p.write_text("poch(1/8-k,n)*poch(3/8-k,n)/(poch(1+2k,n)*poch(1,n))*(1/9)^n\n")
    code, out = run(capsys, "complement", "--term", str(p))
    assert code == 0 and "(b, c) = (1/2, 1/16)" in out


def test_cli_clausen(capsys):
    code, out = run(capsys, "clausen", "--which", "1", "--order", "12", "--structured")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["status"] for r in rows] == [PASS, PASS]


def test_cli_eval_const(capsys):
    code, out = run(capsys, "eval-const", "2*sqrt(3)/pi", "--digits", "30")
    assert code == 0 and out.strip().startswith("1.1026577908435840990226529966")


@pytest.mark.parametrize("argv", [
    ["certify", "no-such-id"],
    ["certify", "rama-1over2-0"],
    ["eval-const", "2*sqrt(3"],
    ["complement", "--term", "poch(n,k)"],
    ["clausen", "--which", "4"],
    ["numeric", "eq1", "--digits", "0"],
    ["frobnicate"],
    [],
])
def test_cli_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_cli_eval_const_domain_error(capsys):
    assert main(["eval-const", "sqrt(-1)"]) == 1


def test_cli_verify_all_fault_exit_code(capsys, tmp_path):
    d = write_with(tmp_path, "s6-zn9over64000.cat", "160*sqrt(30)/pi", "161*sqrt(30)/pi")
    code, out = run(capsys, "verify-all", "--mode", "numeric", "--digits", "30", "--catalog", str(d),
                    "--structured")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 1
    assert [r["id"] for r in rows if r["status"] == FAIL] == ["rama-9-64000-1"]
