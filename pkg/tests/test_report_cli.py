import json
import os
import shutil
from fractions import Fraction

import pytest

import verify
from algebra.scalars import ZETA
from verification.report import CheckResult, VerificationReport, exact, guarded, verdict
from verification.runner import DEFAULT_FIXTURES, FIXTURES_ENV, SUITES, RunConfig

DATA = DEFAULT_FIXTURES


def copy_fixtures(tmp_path, replace=None):
    target = tmp_path / "fixtures"
    shutil.copytree(DATA, target)
    for name, (old, new) in (replace or {}).items():
        path = target / name
        text = path.read_text(encoding="utf-8")
        assert old in text
        path.write_text(text.replace(old, new, 1), encoding="utf-8")
    return str(target)


def run_cli(*args):
    return verify.main(["run", *args])


############################################################
# Report values
############################################################
def test_exact_witness_values():
    assert exact({"q": Fraction(1, 3), "z": ZETA, "flag": True, "n": None}) == \
        {"q": "1/3", "z": "z", "flag": True, "n": None}
    assert exact({3, 1, 2}) == [1, 2, 3]
    with pytest.raises(TypeError):
        exact(0.5)


def test_check_result_validation():
    with pytest.raises(ValueError):
        CheckResult("basis", "basis.x", "maybe", "anchor")
    with pytest.raises(ValueError):
        CheckResult("basis", "basis.x", "fail", "anchor", {})
    assert verdict("basis", "basis.x", "anchor", False).witness == {"reason": "condition not satisfied"}


def test_guarded_turns_exceptions_into_errors():
    def boom():
        raise KeyError("f99")
    result = guarded("relations", "relations.f99", "anchor", boom)
    assert result.status == "error"
    assert result.witness["exception"] == "KeyError"
    assert result.witness["where"].startswith("test_report_cli.py:")


def test_report_summary_and_exit_code():
    report = VerificationReport([{"path": "a.poly", "checksum": "0" * 64, "manifest_match": None}])
    report.add(verdict("basis", "basis.a", "anchor", True))
    assert report.exit_code == 0
    report.add(verdict("basis", "basis.b", "anchor", False, {"cell": (1, 1)}))
    assert report.summary == {"pass": 1, "fail": 1, "error": 0}
    assert report.exit_code == 1
    with pytest.raises(ValueError):
        report.add(verdict("basis", "basis.a", "anchor", True))
    data = json.loads(report.to_json())
    assert data["version"] == "1"
    assert data["checks"][1]["witness"] == {"cell": [1, 1]}
    text = report.to_text()
    assert "FAIL" in text and "no manifest" in text
    assert text.rstrip().endswith("1 passed, 1 failed, 0 errors")


############################################################
# Configuration
############################################################
def test_suite_selection():
    assert RunConfig().resolved_suites() == list(SUITES)
    assert RunConfig(suites=["fiber", "basis"]).resolved_suites() == ["basis", "fiber"]
    with pytest.raises(ValueError):
        RunConfig(suites=[]).resolved_suites()
    with pytest.raises(ValueError):
        RunConfig(suites=["conics"]).resolved_suites()


def test_fixture_directory_precedence(monkeypatch, tmp_path):
    monkeypatch.delenv(FIXTURES_ENV, raising=False)
    assert RunConfig().resolved_fixtures_dir() == DEFAULT_FIXTURES
    monkeypatch.setenv(FIXTURES_ENV, str(tmp_path))
    assert RunConfig().resolved_fixtures_dir() == str(tmp_path)
    assert RunConfig(fixtures_dir="elsewhere").resolved_fixtures_dir() == "elsewhere"


############################################################
# Command line
############################################################
def test_unknown_suite_is_a_usage_error():
    with pytest.raises(SystemExit) as e:
        run_cli("--suite", "conics")
    assert e.value.code == 2


def test_missing_fixtures_exit_2(tmp_path):
    assert run_cli("--suite", "ampleness", "--fixtures", str(tmp_path)) == 2


def test_malformed_fixture_exit_2(tmp_path):
    fixtures = copy_fixtures(tmp_path, {"defining_quadrics.poly": ("f2: ", "f2: q + ")})
    assert run_cli("--suite", "fiber", "--fixtures", fixtures) == 2


def test_ampleness_report(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("--suite", "ampleness", "--out", str(out), "--log-dir", str(tmp_path / "logs")) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["fixtures"] == [{
        "path": "intersections.tbl",
        "checksum": report["fixtures"][0]["checksum"],
        "manifest_match": True,
    }]
    names = [c["name"] for c in report["checks"]]
    assert "ampleness.twist.3/5,2" in names
    assert {c["suite"] for c in report["checks"]} == {"ampleness"}
    assert report["summary"]["fail"] == report["summary"]["error"] == 0
    assert (tmp_path / "logs" / "log.txt").exists()


def test_fiber_suite_report(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("--suite", "fiber", "--out", str(out)) == 0
    checks = {c["name"]: c for c in json.loads(out.read_text(encoding="utf-8"))["checks"]}
    assert checks["fiber.conic"]["status"] == "pass"
    assert set(checks) >= {"fiber.torus", "fiber.fixed_points", "fiber.smooth.p0", "fiber.smooth.p7"}


def test_unexpected_error_exits_2(monkeypatch, tmp_path):
    def broken_run(config):
        raise RuntimeError("suite crashed")
    monkeypatch.setattr(verify, "run", broken_run)
    out = tmp_path / "report.json"
    assert run_cli("--suite", "ampleness", "--out", str(out)) == 2
    assert not out.exists()


def test_text_report_on_stdout(capsys):
    assert run_cli("--suite", "ampleness", "--format", "text") == 0
    out = capsys.readouterr().out
    assert out.startswith("verification report v1")
    assert "PASS   ampleness" in out


def test_environment_fixtures_are_used(monkeypatch, tmp_path):
    fixtures = copy_fixtures(tmp_path, {"intersections.tbl": ("stage1 E1 d_u:-1 l_vw:2", "stage1 E1 d_u:-1 l_vw:1")})
    monkeypatch.setenv(FIXTURES_ENV, fixtures)
    out = tmp_path / "report.json"
    assert run_cli("--suite", "ampleness", "--out", str(out)) == 1
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["fixtures"][0]["manifest_match"] is False
    failed = {c["name"] for c in report["checks"] if c["status"] != "pass"}
    assert "ampleness.region.stage1" in failed


def test_corrupted_quadric_fails_relations(tmp_path):
    # f1 with -3*z in place of -3*z^2
    fixtures = copy_fixtures(tmp_path, {"defining_quadrics.poly": ("f1: -3*z^2*x0*x4", "f1: -3*z*x0*x4")})
    out = tmp_path / "report.json"
    assert run_cli("--suite", "relations", "--fixtures", fixtures, "--out", str(out)) == 1
    checks = {c["name"]: c for c in json.loads(out.read_text(encoding="utf-8"))["checks"]}
    assert checks["relations.f1"]["status"] == "fail"
    assert "residual" in checks["relations.f1"]["witness"]
    assert checks["relations.f2"]["status"] == "pass"


def test_corrupted_basis_fails(tmp_path):
    fixtures = copy_fixtures(tmp_path, {"st_basis.poly": ("b2: s*t*(u^2*w + z*v*w^2", "b2: s*t*(u^2*w + v*w^2")})
    out = tmp_path / "report.json"
    assert run_cli("--suite", "basis", "--fixtures", fixtures, "--out", str(out)) == 1
    checks = {c["name"]: c for c in json.loads(out.read_text(encoding="utf-8"))["checks"]}
    assert checks["basis.member.b2"]["status"] == "fail"
    assert checks["basis.member.b3"]["status"] == "pass"


@pytest.mark.slow
def test_full_run_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    matrices = tmp_path / "matrices"
    assert run_cli("--out", str(first), "--dump-matrices", str(matrices)) == 0
    assert run_cli("--suite", "all", "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding="utf-8"))
    assert [c["suite"] for c in report["checks"]][0] == "basis"
    assert report["checks"][-1]["suite"] == "ampleness"
    assert sorted(os.listdir(matrices)) == sorted(f"M{i}.poly" for i in (2, 3, 4, 5, 6, 8, 9))
