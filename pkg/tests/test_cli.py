import json
import os

import pytest

from singpot.cli import main
from singpot.config import parse_config
from singpot.scenarios import check_manifest, run_scenario


def _write(tmp_path, text, name="cfg.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for kind in ("special", "elliptic", "parabolic", "kernel", "verifyall"):
        assert kind in out


def test_invalid_config_leaves_nothing(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", _write(tmp_path, "A = -1"), "--out", str(out)]) == 2
    assert "A" in capsys.readouterr().err
    assert not out.exists()
    assert sorted(os.listdir(tmp_path)) == ["cfg.txt"]


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope"), "--out", str(tmp_path / "o")]) == 2


def test_bad_override_is_config_error(tmp_path):
    cfg = _write(tmp_path, "kind = special")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"),
                 "--grid-scale", "9"]) == 2


@pytest.fixture(scope="module")
def special_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("special")
    cfg = _write(base, "kind = special\nseed = 3")
    out = base / "out"
    code = main(["run", "--config", cfg, "--out", str(out)])
    return code, out


def test_special_run_outputs(special_run):
    code, out = special_run
    assert code == 0
    assert sorted(os.listdir(out)) == ["alpha.csv", "bessel.csv", "config.echo.txt",
                                       "radial_order.csv", "report.json"]
    data = json.loads((out / "report.json").read_text())
    assert data["passed"] and data["config"]["seed"] == 3
    assert [c["claim_id"] for c in data["checks"]] == check_manifest(parse_config("kind = special"))
    assert all(c["anchor"] for c in data["checks"])
    assert sorted(os.path.basename(a) for a in data["artifacts"]) == \
        ["alpha.csv", "bessel.csv", "radial_order.csv"]
    assert parse_config((out / "config.echo.txt").read_text()).seed == 3


def test_rerun_replaces_directory(special_run, tmp_path):
    _, out = special_run
    before = (out / "alpha.csv").read_bytes()
    (out / "stale.csv").write_text("x")
    cfg = _write(tmp_path, "kind = special\nseed = 3")
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    assert not (out / "stale.csv").exists()
    assert (out / "alpha.csv").read_bytes() == before
    assert not any(p.name.startswith(".singpot-") or p.name.endswith(".old")
                   for p in out.parent.iterdir())


def test_report_summarize(special_run, capsys):
    _, out = special_run
    assert main(["report", "--summarize", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "overall: PASS"
    assert sum(line.strip().startswith("PASS") for line in lines) == 3


def test_report_summarize_failure(tmp_path, capsys):
    data = {"scenario": "x", "checks": [{"claim_id": "c", "measured": 1.0, "tolerance": "< 0",
                                         "passed": False, "asserted": True}],
            "errors": ["stage: boom"], "passed": False}
    (tmp_path / "report.json").write_text(json.dumps(data))
    assert main(["report", "--summarize", str(tmp_path)]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "ERROR stage: boom" in out


def test_report_missing(tmp_path):
    assert main(["report", "--summarize", str(tmp_path)]) == 2


def test_golden_elliptic_scenario(tmp_path):
    cfg = parse_config("d = 3\nA = 1\nbeta = 0\nkind = elliptic\nn = 33")
    rep = run_scenario(cfg, tmp_path)
    assert [c.claim_id for c in rep.checks] == check_manifest(cfg)
    decay = next(c for c in rep.checks if c.claim_id == "decay_exponent")
    assert decay.measured == pytest.approx(0.618, abs=0.05)
    assert decay.alpha_provenance == "formula"
    assert (tmp_path / "field.csv").exists()


def test_errors_become_failing_records():
    # n = 5 cannot resolve the fit radii, so analysis stages fail but every claim is reported
    cfg = parse_config("kind = elliptic\nn = 5")
    rep = run_scenario(cfg)
    ids = [c.claim_id for c in rep.checks]
    assert sorted(ids) == sorted(check_manifest(cfg))
    assert rep.errors and not rep.passed


def test_variable_coefficients_with_beta_are_exploratory():
    cfg = parse_config("kind = elliptic\ncoefficients = checkerboard\nLambda = 4\nbeta = 1\nn = 49")
    rep = run_scenario(cfg)
    holder = [c for c in rep.checks if c.claim_id.startswith("holder")]
    assert len(holder) == 2 and not any(c.asserted for c in holder)
