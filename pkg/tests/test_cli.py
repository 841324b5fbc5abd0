from __future__ import annotations

import json
from pathlib import Path

import pytest

from jetcas import cli
from jetcas import config as cfgmod
from jetcas.lie_equations import RankInstabilityError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, text, name="cfg.json"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_verify_mc_with_affine_config(capsys):
    code, out, _ = run(["verify", "mc", "--config", str(CONFIGS / "affine.json")], capsys)
    assert code == 0
    assert "PASS  mc.expected_omega" in out
    assert out.strip().endswith("0 failed")


def test_verify_json_report(capsys):
    code, out, _ = run(["verify", "rigid-body", "--config", str(CONFIGS / "rigid_body.json"), "--format", "json"],
                       capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert [c["status"] for c in rep["checks"]] == ["PASS"] * len(rep["checks"])


def test_verify_is_deterministic(capsys):
    first = run(["verify", "chi", "--seed", "3"], capsys)
    second = run(["verify", "chi", "--seed", "3"], capsys)
    assert first == second


def test_failed_check_exits_1(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "affine.json").read_text())
    cfg["expect"]["omega"][0][0] = "2/a1"
    code, out, _ = run(["verify", "mc", "--config", write(tmp_path, json.dumps(cfg))], capsys)
    assert code == 1
    assert "FAIL  mc.expected_omega" in out
    assert "residual degree" in out


def test_malformed_json_exits_2(tmp_path, capsys):
    code, out, err = run(["verify", "mc", "--config", write(tmp_path, '{"schema": 1,\n "action": [}')], capsys)
    assert code == 2
    assert "line 2 column" in err
    assert out == ""


@pytest.mark.parametrize("text,needle", [
    ('{"action": {}}', "schema"),
    ('{"schema": 1, "action": {"x": ["x"], "a": ["a"], "f": ["x +"], "e": [0]}}', "action.f[0]"),
    ('{"schema": 1, "action": {"x": ["x"], "a": ["a"], "f": ["x + b"], "e": [0]}}', "action.f[0]"),
    ('{"schema": 1, "action": {"x": ["x"], "a": ["a"], "f": ["x + a"], "e": [1]}}', "identity"),
    ('{"schema": 1, "rigid_body": {}}', "action"),
])
def test_config_errors_exit_2(tmp_path, capsys, text, needle):
    code, _, err = run(["verify", "mc", "--config", write(tmp_path, text)], capsys)
    assert code == 2
    assert needle in err


def test_missing_file_exits_2(capsys):
    code, _, err = run(["verify", "mc", "--config", "/nonexistent/cfg.json"], capsys)
    assert code == 2 and "cannot read" in err


def test_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nope"])
    assert exc.value.code == 2


def test_diagram_expect_reference(capsys):
    code, out, _ = run(["diagram", "conformal", "--n", "4", "--metric", "minkowski", "--expect", "paper"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[2].split() == ["C_r", "15", "60", "90", "60", "15"]
    assert lines[3].split() == ["C_r(E)", "60", "160", "180", "96", "20"]
    assert lines[4].split() == ["F_r", "45", "100", "90", "36", "5"]
    assert lines[-1] == "expect: PASS"


def test_diagram_signatures_agree(capsys):
    _, a, _ = run(["diagram", "conformal", "--metric", "minkowski", "--format", "json"], capsys)
    _, b, _ = run(["diagram", "conformal", "--metric", "euclidean", "--format", "json"], capsys)
    a, b = json.loads(a), json.loads(b)
    for key in ("C", "CE", "F"):
        assert a[key] == b[key]


def test_diagram_additivity_column(capsys):
    code, out, _ = run(["diagram", "killing", "--n", "4"], capsys)
    assert code == 0
    assert out.splitlines()[5].split() == ["C+F=CE"] + ["yes"] * 5


def test_diagram_metric_file(capsys):
    code, out, _ = run(["diagram", "killing", "--n", "2", "--metric", str(CONFIGS / "polar_metric.json")], capsys)
    assert code == 0
    assert "3 parameters" in out.splitlines()[0]


def test_diagram_metric_dimension_mismatch(capsys):
    code, _, err = run(["diagram", "killing", "--n", "4", "--metric", str(CONFIGS / "polar_metric.json")], capsys)
    assert code == 2 and "dimension" in err


def test_diagram_singular_metric_file(tmp_path, capsys):
    p = write(tmp_path, '{"schema": 1, "metric": {"coords": ["x1", "x2"], "entries": [["1", "1"], ["1", "1"]]}}')
    code, _, err = run(["diagram", "killing", "--n", "2", "--metric", p], capsys)
    assert code == 2 and "singular" in err


def test_expect_only_for_conformal(capsys):
    code, _, err = run(["diagram", "weyl", "--expect", "paper"], capsys)
    assert code == 2


def test_expect_mismatch_exits_1(monkeypatch, capsys):
    monkeypatch.setitem(cli.REFERENCE_DIAGRAM, "F", (45, 100, 90, 45, 9))
    code, out, _ = run(["diagram", "conformal", "--expect", "paper"], capsys)
    assert code == 1 and out.splitlines()[-1] == "expect: FAIL"


def test_rank_instability_exits_2(monkeypatch, capsys):
    def boom(*a, **k):
        raise RankInstabilityError("dim R_q varies between sample points")
    monkeypatch.setattr(cli, "sequence_dims", boom)
    code, _, err = run(["diagram", "killing"], capsys)
    assert code == 2 and "rank instability" in err


def test_config_helpers():
    data = cfgmod.loads('{"schema": 1, "m": [["x", 2]]}')
    assert cfgmod.matrix(data["m"], ["x"], "m")[0][1].const_value() == 2
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.loads("[1, 2]")
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.section({}, "metric")
    assert cfgmod.section({}, "metric", required=False) is None
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.fraction("abc", "v")
