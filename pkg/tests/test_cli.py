"""Command-line interface: workflows, exit codes, golden reports."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from dynsurvey.cli import main
from dynsurvey.demo import write_demo_workspace
from dynsurvey.document import load_outline
from dynsurvey.engine import read_audit_log
from dynsurvey.errors import EXIT_CONFIG, EXIT_PARSE

GOLDEN = Path(__file__).parent / "data" / "golden"


@pytest.fixture
def workspace(tmp_path):
    return write_demo_workspace(tmp_path / "ws")


def _config_dir(workspace) -> Path:
    return workspace["config"].parent


def test_benchmark_matches_golden_reports(workspace):
    assert main(["--config", str(workspace["config"]), "benchmark"]) == 0
    out = _config_dir(workspace) / "out"
    assert (out / "report.csv").read_text() == (GOLDEN / "report.csv").read_text()
    assert (out / "report.txt").read_text() == (GOLDEN / "report.txt").read_text()


def test_benchmark_is_byte_deterministic(workspace, tmp_path):
    assert main(["--config", str(workspace["config"]), "benchmark"]) == 0
    first_csv = (_config_dir(workspace) / "out" / "report.csv").read_bytes()
    other = write_demo_workspace(tmp_path / "ws2")
    assert main(["--config", str(other["config"]), "benchmark"]) == 0
    second_csv = (other["config"].parent / "out" / "report.csv").read_bytes()
    assert first_csv == second_csv


def test_benchmark_methods_flag_restricts_runs(workspace):
    assert main(["--config", str(workspace["config"]),
                 "benchmark", "--methods", "framework"]) == 0
    csv_text = (_config_dir(workspace) / "out" / "report.csv").read_text()
    assert "framework," in csv_text
    assert "one_step," not in csv_text
    assert "oracle," not in csv_text


def test_benchmark_unknown_method_is_config_error(workspace):
    assert main(["--config", str(workspace["config"]),
                 "benchmark", "--methods", "nonsense"]) == EXIT_CONFIG


def test_missing_embedding_endpoint_reports_absent_columns(workspace):
    config = json.loads(workspace["config"].read_text())
    del config["embedding"]
    no_embed = _config_dir(workspace) / "config_noembed.json"
    no_embed.write_text(json.dumps(config))
    assert main(["--config", str(no_embed), "benchmark", "--methods", "framework"]) == 0
    csv_text = (_config_dir(workspace) / "out" / "report.csv").read_text()
    assert "bert_sim,absent" in csv_text
    assert "semantic_align,absent" in csv_text
    assert "# embedding_model=absent" in csv_text
    assert "delta_out,0.000000" in csv_text


def test_update_applies_feed_and_writes_audit(workspace):
    assert main(["--config", str(workspace["config"]), "update"]) == 0
    out = _config_dir(workspace) / "out"
    records = read_audit_log(out / "audit.ndjson")
    assert [r.decision for r in records] == ["updated", "updated"]
    published = json.loads((out / "survey.updated.json").read_text())
    assert {r["key"] for r in published["references"]} >= {"doe2024twostage", "kim2025burst"}


def test_update_with_empty_feed_changes_nothing(workspace):
    empty = _config_dir(workspace) / "empty.ndjson"
    empty.write_text("")
    config = json.loads(workspace["config"].read_text())
    config["feed"] = "empty.ndjson"
    cfg_path = _config_dir(workspace) / "config_empty.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["--config", str(cfg_path), "update"]) == 0
    published = (_config_dir(workspace) / "out" / "survey.updated.json").read_text()
    assert published == workspace["survey"].read_text()
    assert read_audit_log(_config_dir(workspace) / "out" / "audit.ndjson") == []


def test_three_paper_feed_yields_three_audit_records(workspace):
    late = workspace["late_feed"].read_text().rstrip("\n")
    oos_first = workspace["oos_feed"].read_text().splitlines()[0]
    mixed = _config_dir(workspace) / "mixed.ndjson"
    mixed.write_text(late + "\n" + oos_first + "\n")
    config = json.loads(workspace["config"].read_text())
    config["feed"] = "mixed.ndjson"
    cfg_path = _config_dir(workspace) / "config_mixed.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["--config", str(cfg_path), "update"]) == 0
    records = read_audit_log(_config_dir(workspace) / "out" / "audit.ndjson")
    assert [r.decision for r in records] == ["updated", "updated", "abstained"]


def test_update_refuses_unapproved_outline(workspace):
    outline = json.loads(workspace["outline"].read_text())
    outline["approved"] = False
    workspace["outline"].write_text(json.dumps(outline))
    assert main(["--config", str(workspace["config"]), "update"]) == EXIT_CONFIG


def test_outline_then_review_then_approved(workspace, monkeypatch):
    workspace["outline"].unlink()
    assert main(["--config", str(workspace["config"]), "outline"]) == 0
    drafted = load_outline(workspace["outline"])
    assert not drafted.approved
    assert drafted.section_ids() == ["1", "2", "3"]
    monkeypatch.setattr("builtins.input", lambda prompt="": "y")
    assert main(["--config", str(workspace["config"]), "review"]) == 0
    assert load_outline(workspace["outline"]).approved


def test_review_rejection_leaves_unapproved(workspace, monkeypatch):
    workspace["outline"].unlink()
    assert main(["--config", str(workspace["config"]), "outline"]) == 0
    monkeypatch.setattr("builtins.input", lambda prompt="": "n")
    assert main(["--config", str(workspace["config"]), "review"]) == 0
    assert not load_outline(workspace["outline"]).approved


def test_outline_refuses_to_overwrite_approved_outline(workspace):
    assert main(["--config", str(workspace["config"]), "outline"]) == EXIT_CONFIG
    assert load_outline(workspace["outline"]).approved  # untouched


def test_outline_force_overwrites(workspace):
    assert main(["--config", str(workspace["config"]), "outline", "--force"]) == 0
    assert not load_outline(workspace["outline"]).approved


def test_out_flag_overrides_configured_directory(workspace, tmp_path):
    target = tmp_path / "elsewhere"
    assert main(["--config", str(workspace["config"]), "--out", str(target),
                 "benchmark", "--methods", "framework"]) == 0
    assert (target / "report.csv").exists()
    assert not (_config_dir(workspace) / "out").exists()


def test_missing_config_is_config_error(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json"), "update"]) == EXIT_CONFIG


def test_malformed_survey_is_parse_error(workspace):
    workspace["survey"].write_text("{broken")
    assert main(["--config", str(workspace["config"]), "update"]) == EXIT_PARSE


def test_conflicting_endpoint_settings_rejected(workspace):
    config = json.loads(workspace["config"].read_text())
    config["generation"] = {"mock_scenario": "scenario.json", "base_url": "http://x"}
    bad = _config_dir(workspace) / "bad.json"
    bad.write_text(json.dumps(config))
    assert main(["--config", str(bad), "update"]) == EXIT_CONFIG


def test_env_interpolation(workspace, monkeypatch):
    monkeypatch.setenv("DS_OUT", "envout")
    config = json.loads(workspace["config"].read_text())
    config["out_dir"] = "${DS_OUT}"
    cfg_path = _config_dir(workspace) / "config_env.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["--config", str(cfg_path), "benchmark", "--methods", "framework"]) == 0
    assert (_config_dir(workspace) / "envout" / "report.csv").exists()


def test_unset_env_variable_is_config_error(workspace, monkeypatch):
    monkeypatch.delenv("DS_MISSING", raising=False)
    config = json.loads(workspace["config"].read_text())
    config["out_dir"] = "${DS_MISSING}"
    cfg_path = _config_dir(workspace) / "config_envmissing.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["--config", str(cfg_path), "update"]) == EXIT_CONFIG
