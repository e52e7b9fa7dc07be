"""Pipeline CLI: artifact chain, exit codes, and idempotence."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import shutil

import pytest

from playerform.cli import (
    EXIT_ERROR,
    EXIT_MISSING,
    EXIT_OK,
    EXIT_USAGE,
    main,
    split_games,
)

LEAGUE = {
    "n_teams": 4, "seasons": 2, "games_per_season": 10,
    "events_per_game": [60, 80],
}
CONFIG = {
    "league": LEAGUE,
    "labels": "both",
    "short_window": [4, 2],
    "long_window": [8, 4],
}

STAGES = ("synth", "ingest", "train", "value", "rate", "volatility", "pdc")

ARTIFACTS = [
    "events.csv", "games.csv", "ground_truth.json", "ingest_report.json",
    "features_i.csv", "features_o.csv", "labels_eq1.csv", "labels_k10.csv",
    "model_i_eq1.json", "model_i_k10.json", "model_o_eq1.json", "model_o_k10.json",
    "eval_i_eq1.json", "eval_i_k10.json", "eval_o_eq1.json", "eval_o_k10.json",
    "benchmark.csv", "action_values.csv",
    "ratings_i.csv", "ratings_o.csv", "top_peaks_i.csv", "top_peaks_o.csv",
    "volatility_i.csv", "volatility_o.csv",
    "pdc_i.csv", "pdc_o.csv", "late_bloomers_i.csv", "late_bloomers_o.csv",
]


def run(*argv) -> int:
    return main([str(a) for a in argv])


def _digests(ws) -> dict[str, str]:
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in ws.iterdir() if p.is_file()
    }


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("pipeline")
    config = ws / "config.json"
    config.write_text(json.dumps(CONFIG))
    for stage in STAGES:
        rc = run(stage, "--config", config, "--out", ws, "--seed", 1)
        assert rc == EXIT_OK, f"stage {stage} failed"
    return ws


def test_full_chain_emits_every_artifact(workspace) -> None:
    for name in ARTIFACTS:
        path = workspace / name
        assert path.exists(), name
        assert path.stat().st_size > 0, name


def test_ingest_report_counts(workspace) -> None:
    report = json.loads((workspace / "ingest_report.json").read_text())
    with open(workspace / "events.csv") as fh:
        n_events = sum(1 for _ in fh) - 1
    assert report["events"] == n_events
    assert report["rejected_rows"] == 0
    assert report["warnings"] == []
    assert report["sheets"] == 2 * 10 * 2


def test_benchmark_table_shape(workspace) -> None:
    with open(workspace / "benchmark.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8  # 2 models x 2 datasets x 2 schemes
    for row in rows:
        assert row["model"] in ("i", "o")
        assert row["dataset"] in ("train", "test")
        assert float(row["mae"]) >= float(row["medae"]) >= 0.0
        if row["label_scheme"] == "k10":
            assert row["mae_change_pct"] == row["medae_change_pct"] == ""
        else:
            float(row["mae_change_pct"])  # parses as a percentage


def test_eval_reports_record_the_split(workspace) -> None:
    payload = json.loads((workspace / "eval_o_eq1.json").read_text())
    split = payload["split"]
    assert split["train_games"] + split["test_games"] == 2 * 10 * 2
    assert split["test_games"] == round(40 * 0.25)
    assert payload["train"]["mae"] > 0.0
    assert payload["test"]["mae"] > payload["train"]["mae"] * 0.5


def test_top_peaks_match_series_export(workspace) -> None:
    best: dict[str, float] = {}
    with open(workspace / "ratings_o.csv") as fh:
        for row in csv.DictReader(fh):
            if row["r_lt"]:
                value = float(row["r_lt"])
                pid = row["player_id"]
                if pid not in best or value > best[pid]:
                    best[pid] = value
    expected = sorted(best.items(), key=lambda t: (-t[1], t[0]))[:10]
    with open(workspace / "top_peaks_o.csv") as fh:
        got = [(r["player_id"], float(r["peak_r_lt"])) for r in csv.DictReader(fh)]
    assert got == [(pid, pytest.approx(v)) for pid, v in expected]


def test_rerun_stages_are_byte_identical(workspace) -> None:
    config = workspace / "config.json"
    before = _digests(workspace)
    for stage in ("synth", "ingest", "value", "rate", "volatility", "pdc"):
        assert run(stage, "--config", config, "--out", workspace, "--seed", 1) == EXIT_OK
    assert _digests(workspace) == before


def test_value_with_other_scheme_changes_values(tmp_path, workspace) -> None:
    ws = tmp_path / "copy"
    shutil.copytree(workspace, ws)
    original = (ws / "action_values.csv").read_bytes()
    rc = run("value", "--out", ws, "--labels", "k10")
    assert rc == EXIT_OK
    assert (ws / "action_values.csv").read_bytes() != original


def test_value_rejects_explicit_both(workspace, capsys) -> None:
    assert run("value", "--out", workspace, "--labels", "both") == EXIT_USAGE
    assert "eq1 or k10" in capsys.readouterr().err


def test_missing_artifacts_name_the_stage(tmp_path, capsys) -> None:
    empty = tmp_path / "empty"
    assert run("train", "--out", empty) == EXIT_MISSING
    assert "synth" in capsys.readouterr().err
    assert run("value", "--out", empty) == EXIT_MISSING
    capsys.readouterr()
    assert run("rate", "--out", empty) == EXIT_MISSING
    assert "'value'" in capsys.readouterr().err
    assert run("volatility", "--out", empty) == EXIT_MISSING
    assert run("pdc", "--out", empty) == EXIT_MISSING
    assert run("ingest", "--out", empty) == EXIT_MISSING
    assert "'synth'" in capsys.readouterr().err


def test_value_needs_both_models_when_variant_both(tmp_path, workspace, capsys) -> None:
    ws = tmp_path / "partial"
    ws.mkdir()
    for name in ("events.csv", "games.csv", "model_o_eq1.json"):
        shutil.copy(workspace / name, ws / name)
    assert run("value", "--out", ws, "--variant", "o") == EXIT_OK
    assert run("value", "--out", ws) == EXIT_MISSING
    assert "'train'" in capsys.readouterr().err
    assert run("rate", "--out", ws, "--variant", "i") == EXIT_MISSING
    assert "--variant i" in capsys.readouterr().err


def test_bad_config_is_a_usage_error(tmp_path, capsys) -> None:
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"bogus_key": 1}))
    assert run("synth", "--config", config, "--out", tmp_path) == EXIT_USAGE
    assert "bogus_key" in capsys.readouterr().err

    config.write_text(json.dumps({"league": {"n_teams": 3}}))
    assert run("synth", "--config", config, "--out", tmp_path) == EXIT_USAGE
    assert "n_teams" in capsys.readouterr().err

    config.write_text(json.dumps({"league": {"seed": 4}}))
    assert run("synth", "--config", config, "--out", tmp_path) == EXIT_USAGE
    assert "top-level seed" in capsys.readouterr().err

    config.write_text(json.dumps({"short_window": [10]}))
    assert run("rate", "--config", config, "--out", tmp_path) == EXIT_USAGE

    config.write_text("{ not json")
    assert run("synth", "--config", config, "--out", tmp_path) == EXIT_USAGE

    assert run("synth", "--config", tmp_path / "absent.json",
               "--out", tmp_path) == EXIT_USAGE


def test_unknown_subcommand_exits_2() -> None:
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_seed_flag_overrides_config(tmp_path) -> None:
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"league": LEAGUE}))
    assert run("synth", "--config", config, "--out", tmp_path, "--seed", 9) == EXIT_OK
    truth = json.loads((tmp_path / "ground_truth.json").read_text())
    assert truth["config"]["seed"] == 9


def test_ingest_from_external_path(tmp_path) -> None:
    raw = tmp_path / "raw"
    assert run("synth", "--out", raw, "--config", _league_config(tmp_path)) == EXIT_OK
    config = tmp_path / "ingest.json"
    config.write_text(json.dumps({"events": str(raw / "events.csv")}))
    ws = tmp_path / "ws"
    assert run("ingest", "--config", config, "--out", ws) == EXIT_OK
    assert (ws / "events.csv").read_bytes() == (raw / "events.csv").read_bytes()
    assert (ws / "games.csv").read_bytes() == (raw / "games.csv").read_bytes()

    config.write_text(json.dumps({"events": str(raw / "nowhere.csv")}))
    assert run("ingest", "--config", config, "--out", ws) == EXIT_USAGE


def _league_config(tmp_path):
    path = tmp_path / "league.json"
    path.write_text(json.dumps({
        "league": {**LEAGUE, "seasons": 1, "games_per_season": 3},
    }))
    return path


def test_pdc_on_single_age_data_is_a_domain_error(tmp_path, capsys) -> None:
    ws = tmp_path / "flat"
    ws.mkdir()
    with open(ws / "games.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["game_id", "date", "player_id", "minutes", "position", "age"])
        for g in ("g1", "g2"):
            for pid in ("a", "b", "c"):
                writer.writerow([g, "2024-01-01", pid, "90.0", "MF", "22.3"])
    with open(ws / "action_values.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["game_id", "event_index", "player_id", "action_type",
                         "i_vaep", "o_vaep"])
        for g in ("g1", "g2"):
            for i, pid in enumerate(("a", "b", "c")):
                writer.writerow([g, str(i + 1), pid, "pass", "", "0.05"])
    rc = run("pdc", "--out", ws, "--variant", "o",
             "--config", _windows_config(tmp_path))
    assert rc == EXIT_ERROR
    assert "distinct ages" in capsys.readouterr().err


def _windows_config(tmp_path):
    path = tmp_path / "windows.json"
    path.write_text(json.dumps({"short_window": [2, 1], "long_window": [2, 1]}))
    return path


def test_split_games_partitions_deterministically() -> None:
    ids = [f"g{i}" for i in range(20)]
    train, test = split_games(ids, 0.25, seed=0)
    assert sorted(train + test) == sorted(ids)
    assert len(test) == 5
    assert not set(train) & set(test)
    assert (train, test) == split_games(ids, 0.25, seed=0)
    assert split_games(ids, 0.25, seed=1) != (train, test)
    with pytest.raises(ValueError):
        split_games(["only"], 0.25, seed=0)
    with pytest.raises(ValueError):
        split_games(ids, 1.5, seed=0)
    train, test = split_games(["a", "b"], 0.9, seed=0)
    assert len(train) == 1 and len(test) == 1
