"""Command-line pipeline from event streams to ratings and career analytics.

Each subcommand is one stage reading declared inputs from the workspace
directory (--out) and writing declared outputs back into it, so stages can
be rerun independently and chained:

    synth -> ingest -> train -> value -> rate -> volatility / pdc

Exit codes: 0 success, 1 internal or domain error, 2 bad invocation, paths,
or config, 3 missing upstream artifact (the message names the stage to run).
A single --seed drives every random choice: league simulation, the by-game
train/test split, and forest bootstrapping.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import numpy as np

from playerform.analytics import (
    development_curve,
    late_bloomers,
    league_volatility,
    write_development_curve,
    write_late_bloomers,
    write_volatility,
)
from playerform.events import parse_events, read_games, write_events, write_games
from playerform.features import FeatureMatrix, build_features, write_feature_matrix
from playerform.forest import (
    ForestConfig,
    RegressionForest,
    benchmark_rows,
    evaluate,
    write_benchmark,
)
from playerform.labeling import label_dataset, write_labels
from playerform.ratings import (
    build_series,
    game_ratings,
    top_peaks,
    write_series,
    write_top_peaks,
)
from playerform.synth import LeagueConfig, write_league
from playerform.valuation import (
    action_values,
    read_action_values,
    write_action_values,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISSING = 3

VARIANT_CHOICES = ("i", "o", "both")
SCHEME_CHOICES = ("eq1", "k10", "both")

CONFIG_KEYS = {
    "out", "events", "variant", "labels", "seed", "test_fraction", "top_k",
    "forest", "short_window", "long_window", "drop_nonnegative",
    "smoothing_window", "peak_age_threshold", "league",
}
FOREST_KEYS = {"n_trees", "min_samples_split", "bootstrap"}

FORMATS = {".csv": "csv", ".jsonl": "jsonl"}


class UsageError(Exception):
    """Bad invocation: flags, paths, or config contents."""


class MissingArtifact(Exception):
    """A stage's declared input does not exist yet."""

    def __init__(self, path: Path, stage: str):
        super().__init__(f"missing artifact {path}; run the '{stage}' stage first")


def _defaults() -> dict:
    return {
        "out": ".",
        "events": None,
        "variant": "both",
        "labels": "both",
        "labels_from_flag": False,
        "seed": 0,
        "test_fraction": 0.25,
        "top_k": 10,
        "forest": {},
        "short_window": [10, 5],
        "long_window": [40, 20],
        "drop_nonnegative": False,
        "smoothing_window": 3,
        "peak_age_threshold": 30,
        "league": {},
    }


def _check_window(value, key: str) -> list[int]:
    ok = (
        isinstance(value, (list, tuple)) and len(value) == 2
        and all(isinstance(v, int) and not isinstance(v, bool) and v >= 1
                for v in value)
    )
    if not ok:
        raise UsageError(f"config {key} must be [window, min_periods], ints >= 1")
    return list(value)


def _load_config_file(path: Path) -> dict:
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = _defaults()
    if args.config is not None:
        raw = _load_config_file(Path(args.config))
        cfg.update(raw)
    if args.out is not None:
        cfg["out"] = str(args.out)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.variant is not None:
        cfg["variant"] = args.variant
    if args.labels is not None:
        cfg["labels"] = args.labels
        cfg["labels_from_flag"] = True

    if cfg["variant"] not in VARIANT_CHOICES:
        raise UsageError(f"variant must be one of {VARIANT_CHOICES}")
    if cfg["labels"] not in SCHEME_CHOICES:
        raise UsageError(f"labels must be one of {SCHEME_CHOICES}")
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise UsageError("seed must be an integer")
    if not isinstance(cfg["test_fraction"], (int, float)) or not (
        0.0 < float(cfg["test_fraction"]) < 1.0
    ):
        raise UsageError("test_fraction must be in (0, 1)")
    if not isinstance(cfg["top_k"], int) or cfg["top_k"] < 1:
        raise UsageError("top_k must be a positive integer")
    if not isinstance(cfg["forest"], dict):
        raise UsageError("config forest must be an object")
    unknown = set(cfg["forest"]) - FOREST_KEYS
    if unknown:
        raise UsageError(f"unknown forest config keys: {sorted(unknown)}")
    cfg["short_window"] = _check_window(cfg["short_window"], "short_window")
    cfg["long_window"] = _check_window(cfg["long_window"], "long_window")
    if not isinstance(cfg["drop_nonnegative"], bool):
        raise UsageError("drop_nonnegative must be a boolean")
    if not isinstance(cfg["smoothing_window"], int) or cfg["smoothing_window"] < 1:
        raise UsageError("smoothing_window must be a positive integer")
    if not isinstance(cfg["peak_age_threshold"], (int, float)):
        raise UsageError("peak_age_threshold must be a number")
    if not isinstance(cfg["league"], dict):
        raise UsageError("config league must be an object")
    if "seed" in cfg["league"]:
        raise UsageError("set the top-level seed, not league.seed")
    if cfg["events"] is not None and not isinstance(cfg["events"], str):
        raise UsageError("config events must be a path string")
    return cfg


def _workspace(cfg: dict) -> Path:
    ws = Path(cfg["out"])
    try:
        ws.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {ws}: {exc}")
    return ws


def _require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise MissingArtifact(path, stage)
    return path


def _variants(cfg: dict) -> tuple[str, ...]:
    return ("i", "o") if cfg["variant"] == "both" else (cfg["variant"],)


def _schemes(cfg: dict) -> tuple[str, ...]:
    return ("eq1", "k10") if cfg["labels"] == "both" else (cfg["labels"],)


def _value_scheme(cfg: dict) -> str:
    # "both" cannot name a model file; the signed label is the default value
    # definition, so only an explicit flag contradiction is an error.
    if cfg["labels"] != "both":
        return cfg["labels"]
    if cfg["labels_from_flag"]:
        raise UsageError("value exports one label scheme; pass --labels eq1 or k10")
    return "eq1"


def _say(path: Path) -> None:
    print(f"wrote {path}")


def _load_events(ws: Path):
    events_path = _require(ws / "events.csv", "synth or ingest")
    _require(ws / "games.csv", "synth or ingest")
    return parse_events(events_path, "csv")


def _series_for(ws: Path, variant: str, cfg: dict):
    values_path = _require(ws / "action_values.csv", "value")
    by_variant = read_action_values(values_path)
    values = by_variant.get(variant)
    if not values:
        raise MissingArtifact(
            Path(f"{values_path} [{variant} column]"), f"value --variant {variant}"
        )
    sheets = read_games(_require(ws / "games.csv", "synth or ingest"))
    ratings = game_ratings(values, sheets)
    return build_series(
        ratings,
        short=tuple(cfg["short_window"]),
        long=tuple(cfg["long_window"]),
    )


def split_games(
    game_ids, test_fraction: float, seed: int
) -> tuple[list[str], list[str]]:
    """Deterministic by-game split; every event of a game lands on one side."""
    ids = sorted(game_ids)
    if len(ids) < 2:
        raise ValueError("need at least 2 games to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    random.Random(seed).shuffle(ids)
    n_test = min(max(1, round(len(ids) * test_fraction)), len(ids) - 1)
    return sorted(ids[n_test:]), sorted(ids[:n_test])


def cmd_synth(cfg: dict) -> None:
    try:
        league = LeagueConfig.from_dict({**cfg["league"], "seed": cfg["seed"]})
    except ValueError as exc:
        raise UsageError(f"league config: {exc}")
    ws = _workspace(cfg)
    for path in write_league(league, ws).values():
        _say(path)


def cmd_ingest(cfg: dict) -> None:
    ws = _workspace(cfg)
    if cfg["events"] is not None:
        src = Path(cfg["events"])
        if not src.exists():
            raise UsageError(f"events file not found: {src}")
    else:
        src = _require(ws / "events.csv", "synth")
    fmt = FORMATS.get(src.suffix)
    if fmt is None:
        raise UsageError(f"cannot infer format from {src.name}; use .csv or .jsonl")
    games_src = src.with_name(f"games.{fmt}")
    if not games_src.exists():
        raise UsageError(f"no sheet file {games_src} next to {src.name}")

    result = parse_events(src, fmt)
    paths = (ws / "events.csv", ws / "games.csv", ws / "ingest_report.json")
    write_events(result.events, paths[0])
    write_games(result.sheets, paths[1])
    report = {
        "events": len(result.events),
        "sheets": len(result.sheets),
        "rejected_rows": result.rejected_rows,
        "warnings": result.warnings,
    }
    with open(paths[2], "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for path in paths:
        _say(path)


def cmd_train(cfg: dict) -> None:
    ws = _workspace(cfg)
    events = _load_events(ws).events
    train_ids, test_ids = split_games(
        {e.game_id for e in events}, cfg["test_fraction"], cfg["seed"]
    )
    test_set = set(test_ids)
    test_mask = np.array([e.game_id in test_set for e in events], dtype=bool)

    matrices: dict[str, FeatureMatrix] = {}
    for variant in _variants(cfg):
        matrices[variant] = build_features(events, variant)
        path = ws / f"features_{variant}.csv"
        write_feature_matrix(matrices[variant], path)
        _say(path)
    labels: dict[str, np.ndarray] = {}
    for scheme in _schemes(cfg):
        labels[scheme] = label_dataset(events, scheme)
        path = ws / f"labels_{scheme}.csv"
        write_labels(labels[scheme], path)
        _say(path)

    forest_config = ForestConfig(seed=cfg["seed"], **cfg["forest"])
    reports = {}
    for variant, matrix in matrices.items():
        subsets = {
            "train": FeatureMatrix(
                variant=matrix.variant,
                columns=matrix.columns,
                values=matrix.values[~test_mask],
            ),
            "test": FeatureMatrix(
                variant=matrix.variant,
                columns=matrix.columns,
                values=matrix.values[test_mask],
            ),
        }
        for scheme, y in labels.items():
            model = RegressionForest.fit(
                subsets["train"], y[~test_mask], forest_config
            )
            model_path = ws / f"model_{variant}_{scheme}.json"
            model.save(model_path)
            _say(model_path)
            payload = {
                "variant": variant,
                "scheme": scheme,
                "split": {
                    "seed": cfg["seed"],
                    "test_fraction": cfg["test_fraction"],
                    "train_games": len(train_ids),
                    "test_games": len(test_ids),
                },
            }
            for name, subset in subsets.items():
                mask = test_mask if name == "test" else ~test_mask
                report = evaluate(
                    model.predict(subset), y[mask], dataset=name, scheme=scheme
                )
                reports[(variant, name, scheme)] = report
                payload[name] = report.to_dict()
            eval_path = ws / f"eval_{variant}_{scheme}.json"
            with open(eval_path, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
            _say(eval_path)

    if set(labels) == {"eq1", "k10"}:
        path = ws / "benchmark.csv"
        write_benchmark(benchmark_rows(reports), path)
        _say(path)


def cmd_value(cfg: dict) -> None:
    ws = _workspace(cfg)
    scheme = _value_scheme(cfg)
    events = _load_events(ws).events
    by_variant = {}
    for variant in _variants(cfg):
        model_path = _require(ws / f"model_{variant}_{scheme}.json", "train")
        model = RegressionForest.load(model_path)
        predictions = model.predict(build_features(events, variant))
        by_variant[variant] = action_values(events, predictions)
    path = ws / "action_values.csv"
    write_action_values(path, by_variant)
    _say(path)


def cmd_rate(cfg: dict) -> None:
    ws = _workspace(cfg)
    for variant in _variants(cfg):
        series = _series_for(ws, variant, cfg)
        path = ws / f"ratings_{variant}.csv"
        write_series(series, path)
        _say(path)
        path = ws / f"top_peaks_{variant}.csv"
        write_top_peaks(top_peaks(series, cfg["top_k"]), path)
        _say(path)


def cmd_volatility(cfg: dict) -> None:
    ws = _workspace(cfg)
    for variant in _variants(cfg):
        series = _series_for(ws, variant, cfg)
        rows = league_volatility(series, drop_nonnegative=cfg["drop_nonnegative"])
        path = ws / f"volatility_{variant}.csv"
        write_volatility(rows, path)
        _say(path)


def cmd_pdc(cfg: dict) -> None:
    ws = _workspace(cfg)
    for variant in _variants(cfg):
        series = _series_for(ws, variant, cfg)
        curve = development_curve(
            series, smoothing_window=cfg["smoothing_window"]
        )
        path = ws / f"pdc_{variant}.csv"
        write_development_curve(curve, path)
        _say(path)
        bloomers = late_bloomers(
            series, peak_age_threshold=cfg["peak_age_threshold"]
        )
        path = ws / f"late_bloomers_{variant}.csv"
        write_late_bloomers(bloomers, path)
        _say(path)


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "train": cmd_train,
    "value": cmd_value,
    "rate": cmd_rate,
    "volatility": cmd_volatility,
    "pdc": cmd_pdc,
}

HELP = {
    "synth": "simulate a league: events.csv, games.csv, ground_truth.json",
    "ingest": "validate and canonicalize an event stream, with a report",
    "train": "features, labels, train/test split, forest models, benchmark",
    "value": "score every action with the trained models",
    "rate": "per-game and rolling rating series, plus peak rankings",
    "volatility": "game-to-game and negative-delta spread per player",
    "pdc": "age development curve and late-bloomer list",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="playerform",
        description="Event-stream pipeline: action values, ratings, analytics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", type=Path, help="JSON pipeline config")
        p.add_argument("--seed", type=int, help="master seed (default 0)")
        p.add_argument("--out", type=Path, help="workspace directory (default .)")
        p.add_argument("--variant", choices=VARIANT_CHOICES,
                       help="feature variant to process (default both)")
        p.add_argument("--labels", choices=SCHEME_CHOICES,
                       help="label scheme(s) (default: both to train, eq1 to value)")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(_resolve_config(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
