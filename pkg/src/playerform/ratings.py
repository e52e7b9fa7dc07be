"""Per-game player ratings and rolling form series.

A game rating is the player's summed action value per minute played, kept only
for real participation: strictly more than 60 minutes, goalkeepers excluded.
Ratings are indexed by the player's own game count, not by date, so the
rolling windows mean "last N games played". The short window (10 games, 5
minimum) tracks current form; the long window (40 games, 20 minimum) tracks
established level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from playerform.events import (
    ACTION_CATEGORY,
    CATEGORY_DRIBBLE,
    CATEGORY_OTHER,
    CATEGORY_PASS,
    CATEGORY_SHOT,
    GOALKEEPER_POSITION,
    GameSheet,
    SheetLine,
)
from playerform.valuation import ActionValue

MINUTES_THRESHOLD = 60.0

SHORT_WINDOW = 10
SHORT_MIN_PERIODS = 5
LONG_WINDOW = 40
LONG_MIN_PERIODS = 20

CATEGORIES = (CATEGORY_PASS, CATEGORY_DRIBBLE, CATEGORY_SHOT, CATEGORY_OTHER)

SERIES_HEADER = [
    "player_id", "game_index", "date", "r_g", "r_st", "r_lt",
    "pass_r", "dribble_r", "shot_r",
]
TOP_PEAKS_HEADER = ["player_id", "peak_r_lt"]


class SheetMismatchError(ValueError):
    """An action's (game, player) has no game-sheet entry to qualify it."""


@dataclass(frozen=True)
class GameRating:
    player_id: str
    game_id: str
    game_index: int
    date: str
    minutes: float
    age: float
    r_g: float
    pass_r: float
    dribble_r: float
    shot_r: float
    other_r: float


@dataclass(frozen=True)
class RatingSeries:
    """One player's rating vectors, aligned by game_index (position i = game i+1)."""

    player_id: str
    games: list[GameRating]
    r_g: np.ndarray
    r_st: np.ndarray
    r_lt: np.ndarray


def game_ratings(
    values: list[ActionValue],
    sheets: list[GameSheet],
    category: str | None = None,
) -> list[GameRating]:
    """Aggregate action values into qualifying per-game ratings.

    Every (game, player) pair present in the values must appear on a sheet;
    sheet players with no valued actions still rate (a blank game is a game).
    With a category filter, r_g counts only that category's actions; the
    per-category breakdown columns are always the full decomposition.
    """
    if category is not None and category not in CATEGORIES:
        raise ValueError(f"unknown category: {category!r}")
    sheet_by_game = {sheet.game_id: sheet for sheet in sheets}
    sums: dict[tuple[str, str], dict[str, float]] = {}
    for av in values:
        sheet = sheet_by_game.get(av.game_id)
        if sheet is None or av.player_id not in sheet.players:
            raise SheetMismatchError(
                f"player {av.player_id} in game {av.game_id} has no sheet entry"
            )
        per_cat = sums.setdefault(
            (av.game_id, av.player_id), {c: 0.0 for c in CATEGORIES}
        )
        per_cat[ACTION_CATEGORY[av.action_type]] += av.value

    zeros = {c: 0.0 for c in CATEGORIES}
    ratings: list[GameRating] = []
    per_player: dict[str, list[tuple[str, str, SheetLine, dict[str, float]]]] = {}
    for sheet in sheets:
        for line in sheet.players.values():
            if line.minutes <= MINUTES_THRESHOLD:
                continue
            if line.position == GOALKEEPER_POSITION:
                continue
            per_cat = sums.get((sheet.game_id, line.player_id), zeros)
            per_player.setdefault(line.player_id, []).append(
                (sheet.date, sheet.game_id, line, per_cat)
            )

    for player_id in sorted(per_player):
        entries = sorted(per_player[player_id], key=lambda t: (t[0], t[1]))
        for index, (date, game_id, line, per_cat) in enumerate(entries, start=1):
            minutes = line.minutes
            total = sum(per_cat.values())
            numerator = per_cat[category] if category is not None else total
            ratings.append(
                GameRating(
                    player_id=player_id,
                    game_id=game_id,
                    game_index=index,
                    date=date,
                    minutes=minutes,
                    age=line.age,
                    r_g=numerator / minutes,
                    pass_r=per_cat[CATEGORY_PASS] / minutes,
                    dribble_r=per_cat[CATEGORY_DRIBBLE] / minutes,
                    shot_r=per_cat[CATEGORY_SHOT] / minutes,
                    other_r=per_cat[CATEGORY_OTHER] / minutes,
                )
            )
    return ratings


def rolling_mean(values: np.ndarray, window: int, min_periods: int) -> np.ndarray:
    """Trailing mean over the last `window` entries, NaN until min_periods.

    Entry i averages the min(i + 1, window) most recent values and is defined
    only once that count reaches min_periods.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    if not (1 <= min_periods <= window):
        raise ValueError("min_periods must be in [1, window]")
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    out = np.full(n, np.nan)
    if n == 0:
        return out
    csum = np.cumsum(values)
    for i in range(n):
        count = min(i + 1, window)
        if count < min_periods:
            continue
        total = csum[i] - (csum[i - window] if i >= window else 0.0)
        out[i] = total / count
    return out


def build_series(
    ratings: list[GameRating],
    short: tuple[int, int] = (SHORT_WINDOW, SHORT_MIN_PERIODS),
    long: tuple[int, int] = (LONG_WINDOW, LONG_MIN_PERIODS),
) -> dict[str, RatingSeries]:
    """Per-player rating series with short- and long-term rolling means."""
    by_player: dict[str, list[GameRating]] = {}
    for rating in ratings:
        by_player.setdefault(rating.player_id, []).append(rating)
    series: dict[str, RatingSeries] = {}
    for player_id in sorted(by_player):
        games = sorted(by_player[player_id], key=lambda r: r.game_index)
        r_g = np.array([g.r_g for g in games], dtype=np.float64)
        series[player_id] = RatingSeries(
            player_id=player_id,
            games=games,
            r_g=r_g,
            r_st=rolling_mean(r_g, short[0], short[1]),
            r_lt=rolling_mean(r_g, long[0], long[1]),
        )
    return series


def top_peaks(series: dict[str, RatingSeries], k: int) -> list[tuple[str, float]]:
    """Best k players by peak long-term rating; ties break on player_id."""
    peaks = []
    for player_id in sorted(series):
        r_lt = series[player_id].r_lt
        defined = r_lt[~np.isnan(r_lt)]
        if defined.size:
            peaks.append((player_id, float(defined.max())))
    peaks.sort(key=lambda t: (-t[1], t[0]))
    return peaks[:k]


def _cell(value: float) -> str:
    # rolling entries arrive as numpy scalars, whose repr is not a bare number
    return "" if math.isnan(value) else repr(float(value))


def write_series(series: dict[str, RatingSeries], path: str | Path) -> None:
    """Long-format export; undefined rolling entries are empty cells."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_HEADER)
        for player_id in sorted(series):
            s = series[player_id]
            for i, game in enumerate(s.games):
                writer.writerow(
                    [
                        player_id,
                        str(game.game_index),
                        game.date,
                        repr(game.r_g),
                        _cell(s.r_st[i]),
                        _cell(s.r_lt[i]),
                        repr(game.pass_r),
                        repr(game.dribble_r),
                        repr(game.shot_r),
                    ]
                )


def write_top_peaks(peaks: list[tuple[str, float]], path: str | Path) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TOP_PEAKS_HEADER)
        for player_id, peak in peaks:
            writer.writerow([player_id, repr(peak)])
