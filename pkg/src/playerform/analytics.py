"""Consistency metrics and career-shape analytics over rating series.

Volatility asks how far a player's single games stray from their established
level: the spread of game rating minus long-term rating, the same spread with
only the bad games kept, and the spread of short-term slumps. Raw volatility
scales with rating level (better players have more room to fall), so a league
view fits a line of each metric against the player's median rating and keeps
the residual: volatility beyond what the rating level predicts.

The development curve estimates how much of a rating is age rather than
ability. Per-player medians by age are normalized to the player's own peak,
pooled per age, and damped where one age group dominates the sample, so a
crowd of same-aged players cannot pull the curve toward themselves.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from playerform.ratings import RatingSeries

MIN_VOLATILITY_GAMES = 2
MIN_ADJUSTMENT_PLAYERS = 3
MIN_DISTINCT_AGES = 3
MIN_PLAYER_AGES = 2
SMOOTHING_WINDOW = 3
PEAK_AGE_THRESHOLD = 30

VOLATILITY_HEADER = [
    "player_id", "median_rating", "g2g", "neg_game", "neg_st",
    "adj_g2g", "adj_neg_game", "adj_neg_st",
]
CURVE_HEADER = ["age", "unadjusted", "player_count", "adjusted", "final"]
LATE_BLOOMERS_HEADER = ["player_id", "peak_age", "peak_r_lt"]

FLAT_CURVE_MESSAGE = (
    "development curve is flat; returning 0.5 for every age"
)


@dataclass(frozen=True)
class VolatilityReport:
    """One player's raw consistency metrics."""

    player_id: str
    median_rating: float
    g2g: float
    neg_game: float
    neg_st: float


@dataclass(frozen=True)
class AdjustedVolatility:
    """Raw metrics plus their residuals after the rating-level fit."""

    player_id: str
    median_rating: float
    g2g: float
    neg_game: float
    neg_st: float
    adj_g2g: float
    adj_neg_game: float
    adj_neg_st: float


@dataclass(frozen=True)
class DevelopmentCurve:
    """Pooled age curve, one row per integer age, ages ascending."""

    ages: list[int]
    unadjusted: list[float]
    player_counts: list[int]
    adjusted: list[float]
    final: list[float]

    @property
    def peak_age(self) -> int:
        return self.ages[int(np.argmax(self.final))]


@dataclass(frozen=True)
class LateBloomer:
    player_id: str
    peak_age: int
    peak_rating: float


def _spread(deltas: np.ndarray, negative_only: bool, drop: bool) -> float:
    if negative_only:
        if drop:
            deltas = deltas[deltas < 0.0]
            if deltas.size < 2:
                return 0.0
        else:
            deltas = np.minimum(deltas, 0.0)
    return float(np.std(deltas))


def volatility(series: RatingSeries, drop_nonnegative: bool = False) -> VolatilityReport:
    """Measure one player's rating spread around their long-term level.

    Needs at least two games with a defined long-term rating. Games where
    the player matched or beat their level count as zero slump by default;
    drop_nonnegative removes them from the negative metrics instead.
    """
    lt_mask = ~np.isnan(series.r_lt)
    st_mask = lt_mask & ~np.isnan(series.r_st)
    if int(lt_mask.sum()) < MIN_VOLATILITY_GAMES or int(st_mask.sum()) < MIN_VOLATILITY_GAMES:
        raise ValueError(
            f"player {series.player_id}: volatility needs at least "
            f"{MIN_VOLATILITY_GAMES} games with defined form ratings"
        )
    game_deltas = series.r_g[lt_mask] - series.r_lt[lt_mask]
    st_deltas = series.r_st[st_mask] - series.r_lt[st_mask]
    return VolatilityReport(
        player_id=series.player_id,
        median_rating=float(np.median(series.r_g)),
        g2g=_spread(game_deltas, negative_only=False, drop=False),
        neg_game=_spread(game_deltas, negative_only=True, drop=drop_nonnegative),
        neg_st=_spread(st_deltas, negative_only=True, drop=drop_nonnegative),
    )


def _residuals(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x_dev = x - x.mean()
    var = float(np.dot(x_dev, x_dev))
    if var == 0.0:
        return y - y.mean()
    slope = float(np.dot(x_dev, y - y.mean())) / var
    intercept = float(y.mean()) - slope * float(x.mean())
    return y - (intercept + slope * x)


def adjust_volatility(reports: list[VolatilityReport]) -> list[AdjustedVolatility]:
    """Remove the rating-level trend from each metric across a player pool.

    Fits metric against median rating by least squares and reports the
    residuals, preserving input order. When every player has the same median
    rating the fit is undefined and the residual falls back to the deviation
    from the pool mean.
    """
    if len(reports) < MIN_ADJUSTMENT_PLAYERS:
        raise ValueError(
            f"adjustment needs at least {MIN_ADJUSTMENT_PLAYERS} players, "
            f"got {len(reports)}"
        )
    x = np.array([r.median_rating for r in reports])
    residuals = {
        name: _residuals(x, np.array([getattr(r, name) for r in reports]))
        for name in ("g2g", "neg_game", "neg_st")
    }
    return [
        AdjustedVolatility(
            player_id=r.player_id,
            median_rating=r.median_rating,
            g2g=r.g2g,
            neg_game=r.neg_game,
            neg_st=r.neg_st,
            adj_g2g=float(residuals["g2g"][i]),
            adj_neg_game=float(residuals["neg_game"][i]),
            adj_neg_st=float(residuals["neg_st"][i]),
        )
        for i, r in enumerate(reports)
    ]


def league_volatility(
    series_by_player: dict[str, RatingSeries],
    drop_nonnegative: bool = False,
) -> list[AdjustedVolatility]:
    """Volatility with adjustment for every player with enough games.

    Players below the game minimum are skipped, not an error; the adjustment
    still requires three qualifying players.
    """
    reports = []
    for player_id in sorted(series_by_player):
        try:
            reports.append(volatility(series_by_player[player_id], drop_nonnegative))
        except ValueError:
            continue
    return adjust_volatility(reports)


def centered_moving_average(values: list[float], window: int) -> list[float]:
    """Centered moving average; windows shrink at the edges instead of padding."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {window}")
    half = window // 2
    return [
        float(np.mean(values[max(0, i - half):i + half + 1]))
        for i in range(len(values))
    ]


def _ages_and_ratings(series: RatingSeries, rating: str) -> dict[int, list[float]]:
    vector = getattr(series, rating)
    by_age: dict[int, list[float]] = {}
    for game, value in zip(series.games, vector):
        if math.isnan(value):
            continue
        by_age.setdefault(int(math.floor(game.age)), []).append(float(value))
    return by_age


def development_curve(
    series_by_player: dict[str, RatingSeries],
    rating: str = "r_g",
    smoothing_window: int = SMOOTHING_WINDOW,
) -> DevelopmentCurve:
    """Pool per-player age medians into a normalized age curve.

    Players appearing at fewer than two integer ages carry no age signal and
    are dropped, as are players whose best age median is not positive (their
    normalization would flip signs). Each age's pooled median is damped by
    how crowded the age is, smoothed, and rescaled to [0, 1]; a flat curve
    degenerates to 0.5 everywhere with a warning.
    """
    per_player: dict[str, dict[int, float]] = {}
    for player_id, series in series_by_player.items():
        by_age = _ages_and_ratings(series, rating)
        if len(by_age) < MIN_PLAYER_AGES:
            continue
        medians = {age: float(np.median(vals)) for age, vals in by_age.items()}
        best = max(medians.values())
        if best <= 0.0:
            continue
        per_player[player_id] = {age: m / best for age, m in medians.items()}

    pooled: dict[int, list[float]] = {}
    for medians in per_player.values():
        for age, value in medians.items():
            pooled.setdefault(age, []).append(value)
    if len(pooled) < MIN_DISTINCT_AGES:
        raise ValueError(
            f"development curve needs at least {MIN_DISTINCT_AGES} distinct "
            f"ages, got {len(pooled)}"
        )

    ages = sorted(pooled)
    unadjusted = [float(np.median(pooled[age])) for age in ages]
    counts = [len(pooled[age]) for age in ages]
    max_count = max(counts)
    adjusted = [
        u * (1.0 - count / max_count) for u, count in zip(unadjusted, counts)
    ]
    smoothed = centered_moving_average(adjusted, smoothing_window)
    lo, hi = min(smoothed), max(smoothed)
    if hi - lo == 0.0:
        warnings.warn(FLAT_CURVE_MESSAGE)
        final = [0.5] * len(smoothed)
    else:
        final = [(v - lo) / (hi - lo) for v in smoothed]
    return DevelopmentCurve(
        ages=ages,
        unadjusted=unadjusted,
        player_counts=counts,
        adjusted=adjusted,
        final=final,
    )


def late_bloomers(
    series_by_player: dict[str, RatingSeries],
    peak_age_threshold: int = PEAK_AGE_THRESHOLD,
    k: int | None = None,
) -> list[LateBloomer]:
    """Players whose long-term rating peaked at or past the threshold age.

    A player's peak age is the earliest age maximizing their per-age median
    long-term rating. Results rank by peak rating, best first, ties by id.
    """
    found: list[LateBloomer] = []
    for player_id in sorted(series_by_player):
        medians = {
            age: float(np.median(vals))
            for age, vals in _ages_and_ratings(series_by_player[player_id], "r_lt").items()
        }
        if not medians:
            continue
        peak_age, peak = None, -math.inf
        for age in sorted(medians):
            if medians[age] > peak:
                peak_age, peak = age, medians[age]
        if peak_age is not None and peak_age >= peak_age_threshold:
            found.append(LateBloomer(player_id, peak_age, peak))
    found.sort(key=lambda b: (-b.peak_rating, b.player_id))
    return found if k is None else found[:k]


def write_volatility(rows: list[AdjustedVolatility], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VOLATILITY_HEADER)
        for r in rows:
            writer.writerow([
                r.player_id, repr(r.median_rating), repr(r.g2g),
                repr(r.neg_game), repr(r.neg_st), repr(r.adj_g2g),
                repr(r.adj_neg_game), repr(r.adj_neg_st),
            ])


def write_development_curve(curve: DevelopmentCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        for i, age in enumerate(curve.ages):
            writer.writerow([
                age, repr(curve.unadjusted[i]), curve.player_counts[i],
                repr(curve.adjusted[i]), repr(curve.final[i]),
            ])


def write_late_bloomers(rows: list[LateBloomer], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LATE_BLOOMERS_HEADER)
        for b in rows:
            writer.writerow([b.player_id, b.peak_age, repr(b.peak_rating)])
