"""Regression labels tying each action to the next goal in its period.

The primary label is a signed score in [-1, 1]: positive when the acting team
scores the next goal of the period, negative when the opponent does, with
magnitude the larger of a linear time decay over the final minute before the
goal and an indicator for the last few actions before it. The k-action label
is the classic dual target (score / concede within the next k actions) kept as
a benchmarking baseline.
"""

from __future__ import annotations

import csv
from bisect import bisect_left
from pathlib import Path

import numpy as np

from playerform.events import Event, GoalRecord, extract_goals, group_by_game

TIME_WINDOW_MIN = 1.0
ACTION_WINDOW = 5
K_WINDOW = 10

SCHEME_EQ1 = "eq1"
SCHEME_K10 = "k10"
SCHEMES = (SCHEME_EQ1, SCHEME_K10)

LABEL_HEADER = ["event_index", "label"]


def eq1_label(
    event: Event,
    event_ordinal: int,
    goals: list[GoalRecord],
    *,
    time_window_min: float = TIME_WINDOW_MIN,
    action_window: int = ACTION_WINDOW,
) -> float:
    """Label one event against the first upcoming goal of its game and period.

    The scoring shot itself matches its own goal record: zero time gap, so the
    time component is 1 and the label is +1.
    """
    goal = _next_goal(event, event_ordinal, goals)
    if goal is None:
        return 0.0
    minutes_before = (goal.second - event.second) / 60.0
    time_component = min(max(1.0 - minutes_before / time_window_min, 0.0), 1.0)
    ordinal_component = float(
        event_ordinal < goal.ordinal and goal.ordinal - event_ordinal <= action_window
    )
    magnitude = max(time_component, ordinal_component)
    if magnitude == 0.0:
        return 0.0
    sign = 1.0 if event.team_id == goal.team_id else -1.0
    return sign * magnitude


def k_label(
    event: Event,
    event_ordinal: int,
    goals: list[GoalRecord],
    *,
    k: int = K_WINDOW,
) -> tuple[float, float]:
    """(score, concede) indicators for a goal within the next k actions."""
    score = 0.0
    concede = 0.0
    for goal in goals:
        if goal.game_id != event.game_id or goal.period != event.period:
            continue
        if event_ordinal <= goal.ordinal <= event_ordinal + k:
            if goal.team_id == event.team_id:
                score = 1.0
            else:
                concede = 1.0
    return score, concede


def _next_goal(
    event: Event, event_ordinal: int, goals: list[GoalRecord]
) -> GoalRecord | None:
    candidates = [
        g
        for g in goals
        if g.game_id == event.game_id
        and g.period == event.period
        and g.ordinal >= event_ordinal
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda g: g.ordinal)


def label_dataset(events: list[Event], scheme: str, **params) -> np.ndarray:
    """Label every event, aligned with the canonical sorted order.

    eq1 gives the signed time/ordinal label; k10 gives score minus concede.
    Goal influence never crosses a period or game boundary.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown label scheme: {scheme!r}")
    games = group_by_game(events)
    goals = extract_goals([e for evs in games.values() for e in evs])
    goals_by_game: dict[str, list[GoalRecord]] = {}
    for goal in goals:
        goals_by_game.setdefault(goal.game_id, []).append(goal)

    labels: list[float] = []
    for game_id in sorted(games):
        game_events = games[game_id]
        game_goals = goals_by_game.get(game_id, [])
        ordinals = [g.ordinal for g in game_goals]  # ascending by construction
        for ordinal, event in enumerate(game_events):
            if scheme == SCHEME_EQ1:
                labels.append(
                    _fast_eq1(event, ordinal, game_goals, ordinals, params)
                )
            else:
                score, concede = k_label(
                    event, ordinal, game_goals, k=params.get("k", K_WINDOW)
                )
                labels.append(score - concede)
    return np.asarray(labels, dtype=np.float64)


def _fast_eq1(
    event: Event,
    ordinal: int,
    game_goals: list[GoalRecord],
    goal_ordinals: list[int],
    params: dict,
) -> float:
    # Same rule as eq1_label, finding the first upcoming goal by bisection.
    pos = bisect_left(goal_ordinals, ordinal)
    goal = None
    for candidate in game_goals[pos:]:
        if candidate.period == event.period:
            goal = candidate
            break
        if candidate.period > event.period:
            break
    if goal is None:
        return 0.0
    return eq1_label(
        event,
        ordinal,
        [goal],
        time_window_min=params.get("time_window_min", TIME_WINDOW_MIN),
        action_window=params.get("action_window", ACTION_WINDOW),
    )


def write_labels(labels: np.ndarray, path: str | Path) -> None:
    """Export one label per row, indexed by canonical event order."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LABEL_HEADER)
        for i, label in enumerate(np.asarray(labels, dtype=np.float64)):
            writer.writerow([str(i), repr(float(label))])
