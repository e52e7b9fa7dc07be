"""Per-action feature vectors in two variants.

The intent variant describes what an action tried to do (including whether it
moved the ball closer to goal); the outcome-aware variant adds what actually
happened: end location geometry, the success flag, and shot placement relative
to the goal frame. Shot-like actions always carry outcome = 1 in the
outcome-aware variant so their value reflects the attempt, not the save.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from playerform.events import (
    GOAL_CENTER_Y,
    PITCH_LENGTH,
    SHOT_TYPES,
    Event,
    sort_events,
)

GOAL_HALF_WIDTH = 3.66
CROSSBAR_HEIGHT = 2.44
LEFT_POST_Y = GOAL_CENTER_Y - GOAL_HALF_WIDTH
RIGHT_POST_Y = GOAL_CENTER_Y + GOAL_HALF_WIDTH

# Encoded action-type code for "no previous action in this period".
NO_PREV_CODE = -1

VARIANT_INTENT = "i"
VARIANT_OUTCOME = "o"
VARIANTS = (VARIANT_INTENT, VARIANT_OUTCOME)

INTENT_COLUMNS = [
    "period",
    "second",
    "x",
    "end_x",
    "body_part_is_head",
    "enc_type",
    "start_angle_to_goal",
    "start_distance_to_goal",
    "intent_progressive",
    "enc_prev_type_1",
    "prev_team_equal_1",
    "enc_prev_type_2",
    "prev_team_equal_2",
]

OUTCOME_COLUMNS = [
    "period",
    "second",
    "x",
    "end_x",
    "body_part_is_head",
    "enc_type",
    "start_angle_to_goal",
    "start_distance_to_goal",
    "end_angle_to_goal",
    "end_distance_to_goal",
    "enc_prev_type_1",
    "prev_team_equal_1",
    "enc_prev_type_2",
    "prev_team_equal_2",
    "outcome",
    "distance_to_post",
    "distance_to_bar",
]

COLUMNS_BY_VARIANT = {VARIANT_INTENT: INTENT_COLUMNS, VARIANT_OUTCOME: OUTCOME_COLUMNS}


def distance_to_goal(x: float, y: float) -> float:
    """Euclidean distance to the centre of the attacked goal at (105, 34)."""
    return math.hypot(PITCH_LENGTH - x, GOAL_CENTER_Y - y)


def angle_to_goal(x: float, y: float) -> float:
    """Absolute angle between the ray to goal centre and the pitch long axis.

    0 when looking straight down the axis, pi/2 at the goal line beside the
    goal centre.
    """
    return math.atan2(abs(GOAL_CENTER_Y - y), PITCH_LENGTH - x)


def distance_to_post(end_y: float) -> float:
    """Lateral distance from the nearest goal post line."""
    return min(abs(end_y - LEFT_POST_Y), abs(end_y - RIGHT_POST_Y))


def distance_to_bar(end_z: float | None) -> float:
    """Vertical distance from the crossbar; a missing height reads as ground level."""
    if end_z is None:
        return CROSSBAR_HEIGHT
    return abs(CROSSBAR_HEIGHT - end_z)


@dataclass(frozen=True)
class FeatureMatrix:
    """A dense matrix aligned row-for-row with the canonically sorted events."""

    variant: str
    columns: list[str]
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]


def build_features(events: list[Event], variant: str) -> FeatureMatrix:
    """Build the feature matrix for one variant.

    Events are processed in canonical (game_id, period, second) order and the
    matrix rows follow that order. Previous-action features look back at most
    two events and never across a period or game boundary; missing
    predecessors read NO_PREV_CODE with prev_team_equal = 1.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant: {variant!r}")
    columns = COLUMNS_BY_VARIANT[variant]
    ordered = sort_events(events)
    rows = np.empty((len(ordered), len(columns)), dtype=np.float64)
    prev1: Event | None = None
    prev2: Event | None = None
    group: tuple[str, int] | None = None
    for i, event in enumerate(ordered):
        key = (event.game_id, event.period)
        if key != group:
            group = key
            prev1 = None
            prev2 = None
        rows[i] = _feature_row(event, prev1, prev2, variant)
        prev2 = prev1
        prev1 = event
    return FeatureMatrix(variant=variant, columns=list(columns), values=rows)


def _prev_features(event: Event, prev: Event | None) -> tuple[float, float]:
    if prev is None:
        return float(NO_PREV_CODE), 1.0
    return float(prev.action_type.value), float(prev.team_id == event.team_id)


def _feature_row(
    event: Event, prev1: Event | None, prev2: Event | None, variant: str
) -> list[float]:
    start_dist = distance_to_goal(event.x, event.y)
    end_dist = distance_to_goal(event.end_x, event.end_y)
    enc_prev_1, team_eq_1 = _prev_features(event, prev1)
    enc_prev_2, team_eq_2 = _prev_features(event, prev2)
    common = [
        float(event.period),
        event.second,
        event.x,
        event.end_x,
        float(event.body_part == "head"),
        float(event.action_type.value),
        angle_to_goal(event.x, event.y),
        start_dist,
    ]
    if variant == VARIANT_INTENT:
        return common + [
            float(end_dist < start_dist),
            enc_prev_1,
            team_eq_1,
            enc_prev_2,
            team_eq_2,
        ]
    outcome = 1.0 if event.action_type in SHOT_TYPES else float(event.outcome)
    return common + [
        angle_to_goal(event.end_x, event.end_y),
        end_dist,
        enc_prev_1,
        team_eq_1,
        enc_prev_2,
        team_eq_2,
        outcome,
        distance_to_post(event.end_y),
        distance_to_bar(event.end_z),
    ]


def write_feature_matrix(matrix: FeatureMatrix, path: str | Path) -> None:
    """Export the matrix as CSV with the variant's exact column manifest."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(matrix.columns)
        for row in matrix.values:
            writer.writerow([repr(float(v)) for v in row])
