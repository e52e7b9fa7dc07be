"""Action values by lag-2 differencing of model predictions.

Soccer alternates possession in paired moves, so an action is credited with
how much it moved the needle since the same situation two events earlier:
value(i) = p(i) - p(i-2), where p(i-2) is negated when the opposing team
performed it (their outlook is the mirror of ours). The first two events of a
period difference against a zero baseline. Kick-offs are dropped from the
output only after differencing, so they still anchor their successors, but a
goal's value is never smeared onto the restart.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from playerform.events import ActionType, Event, group_by_game

ACTION_VALUE_HEADER = [
    "game_id", "event_index", "player_id", "action_type", "i_vaep", "o_vaep",
]


@dataclass(frozen=True)
class ActionValue:
    """One event's value; event_index is its ordinal in the game's sorted list."""

    game_id: str
    event_index: int
    player_id: str
    team_id: str
    action_type: ActionType
    value: float


def action_values(events: list[Event], predictions: np.ndarray) -> list[ActionValue]:
    """Difference predictions into per-action values, canonical order.

    Predictions must align row-for-row with the canonically sorted events,
    which is how both build_features and label_dataset emit them.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.shape != (len(events),):
        raise ValueError("predictions are misaligned with events")
    games = group_by_game(events)
    values: list[ActionValue] = []
    offset = 0
    for game_id in sorted(games):
        game_events = games[game_id]
        period_start = 0
        for ordinal, event in enumerate(game_events):
            if ordinal > 0 and event.period != game_events[ordinal - 1].period:
                period_start = ordinal
            p_now = predictions[offset + ordinal]
            if ordinal - period_start < 2:
                value = p_now  # zero baseline opens each period
            else:
                anchor = game_events[ordinal - 2]
                p_anchor = predictions[offset + ordinal - 2]
                if anchor.team_id != event.team_id:
                    p_anchor = -p_anchor
                value = p_now - p_anchor
            if event.action_type is not ActionType.KICK_OFF:
                values.append(
                    ActionValue(
                        game_id=game_id,
                        event_index=ordinal,
                        player_id=event.player_id,
                        team_id=event.team_id,
                        action_type=event.action_type,
                        value=float(value),
                    )
                )
        offset += len(game_events)
    return values


def write_action_values(
    path: str | Path,
    by_variant: dict[str, list[ActionValue]],
) -> None:
    """Export values as CSV, one row per event, variant columns side by side."""
    cells: dict[tuple[str, int], dict[str, str]] = {}
    for variant, values in by_variant.items():
        column = f"{variant}_vaep"
        if column not in ACTION_VALUE_HEADER:
            raise ValueError(f"unknown variant: {variant!r}")
        for av in values:
            key = (av.game_id, av.event_index)
            row = cells.setdefault(
                key,
                {
                    "game_id": av.game_id,
                    "event_index": str(av.event_index),
                    "player_id": av.player_id,
                    "action_type": av.action_type.label,
                    "i_vaep": "",
                    "o_vaep": "",
                },
            )
            row[column] = repr(av.value)
    with open(Path(path), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=ACTION_VALUE_HEADER, lineterminator="\n")
        writer.writeheader()
        for key in sorted(cells):
            writer.writerow(cells[key])


def read_action_values(path: str | Path) -> dict[str, list[ActionValue]]:
    """Load a value export back into per-variant lists, empty cells skipped.

    The CSV does not carry team ids (ratings never need them), so loaded
    records have an empty team_id.
    """
    by_variant: dict[str, list[ActionValue]] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ACTION_VALUE_HEADER:
            raise ValueError(
                f"{Path(path).name}: header {reader.fieldnames} != {ACTION_VALUE_HEADER}"
            )
        for row in reader:
            try:
                action_type = ActionType[row["action_type"].upper()]
            except KeyError:
                raise ValueError(f"unknown action_type: {row['action_type']!r}")
            for variant in ("i", "o"):
                cell = row[f"{variant}_vaep"]
                if cell == "":
                    continue
                by_variant.setdefault(variant, []).append(
                    ActionValue(
                        game_id=row["game_id"],
                        event_index=int(row["event_index"]),
                        player_id=row["player_id"],
                        team_id="",
                        action_type=action_type,
                        value=float(cell),
                    )
                )
    return by_variant
