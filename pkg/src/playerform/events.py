"""Event-stream domain model and canonical file IO.

Events are atomic on-ball actions in a normalized frame: the acting team always
attacks left to right on a 105 x 68 pitch, so x = 105 is the centre of the goal
under attack regardless of half or venue. Game sheets carry per-player minutes,
position, and age for one game. Goals are derived from the event stream itself.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

logger = logging.getLogger(__name__)

PITCH_LENGTH = 105.0
PITCH_WIDTH = 68.0
GOAL_CENTER_Y = 34.0

VALID_PERIODS = (1, 2)
BODY_PARTS = ("foot", "head", "other")
MAX_MINUTES = 130.0
MAX_AGE = 60.0

EVENT_HEADER = [
    "game_id", "period", "second", "team_id", "player_id", "action_type",
    "x", "y", "end_x", "end_y", "end_z", "body_part", "outcome",
]
GAME_HEADER = ["game_id", "date", "player_id", "minutes", "position", "age"]

GOALKEEPER_POSITION = "GK"


class ActionType(IntEnum):
    """Action vocabulary. The integer value is the stable encoded feature code."""

    PASS = 0
    CROSS = 1
    THROW_IN = 2
    FREEKICK_SHORT = 3
    FREEKICK_CROSS = 4
    CORNER_SHORT = 5
    CORNER_CROSS = 6
    TAKE_ON = 7
    CARRY = 8
    SHOT = 9
    SHOT_FREEKICK = 10
    SHOT_PENALTY = 11
    TACKLE = 12
    INTERCEPTION = 13
    CLEARANCE = 14
    FOUL = 15
    KEEPER_SAVE = 16
    KEEPER_CLAIM = 17
    BAD_TOUCH = 18
    KICK_OFF = 19

    @property
    def label(self) -> str:
        return self.name.lower()


_BY_LABEL = {a.label: a for a in ActionType}

CATEGORY_PASS = "pass"
CATEGORY_DRIBBLE = "dribble"
CATEGORY_SHOT = "shot"
CATEGORY_OTHER = "other"

# Total map: every action type belongs to exactly one category.
ACTION_CATEGORY: dict[ActionType, str] = {
    ActionType.PASS: CATEGORY_PASS,
    ActionType.CROSS: CATEGORY_PASS,
    ActionType.THROW_IN: CATEGORY_PASS,
    ActionType.FREEKICK_SHORT: CATEGORY_PASS,
    ActionType.FREEKICK_CROSS: CATEGORY_PASS,
    ActionType.CORNER_SHORT: CATEGORY_PASS,
    ActionType.CORNER_CROSS: CATEGORY_PASS,
    ActionType.TAKE_ON: CATEGORY_DRIBBLE,
    ActionType.CARRY: CATEGORY_DRIBBLE,
    ActionType.SHOT: CATEGORY_SHOT,
    ActionType.SHOT_FREEKICK: CATEGORY_SHOT,
    ActionType.SHOT_PENALTY: CATEGORY_SHOT,
    ActionType.TACKLE: CATEGORY_OTHER,
    ActionType.INTERCEPTION: CATEGORY_OTHER,
    ActionType.CLEARANCE: CATEGORY_OTHER,
    ActionType.FOUL: CATEGORY_OTHER,
    ActionType.KEEPER_SAVE: CATEGORY_OTHER,
    ActionType.KEEPER_CLAIM: CATEGORY_OTHER,
    ActionType.BAD_TOUCH: CATEGORY_OTHER,
    ActionType.KICK_OFF: CATEGORY_OTHER,
}

SHOT_TYPES = frozenset(
    a for a, c in ACTION_CATEGORY.items() if c == CATEGORY_SHOT
)


class SchemaError(ValueError):
    """Raised when a file's shape does not match the canonical schema."""


@dataclass(frozen=True)
class Event:
    """One on-ball action, coordinates in the acting team's attacking frame."""

    game_id: str
    period: int
    second: float
    team_id: str
    player_id: str
    action_type: ActionType
    x: float
    y: float
    end_x: float
    end_y: float
    end_z: float | None
    body_part: str
    outcome: bool


@dataclass(frozen=True)
class SheetLine:
    player_id: str
    minutes: float
    position: str
    age: float


@dataclass(frozen=True)
class GameSheet:
    """Per-game participation record: who played, for how long, at what age."""

    game_id: str
    date: str
    players: dict[str, SheetLine]


@dataclass(frozen=True)
class GoalRecord:
    """A goal, located by time and by ordinal in the game's sorted event list.

    Derived from the stream: a successful shot-like action credits the shooting
    team. The canonical schema carries no own-goal marker, so no goal is ever
    credited against its acting team here.
    """

    game_id: str
    period: int
    second: float
    team_id: str
    ordinal: int


@dataclass
class IngestResult:
    """Validated events plus sheets, with row rejections and warnings counted."""

    events: list[Event]
    sheets: list[GameSheet]
    rejected_rows: int = 0
    warnings: list[str] = field(default_factory=list)


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not (lo <= value <= hi):
        raise ValueError(f"{name} out of range: {value!r}")


def validate_event_fields(
    game_id: str,
    period: int,
    second: float,
    team_id: str,
    player_id: str,
    action_type: ActionType,
    x: float,
    y: float,
    end_x: float,
    end_y: float,
    end_z: float | None,
    body_part: str,
    outcome: bool,
) -> Event:
    """Build an Event, raising ValueError on any out-of-domain field."""
    if period not in VALID_PERIODS:
        raise ValueError(f"period out of range: {period!r}")
    if second < 0:
        raise ValueError(f"second out of range: {second!r}")
    _check_range("x", x, 0.0, PITCH_LENGTH)
    _check_range("y", y, 0.0, PITCH_WIDTH)
    _check_range("end_x", end_x, 0.0, PITCH_LENGTH)
    _check_range("end_y", end_y, 0.0, PITCH_WIDTH)
    if end_z is not None and end_z < 0:
        raise ValueError(f"end_z out of range: {end_z!r}")
    if body_part not in BODY_PARTS:
        raise ValueError(f"unknown body_part: {body_part!r}")
    return Event(
        game_id=game_id,
        period=period,
        second=second,
        team_id=team_id,
        player_id=player_id,
        action_type=action_type,
        x=x,
        y=y,
        end_x=end_x,
        end_y=end_y,
        end_z=end_z,
        body_part=body_part,
        outcome=outcome,
    )


def _row_to_event(row: dict[str, str]) -> Event:
    type_label = row["action_type"]
    action = _BY_LABEL.get(type_label)
    if action is None:
        # Unknown vocabulary is a schema problem, not a bad row.
        raise SchemaError(f"unknown action_type: {type_label!r}")
    raw_z = row.get("end_z", "")
    return validate_event_fields(
        game_id=row["game_id"],
        period=int(row["period"]),
        second=float(row["second"]),
        team_id=row["team_id"],
        player_id=row["player_id"],
        action_type=action,
        x=float(row["x"]),
        y=float(row["y"]),
        end_x=float(row["end_x"]),
        end_y=float(row["end_y"]),
        end_z=float(raw_z) if raw_z not in ("", None) else None,
        body_part=row["body_part"],
        outcome=_parse_bool(row["outcome"]),
    )


def _parse_bool(raw: str | bool) -> bool:
    if isinstance(raw, bool):
        return raw
    if raw in ("1", "true", "True"):
        return True
    if raw in ("0", "false", "False"):
        return False
    raise ValueError(f"outcome not boolean: {raw!r}")


def _row_to_sheet_line(row: dict[str, str]) -> SheetLine:
    minutes = float(row["minutes"])
    age = float(row["age"])
    _check_range("minutes", minutes, 0.0, MAX_MINUTES)
    _check_range("age", age, 0.0, MAX_AGE)
    return SheetLine(
        player_id=row["player_id"],
        minutes=minutes,
        position=row["position"],
        age=age,
    )


def sort_events(events: list[Event]) -> list[Event]:
    """Canonical order: (game_id, period, second), stable on source order."""
    return sorted(events, key=lambda e: (e.game_id, e.period, e.second))


def _read_rows(path: Path, header: list[str], fmt: str) -> list[dict[str, str]]:
    if fmt == "csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != header:
                raise SchemaError(
                    f"{path.name}: header {reader.fieldnames} != {header}"
                )
            return list(reader)
    if fmt == "jsonl":
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                if set(obj) != set(header):
                    raise SchemaError(f"{path.name}: fields {sorted(obj)} != {header}")
                rows.append({k: obj[k] for k in header})
        return rows
    raise SchemaError(f"unknown format: {fmt!r}")


def _coerce(row: dict) -> dict[str, str]:
    out = {}
    for key, val in row.items():
        if val is None:
            out[key] = ""
        elif isinstance(val, bool):
            out[key] = "1" if val else "0"
        else:
            out[key] = str(val)
    return out


def parse_events(path: str | Path, fmt: str = "csv") -> IngestResult:
    """Parse an events file plus its sibling games file into validated objects.

    The sheet file is games.csv (or games.jsonl) in the same directory. Rows
    with out-of-domain values are rejected and counted; structural problems
    (bad header, unknown action type, unknown format) raise SchemaError.
    Events arriving out of time order are sorted with a warning.
    """
    path = Path(path)
    result = IngestResult(events=[], sheets=[])

    for row in _read_rows(path, EVENT_HEADER, fmt):
        try:
            result.events.append(_row_to_event(_coerce(row)))
        except SchemaError:
            raise
        except (ValueError, KeyError) as exc:
            result.rejected_rows += 1
            logger.debug("rejected event row: %s", exc)

    games_path = path.with_name(f"games.{fmt}")
    sheet_rows: dict[str, dict] = {}
    for row in _read_rows(games_path, GAME_HEADER, fmt):
        row = _coerce(row)
        try:
            line = _row_to_sheet_line(row)
        except (ValueError, KeyError) as exc:
            result.rejected_rows += 1
            logger.debug("rejected sheet row: %s", exc)
            continue
        entry = sheet_rows.setdefault(
            row["game_id"], {"date": row["date"], "players": {}}
        )
        entry["players"][line.player_id] = line
    result.sheets = [
        GameSheet(game_id=gid, date=entry["date"], players=entry["players"])
        for gid, entry in sorted(sheet_rows.items())
    ]

    ordered = sort_events(result.events)
    if ordered != result.events:
        msg = f"{path.name}: events not time-sorted, sorting"
        logger.warning(msg)
        result.warnings.append(msg)
    result.events = ordered

    sheet_players = {
        (sheet.game_id, pid) for sheet in result.sheets for pid in sheet.players
    }
    missing = sorted(
        {(e.game_id, e.player_id) for e in result.events}
        - sheet_players
    )
    for game_id, player_id in missing:
        result.warnings.append(
            f"player {player_id} has events in game {game_id} but no sheet entry"
        )
    return result


def _event_to_row(event: Event) -> dict[str, str]:
    return {
        "game_id": event.game_id,
        "period": str(event.period),
        "second": repr(event.second),
        "team_id": event.team_id,
        "player_id": event.player_id,
        "action_type": event.action_type.label,
        "x": repr(event.x),
        "y": repr(event.y),
        "end_x": repr(event.end_x),
        "end_y": repr(event.end_y),
        "end_z": "" if event.end_z is None else repr(event.end_z),
        "body_part": event.body_part,
        "outcome": "1" if event.outcome else "0",
    }


def _sheet_to_rows(sheet: GameSheet) -> list[dict[str, str]]:
    return [
        {
            "game_id": sheet.game_id,
            "date": sheet.date,
            "player_id": line.player_id,
            "minutes": repr(line.minutes),
            "position": line.position,
            "age": repr(line.age),
        }
        for line in sheet.players.values()
    ]


def write_events(events: list[Event], path: str | Path, fmt: str = "csv") -> None:
    """Serialize events canonically; parse(write(events)) is lossless."""
    _write_rows([_event_to_row(e) for e in events], EVENT_HEADER, path, fmt)


def write_games(sheets: list[GameSheet], path: str | Path, fmt: str = "csv") -> None:
    rows = [row for sheet in sheets for row in _sheet_to_rows(sheet)]
    _write_rows(rows, GAME_HEADER, path, fmt)


def read_games(path: str | Path, fmt: str = "csv") -> list[GameSheet]:
    """Strictly parse a standalone games file; any invalid row raises.

    Unlike parse_events, which tolerates and counts bad rows in raw input,
    this reader expects an already-canonical artifact.
    """
    sheet_rows: dict[str, dict] = {}
    for row in _read_rows(Path(path), GAME_HEADER, fmt):
        row = _coerce(row)
        line = _row_to_sheet_line(row)
        entry = sheet_rows.setdefault(
            row["game_id"], {"date": row["date"], "players": {}}
        )
        entry["players"][line.player_id] = line
    return [
        GameSheet(game_id=gid, date=entry["date"], players=entry["players"])
        for gid, entry in sorted(sheet_rows.items())
    ]


def _write_rows(
    rows: list[dict[str, str]], header: list[str], path: str | Path, fmt: str
) -> None:
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    elif fmt == "jsonl":
        with open(path, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
    else:
        raise SchemaError(f"unknown format: {fmt!r}")


def group_by_game(events: list[Event]) -> dict[str, list[Event]]:
    """Split a canonically sorted stream into per-game sorted lists."""
    games: dict[str, list[Event]] = {}
    for event in events:
        games.setdefault(event.game_id, []).append(event)
    return {gid: sort_events(evs) for gid, evs in games.items()}


def extract_goals(events: list[Event]) -> list[GoalRecord]:
    """Find goals: successful shot-like actions, with per-game ordinals.

    The ordinal is the event's index in the game's time-sorted event list,
    counted across both periods.
    """
    goals: list[GoalRecord] = []
    for game_id, game_events in sorted(group_by_game(events).items()):
        for ordinal, event in enumerate(game_events):
            if event.action_type in SHOT_TYPES and event.outcome:
                goals.append(
                    GoalRecord(
                        game_id=game_id,
                        period=event.period,
                        second=event.second,
                        team_id=event.team_id,
                        ordinal=ordinal,
                    )
                )
    return goals
