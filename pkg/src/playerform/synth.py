"""Seeded synthetic league with recorded ground truth.

The generator simulates possession-by-possession games between teams of
players with latent skills. Everything downstream treats the output as
ordinary event data; the point is that the truth behind it is known and
recorded: every goal comes from a shot whose scoring probability is an exact
logistic function of shot distance and the shooter's effective skill, and
every player's skill moves along a planted piecewise-linear age curve. That
gives the pipeline something to be checked against, end to end.

The league's age mix is deliberately lopsided, in the way of a selling
league: rosters are stacked with young prospects and late-career veterans,
while players near the prime age are the rarest because clubs sell them at
peak value. The crowd-damping step of the development curve relies on
exactly this kind of skew.

Chances are engineered to be decisive. Defenses make entries into the final
sixth fail often, but once a team does work the ball in, a quick and
well-converted shot follows almost surely. Scoring volume stays plausible
while the payoff of deep progression stands out sharply from background
play, which is what gives models trained on these games a real signal to
find.
"""

from __future__ import annotations

import datetime
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from playerform.events import (
    ActionType,
    Event,
    GameSheet,
    SheetLine,
    validate_event_fields,
    write_events,
    write_games,
)

GOALKEEPER = "GK"
FIELD_POSITIONS = ("DF", "MF", "FW")

AGING_RISE_PER_YEAR = 0.07
AGING_DECLINE_PER_YEAR = 0.05
MULTIPLIER_FLOOR = 0.1
POPULATION_PEAK_AGE = 26
LATE_BLOOMER_PEAK_AGE = 34

GOAL_INTERCEPT = 3.6
GOAL_DISTANCE_COEF = -0.28
GOAL_SKILL_COEF = 1.2
SHOT_RANGE = 16.0
# long attempts taper off: at the range edge only this fraction survives
SHOT_DISTANCE_FALLOFF = 0.9
# point-blank zone: almost every touch this close becomes an attempt
CLOSE_RANGE = 11.0
CLOSE_SHOT_FACTOR = 1.7
# defenses pack the final sixth: moving the ball in is the hard part
BOX_ENTRY_X = 85.0
BOX_ENTRY_PENALTY = 0.45

# entry-age mix: heavy at both career ends, thin around the prime years
ENTRY_AGE_WEIGHTS = {
    18: 16, 19: 13, 20: 9, 21: 5, 22: 4, 23: 4, 24: 2,
    25: 1, 26: 1, 27: 2, 28: 7, 29: 11, 30: 13, 31: 8,
}

BASE_SKILL_RANGE = (0.2, 0.88)
BEST_PLAYER_SKILL = 1.0
LATE_BLOOMER_SKILL = 0.9

DAYS_PER_YEAR = 365.25
ROUND_SPACING_DAYS = 7
SEASON_SPACING_DAYS = 365
MAX_BIRTH_OFFSET = 0.33

EVENTS_FILE = "events.csv"
GAMES_FILE = "games.csv"
GROUND_TRUTH_FILE = "ground_truth.json"


@dataclass(frozen=True)
class LeagueConfig:
    """Size and randomness knobs; one seed fixes the whole league."""

    n_teams: int = 8
    players_per_team: int = 13
    seasons: int = 3
    games_per_season: int = 26
    events_per_game: tuple[int, int] = (140, 180)
    shot_propensity: float = 0.62
    seed: int = 0
    start_date: str = "2020-08-01"

    def validate(self) -> None:
        if self.n_teams < 2 or self.n_teams % 2:
            raise ValueError(f"n_teams must be even and >= 2, got {self.n_teams}")
        if self.players_per_team < 13:
            raise ValueError(
                "players_per_team must be >= 13 (a keeper plus twelve who "
                f"can fill a game's outfield slots), got {self.players_per_team}"
            )
        if self.seasons < 1:
            raise ValueError(f"seasons must be >= 1, got {self.seasons}")
        if self.games_per_season < 1:
            raise ValueError(
                f"games_per_season must be >= 1, got {self.games_per_season}"
            )
        lo, hi = self.events_per_game
        if lo < 10 or hi < lo:
            raise ValueError(
                f"events_per_game must satisfy 10 <= lo <= hi, got {lo, hi}"
            )
        if not 0.0 <= self.shot_propensity <= 1.0:
            raise ValueError(
                f"shot_propensity must be in [0, 1], got {self.shot_propensity}"
            )
        datetime.date.fromisoformat(self.start_date)

    def to_dict(self) -> dict:
        return {
            "n_teams": self.n_teams,
            "players_per_team": self.players_per_team,
            "seasons": self.seasons,
            "games_per_season": self.games_per_season,
            "events_per_game": list(self.events_per_game),
            "shot_propensity": self.shot_propensity,
            "seed": self.seed,
            "start_date": self.start_date,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "LeagueConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown league config keys: {sorted(unknown)}")
        if "events_per_game" in raw:
            raw = dict(raw, events_per_game=tuple(raw["events_per_game"]))
        config = cls(**raw)
        config.validate()
        return config


@dataclass(frozen=True)
class SyntheticPlayer:
    """Latent truth for one simulated player."""

    player_id: str
    team_id: str
    position: str
    entry_age: int
    birth_offset: float
    peak_age: float
    base_skill: float
    skill_pass: float
    skill_dribble: float
    skill_shot: float
    volatility_scale: float


def age_multiplier(age: float, peak_age: float) -> float:
    """Skill multiplier along the planted rise/decline curve, floored."""
    if age <= peak_age:
        value = 1.0 - AGING_RISE_PER_YEAR * (peak_age - age)
    else:
        value = 1.0 - AGING_DECLINE_PER_YEAR * (age - peak_age)
    return max(MULTIPLIER_FLOOR, value)


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def goal_probability(shot_distance: float, effective_skill: float) -> float:
    """The planted closed-form scoring chance for a shot."""
    return _sigmoid(
        GOAL_INTERCEPT
        + GOAL_DISTANCE_COEF * shot_distance
        + GOAL_SKILL_COEF * min(effective_skill, 1.3)
    )


def _entry_adjusted(p: float, x: float, ex: float) -> float:
    """Scale a success chance down when the ball is played into the box."""
    if x < BOX_ENTRY_X <= ex:
        return p * BOX_ENTRY_PENALTY
    return p


def _entry_age_quotas(n_players: int) -> list[int]:
    """Largest-remainder split of the entry-age weights into player counts."""
    ages = sorted(ENTRY_AGE_WEIGHTS)
    total = sum(ENTRY_AGE_WEIGHTS.values())
    exact = [n_players * ENTRY_AGE_WEIGHTS[a] / total for a in ages]
    counts = [int(e) for e in exact]
    leftovers = sorted(
        range(len(ages)), key=lambda i: (-(exact[i] - counts[i]), ages[i])
    )
    for i in leftovers[: n_players - sum(counts)]:
        counts[i] += 1
    entries = [age for age, count in zip(ages, counts) for _ in range(count)]
    return entries


def _build_population(
    config: LeagueConfig, rng: random.Random
) -> tuple[dict[str, SyntheticPlayer], dict[str, list[str]], dict[str, str]]:
    team_ids = [f"t{k:02d}" for k in range(config.n_teams)]
    outfield_per_team = config.players_per_team - 1
    entries = _entry_age_quotas(config.n_teams * outfield_per_team)
    rng.shuffle(entries)

    players: dict[str, SyntheticPlayer] = {}
    rosters: dict[str, list[str]] = {}
    outfield_ids: list[str] = []
    serial = 0
    for team_id in team_ids:
        roster = []
        gk_id = f"p{serial:03d}"
        serial += 1
        players[gk_id] = SyntheticPlayer(
            player_id=gk_id,
            team_id=team_id,
            position=GOALKEEPER,
            entry_age=rng.randint(22, 30),
            birth_offset=rng.uniform(0.0, MAX_BIRTH_OFFSET),
            peak_age=float(POPULATION_PEAK_AGE),
            base_skill=rng.uniform(0.3, 0.7),
            skill_pass=rng.uniform(0.3, 0.7),
            skill_dribble=rng.uniform(0.2, 0.5),
            skill_shot=rng.uniform(0.05, 0.2),
            volatility_scale=rng.uniform(0.04, 0.16),
        )
        roster.append(gk_id)
        for _ in range(outfield_per_team):
            pid = f"p{serial:03d}"
            serial += 1
            base = rng.uniform(*BASE_SKILL_RANGE)
            players[pid] = SyntheticPlayer(
                player_id=pid,
                team_id=team_id,
                position=rng.choice(FIELD_POSITIONS),
                entry_age=entries[len(outfield_ids)],
                birth_offset=rng.uniform(0.0, MAX_BIRTH_OFFSET),
                peak_age=float(rng.choices((25, 26, 27), weights=(1, 4, 1))[0]),
                base_skill=base,
                skill_pass=max(0.05, base * rng.uniform(0.9, 1.1)),
                skill_dribble=max(0.05, base * rng.uniform(0.9, 1.1)),
                skill_shot=max(0.05, base * rng.uniform(0.9, 1.1)),
                volatility_scale=rng.uniform(0.04, 0.16),
            )
            roster.append(pid)
            outfield_ids.append(pid)
        rosters[team_id] = roster

    def _retag(pid: str, **overrides) -> None:
        old = players[pid].__dict__
        players[pid] = SyntheticPlayer(**{**old, **overrides})

    prime_entries = [
        pid for pid in outfield_ids if players[pid].entry_age in (24, 25, 26)
    ] or outfield_ids
    best_id = rng.choice(prime_entries)
    _retag(
        best_id,
        base_skill=BEST_PLAYER_SKILL,
        skill_pass=BEST_PLAYER_SKILL,
        skill_dribble=BEST_PLAYER_SKILL,
        skill_shot=BEST_PLAYER_SKILL,
        peak_age=float(POPULATION_PEAK_AGE),
        volatility_scale=0.05,
    )

    oldest_entry = max(players[pid].entry_age for pid in outfield_ids)
    veterans = [
        pid
        for pid in outfield_ids
        if players[pid].entry_age == oldest_entry and pid != best_id
    ]
    bloomer_id = rng.choice(veterans)
    _retag(
        bloomer_id,
        base_skill=LATE_BLOOMER_SKILL,
        skill_pass=LATE_BLOOMER_SKILL,
        skill_dribble=LATE_BLOOMER_SKILL,
        skill_shot=LATE_BLOOMER_SKILL,
        peak_age=float(LATE_BLOOMER_PEAK_AGE),
        volatility_scale=0.08,
    )
    return players, rosters, {"best_player": best_id, "late_bloomer": bloomer_id}


@dataclass
class _TeamGame:
    """One team's per-game cast: who plays, for how long, at what skill today.

    Involvement follows ability on both sides of the ball: weights drive who
    gets on the ball in possession, def_weights who wins it back.
    """

    team_id: str
    lines: dict[str, SheetLine]
    actors: list[str]
    weights: list[float]
    def_weights: list[float]
    gk: str
    eff: dict[str, float]
    eff_shot: dict[str, float]


def _team_game(
    rng: random.Random,
    team_id: str,
    roster: list[str],
    players: dict[str, SyntheticPlayer],
    age_years: float,
    max_mult: dict[str, float],
) -> _TeamGame:
    gk = roster[0]
    outfield = rng.sample(roster[1:], 12)
    minutes_plan = [(pid, float(88 + rng.randint(0, 5))) for pid in outfield[:10]]
    minutes_plan.append((outfield[10], round(rng.uniform(61.0, 78.0), 1)))
    minutes_plan.append((outfield[11], round(rng.uniform(20.0, 59.0), 1)))
    minutes_plan.append((gk, float(90 + rng.randint(0, 3))))

    lines: dict[str, SheetLine] = {}
    eff: dict[str, float] = {}
    eff_shot: dict[str, float] = {}
    actors: list[str] = []
    weights: list[float] = []
    def_weights: list[float] = []
    for pid, minutes in minutes_plan:
        p = players[pid]
        age = round(p.entry_age + p.birth_offset + age_years, 2)
        lines[pid] = SheetLine(
            player_id=pid, minutes=minutes, position=p.position, age=age
        )
        mult = age_multiplier(age, p.peak_age)
        if mult > max_mult.get(pid, 0.0):
            max_mult[pid] = mult
        form = max(0.25, 1.0 + rng.gauss(0.0, p.volatility_scale))
        eff[pid] = p.base_skill * mult * form
        eff_shot[pid] = p.skill_shot * mult * form
        if pid != gk:
            actors.append(pid)
            weights.append(minutes * (0.45 + 0.9 * eff[pid]))
            def_weights.append(minutes * (0.3 + eff[pid]))
    return _TeamGame(
        team_id=team_id, lines=lines, actors=actors, weights=weights,
        def_weights=def_weights, gk=gk, eff=eff, eff_shot=eff_shot,
    )


def _simulate_game(
    rng: random.Random,
    config: LeagueConfig,
    game_id: str,
    home: _TeamGame,
    away: _TeamGame,
    shot_probs: list[dict],
) -> list[Event]:
    events: list[Event] = []
    sides = {home.team_id: home, away.team_id: away}
    other = {home.team_id: away.team_id, away.team_id: home.team_id}
    budget = rng.randint(*config.events_per_game)
    period_budgets = ((1, budget // 2, home.team_id), (2, budget - budget // 2, away.team_id))

    def emit(period, second, side, pid, atype, x, y, ex, ey, ez, body, outcome):
        events.append(validate_event_fields(
            game_id, period, float(second), side.team_id, pid, atype,
            round(x, 2), round(y, 2),
            round(min(max(ex, 0.0), 105.0), 2), round(min(max(ey, 0.0), 68.0), 2),
            None if ez is None else round(ez, 2), body, outcome,
        ))

    for period, period_budget, starting_team in period_budgets:
        emitted = 0
        second = 0

        def room() -> bool:
            return emitted < period_budget

        def tick() -> None:
            nonlocal second
            second += rng.randint(8, 18)

        side = sides[starting_team]
        kicker = rng.choices(side.actors, side.weights)[0]
        kx, ky = 52.5 - rng.uniform(2.0, 9.0), 34.0 + rng.uniform(-9.0, 9.0)
        emit(period, second, side, kicker, ActionType.KICK_OFF,
             52.5, 34.0, kx, ky, None, "foot", True)
        emitted += 1
        x, y = kx, ky
        after_cross = False

        while room():
            actor = rng.choices(side.actors, side.weights)[0]
            eff = side.eff[actor]
            tick()

            if rng.random() < 0.02:
                emit(period, second, side, actor, ActionType.BAD_TOUCH,
                     x, y, x, y, None, "foot", False)
                emitted += 1
                side = sides[other[side.team_id]]
                x, y = 105.0 - x, 68.0 - y
                after_cross = False
                continue

            dist = math.hypot(105.0 - round(x, 2), 34.0 - round(y, 2))
            take_shot = False
            if dist <= CLOSE_RANGE:
                take_shot = rng.random() < min(
                    1.0, config.shot_propensity * CLOSE_SHOT_FACTOR
                )
            elif dist <= SHOT_RANGE:
                shot_chance = config.shot_propensity * (
                    0.25 + 0.75 * min(side.eff_shot[actor], 1.2)
                )
                shot_chance *= 1.0 - SHOT_DISTANCE_FALLOFF * dist / SHOT_RANGE
                if after_cross:
                    shot_chance = min(1.0, shot_chance * 1.6)
                take_shot = rng.random() < shot_chance
            if take_shot:
                prob = goal_probability(dist, side.eff_shot[actor])
                goal = rng.random() < prob
                body = "head" if after_cross and rng.random() < 0.7 else "foot"
                after_cross = False
                if goal:
                    ey = 34.0 + rng.uniform(-3.3, 3.3)
                    ez = rng.uniform(0.05, 2.3)
                else:
                    wide = rng.random() < 0.5
                    ey = 34.0 + rng.choice((-1, 1)) * (
                        rng.uniform(3.8, 8.0) if wide else rng.uniform(0.0, 3.4)
                    )
                    ez = rng.uniform(0.1, 3.2) if wide else rng.uniform(0.05, 2.3)
                emit(period, second, side, actor, ActionType.SHOT,
                     x, y, 105.0, ey, ez, body, goal)
                shot_probs.append({
                    "game_id": game_id,
                    "event_index": len(events) - 1,
                    "period": period,
                    "second": second,
                    "player_id": actor,
                    "effective_skill": side.eff_shot[actor],
                    "probability": prob,
                })
                emitted += 1
                conceding = sides[other[side.team_id]]
                if goal:
                    if room():
                        tick()
                        kicker = rng.choices(conceding.actors, conceding.weights)[0]
                        kx = 52.5 - rng.uniform(2.0, 9.0)
                        ky = 34.0 + rng.uniform(-9.0, 9.0)
                        emit(period, second, conceding, kicker, ActionType.KICK_OFF,
                             52.5, 34.0, kx, ky, None, "foot", True)
                        emitted += 1
                        side, x, y = conceding, kx, ky
                    continue
                saved = rng.random() < 0.5
                if saved and room():
                    tick()
                    sy = min(max(68.0 - ey, 0.5), 67.5)
                    emit(period, second, conceding, conceding.gk,
                         ActionType.KEEPER_SAVE, 2.5, sy, 3.0, sy, None,
                         "other", True)
                    emitted += 1
                    if rng.random() < 0.2 and room():
                        tick()
                        cy = 0.5 if rng.random() < 0.5 else 67.5
                        ex = 105.0 - rng.uniform(1.0, 6.5)
                        ey2 = 34.0 + rng.uniform(-6.0, 6.0)
                        taker = rng.choices(side.actors, side.weights)[0]
                        emit(period, second, side, taker, ActionType.CORNER_CROSS,
                             104.5, cy, ex, ey2, rng.uniform(0.3, 2.2), "foot", True)
                        emitted += 1
                        x, y, after_cross = ex, ey2, True
                        continue
                if room():
                    tick()
                    ry = 34.0 + rng.uniform(-14.0, 14.0)
                    ex = rng.uniform(18.0, 42.0)
                    ey2 = min(max(34.0 + rng.uniform(-20.0, 20.0), 0.5), 67.5)
                    emit(period, second, conceding, conceding.gk, ActionType.PASS,
                         5.5, ry, ex, ey2, None, "foot", True)
                    emitted += 1
                    side, x, y = conceding, ex, ey2
                continue

            r = rng.random()
            gain = (3.0 + 12.0 * min(eff, 1.15)) * rng.uniform(0.6, 1.4)
            ex = min(max(x + gain, 1.0), 103.5)
            if ex > 85.0:
                # balls into the final sixth funnel toward the goal mouth
                ey = min(max(34.0 + rng.gauss(0.0, 8.0), 0.5), 67.5)
            else:
                ey = min(max(y + rng.gauss(0.0, 9.0), 0.5), 67.5)
            after_cross = False

            if x < 25.0 and r < 0.10:
                ex = min(x + rng.uniform(25.0, 45.0), 103.5)
                ey = min(max(34.0 + rng.gauss(0.0, 14.0), 0.5), 67.5)
                emit(period, second, side, actor, ActionType.CLEARANCE,
                     x, y, ex, ey, None, "foot", True)
                emitted += 1
                if rng.random() < 0.55:
                    side = sides[other[side.team_id]]
                    x, y = 105.0 - ex, 68.0 - ey
                else:
                    x, y = ex, ey
                continue

            if r < 0.18:
                success = rng.random() < _entry_adjusted(
                    0.72 + 0.24 * min(eff, 1.0), x, ex
                )
                emit(period, second, side, actor, ActionType.CARRY,
                     x, y, ex, ey, None, "foot", success)
                emitted += 1
            elif r < 0.26:
                success = rng.random() < _entry_adjusted(
                    0.40 + 0.42 * min(eff, 1.0), x, ex
                )
                emit(period, second, side, actor, ActionType.TAKE_ON,
                     x, y, ex, ey, None, "foot", success)
                emitted += 1
                if not success and rng.random() < 0.3 and room():
                    tick()
                    defender_side = sides[other[side.team_id]]
                    defender = rng.choices(
                        defender_side.actors, defender_side.def_weights
                    )[0]
                    dx, dy = 105.0 - ex, 68.0 - ey
                    emit(period, second, defender_side, defender, ActionType.FOUL,
                         dx, dy, dx, dy, None, "other", False)
                    emitted += 1
                    if room():
                        tick()
                        fx = min(max(ex + rng.uniform(-1.5, 1.5), 1.0), 103.5)
                        fy = min(max(ey + rng.uniform(-1.5, 1.5), 0.5), 67.5)
                        taker = rng.choices(side.actors, side.weights)[0]
                        emit(period, second, side, taker, ActionType.FREEKICK_SHORT,
                             fx, fy, min(fx + rng.uniform(2.0, 14.0), 103.5),
                             min(max(fy + rng.gauss(0.0, 6.0), 0.5), 67.5),
                             None, "foot", True)
                        emitted += 1
                        x, y = fx, fy
                    continue
            elif x > 72.0 and r < 0.38:
                ex = min(max(x + rng.uniform(6.0, 20.0), 1.0), 104.0)
                ey = min(max(34.0 + rng.gauss(0.0, 7.0), 0.5), 67.5)
                success = rng.random() < _entry_adjusted(
                    0.40 + 0.30 * min(eff, 1.0), x, ex
                )
                emit(period, second, side, actor, ActionType.CROSS,
                     x, y, ex, ey, rng.uniform(0.2, 2.4), "foot", success)
                emitted += 1
                if success:
                    x, y, after_cross = ex, ey, True
                    continue
                if rng.random() < 0.35 and room():
                    tick()
                    defender_side = sides[other[side.team_id]]
                    cy = min(max(68.0 - ey, 0.5), 67.5)
                    emit(period, second, defender_side, defender_side.gk,
                         ActionType.KEEPER_CLAIM, 3.5, cy, 3.5, cy, None,
                         "other", True)
                    emitted += 1
                    side = defender_side
                    x, y = 12.0, cy
                    continue
                side = sides[other[side.team_id]]
                x, y = 105.0 - ex, 68.0 - ey
                continue
            else:
                success = rng.random() < _entry_adjusted(
                    min(0.64 + 0.33 * min(eff, 1.0), 0.96), x, ex
                )
                emit(period, second, side, actor, ActionType.PASS,
                     x, y, ex, ey, None, "foot", success)
                emitted += 1

            if success:
                x, y = ex, ey
                continue
            if room():
                tick()
                defender_side = sides[other[side.team_id]]
                defender = rng.choices(
                    defender_side.actors, defender_side.def_weights
                )[0]
                atype = (ActionType.INTERCEPTION if rng.random() < 0.65
                         else ActionType.TACKLE)
                dx, dy = 105.0 - ex, 68.0 - ey
                ddx = min(max(dx + rng.uniform(0.0, 6.0), 1.0), 103.5)
                ddy = min(max(dy + rng.gauss(0.0, 4.0), 0.5), 67.5)
                emit(period, second, defender_side, defender, atype,
                     dx, dy, ddx, ddy, None, "foot", True)
                emitted += 1
                side, x, y = defender_side, ddx, ddy
            else:
                side = sides[other[side.team_id]]
                x, y = 105.0 - ex, 68.0 - ey

    return events


def generate_league(
    config: LeagueConfig,
) -> tuple[list[Event], list[GameSheet], dict]:
    """Simulate a league and return events, sheets, and its ground truth."""
    config.validate()
    rng = random.Random(config.seed)
    players, rosters, planted = _build_population(config, rng)
    team_ids = sorted(rosters)
    start = datetime.date.fromisoformat(config.start_date)

    events: list[Event] = []
    sheets: list[GameSheet] = []
    shot_probs: list[dict] = []
    max_mult: dict[str, float] = {}

    for season in range(config.seasons):
        for rnd in range(config.games_per_season):
            day = season * SEASON_SPACING_DAYS + rnd * ROUND_SPACING_DAYS
            date = (start + datetime.timedelta(days=day)).isoformat()
            age_years = day / DAYS_PER_YEAR
            order = rng.sample(team_ids, len(team_ids))
            for k in range(len(team_ids) // 2):
                game_id = f"g{season:02d}-{rnd:03d}-{k:02d}"
                home = _team_game(
                    rng, order[2 * k], rosters[order[2 * k]], players,
                    age_years, max_mult,
                )
                away = _team_game(
                    rng, order[2 * k + 1], rosters[order[2 * k + 1]], players,
                    age_years, max_mult,
                )
                events.extend(_simulate_game(
                    rng, config, game_id, home, away, shot_probs
                ))
                sheets.append(GameSheet(
                    game_id=game_id, date=date,
                    players={**home.lines, **away.lines},
                ))

    truth = {
        "config": config.to_dict(),
        "goal_model": {
            "form": (
                "sigmoid(intercept + distance_coef * shot_distance"
                " + skill_coef * effective_shot_skill)"
            ),
            "intercept": GOAL_INTERCEPT,
            "distance_coef": GOAL_DISTANCE_COEF,
            "skill_coef": GOAL_SKILL_COEF,
            "skill_cap": 1.3,
        },
        "aging": {
            "population_peak_age": POPULATION_PEAK_AGE,
            "rise_per_year": AGING_RISE_PER_YEAR,
            "decline_per_year": AGING_DECLINE_PER_YEAR,
            "multiplier_floor": MULTIPLIER_FLOOR,
        },
        "players": {
            pid: {
                "team_id": p.team_id,
                "position": p.position,
                "entry_age": p.entry_age,
                "birth_offset": p.birth_offset,
                "peak_age": p.peak_age,
                "base_skill": p.base_skill,
                "skill_pass": p.skill_pass,
                "skill_dribble": p.skill_dribble,
                "skill_shot": p.skill_shot,
                "volatility_scale": p.volatility_scale,
                "peak_effective_skill": p.base_skill * max_mult.get(pid, 0.0),
            }
            for pid, p in sorted(players.items())
        },
        "planted": planted,
        "shot_probabilities": shot_probs,
    }
    return events, sheets, truth


def write_ground_truth(truth: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_league(config: LeagueConfig, out_dir: str | Path) -> dict[str, Path]:
    """Generate and persist a league; returns the three artifact paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events, sheets, truth = generate_league(config)
    paths = {
        "events": out / EVENTS_FILE,
        "games": out / GAMES_FILE,
        "ground_truth": out / GROUND_TRUTH_FILE,
    }
    write_events(events, paths["events"])
    write_games(sheets, paths["games"])
    write_ground_truth(truth, paths["ground_truth"])
    return paths
