"""Player valuation over time from soccer event streams.

The pipeline: parse event streams, build per-action feature vectors, label
actions by goal proximity, train a bagged regression forest, difference the
predictions into action values, aggregate them into per-game and rolling
rating series, and derive volatility metrics and an age development curve.
A synthetic league generator provides seeded ground truth end to end.
"""

from playerform.events import (
    ActionType,
    Event,
    GameSheet,
    GoalRecord,
    extract_goals,
    parse_events,
)

__version__ = "0.1.0"

__all__ = [
    "ActionType",
    "Event",
    "GameSheet",
    "GoalRecord",
    "extract_goals",
    "parse_events",
    "__version__",
]
