"""Discrete-time replay of an IDS rule table consuming decayed scores.

A rule enters the table at its attribute's first seen-sighting inside the
simulation window, decays from the latest seen-sighting (each new sighting
resets the clock), and is dropped at the first tick whose score falls to the
removal threshold. A drop with a later seen-sighting still ahead of it was
premature; drops with none left were correct. Dropped rules re-enter the
table at the next seen-sighting, and every drop is classified on its own.

Scores are evaluated from a fixed base of 100, the convention used when
fitting parameters from sighting datasets.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Iterable

from .decay import score_exponential, score_linear, score_polynomial
from .model import Attribute, DecayModel, DecayProfile, validate_profile
from .sightings import SightingStore

SIMULATION_BASE_SCORE = 100.0


class EmptyWindow(ValueError):
    """No attribute has a seen-sighting inside the simulation window."""


@dataclass(frozen=True)
class SimulationConfig:
    start: int
    end: int
    profile: DecayProfile
    tick_hours: float = 1.0
    removal_threshold: float = 0.0


@dataclass(frozen=True)
class SeriesPoint:
    tick: int
    active_rules: int
    removed_cumulative: int
    correct_cumulative: int
    premature_cumulative: int


@dataclass
class SimulationResult:
    series: list[SeriesPoint] = field(default_factory=list)
    correct_removals: int = 0
    premature_removals: int = 0

    @property
    def total_removals(self) -> int:
        return self.correct_removals + self.premature_removals

    @property
    def correct_fraction(self) -> float:
        return self.correct_removals / self.total_removals if self.total_removals else 0.0

    @property
    def premature_fraction(self) -> float:
        return self.premature_removals / self.total_removals if self.total_removals else 0.0

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "ticks": len(self.series),
            "correct_removals": self.correct_removals,
            "premature_removals": self.premature_removals,
            "correct_fraction": self.correct_fraction,
            "premature_fraction": self.premature_fraction,
        }


def _tick_score(profile: DecayProfile, elapsed_hours: float) -> float:
    if profile.model is DecayModel.LINEAR:
        return score_linear(SIMULATION_BASE_SCORE, profile.delta, elapsed_hours)
    if profile.model is DecayModel.EXPONENTIAL:
        return score_exponential(SIMULATION_BASE_SCORE, profile.delta, elapsed_hours)
    return score_polynomial(
        SIMULATION_BASE_SCORE, profile.tau_hours, profile.delta, elapsed_hours
    )


def simulate(
    store: SightingStore, attributes: Iterable[Attribute], cfg: SimulationConfig
) -> SimulationResult:
    """Replay the rule table over [start, end] on a fixed tick grid."""
    validate_profile(cfg.profile)
    if cfg.start >= cfg.end:
        raise ValueError(f"simulation window is empty: [{cfg.start}, {cfg.end}]")
    if cfg.tick_hours <= 0:
        raise ValueError(f"tick_hours must be positive, got {cfg.tick_hours}")
    tick_seconds = max(1, int(round(cfg.tick_hours * 3600)))

    seen_by_attr: dict[str, list[int]] = {}
    activations: list[tuple[int, str]] = []  # heap of pending (re)activation times
    for attr in attributes:
        seen = store.seen_timestamps(attr.id)
        first_in_window = next((ts for ts in seen if cfg.start <= ts <= cfg.end), None)
        if first_in_window is None:
            continue
        seen_by_attr[attr.id] = seen
        heapq.heappush(activations, (first_in_window, attr.id))
    if not activations:
        raise EmptyWindow("no attribute has a seen sighting inside the window")

    # last-seen pointer per active rule, advanced lazily each tick
    active: dict[str, int] = {}
    result = SimulationResult()
    removed = correct = premature = 0

    for tick in range(cfg.start, cfg.end + 1, tick_seconds):
        while activations and activations[0][0] <= tick:
            _, attr_id = heapq.heappop(activations)
            active[attr_id] = _latest_index(seen_by_attr[attr_id], tick)
        drops = []
        for attr_id, idx in active.items():
            seen = seen_by_attr[attr_id]
            while idx + 1 < len(seen) and seen[idx + 1] <= tick:
                idx += 1
            active[attr_id] = idx
            elapsed_hours = (tick - seen[idx]) / 3600.0
            if _tick_score(cfg.profile, elapsed_hours) <= cfg.removal_threshold:
                drops.append(attr_id)
        for attr_id in drops:
            del active[attr_id]
            removed += 1
            seen = seen_by_attr[attr_id]
            next_seen = next((ts for ts in seen if tick < ts <= cfg.end), None)
            if next_seen is None:
                correct += 1
            else:
                premature += 1
                heapq.heappush(activations, (next_seen, attr_id))
        result.series.append(
            SeriesPoint(
                tick=tick,
                active_rules=len(active),
                removed_cumulative=removed,
                correct_cumulative=correct,
                premature_cumulative=premature,
            )
        )
    result.correct_removals = correct
    result.premature_removals = premature
    return result


def _latest_index(seen: list[int], tick: int) -> int:
    idx = 0
    while idx + 1 < len(seen) and seen[idx + 1] <= tick:
        idx += 1
    return idx


def export_series(result: SimulationResult) -> str:
    """CSV of the tick series, one row per tick."""
    out = io.StringIO()
    out.write("tick_iso8601,active_rules,removed_cumulative,correct_cumulative,premature_cumulative\n")
    for point in result.series:
        stamp = datetime.fromtimestamp(point.tick, tz=timezone.utc).isoformat()
        out.write(
            f"{stamp},{point.active_rules},{point.removed_cumulative},"
            f"{point.correct_cumulative},{point.premature_cumulative}\n"
        )
    return out.getvalue()
