"""Base-score and time-decay math for indicator scores.

Three decay shapes are supported, all driven by the elapsed time since the
last seen-sighting, expressed in hours:

* linear:      score = base - delta * t, clamped at 0
* exponential: score = base * exp(-delta * t)
* polynomial:  score = base * (1 - (t / tau) ** (1 / delta)), 0 beyond tau

The polynomial model is the operational one: ``tau`` fixes when the score
reaches zero and ``delta`` shapes how fast it falls early on (larger delta
means a faster initial drop).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

from .model import Attribute, DecayModel, DecayProfile
from .taxonomy import NoScorableTags, TaxonomyRegistry, score_tags


class ClockSkew(ValueError):
    """Evaluation time precedes the last-seen time."""


@dataclass(frozen=True)
class DecayEvaluation:
    """Result of evaluating an attribute's decayed score at one instant."""

    score: float
    base_score: float
    elapsed_hours: float
    expired: bool

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "base_score": self.base_score,
            "elapsed_hours": self.elapsed_hours,
            "expired": self.expired,
        }


def base_score(
    tags: float, source_confidence: float, weight_tg: float, omega_sc: float
) -> float:
    """Pre-decay score: weight_tg * tags + omega_sc * source_confidence, in [0, 100]."""
    if not 0.0 <= tags <= 1.0:
        raise ValueError(f"tags score {tags} outside [0, 1]")
    if not 0.0 <= source_confidence <= 1.0:
        raise ValueError(f"source_confidence {source_confidence} outside [0, 1]")
    if abs(weight_tg + omega_sc - 100.0) > 1e-9:
        raise ValueError(f"weights must sum to 100, got {weight_tg + omega_sc}")
    if weight_tg < 0 or omega_sc < 0:
        raise ValueError("weights must be non-negative")
    return weight_tg * tags + omega_sc * source_confidence


def score_linear(base: float, delta: float, t_hours: float) -> float:
    """Constant-rate decay, clamped at zero."""
    if delta < 0:
        raise ValueError(f"linear delta must be >= 0, got {delta}")
    if t_hours < 0:
        raise ValueError(f"elapsed time must be >= 0, got {t_hours}")
    return max(0.0, base - delta * t_hours)


def score_exponential(base: float, delta: float, t_hours: float) -> float:
    """Exponential decay; strictly positive for finite elapsed time."""
    if delta <= 0:
        raise ValueError(f"exponential delta must be positive, got {delta}")
    if t_hours < 0:
        raise ValueError(f"elapsed time must be >= 0, got {t_hours}")
    return base * math.exp(-delta * t_hours)


def score_polynomial(base: float, tau_hours: float, delta: float, t_hours: float) -> float:
    """Polynomial decay hitting zero exactly at tau; zero thereafter."""
    if tau_hours <= 0:
        raise ValueError(f"tau_hours must be positive, got {tau_hours}")
    if delta <= 0:
        raise ValueError(f"polynomial delta must be positive, got {delta}")
    if t_hours < 0:
        raise ValueError(f"elapsed time must be >= 0, got {t_hours}")
    if t_hours >= tau_hours:
        return 0.0
    return base * (1.0 - (t_hours / tau_hours) ** (1.0 / delta))


def half_life(tau_hours: float, delta: float) -> float:
    """Elapsed time at which the polynomial score equals half the base: tau * 0.5 ** delta."""
    if tau_hours <= 0 or delta <= 0:
        raise ValueError("tau_hours and delta must be positive")
    return tau_hours * 0.5**delta


def delta_for_half_life(tau_hours: float, t_half_hours: float) -> float:
    """The unique delta making the polynomial score hit base/2 at ``t_half_hours``.

    Inverts the half-life identity: delta = ln(t_half / tau) / ln(0.5).
    """
    if not 0.0 < t_half_hours < tau_hours:
        raise ValueError(
            f"half-life must lie strictly between 0 and tau, got {t_half_hours} vs {tau_hours}"
        )
    return math.log(t_half_hours / tau_hours) / math.log(0.5)


def _dispatch(profile: DecayProfile, base: float, tau_hours: float, t_hours: float) -> float:
    if profile.model is DecayModel.LINEAR:
        return score_linear(base, profile.delta, t_hours)
    if profile.model is DecayModel.EXPONENTIAL:
        return score_exponential(base, profile.delta, t_hours)
    if tau_hours <= 0:
        # An expiration sighting coincident with (or before) the last seen
        # sighting leaves no remaining lifetime.
        return 0.0
    return score_polynomial(base, tau_hours, profile.delta, t_hours)


def evaluate(
    attr: Attribute,
    profile: DecayProfile,
    last_seen: int,
    now: int,
    tau_override: Optional[float] = None,
    registry: Optional[TaxonomyRegistry] = None,
) -> DecayEvaluation:
    """Score an attribute at ``now`` given its last seen-sighting time.

    ``tau_override`` (hours), when given, replaces the profile's end-time; it
    comes from an expiration sighting. The registry resolves the attribute's
    tags for the base score; without one, or when no tag is scorable, the tag
    component falls back to zero and only source confidence contributes.
    """
    if now < last_seen:
        raise ClockSkew(f"evaluation time {now} precedes last seen {last_seen}")
    elapsed_hours = (now - last_seen) / 3600.0
    tags_value = 0.0
    if registry is not None:
        try:
            tags_value = score_tags(registry, attr.tags)
        except NoScorableTags:
            tags_value = 0.0
    base = base_score(tags_value, attr.source_confidence, profile.weight_tg, profile.omega_sc)
    tau_hours = profile.tau_hours if tau_override is None else tau_override
    score = _dispatch(profile, base, tau_hours, elapsed_hours)
    return DecayEvaluation(
        score=float(score),
        base_score=float(base),
        elapsed_hours=elapsed_hours,
        expired=score <= profile.threshold,
    )


def sample_curve(
    model: DecayModel,
    base: float,
    tau_hours: float,
    delta: float,
    points: int,
) -> list[tuple[float, float]]:
    """Evenly spaced (t_hours, score) samples of one decay curve.

    Covers [0, tau] for the linear and polynomial models and [0, 5/delta]
    for the exponential one (past which the curve is effectively flat).
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    if model is DecayModel.EXPONENTIAL:
        if delta <= 0:
            raise ValueError(f"exponential delta must be positive, got {delta}")
        t_end = 5.0 / delta
    else:
        if tau_hours <= 0:
            raise ValueError(f"tau_hours must be positive, got {tau_hours}")
        t_end = tau_hours
    step = t_end / (points - 1)
    samples = []
    for i in range(points):
        t = i * step if i < points - 1 else t_end
        if model is DecayModel.LINEAR:
            score = score_linear(base, delta, t)
        elif model is DecayModel.EXPONENTIAL:
            score = score_exponential(base, delta, t)
        else:
            score = score_polynomial(base, tau_hours, delta, t)
        samples.append((t, score))
    return samples
