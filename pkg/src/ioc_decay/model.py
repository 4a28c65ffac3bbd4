"""Core domain types: indicators, machine tags, sightings, and decay profiles.

All types are immutable value objects with a stable JSON representation
(lower_snake_case field names). Timestamps are integer UTC seconds; decay
math converts them to fractional hours in one place (see decay module).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional

WEIGHT_SUM_TOLERANCE = 1e-9


class MalformedTag(ValueError):
    """A machine-tag string could not be parsed into a (namespace, predicate, value) triple."""


class ProfileError(ValueError):
    """Base class for decay-profile invariant violations."""

    code = "profile_error"
    field: Optional[str] = None


class WeightSumViolation(ProfileError):
    code = "weight_sum_violation"
    field = "weight_tg"


class NonPositiveTau(ProfileError):
    code = "non_positive_tau"
    field = "tau_hours"


class NonPositiveDelta(ProfileError):
    code = "non_positive_delta"
    field = "delta"


@dataclass(frozen=True)
class MachineTag:
    """A triple tag `namespace:predicate` or `namespace:predicate="value"`."""

    namespace: str
    predicate: str
    value: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.namespace or not self.predicate:
            raise MalformedTag("namespace and predicate must be nonempty")

    def serialize(self) -> str:
        if self.value is None:
            return f"{self.namespace}:{self.predicate}"
        return f'{self.namespace}:{self.predicate}="{self.value}"'

    def __str__(self) -> str:
        return self.serialize()

    @classmethod
    def parse(cls, text: str) -> "MachineTag":
        """Parse the serialized triple-tag form.

        Splits on the first ``:`` into namespace and remainder, then on the
        first ``=`` into predicate and a double-quoted value; a missing ``=``
        yields a value-less tag.
        """
        if not text:
            raise MalformedTag("empty tag")
        namespace, sep, rest = text.partition(":")
        if not sep or not namespace:
            raise MalformedTag(f"missing namespace in {text!r}")
        predicate, sep, raw_value = rest.partition("=")
        if not predicate:
            raise MalformedTag(f"missing predicate in {text!r}")
        if not sep:
            return cls(namespace, predicate, None)
        if len(raw_value) < 2 or raw_value[0] != '"' or raw_value[-1] != '"':
            raise MalformedTag(f"unbalanced quotes in {text!r}")
        return cls(namespace, predicate, raw_value[1:-1])


@dataclass(frozen=True)
class Attribute:
    """An indicator of compromise whose score decays over time."""

    id: str
    attr_type: str
    category: str
    value: str
    tags: tuple[MachineTag, ...] = ()
    source_org: str = ""
    source_confidence: float = 1.0
    first_seen: int = 0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("attribute id must be nonempty")
        if not 0.0 <= self.source_confidence <= 1.0:
            raise ValueError(f"source_confidence {self.source_confidence} outside [0, 1]")
        object.__setattr__(self, "tags", tuple(self.tags))

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "attr_type": self.attr_type,
            "category": self.category,
            "value": self.value,
            "tags": [tag.serialize() for tag in self.tags],
            "source_org": self.source_org,
            "source_confidence": self.source_confidence,
            "first_seen": self.first_seen,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> "Attribute":
        return cls(
            id=data["id"],
            attr_type=data["attr_type"],
            category=data["category"],
            value=data["value"],
            tags=tuple(MachineTag.parse(t) for t in data.get("tags", [])),
            source_org=data.get("source_org", ""),
            source_confidence=float(data.get("source_confidence", 1.0)),
            first_seen=int(data.get("first_seen", 0)),
        )


class SightingKind(str, Enum):
    SEEN = "seen"
    FALSE_POSITIVE = "false_positive"
    EXPIRATION = "expiration"


@dataclass(frozen=True)
class Sighting:
    """A timestamped observation event attached to an attribute."""

    attribute_id: str
    timestamp: int
    kind: SightingKind
    source: str = ""

    def __post_init__(self) -> None:
        if self.timestamp <= 0:
            raise ValueError(f"timestamp must be positive, got {self.timestamp}")
        if not isinstance(self.kind, SightingKind):
            object.__setattr__(self, "kind", SightingKind(self.kind))

    def key(self) -> tuple[str, int, str, str]:
        """Full-field identity used for exact-duplicate detection."""
        return (self.attribute_id, self.timestamp, self.kind.value, self.source)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "attribute_id": self.attribute_id,
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "source": self.source,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> "Sighting":
        return cls(
            attribute_id=data["attribute_id"],
            timestamp=int(data["timestamp"]),
            kind=SightingKind(data["kind"]),
            source=data.get("source", ""),
        )


class DecayModel(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class DecayProfile:
    """Per-attribute-type decay parameters.

    ``weight_tg`` and ``omega_sc`` split the base score between the tag score
    and the source confidence and must sum to 100. ``tau_hours`` is the
    end-time (score reaches zero), ``delta`` the decay speed, and
    ``threshold`` the score at or below which an indicator is discarded.
    """

    attr_type: str
    model: DecayModel
    tau_hours: float
    delta: float
    weight_tg: float = 50.0
    omega_sc: float = 50.0
    threshold: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.model, DecayModel):
            object.__setattr__(self, "model", DecayModel(self.model))

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "attr_type": self.attr_type,
            "model": self.model.value,
            "tau_hours": self.tau_hours,
            "delta": self.delta,
            "weight_tg": self.weight_tg,
            "omega_sc": self.omega_sc,
            "threshold": self.threshold,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> "DecayProfile":
        return cls(
            attr_type=data["attr_type"],
            model=DecayModel(data["model"]),
            tau_hours=float(data["tau_hours"]),
            delta=float(data["delta"]),
            weight_tg=float(data.get("weight_tg", 50.0)),
            omega_sc=float(data.get("omega_sc", 50.0)),
            threshold=float(data.get("threshold", 0.0)),
        )


def validate_profile(profile: DecayProfile) -> DecayProfile:
    """Check every DecayProfile invariant, raising a ProfileError subclass on the first violation.

    Returns the profile unchanged so calls can be chained.
    """
    if not 0.0 <= profile.weight_tg <= 100.0 or not 0.0 <= profile.omega_sc <= 100.0:
        err = ProfileError(
            f"weight_tg={profile.weight_tg} and omega_sc={profile.omega_sc} must lie in [0, 100]"
        )
        err.code = "weight_out_of_range"
        err.field = "weight_tg"
        raise err
    if abs(profile.weight_tg + profile.omega_sc - 100.0) > WEIGHT_SUM_TOLERANCE:
        raise WeightSumViolation(
            f"weight_tg + omega_sc must equal 100, got {profile.weight_tg + profile.omega_sc}"
        )
    if profile.tau_hours <= 0:
        raise NonPositiveTau(f"tau_hours must be positive, got {profile.tau_hours}")
    if profile.model is DecayModel.LINEAR:
        if profile.delta < 0:
            raise NonPositiveDelta(f"linear delta must be >= 0, got {profile.delta}")
    elif profile.delta <= 0:
        raise NonPositiveDelta(
            f"{profile.model.value} delta must be positive, got {profile.delta}"
        )
    if not 0.0 <= profile.threshold <= 100.0:
        err = ProfileError(f"threshold {profile.threshold} outside [0, 100]")
        err.code = "threshold_out_of_range"
        err.field = "threshold"
        raise err
    return profile
