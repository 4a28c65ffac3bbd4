"""Machine-tag taxonomy loading, tag resolution, and the weighted tag score.

Taxonomy files follow the MISP machinetag JSON layout so real published
taxonomy files load unchanged. Predicate weights come from a non-standard
``scoring_weight`` field and default to 50 when absent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .model import MachineTag, MalformedTag  # noqa: F401  (MalformedTag re-exported)

DEFAULT_PREDICATE_WEIGHT = 50

BUNDLED_NAMESPACES = ("misp", "admiralty-scale", "osint", "estimative-language")


class TaxonomyError(ValueError):
    """Base class for taxonomy loading problems."""


class ParseError(TaxonomyError):
    """A taxonomy file is not valid taxonomy JSON."""


class DuplicateNamespace(TaxonomyError):
    """The same namespace was loaded twice."""


class NoScorableTags(ValueError):
    """No resolved tag carries a positive weight, so the tag score is undefined."""


def parse_machine_tag(text: str) -> MachineTag:
    """Parse a triple-tag string such as ``flora:flower="lily"``."""
    return MachineTag.parse(text)


def normalize_label(label: str) -> str:
    """Case-insensitive matching with spaces and hyphens treated alike."""
    return label.strip().lower().replace(" ", "-")


@dataclass(frozen=True)
class PredicateDefinition:
    predicate: str
    weight: int = DEFAULT_PREDICATE_WEIGHT
    entries: tuple[tuple[str, Optional[int]], ...] = ()


@dataclass(frozen=True)
class TaxonomyDefinition:
    namespace: str
    predicates: tuple[PredicateDefinition, ...]


class TaxonomyRegistry:
    """Immutable-after-load lookup from machine tags to numeric values and weights."""

    def __init__(self) -> None:
        self._definitions: dict[str, TaxonomyDefinition] = {}
        self._values: dict[tuple[str, str, str], Optional[int]] = {}
        self._weights: dict[tuple[str, str], int] = {}

    def add(self, definition: TaxonomyDefinition) -> None:
        if definition.namespace in self._definitions:
            raise DuplicateNamespace(f"namespace {definition.namespace!r} already loaded")
        self._definitions[definition.namespace] = definition
        for pred in definition.predicates:
            self._weights[(definition.namespace, pred.predicate)] = pred.weight
            for value, numerical in pred.entries:
                key = (definition.namespace, pred.predicate, normalize_label(value))
                self._values[key] = numerical

    def namespaces(self) -> list[str]:
        return sorted(self._definitions)

    def predicate_weight(self, namespace: str, predicate: str) -> Optional[int]:
        return self._weights.get((namespace, predicate))

    def resolve_tag(self, tag: MachineTag) -> Optional[int]:
        """Numeric value for a tag, or None when the tag is unknown or carries no value."""
        if tag.value is None:
            return None
        return self._values.get((tag.namespace, tag.predicate, normalize_label(tag.value)))

    def resolve_pairs(self, tags: Iterable[MachineTag]) -> list[tuple[int, int]]:
        """Flatten tags into (numerical_value, weight) pairs, dropping unresolvable ones."""
        pairs = []
        for tag in tags:
            value = self.resolve_tag(tag)
            if value is None:
                continue
            weight = self.predicate_weight(tag.namespace, tag.predicate)
            if weight is None:
                weight = DEFAULT_PREDICATE_WEIGHT
            pairs.append((value, weight))
        return pairs


def resolve_tag(registry: TaxonomyRegistry, tag: MachineTag) -> Optional[int]:
    return registry.resolve_tag(tag)


def tag_score(resolved: Sequence[tuple[float, float]]) -> float:
    """Weighted tag score: sum(value_i * weight_i) / sum(100 * weight_i), in [0, 1].

    ``resolved`` holds (numerical_value, weight) pairs with values in [0, 100];
    entries without a numeric value must already be filtered out.
    """
    if not resolved:
        raise NoScorableTags("no resolved tags")
    numerator = 0.0
    denominator = 0.0
    for value, weight in resolved:
        numerator += value * weight
        denominator += 100.0 * weight
    if denominator == 0.0:
        raise NoScorableTags("all tag weights are zero")
    return numerator / denominator


def score_tags(registry: TaxonomyRegistry, tags: Iterable[MachineTag]) -> float:
    """Resolve tags against the registry and compute their tag score."""
    return tag_score(registry.resolve_pairs(tags))


def _parse_definition(data: dict, origin: str) -> TaxonomyDefinition:
    try:
        namespace = data["namespace"]
    except (TypeError, KeyError):
        raise ParseError(f"{origin}: missing namespace") from None
    if not isinstance(namespace, str) or not namespace:
        raise ParseError(f"{origin}: namespace must be a nonempty string")

    weights: dict[str, int] = {}
    for pred in data.get("predicates", []):
        name = pred.get("value")
        if not name:
            raise ParseError(f"{origin}: predicate without a value")
        if name in weights:
            raise ParseError(f"{origin}: duplicate predicate {name!r}")
        weight = pred.get("scoring_weight", DEFAULT_PREDICATE_WEIGHT)
        if not isinstance(weight, int) or isinstance(weight, bool) or not 0 <= weight <= 100:
            raise ParseError(
                f"{origin}: scoring_weight for {name!r} must be an integer in [0, 100]"
            )
        weights[name] = weight

    entries: dict[str, list[tuple[str, Optional[int]]]] = {name: [] for name in weights}
    for group in data.get("values", []):
        predicate = group.get("predicate")
        if predicate not in entries:
            raise ParseError(f"{origin}: values reference unknown predicate {predicate!r}")
        for entry in group.get("entry", []):
            value = entry.get("value")
            if not value:
                raise ParseError(f"{origin}: entry without a value under {predicate!r}")
            numerical = entry.get("numerical_value")
            if numerical is not None:
                if not isinstance(numerical, int) or isinstance(numerical, bool):
                    raise ParseError(
                        f"{origin}: numerical_value for {predicate}={value!r} must be an integer"
                    )
                if not 0 <= numerical <= 100:
                    raise ParseError(
                        f"{origin}: numerical_value {numerical} for {predicate}={value!r} "
                        "outside [0, 100]"
                    )
            entries[predicate].append((value, numerical))

    predicates = tuple(
        PredicateDefinition(predicate=name, weight=weights[name], entries=tuple(entries[name]))
        for name in weights
    )
    return TaxonomyDefinition(namespace=namespace, predicates=predicates)


def load_taxonomy(path: Union[str, Path]) -> TaxonomyDefinition:
    """Load one taxonomy JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return _parse_definition(data, str(path))


def load_taxonomies(paths: Iterable[Union[str, Path]]) -> TaxonomyRegistry:
    """Load taxonomy files into a fresh registry; duplicate namespaces are an error."""
    registry = TaxonomyRegistry()
    for path in paths:
        registry.add(load_taxonomy(path))
    return registry


def load_bundled_taxonomies() -> TaxonomyRegistry:
    """Registry holding the four taxonomies shipped with the package."""
    registry = TaxonomyRegistry()
    for namespace in BUNDLED_NAMESPACES:
        text = (
            resources.files("ioc_decay")
            .joinpath("taxonomies", f"{namespace}.json")
            .read_text(encoding="utf-8")
        )
        registry.add(_parse_definition(json.loads(text), f"bundled:{namespace}"))
    return registry
