"""Taxonomy-weighted scoring and time-decay engine for threat-intelligence indicators."""

from .decay import (
    DecayEvaluation,
    base_score,
    delta_for_half_life,
    evaluate,
    half_life,
    sample_curve,
    score_exponential,
    score_linear,
    score_polynomial,
)
from .estimation import (
    DatasetStats,
    EndTimeDistribution,
    FitResult,
    build_distribution,
    dataset_stats,
    end_time,
    fit,
    fit_report,
)
from .model import (
    Attribute,
    DecayModel,
    DecayProfile,
    MachineTag,
    Sighting,
    SightingKind,
    validate_profile,
)
from .profiles import ProfileStore
from .sightings import AggregationBucket, IngestReport, SightingStore, Timeline
from .simulator import SimulationConfig, SimulationResult, simulate
from .synthetic import SyntheticConfig, generate
from .taxonomy import (
    TaxonomyRegistry,
    load_bundled_taxonomies,
    load_taxonomies,
    parse_machine_tag,
    resolve_tag,
    score_tags,
    tag_score,
)

__version__ = "0.1.0"

__all__ = [
    "AggregationBucket",
    "Attribute",
    "DatasetStats",
    "DecayEvaluation",
    "DecayModel",
    "DecayProfile",
    "EndTimeDistribution",
    "FitResult",
    "IngestReport",
    "MachineTag",
    "ProfileStore",
    "Sighting",
    "SightingKind",
    "SightingStore",
    "SimulationConfig",
    "SimulationResult",
    "SyntheticConfig",
    "TaxonomyRegistry",
    "Timeline",
    "base_score",
    "build_distribution",
    "dataset_stats",
    "delta_for_half_life",
    "end_time",
    "evaluate",
    "fit",
    "fit_report",
    "generate",
    "half_life",
    "load_bundled_taxonomies",
    "load_taxonomies",
    "parse_machine_tag",
    "resolve_tag",
    "sample_curve",
    "score_exponential",
    "score_linear",
    "score_polynomial",
    "score_tags",
    "simulate",
    "tag_score",
    "validate_profile",
]
