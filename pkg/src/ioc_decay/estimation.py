"""End-time distributions and decay-parameter fitting from sighting history.

Each attribute with at least two seen-sightings gets an empirical end-time
of (t_n - t_0) + max_gap: the observed activity span stretched by the
longest silence inside it. Fitting reads tau off a high quantile of those
end-times and inverts delta from the half-life identity at the median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .decay import delta_for_half_life
from .sightings import SightingStore, Timeline


class EmptyDistribution(ValueError):
    """No attribute of the requested type qualifies for estimation."""


class DegenerateQuantiles(ValueError):
    """Quantile extraction produced half-life >= tau (heavily tied data)."""


@dataclass
class EndTimeDistribution:
    """Computed end-times for one attribute type plus their histogram and CDF."""

    attr_type: str
    end_times_hours: list[float]
    excluded_single_sighting: int
    excluded_outliers: int
    histogram: list[tuple[float, int]]
    cdf: list[tuple[float, float]]
    bucket_width_hours: float
    outlier_cutoff_hours: float


@dataclass(frozen=True)
class FitResult:
    attr_type: str
    tau_hours: float
    delta: float
    tau_quantile: float
    half_quantile_hours: float
    n_attributes: int


@dataclass(frozen=True)
class DatasetStats:
    """Headline counts over a store: span, totals, and seen-sightings-per-attribute moments."""

    time_span: tuple[int, int]
    n_attributes: int
    n_sightings: int
    mean_sightings_per_attribute: float
    stdev_sightings_per_attribute: float

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "time_span": list(self.time_span),
            "n_attributes": self.n_attributes,
            "n_sightings": self.n_sightings,
            "mean_sightings_per_attribute": self.mean_sightings_per_attribute,
            "stdev_sightings_per_attribute": self.stdev_sightings_per_attribute,
        }


def end_time(timeline: Timeline) -> float:
    """(t_n - t_0) + max gap, in hours; needs at least two seen-sightings."""
    if timeline.n < 2:
        raise ValueError(f"end_time needs >= 2 seen sightings, got {timeline.n}")
    return (timeline.tn - timeline.t0) / 3600.0 + timeline.max_gap_hours


def build_distribution(
    store: SightingStore,
    attr_type: str,
    outlier_cutoff_hours: float = 168.0,
    bucket_width_hours: float = 1.0,
) -> EndTimeDistribution:
    """Collect qualifying end-times for one attribute type.

    Attributes with fewer than two seen-sightings are counted in
    ``excluded_single_sighting``; end-times beyond the cutoff are counted in
    ``excluded_outliers``. Included + both exclusions equals the total number
    of attributes of the type.
    """
    if outlier_cutoff_hours <= 0:
        raise ValueError(f"outlier cutoff must be positive, got {outlier_cutoff_hours}")
    if bucket_width_hours <= 0:
        raise ValueError(f"bucket width must be positive, got {bucket_width_hours}")
    included: list[float] = []
    excluded_single = 0
    excluded_outliers = 0
    for attr in store.attributes(attr_type):
        seen = store.seen_timestamps(attr.id)
        if len(seen) < 2:
            excluded_single += 1
            continue
        value = end_time(store.timeline(attr.id))
        if value > outlier_cutoff_hours:
            excluded_outliers += 1
            continue
        included.append(value)
    if not included:
        raise EmptyDistribution(f"no qualifying attributes of type {attr_type!r}")
    included.sort()

    values = np.asarray(included)
    n_buckets = int(values.max() // bucket_width_hours) + 1
    counts = np.bincount((values // bucket_width_hours).astype(int), minlength=n_buckets)
    histogram = [(i * bucket_width_hours, int(c)) for i, c in enumerate(counts)]
    n = len(included)
    cdf = [(x, (i + 1) / n) for i, x in enumerate(included)]
    return EndTimeDistribution(
        attr_type=attr_type,
        end_times_hours=included,
        excluded_single_sighting=excluded_single,
        excluded_outliers=excluded_outliers,
        histogram=histogram,
        cdf=cdf,
        bucket_width_hours=bucket_width_hours,
        outlier_cutoff_hours=outlier_cutoff_hours,
    )


def quantile_nearest_rank(sorted_values: list[float], q: float) -> float:
    """Nearest-rank quantile: the ceil(q*n)-th smallest value (1-based)."""
    if not sorted_values:
        raise ValueError("empty sample")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q}")
    n = len(sorted_values)
    # The 1e-9 guard keeps q*n at an integer from being pushed up a rank by
    # float noise (e.g. 0.9 * 10000 = 9000.000000000002).
    rank = max(1, math.ceil(q * n - 1e-9))
    return sorted_values[rank - 1]


def fit(
    dist: EndTimeDistribution,
    tau_quantile: float = 0.90,
    half_quantile: float = 0.50,
) -> FitResult:
    """Estimate (tau, delta) from an end-time distribution.

    tau is the empirical quantile at ``tau_quantile``; delta is inverted so
    the polynomial score is halved exactly at the ``half_quantile`` quantile.
    """
    if not 0.0 < half_quantile < tau_quantile < 1.0:
        raise ValueError(
            f"need 0 < half_quantile < tau_quantile < 1, got {half_quantile}, {tau_quantile}"
        )
    tau_hours = quantile_nearest_rank(dist.end_times_hours, tau_quantile)
    half_hours = quantile_nearest_rank(dist.end_times_hours, half_quantile)
    if not 0.0 < half_hours < tau_hours:
        raise DegenerateQuantiles(
            f"half-life quantile {half_hours} must lie strictly below tau {tau_hours}"
        )
    return FitResult(
        attr_type=dist.attr_type,
        tau_hours=tau_hours,
        delta=delta_for_half_life(tau_hours, half_hours),
        tau_quantile=tau_quantile,
        half_quantile_hours=half_hours,
        n_attributes=len(dist.end_times_hours),
    )


def fit_report(dist: EndTimeDistribution, result: FitResult) -> dict[str, Any]:
    """JSON-ready fit summary; ``paper_convention_delta`` is 1/delta, informational only."""
    return {
        "attr_type": result.attr_type,
        "tau_hours": result.tau_hours,
        "delta": result.delta,
        "tau_quantile": result.tau_quantile,
        "half_quantile_hours": result.half_quantile_hours,
        "n_attributes": result.n_attributes,
        "excluded_single_sighting": dist.excluded_single_sighting,
        "excluded_outliers": dist.excluded_outliers,
        "paper_convention_delta": 1.0 / result.delta,
    }


def dataset_stats(store: SightingStore) -> DatasetStats:
    """Exact counts plus population mean/stdev of seen-sightings per attribute."""
    attribute_ids = store.attribute_ids()
    first: Optional[int] = None
    last: Optional[int] = None
    n_sightings = 0
    seen_counts = []
    for attribute_id in attribute_ids:
        sightings = store.sightings_for(attribute_id)
        n_sightings += len(sightings)
        if sightings:
            first = sightings[0].timestamp if first is None else min(first, sightings[0].timestamp)
            last = sightings[-1].timestamp if last is None else max(last, sightings[-1].timestamp)
        seen_counts.append(len(store.seen_timestamps(attribute_id)))
    counts = np.asarray(seen_counts, dtype=float) if seen_counts else np.zeros(0)
    return DatasetStats(
        time_span=(first or 0, last or 0),
        n_attributes=len(attribute_ids),
        n_sightings=n_sightings,
        mean_sightings_per_attribute=float(counts.mean()) if counts.size else 0.0,
        stdev_sightings_per_attribute=float(counts.std(ddof=0)) if counts.size else 0.0,
    )
