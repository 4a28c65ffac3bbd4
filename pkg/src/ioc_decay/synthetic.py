"""Seedable synthetic dataset generator.

Stands in for real sighting feeds: per-attribute end-times are drawn from a
log-normal whose median and 0.9-quantile are configurable (defaults 72 h and
120 h), then seen-sightings are placed so the realized
(t_n - t_0) + max_gap reproduces the drawn end-time exactly, up to
integer-second rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .model import Attribute, MachineTag, Sighting, SightingKind

# 0.9 quantile of the standard normal distribution.
Z_90 = 1.2815515655446004

_TAG_POOL = [
    ('misp:confidence-level="completely-confident"',),
    ('misp:confidence-level="usually-confident"', 'osint:certainty="probable"'),
    ('osint:certainty="almost-certain"',),
    ('misp:confidence-level="fairly-confident"', 'estimative-language:likelihood-probability="likely"'),
    ('admiralty-scale:source-reliability="b"', 'admiralty-scale:information-credibility="2"'),
]

_SOURCE_ORGS = ("circl", "restena", "blue-soc", "orange-csirt")


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int = 0
    n_attributes: int = 1000
    attr_type: str = "url"
    category: str = "Network activity"
    median_end_time_hours: float = 72.0
    q90_end_time_hours: float = 120.0
    mean_extra_sightings: float = 4.0
    single_sighting_fraction: float = 0.02
    false_positive_fraction: float = 0.05
    window_start: int = 1_500_000_000
    window_span_hours: float = 1440.0


def generate(cfg: SyntheticConfig) -> tuple[list[Attribute], list[Sighting]]:
    """Draw a reproducible attribute/sighting dataset from the config."""
    if cfg.n_attributes <= 0:
        raise ValueError("n_attributes must be positive")
    if not 0 < cfg.median_end_time_hours < cfg.q90_end_time_hours:
        raise ValueError("need 0 < median < q90 end-time")
    rng = np.random.default_rng(cfg.seed)
    mu = math.log(cfg.median_end_time_hours)
    sigma = math.log(cfg.q90_end_time_hours / cfg.median_end_time_hours) / Z_90

    attributes: list[Attribute] = []
    sightings: list[Sighting] = []
    for i in range(cfg.n_attributes):
        attr_id = f"{cfg.attr_type}-{i:06d}"
        start = cfg.window_start + int(rng.uniform(0.0, cfg.window_span_hours * 3600.0))
        tags = _TAG_POOL[i % len(_TAG_POOL)]
        attributes.append(
            Attribute(
                id=attr_id,
                attr_type=cfg.attr_type,
                category=cfg.category,
                value=f"http://synthetic.example/{i}",
                tags=tuple(MachineTag.parse(t) for t in tags),
                source_org=_SOURCE_ORGS[i % len(_SOURCE_ORGS)],
                source_confidence=round(float(rng.uniform(0.5, 1.0)), 3),
                first_seen=start,
            )
        )

        if rng.uniform() < cfg.single_sighting_fraction:
            seen_times = [start]
        else:
            end_time_s = float(rng.lognormal(mean=mu, sigma=sigma)) * 3600.0
            k = 2 + int(rng.poisson(cfg.mean_extra_sightings))
            gaps = rng.exponential(scale=1.0, size=k - 1)
            # Scale so span + max_gap lands exactly on the drawn end-time.
            scale = end_time_s / (gaps.sum() + gaps.max())
            offsets = np.concatenate(([0.0], np.cumsum(gaps * scale)))
            seen_times = [start + int(round(o)) for o in offsets]
        for ts in seen_times:
            sightings.append(
                Sighting(attribute_id=attr_id, timestamp=ts, kind=SightingKind.SEEN, source="ids")
            )
        if rng.uniform() < cfg.false_positive_fraction:
            fp_at = int(rng.uniform(seen_times[0], seen_times[-1] + 1))
            sightings.append(
                Sighting(
                    attribute_id=attr_id,
                    timestamp=fp_at,
                    kind=SightingKind.FALSE_POSITIVE,
                    source="analyst",
                )
            )
    sightings.sort(key=lambda s: s.timestamp)
    return attributes, sightings


def write_dataset(
    attributes: list[Attribute],
    sightings: list[Sighting],
    out_dir: Union[str, Path],
) -> tuple[Path, Path]:
    """Write attributes.jsonl and sightings.jsonl under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    attr_path = out_dir / "attributes.jsonl"
    sight_path = out_dir / "sightings.jsonl"
    with open(attr_path, "w", encoding="utf-8") as fh:
        for attr in attributes:
            fh.write(json.dumps(attr.to_json_dict()) + "\n")
    with open(sight_path, "w", encoding="utf-8") as fh:
        for sighting in sightings:
            fh.write(json.dumps(sighting.to_json_dict()) + "\n")
    return attr_path, sight_path
