"""Shared test fixtures and helpers."""

from __future__ import annotations

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance criterion, whatever the outcome."""
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        status = "PASS" if report.passed else "FAIL"
        criterion = item.name.replace("test_", "", 1)
        print(f"\nACCEPTANCE {criterion}: {status}")

from ioc_decay.model import Attribute, Sighting, SightingKind
from ioc_decay.sightings import SightingStore

HOUR = 3600
DAY = 24 * HOUR

# Base epoch for fixture timestamps; any positive anchor works.
T0 = 1_600_000_000


def make_attribute(attr_id: str = "a1", attr_type: str = "url", **kwargs) -> Attribute:
    defaults = dict(
        id=attr_id,
        attr_type=attr_type,
        category="Network activity",
        value=f"http://evil.example/{attr_id}",
        source_org="org-a",
        source_confidence=1.0,
        first_seen=T0,
    )
    defaults.update(kwargs)
    return Attribute(**defaults)


def seen(attr_id: str, ts: int, source: str = "ids") -> Sighting:
    return Sighting(attribute_id=attr_id, timestamp=ts, kind=SightingKind.SEEN, source=source)


def false_positive(attr_id: str, ts: int, source: str = "analyst") -> Sighting:
    return Sighting(
        attribute_id=attr_id, timestamp=ts, kind=SightingKind.FALSE_POSITIVE, source=source
    )


def expiration(attr_id: str, ts: int, source: str = "isp") -> Sighting:
    return Sighting(attribute_id=attr_id, timestamp=ts, kind=SightingKind.EXPIRATION, source=source)


def populate(store: SightingStore, attributes, sightings) -> SightingStore:
    for attr in attributes:
        store.add_attribute(attr)
    report = store.ingest([s.to_json_dict() for s in sightings])
    assert not report.rejected, report.rejected
    return store


@pytest.fixture
def store() -> SightingStore:
    return SightingStore()
