"""Sighting ingestion, storage, per-attribute timelines, and bucketed aggregation.

The store keeps everything in memory, ordered by timestamp per attribute,
and persists through append-only JSONL files replayed on open. Ingestion is
single-writer (one lock held for the whole batch); queries take the same
lock briefly, so readers never observe a partially ingested batch.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
from bisect import bisect_left, bisect_right, insort_right
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Optional, TextIO, Union

from .model import Attribute, Sighting, SightingKind

REASON_UNKNOWN_ATTRIBUTE = "unknown_attribute"
REASON_BAD_TIMESTAMP = "bad_timestamp"
REASON_BAD_KIND = "bad_kind"
REASON_DUPLICATE_ID = "duplicate_id"


class StreamError(ValueError):
    """A sighting or attribute stream cannot be decoded at all (not a per-record problem)."""


@dataclass
class IngestReport:
    """Counts of accepted records plus per-record rejections as (line, reason)."""

    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "accepted": self.accepted,
            "rejected": [{"line": line, "reason": reason} for line, reason in self.rejected],
        }


@dataclass(frozen=True)
class Timeline:
    """First/last seen-sighting times and the largest gap between consecutive ones."""

    attribute_id: str
    t0: int
    tn: int
    n: int
    max_gap_hours: float


@dataclass(frozen=True)
class AggregationBucket:
    bucket_start: int
    seen_count: int = 0
    false_positive_count: int = 0
    expiration_count: int = 0

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "bucket_start": self.bucket_start,
            "seen_count": self.seen_count,
            "false_positive_count": self.false_positive_count,
            "expiration_count": self.expiration_count,
        }


class SightingStore:
    """In-memory attribute and sighting store with optional JSONL persistence.

    When ``data_dir`` is given, accepted records are appended to
    ``attributes.jsonl`` and ``sightings.jsonl`` and replayed on open.
    """

    def __init__(self, data_dir: Optional[Union[str, Path]] = None) -> None:
        self._lock = threading.RLock()
        self._attributes: dict[str, Attribute] = {}
        self._sightings: dict[str, list[Sighting]] = {}
        self._by_kind: dict[str, dict[SightingKind, list[int]]] = {}
        self._dedup: set[tuple[str, int, str, str]] = set()
        self._attr_log: Optional[TextIO] = None
        self._sight_log: Optional[TextIO] = None
        if data_dir is not None:
            data_dir = Path(data_dir)
            data_dir.mkdir(parents=True, exist_ok=True)
            self._replay(data_dir / "attributes.jsonl", self._replay_attribute)
            self._replay(data_dir / "sightings.jsonl", self._replay_sighting)
            self._attr_log = open(data_dir / "attributes.jsonl", "a", encoding="utf-8")
            self._sight_log = open(data_dir / "sightings.jsonl", "a", encoding="utf-8")

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        for log in (self._attr_log, self._sight_log):
            if log is not None:
                log.close()
        self._attr_log = None
        self._sight_log = None

    def __enter__(self) -> "SightingStore":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def _replay(self, path: Path, apply: Any) -> None:
        # Streams the journal instead of slurping it; a torn final line from an
        # interrupted append is dropped, garbage anywhere else is an error.
        if not path.exists():
            return
        undecodable: Optional[str] = None
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                if undecodable is not None:
                    raise StreamError(undecodable)
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    undecodable = f"{path}:{line_no}: undecodable journal line"
                    continue
                apply(record)

    def _replay_attribute(self, record: Mapping[str, Any]) -> None:
        attr = Attribute.from_json_dict(record)
        self._attributes[attr.id] = attr

    def _replay_sighting(self, record: Mapping[str, Any]) -> None:
        self._insert(Sighting.from_json_dict(record), persist=False)

    # -- attributes --------------------------------------------------------

    def add_attribute(self, attr: Attribute) -> bool:
        """Register an attribute; exact re-adds are no-ops, conflicting ids an error."""
        with self._lock:
            existing = self._attributes.get(attr.id)
            if existing is not None:
                if existing == attr:
                    return False
                raise ValueError(f"attribute id {attr.id!r} already present with different fields")
            self._attributes[attr.id] = attr
            if self._attr_log is not None:
                self._attr_log.write(json.dumps(attr.to_json_dict()) + "\n")
                self._attr_log.flush()
            return True

    def get_attribute(self, attribute_id: str) -> Optional[Attribute]:
        with self._lock:
            return self._attributes.get(attribute_id)

    def attribute_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._attributes)

    def attributes(self, attr_type: Optional[str] = None) -> list[Attribute]:
        with self._lock:
            attrs = [
                a
                for a in self._attributes.values()
                if attr_type is None or a.attr_type == attr_type
            ]
        return sorted(attrs, key=lambda a: a.id)

    def ingest_attributes(
        self,
        records: Iterable[Mapping[str, Any]],
        start_line: int = 1,
        org_confidence: Optional[Mapping[str, float]] = None,
    ) -> IngestReport:
        """Load attribute records, rejecting malformed or conflicting ones per line.

        ``org_confidence`` maps organization names to trust levels; when the
        producing org is listed, its value replaces the record's own
        source_confidence, so trust stays a per-consumer setting even though
        it is stored per attribute.
        """
        report = IngestReport()
        with self._lock:
            for line, record in enumerate(records, start=start_line):
                try:
                    attr = Attribute.from_json_dict(record)
                except (KeyError, TypeError, ValueError):
                    report.rejected.append((line, "bad_attribute"))
                    continue
                if org_confidence is not None and attr.source_org in org_confidence:
                    try:
                        attr = replace(
                            attr, source_confidence=float(org_confidence[attr.source_org])
                        )
                    except ValueError:
                        report.rejected.append((line, "bad_attribute"))
                        continue
                try:
                    self.add_attribute(attr)
                except ValueError:
                    report.rejected.append((line, REASON_DUPLICATE_ID))
                    continue
                report.accepted += 1
        return report

    # -- sightings ---------------------------------------------------------

    def _insert(self, sighting: Sighting, persist: bool) -> bool:
        key = sighting.key()
        if key in self._dedup:
            return False
        self._dedup.add(key)
        insort_right(
            self._sightings.setdefault(sighting.attribute_id, []),
            sighting,
            key=lambda s: s.timestamp,
        )
        kinds = self._by_kind.setdefault(sighting.attribute_id, {})
        insort_right(kinds.setdefault(sighting.kind, []), sighting.timestamp)
        if persist and self._sight_log is not None:
            self._sight_log.write(json.dumps(sighting.to_json_dict()) + "\n")
        return True

    def ingest(self, records: Iterable[Mapping[str, Any]], start_line: int = 1) -> IngestReport:
        """Validate and insert sighting records.

        Exact duplicates of already-stored sightings count as accepted but do
        not change the store, making ingestion idempotent. Rejection reasons
        are per record; the batch as a whole always applies.
        """
        report = IngestReport()
        with self._lock:
            for line, record in enumerate(records, start=start_line):
                reason = self._validate(record)
                if reason is not None:
                    report.rejected.append((line, reason))
                    continue
                self._insert(
                    Sighting(
                        attribute_id=record["attribute_id"],
                        timestamp=int(record["timestamp"]),
                        kind=SightingKind(record["kind"]),
                        source=str(record.get("source", "") or ""),
                    ),
                    persist=True,
                )
                report.accepted += 1
            if self._sight_log is not None:
                self._sight_log.flush()
        return report

    def _validate(self, record: Mapping[str, Any]) -> Optional[str]:
        attribute_id = record.get("attribute_id")
        if not attribute_id or attribute_id not in self._attributes:
            return REASON_UNKNOWN_ATTRIBUTE
        timestamp = record.get("timestamp")
        if isinstance(timestamp, str):
            try:
                timestamp = int(timestamp)
            except ValueError:
                return REASON_BAD_TIMESTAMP
        if isinstance(timestamp, bool) or not isinstance(timestamp, int) or timestamp <= 0:
            return REASON_BAD_TIMESTAMP
        kind = record.get("kind")
        try:
            SightingKind(kind)
        except ValueError:
            return REASON_BAD_KIND
        return None

    def sightings_for(self, attribute_id: str) -> list[Sighting]:
        with self._lock:
            return list(self._sightings.get(attribute_id, []))

    def seen_timestamps(self, attribute_id: str) -> list[int]:
        with self._lock:
            return list(self._by_kind.get(attribute_id, {}).get(SightingKind.SEEN, []))

    def n_sightings(self) -> int:
        with self._lock:
            return sum(len(lst) for lst in self._sightings.values())

    # -- queries -----------------------------------------------------------

    def last_seen(self, attribute_id: str, as_of: int) -> Optional[int]:
        """Latest seen-sighting timestamp at or before ``as_of``; None when absent."""
        with self._lock:
            seen = self._by_kind.get(attribute_id, {}).get(SightingKind.SEEN, [])
            idx = bisect_right(seen, as_of)
            return seen[idx - 1] if idx else None

    def expiration_override(self, attribute_id: str, as_of: int) -> Optional[float]:
        """End-time override, in hours, implied by the most recent expiration sighting.

        Measured from the latest seen-sighting at or before the expiration
        (falling back to the attribute's first_seen) to the expiration itself.
        """
        with self._lock:
            kinds = self._by_kind.get(attribute_id, {})
            expirations = kinds.get(SightingKind.EXPIRATION, [])
            idx = bisect_right(expirations, as_of)
            if not idx:
                return None
            expires_at = expirations[idx - 1]
            anchor = self.last_seen(attribute_id, expires_at)
            if anchor is None:
                attr = self._attributes.get(attribute_id)
                anchor = attr.first_seen if attr is not None else None
            if anchor is None or anchor > expires_at:
                return None
            return (expires_at - anchor) / 3600.0

    def timeline(self, attribute_id: str) -> Timeline:
        """Seen-sighting timeline; requires at least one seen sighting."""
        with self._lock:
            seen = self._by_kind.get(attribute_id, {}).get(SightingKind.SEEN, [])
            if not seen:
                raise ValueError(f"attribute {attribute_id!r} has no seen sightings")
            max_gap = 0
            for earlier, later in zip(seen, seen[1:]):
                max_gap = max(max_gap, later - earlier)
            return Timeline(
                attribute_id=attribute_id,
                t0=seen[0],
                tn=seen[-1],
                n=len(seen),
                max_gap_hours=max_gap / 3600.0,
            )

    def aggregate(
        self, from_ts: int, to_ts: int, bucket_width_seconds: int
    ) -> list[AggregationBucket]:
        """Tally sightings per kind into contiguous half-open buckets covering [from, to)."""
        if from_ts >= to_ts:
            raise ValueError(f"aggregation window is empty: [{from_ts}, {to_ts})")
        if bucket_width_seconds <= 0:
            raise ValueError(f"bucket width must be positive, got {bucket_width_seconds}")
        n_buckets = math.ceil((to_ts - from_ts) / bucket_width_seconds)
        counts = [[0, 0, 0] for _ in range(n_buckets)]
        slot = {SightingKind.SEEN: 0, SightingKind.FALSE_POSITIVE: 1, SightingKind.EXPIRATION: 2}
        with self._lock:
            for sightings in self._sightings.values():
                lo = bisect_left(sightings, from_ts, key=lambda s: s.timestamp)
                hi = bisect_left(sightings, to_ts, key=lambda s: s.timestamp)
                for sighting in sightings[lo:hi]:
                    idx = (sighting.timestamp - from_ts) // bucket_width_seconds
                    counts[idx][slot[sighting.kind]] += 1
        return [
            AggregationBucket(
                bucket_start=from_ts + i * bucket_width_seconds,
                seen_count=c[0],
                false_positive_count=c[1],
                expiration_count=c[2],
            )
            for i, c in enumerate(counts)
        ]


# -- stream readers ---------------------------------------------------------


def read_jsonl(stream: Union[str, TextIO]) -> Iterator[Mapping[str, Any]]:
    """Yield one object per nonempty line; an undecodable line aborts the stream."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamError(f"line {line_no}: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise StreamError(f"line {line_no}: expected a JSON object")
        yield record


def read_sightings_csv(stream: Union[str, TextIO]) -> Iterator[Mapping[str, Any]]:
    """Yield sighting records from CSV with a header row of the JSONL field names."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return
    expected = {"attribute_id", "timestamp", "kind", "source"}
    if not expected.issubset(set(reader.fieldnames)):
        missing = sorted(expected - set(reader.fieldnames))
        raise StreamError(f"CSV header missing columns: {', '.join(missing)}")
    for row in reader:
        yield row


def ingest_sightings_file(store: SightingStore, path: Union[str, Path]) -> IngestReport:
    """Ingest a sightings file, picking JSONL or CSV from the extension."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        if path.suffix.lower() == ".csv":
            # Data rows start on line 2; line 1 is the header.
            return store.ingest(read_sightings_csv(fh), start_line=2)
        return store.ingest(read_jsonl(fh))


def ingest_attributes_file(
    store: SightingStore,
    path: Union[str, Path],
    org_confidence: Optional[Mapping[str, float]] = None,
) -> IngestReport:
    with open(path, encoding="utf-8") as fh:
        return store.ingest_attributes(read_jsonl(fh), org_confidence=org_confidence)
