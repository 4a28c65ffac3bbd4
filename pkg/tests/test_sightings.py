"""Sighting store: ingestion, queries, aggregation, persistence."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DAY, HOUR, T0, expiration, false_positive, make_attribute, populate, seen
from ioc_decay.model import SightingKind
from ioc_decay.sightings import (
    SightingStore,
    StreamError,
    ingest_attributes_file,
    ingest_sightings_file,
    read_jsonl,
    read_sightings_csv,
)


def test_ingest_accepts_and_sorts(store):
    store.add_attribute(make_attribute("a1"))
    report = store.ingest(
        [
            {"attribute_id": "a1", "timestamp": T0 + 20, "kind": "seen", "source": "x"},
            {"attribute_id": "a1", "timestamp": T0 + 10, "kind": "seen", "source": "x"},
            {"attribute_id": "a1", "timestamp": T0 + 30, "kind": "false_positive", "source": "y"},
        ]
    )
    assert report.accepted == 3 and not report.rejected
    stamps = [s.timestamp for s in store.sightings_for("a1")]
    assert stamps == sorted(stamps)


def test_ingest_rejections(store):
    store.add_attribute(make_attribute("a1"))
    report = store.ingest(
        [
            {"attribute_id": "ghost", "timestamp": T0, "kind": "seen", "source": ""},
            {"attribute_id": "a1", "timestamp": -5, "kind": "seen", "source": ""},
            {"attribute_id": "a1", "timestamp": "soon", "kind": "seen", "source": ""},
            {"attribute_id": "a1", "timestamp": T0, "kind": "glimpsed", "source": ""},
            {"attribute_id": "a1", "timestamp": T0, "kind": "seen", "source": ""},
        ]
    )
    assert report.accepted == 1
    assert report.rejected == [
        (1, "unknown_attribute"),
        (2, "bad_timestamp"),
        (3, "bad_timestamp"),
        (4, "bad_kind"),
    ]


def test_ingest_is_idempotent(store):
    store.add_attribute(make_attribute("a1"))
    records = [
        {"attribute_id": "a1", "timestamp": T0 + i * HOUR, "kind": "seen", "source": "ids"}
        for i in range(5)
    ]
    store.ingest(records)
    before = [s.key() for s in store.sightings_for("a1")]
    report = store.ingest(records)
    assert report.accepted == 5  # still valid records, just already present
    assert [s.key() for s in store.sightings_for("a1")] == before


def test_last_seen_ordered_lookup(store):
    populate(store, [make_attribute("a1")], [seen("a1", t) for t in (T0 + 10, T0 + 20, T0 + 30)])
    assert store.last_seen("a1", T0 + 25) == T0 + 20
    assert store.last_seen("a1", T0 + 30) == T0 + 30
    assert store.last_seen("a1", T0 + 5) is None


def test_last_seen_empty(store):
    store.add_attribute(make_attribute("a1"))
    assert store.last_seen("a1", T0 + DAY) is None


def test_last_seen_ignores_other_kinds(store):
    populate(
        store,
        [make_attribute("a1")],
        [seen("a1", T0 + 10), false_positive("a1", T0 + 50)],
    )
    # Brute-force check over every sighting regardless of kind index path.
    all_seen = [
        s.timestamp
        for s in store.sightings_for("a1")
        if s.kind is SightingKind.SEEN and s.timestamp <= T0 + 60
    ]
    assert store.last_seen("a1", T0 + 60) == max(all_seen) == T0 + 10


def test_last_seen_non_decreasing_in_as_of(store):
    populate(store, [make_attribute("a1")], [seen("a1", T0 + t) for t in (5, 50, 500)])
    results = [store.last_seen("a1", T0 + cutoff) or 0 for cutoff in range(0, 600, 7)]
    assert results == sorted(results)


def test_expiration_override(store):
    populate(
        store,
        [make_attribute("a1")],
        [seen("a1", T0), expiration("a1", T0 + 36 * HOUR)],
    )
    assert store.expiration_override("a1", T0 + DAY * 3) == pytest.approx(36.0)


def test_expiration_override_uses_latest_seen_before_it(store):
    populate(
        store,
        [make_attribute("a1")],
        [seen("a1", T0), seen("a1", T0 + 10 * HOUR), expiration("a1", T0 + 16 * HOUR)],
    )
    assert store.expiration_override("a1", T0 + DAY) == pytest.approx(6.0)


def test_expiration_override_most_recent_wins(store):
    populate(
        store,
        [make_attribute("a1")],
        [seen("a1", T0), expiration("a1", T0 + 10 * HOUR), expiration("a1", T0 + 20 * HOUR)],
    )
    assert store.expiration_override("a1", T0 + DAY) == pytest.approx(20.0)
    # as_of before the second expiration sees only the first
    assert store.expiration_override("a1", T0 + 15 * HOUR) == pytest.approx(10.0)


def test_expiration_override_falls_back_to_first_seen(store):
    store.add_attribute(make_attribute("a1", first_seen=T0))
    store.ingest([expiration("a1", T0 + 12 * HOUR).to_json_dict()])
    assert store.expiration_override("a1", T0 + DAY) == pytest.approx(12.0)


def test_expiration_override_absent(store):
    populate(store, [make_attribute("a1")], [seen("a1", T0)])
    assert store.expiration_override("a1", T0 + DAY) is None


# -- timeline ------------------------------------------------------------------


def test_timeline_gap_and_span(store):
    times = [T0, T0 + 10 * HOUR, T0 + 12 * HOUR]
    populate(store, [make_attribute("a1")], [seen("a1", t) for t in times])
    tl = store.timeline("a1")
    assert (tl.t0, tl.tn, tl.n) == (T0, T0 + 12 * HOUR, 3)
    assert tl.max_gap_hours == pytest.approx(10.0)


def test_timeline_single_sighting_has_zero_gap(store):
    populate(store, [make_attribute("a1")], [seen("a1", T0 + 5 * HOUR)])
    tl = store.timeline("a1")
    assert tl.t0 == tl.tn == T0 + 5 * HOUR
    assert tl.n == 1
    assert tl.max_gap_hours == 0.0


def test_timeline_uniform_gaps(store):
    populate(store, [make_attribute("a1")], [seen("a1", T0 + i * HOUR) for i in range(4)])
    assert store.timeline("a1").max_gap_hours == pytest.approx(1.0)


def test_timeline_requires_seen(store):
    populate(store, [make_attribute("a1")], [false_positive("a1", T0)])
    with pytest.raises(ValueError):
        store.timeline("a1")


def test_timeline_gap_bounded_by_span(store):
    times = [T0 + t * HOUR for t in (0, 3, 4, 11, 17)]
    populate(store, [make_attribute("a1")], [seen("a1", t) for t in times])
    tl = store.timeline("a1")
    assert tl.max_gap_hours <= (tl.tn - tl.t0) / 3600.0


# -- aggregation ------------------------------------------------------------------


def test_aggregate_empty_store(store):
    buckets = store.aggregate(T0, T0 + 3 * DAY, DAY)
    assert len(buckets) == 3
    assert all(
        (b.seen_count, b.false_positive_count, b.expiration_count) == (0, 0, 0) for b in buckets
    )


def test_aggregate_daily_hand_count(store):
    sightings = [seen("a1", T0 + i * HOUR) for i in (1, 5, 9)]
    sightings += [false_positive("a1", T0 + i * HOUR) for i in (2, 20)]
    populate(store, [make_attribute("a1")], sightings)
    buckets = store.aggregate(T0, T0 + DAY, DAY)
    assert len(buckets) == 1
    assert (buckets[0].seen_count, buckets[0].false_positive_count, buckets[0].expiration_count) == (3, 2, 0)


def test_aggregate_boundary_goes_to_later_bucket(store):
    populate(store, [make_attribute("a1")], [seen("a1", T0 + DAY)])
    buckets = store.aggregate(T0, T0 + 2 * DAY, DAY)
    assert buckets[0].seen_count == 0
    assert buckets[1].seen_count == 1


def test_aggregate_excludes_out_of_range(store):
    populate(
        store,
        [make_attribute("a1")],
        [seen("a1", T0 - 1), seen("a1", T0), seen("a1", T0 + DAY - 1), seen("a1", T0 + DAY)],
    )
    buckets = store.aggregate(T0, T0 + DAY, HOUR)
    assert sum(b.seen_count for b in buckets) == 2


def test_aggregate_validates_window(store):
    with pytest.raises(ValueError):
        store.aggregate(T0, T0, DAY)
    with pytest.raises(ValueError):
        store.aggregate(T0, T0 + DAY, 0)


@settings(max_examples=25, deadline=None)
@given(
    offsets=st.lists(
        st.tuples(st.integers(0, 6 * DAY), st.sampled_from(list(SightingKind))),
        max_size=60,
    ),
    bucket_width=st.sampled_from([HOUR, 6 * HOUR, DAY]),
)
def test_aggregate_conserves_counts(offsets, bucket_width):
    store = SightingStore()
    store.add_attribute(make_attribute("a1"))
    store.ingest(
        [
            {"attribute_id": "a1", "timestamp": T0 + off, "kind": kind.value, "source": str(i)}
            for i, (off, kind) in enumerate(offsets)
        ]
    )
    window = (T0 + DAY, T0 + 5 * DAY)
    buckets = store.aggregate(window[0], window[1], bucket_width)
    in_range = [s for s in store.sightings_for("a1") if window[0] <= s.timestamp < window[1]]
    for kind, field in [
        (SightingKind.SEEN, "seen_count"),
        (SightingKind.FALSE_POSITIVE, "false_positive_count"),
        (SightingKind.EXPIRATION, "expiration_count"),
    ]:
        total = sum(getattr(b, field) for b in buckets)
        assert total == sum(1 for s in in_range if s.kind is kind)


# -- stream readers ------------------------------------------------------------------


def test_read_jsonl_rejects_garbage_line():
    with pytest.raises(StreamError):
        list(read_jsonl('{"a": 1}\nnot json\n'))


def test_read_jsonl_skips_blank_lines():
    records = list(read_jsonl('{"a": 1}\n\n{"b": 2}\n'))
    assert records == [{"a": 1}, {"b": 2}]


def test_read_sightings_csv_requires_header():
    with pytest.raises(StreamError):
        list(read_sightings_csv("attribute_id,timestamp\n"))
    rows = list(
        read_sightings_csv(
            "attribute_id,timestamp,kind,source\na1,100,seen,ids\n"
        )
    )
    assert rows == [{"attribute_id": "a1", "timestamp": "100", "kind": "seen", "source": "ids"}]


def test_ingest_files_jsonl_and_csv(tmp_path, store):
    store.add_attribute(make_attribute("a1"))
    jsonl = tmp_path / "s.jsonl"
    jsonl.write_text(
        json.dumps({"attribute_id": "a1", "timestamp": T0, "kind": "seen", "source": "x"}) + "\n",
        encoding="utf-8",
    )
    csv_file = tmp_path / "s.csv"
    csv_file.write_text(
        "attribute_id,timestamp,kind,source\n"
        f"a1,{T0 + HOUR},seen,ids\n"
        f"ghost,{T0},seen,ids\n",
        encoding="utf-8",
    )
    assert ingest_sightings_file(store, jsonl).accepted == 1
    report = ingest_sightings_file(store, csv_file)
    assert report.accepted == 1
    assert report.rejected == [(3, "unknown_attribute")]  # header is line 1


# -- persistence ------------------------------------------------------------------


def test_wal_replay_round_trip(tmp_path):
    data_dir = tmp_path / "data"
    with SightingStore(data_dir) as store:
        store.add_attribute(make_attribute("a1"))
        store.add_attribute(make_attribute("a2", attr_type="ip-dst"))
        store.ingest([seen("a1", T0 + i * HOUR).to_json_dict() for i in range(3)])
        store.ingest([false_positive("a2", T0 + HOUR).to_json_dict()])
        expected = {aid: [s.key() for s in store.sightings_for(aid)] for aid in ("a1", "a2")}

    with SightingStore(data_dir) as reopened:
        assert reopened.attribute_ids() == ["a1", "a2"]
        for aid, keys in expected.items():
            assert [s.key() for s in reopened.sightings_for(aid)] == keys


def test_wal_replay_tolerates_torn_final_line(tmp_path):
    data_dir = tmp_path / "data"
    with SightingStore(data_dir) as store:
        store.add_attribute(make_attribute("a1"))
        store.ingest([seen("a1", T0).to_json_dict()])
    with open(data_dir / "sightings.jsonl", "a", encoding="utf-8") as fh:
        fh.write('{"attribute_id": "a1", "timesta')  # interrupted append
    with SightingStore(data_dir) as reopened:
        assert len(reopened.sightings_for("a1")) == 1


def test_double_ingest_identical_state(tmp_path):
    data_dir = tmp_path / "data"
    attrs = tmp_path / "attrs.jsonl"
    sights = tmp_path / "sights.jsonl"
    attrs.write_text(json.dumps(make_attribute("a1").to_json_dict()) + "\n", encoding="utf-8")
    sights.write_text(
        "\n".join(json.dumps(seen("a1", T0 + i * HOUR).to_json_dict()) for i in range(4)) + "\n",
        encoding="utf-8",
    )
    with SightingStore(data_dir) as store:
        ingest_attributes_file(store, attrs)
        ingest_sightings_file(store, sights)
        snapshot = [s.key() for s in store.sightings_for("a1")]
        ingest_attributes_file(store, attrs)
        ingest_sightings_file(store, sights)
        assert [s.key() for s in store.sightings_for("a1")] == snapshot


def test_add_attribute_conflicting_fields_rejected(store):
    store.add_attribute(make_attribute("a1"))
    assert store.add_attribute(make_attribute("a1")) is False  # exact duplicate is a no-op
    with pytest.raises(ValueError):
        store.add_attribute(make_attribute("a1", attr_type="domain"))


def test_org_confidence_map_overrides_at_ingestion(store):
    records = [
        make_attribute("a1", source_org="circl", source_confidence=0.2).to_json_dict(),
        make_attribute("a2", source_org="unknown-org", source_confidence=0.2).to_json_dict(),
    ]
    report = store.ingest_attributes(records, org_confidence={"circl": 0.95})
    assert report.accepted == 2
    assert store.get_attribute("a1").source_confidence == 0.95
    assert store.get_attribute("a2").source_confidence == 0.2  # unmapped org keeps its value


def test_org_confidence_out_of_range_rejects_record(store):
    records = [make_attribute("a1", source_org="circl").to_json_dict()]
    report = store.ingest_attributes(records, org_confidence={"circl": 1.5})
    assert report.accepted == 0
    assert report.rejected == [(1, "bad_attribute")]


def test_readers_never_observe_partial_batches():
    import threading

    store = SightingStore()
    store.add_attribute(make_attribute("a1"))
    batch_size = 50
    stop = threading.Event()
    bad_counts = []

    def reader():
        while not stop.is_set():
            total = sum(
                b.seen_count for b in store.aggregate(T0, T0 + 10 * DAY, DAY)
            )
            if total % batch_size:
                bad_counts.append(total)

    thread = threading.Thread(target=reader)
    thread.start()
    try:
        for batch in range(8):
            records = [
                {
                    "attribute_id": "a1",
                    "timestamp": T0 + batch * HOUR * 3 + i,
                    "kind": "seen",
                    "source": f"b{batch}",
                }
                for i in range(batch_size)
            ]
            store.ingest(records)
    finally:
        stop.set()
        thread.join()
    assert bad_counts == []
