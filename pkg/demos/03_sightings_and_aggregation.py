"""Sighting streams: timelines, expiration overrides, and daily aggregation.

Run:  python3 demos/03_sightings_and_aggregation.py
"""

from ioc_decay import Attribute, DecayProfile, SightingStore, evaluate

HOUR = 3600
DAY = 24 * HOUR
T0 = 1_700_000_000

store = SightingStore()  # pass a directory for JSONL persistence
store.add_attribute(
    Attribute(
        id="phish-1", attr_type="url", category="Network activity",
        value="http://login.example.bad/", source_confidence=0.9, first_seen=T0,
    )
)

# Sightings arrive as JSON records from IDS instances, scripts, or analysts.
records = [
    {"attribute_id": "phish-1", "timestamp": T0 + h * HOUR, "kind": "seen", "source": "ids-a"}
    for h in (0, 5, 9, 30, 31, 55)
]
records += [
    {"attribute_id": "phish-1", "timestamp": T0 + 26 * HOUR, "kind": "false_positive",
     "source": "analyst"},
    {"attribute_id": "phish-1", "timestamp": T0 + 60 * HOUR, "kind": "expiration",
     "source": "takedown-team"},
    {"attribute_id": "nobody", "timestamp": T0, "kind": "seen", "source": "ids-a"},
]
report = store.ingest(records)
print(f"ingest: accepted={report.accepted} rejected={report.rejected}")

tl = store.timeline("phish-1")
print(f"\ntimeline: n={tl.n} span={(tl.tn - tl.t0) / 3600:.0f} h max_gap={tl.max_gap_hours:.0f} h")
print("last seen before +40 h:", (store.last_seen('phish-1', T0 + 40 * HOUR) - T0) // HOUR, "h")

# The takedown team filed an expiration at +60 h; measured from the last seen
# sighting before it (+55 h) that leaves a 5-hour end-time override.
override = store.expiration_override("phish-1", T0 + 61 * HOUR)
print(f"expiration override: {override:.1f} h")

profile = DecayProfile(
    attr_type="url", model="polynomial", tau_hours=120.0, delta=0.737,
    weight_tg=0.0, omega_sc=100.0, threshold=0.0,
)
at = T0 + 58 * HOUR
scored = evaluate(
    store.get_attribute("phish-1"), profile,
    store.last_seen("phish-1", at), at,
    tau_override=store.expiration_override("phish-1", at),
)
print(f"score at +58 h (no override yet): {scored.score:.2f}")
at = T0 + 61 * HOUR
scored = evaluate(
    store.get_attribute("phish-1"), profile,
    store.last_seen("phish-1", at), at,
    tau_override=store.expiration_override("phish-1", at),
)
print(f"score at +61 h (override active): {scored.score:.2f} expired={scored.expired}")

# Aggregation powers the weekly activity chart: one bucket per day, three
# counters per bucket.
print("\ndaily aggregation over the first 3 days:")
print("  day  seen  false_positive  expiration")
for i, bucket in enumerate(store.aggregate(T0, T0 + 3 * DAY, DAY)):
    print(f"  {i:>3}  {bucket.seen_count:>4}  {bucket.false_positive_count:>14}"
          f"  {bucket.expiration_count:>10}")
