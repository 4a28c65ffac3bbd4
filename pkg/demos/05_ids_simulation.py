"""Replaying an IDS rule table that consumes decayed scores.

Run:  python3 demos/05_ids_simulation.py
"""

from ioc_decay import (
    DecayProfile,
    SightingStore,
    SimulationConfig,
    SyntheticConfig,
    build_distribution,
    fit,
    generate,
    simulate,
)
from ioc_decay.simulator import export_series

HOUR = 3600
DAY = 24 * HOUR

cfg = SyntheticConfig(seed=7, n_attributes=2000)
attributes, sightings = generate(cfg)
store = SightingStore()
for attr in attributes:
    store.add_attribute(attr)
store.ingest([s.to_json_dict() for s in sightings])

# Fit the decay profile from the data itself, then let a simulated IDS
# consume it: rules enter on the first sighting, decay between sightings,
# and are dropped once the score crosses the removal threshold.
fitted = fit(build_distribution(store, "url", outlier_cutoff_hours=168.0))
profile = DecayProfile(
    attr_type="url", model="polynomial",
    tau_hours=fitted.tau_hours, delta=fitted.delta,
    weight_tg=50.0, omega_sc=50.0, threshold=0.0,
)
print(f"profile from fit: tau={profile.tau_hours:.1f} h delta={profile.delta:.3f}")

sim_cfg = SimulationConfig(
    start=cfg.window_start,
    end=cfg.window_start + 60 * DAY,   # two months
    profile=profile,
    tick_hours=1.0,
    removal_threshold=0.0,
)
result = simulate(store, store.attributes("url"), sim_cfg)

total = result.total_removals
print(f"\nremovals over two months: {total}")
print(f"  correct   {result.correct_removals:>6}  ({result.correct_fraction:6.1%})")
print(f"  premature {result.premature_removals:>6}  ({result.premature_fraction:6.1%})")

# A premature removal means the rule was dropped while genuine sightings were
# still ahead. The fitted profile survives every gap in this feed; an
# impatient one (tau squeezed to a day) starts cutting rules mid-campaign.
for tau in (96.0, 48.0, 24.0):
    impatient = DecayProfile(
        attr_type="url", model="polynomial", tau_hours=tau, delta=profile.delta,
        weight_tg=50.0, omega_sc=50.0, threshold=0.0,
    )
    alt = simulate(store, store.attributes("url"), SimulationConfig(
        start=sim_cfg.start, end=sim_cfg.end, profile=impatient, tick_hours=1.0,
    ))
    print(f"tau {tau:>5.0f} h: correct {alt.correct_fraction:6.1%} "
          f"premature {alt.premature_fraction:6.1%} of {alt.total_removals}")

series_csv = export_series(result).splitlines()
print(f"\ntick series: {len(series_csv) - 1} rows, e.g.")
for row in series_csv[:4]:
    print(" ", row)
