"""Tour of the three decay shapes and the two worked example profiles.

Run:  python3 demos/01_decay_curves.py
"""

from ioc_decay import (
    delta_for_half_life,
    half_life,
    score_exponential,
    score_linear,
    score_polynomial,
)

BASE = 80.0

# A linear clock loses the same amount every hour: with rate 2 an indicator
# born at 80 is worthless after 40 hours, no matter what else happens.
print("linear, rate 2 points/hour")
for t in (0, 10, 20, 30, 40, 50):
    print(f"  t={t:>3} h   score={score_linear(BASE, 2.0, t):6.2f}")

# The exponential version front-loads the loss but never actually reaches 0,
# so a pure threshold of zero would keep rules alive forever.
print("\nexponential, rate 0.05/hour")
for t in (0, 10, 20, 40, 80, 160):
    print(f"  t={t:>3} h   score={score_exponential(BASE, 0.05, t):6.2f}")

# The polynomial model separates the two knobs: tau pins when the score hits
# zero, delta shapes how fast it sinks early on.
print("\npolynomial, tau=120 h, three decay speeds")
for delta in (0.3, 1.0, 3.0):
    row = [f"{score_polynomial(BASE, 120.0, delta, t):6.2f}" for t in (0, 12, 60, 108, 120)]
    print(f"  delta={delta:<4}  " + "  ".join(row))

# Worked example 1: a compromised webserver IP. The hosting ISP allows one
# week before null-routing (tau = 168 h) and blacklists typically propagate
# within two days, so we ask for a 48-hour half-life and derive delta.
delta1 = delta_for_half_life(168.0, 48.0)
print(f"\nexample 1: tau=168 h, half-life 48 h  ->  delta = {delta1:.4f}")
for t in (0, 24, 48, 96, 168):
    print(f"  t={t:>3} h   score={score_polynomial(BASE, 168.0, delta1, t):6.2f}")

# Worked example 2: a malware file hash, worthless after two months but with
# a very slow start. Small delta means the curve stays flat early.
print("\nexample 2: tau=1440 h (60 days), delta=0.3")
print(f"  half-life = {half_life(1440.0, 0.3):.1f} h")
for t in (0, 240, 720, 1169.6, 1440):
    print(f"  t={t:>7.1f} h   score={score_polynomial(BASE, 1440.0, 0.3, t):6.2f}")
