"""
Photon-number distributions in one arm
======================================

The entangled eight-photon state spreads its photons evenly over the even
numbers, independent pairs give a binomial, and the Holland-Burnett state
piles weight into the wings.
"""

from twocolour import Path, Scenario

m = 8
columns = {}
for mode in ("entangled", "distinguishable", "holland_burnett"):
    ens = Scenario(m=m, mode=mode).input_state
    columns[mode] = ens.number_distribution(ens.registry.select(path=Path.A))

print(" n   flat     binomial   Holland-Burnett")
for n in range(m + 1):
    row = [columns[k].get(n, 0.0) for k in ("entangled", "distinguishable", "holland_burnett")]
    print(f"{n:2d}   {row[0]:.4f}   {row[1]:.4f}     {row[2]:.4f}")

for mode, dist in columns.items():
    print(f"{mode:16s} P(0)+P(8) = {dist.get(0, 0) + dist.get(m, 0):.4f}")
