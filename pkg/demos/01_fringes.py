"""
Super-resolved fringes
======================

Scan the path length of arm b and watch the coincidence fringes of the
m-photon states speed up with photon number.
"""

import math

import numpy as np

from twocolour import DetectionPattern, Scenario, ThetaGrid, scan_fringe, visibility

grid = ThetaGrid(0.0, 2 * math.pi, 721)

# A single pump photon gives the ordinary fringe with period 2 pi.
classical = visibility(scan_fringe(Scenario(mode="classical", theta_grid=grid), DetectionPattern.parse("p:1,0")))
print(f"classical fringe period      {classical.period:.4f}")

# One signal-idler pair: the anti-bunched coincidence oscillates twice as fast.
two = scan_fringe(Scenario(m=2, delta_s=0, delta_i=0, theta_grid=grid), DetectionPattern.parse("s:1,0 i:0,1"))
print(f"two-photon fringe period     {visibility(two).period:.4f}")

# Two pairs: (1,1)(1,1) oscillates at four times the classical rate.
ideal4 = Scenario(m=4, delta_s=0, delta_i=0, theta_grid=grid)
for text in ("s:1,1 i:1,1", "s:2,0 i:1,1", "s:2,0 i:0,2"):
    rep = visibility(scan_fringe(ideal4, DetectionPattern.parse(text)))
    harmonics = ", ".join(f"{k}:{rep.amplitude(k):.4f}" for k in sorted(rep.harmonic_weights))
    print(f"four-photon [{text}]  V={rep.visibility:.3f}  period={rep.period:.4f}  harmonics {harmonics}")

# Three pairs: the (2,1)(2,1) probability carries even harmonics up to 6 theta.
six = visibility(scan_fringe(Scenario(m=6, delta_s=0, delta_i=0, theta_grid=grid), DetectionPattern.parse("s:2,1 i:2,1")))
print("six-photon [s:2,1 i:2,1] harmonic amplitudes x64:", {k: round(64 * six.amplitude(k), 6) for k in sorted(six.harmonic_weights)})

# A coarse text plot of the four-photon (2,0)(0,2) fringe.
# Its minima are flat and its maxima are sharp.
scan = scan_fringe(ideal4, DetectionPattern.parse("s:2,0 i:0,2"), np.linspace(0, math.pi, 25))
for t, p in zip(scan.theta, scan.values):
    print(f"{t:5.2f} {'#' * int(round(p / scan.values.max() * 40))}")
