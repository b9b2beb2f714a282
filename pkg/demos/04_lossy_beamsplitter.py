"""
A beamsplitter with a phase defect
==================================

A splitter whose two outputs differ by an extra phase delta is not unitary.
It is physically allowed only if it also loses at least R_min of the light.
"""

import math

import numpy as np

from twocolour import DetectionPattern, Scenario, min_loss_for_delta, scan_fringe, visibility
from twocolour.elements import beamsplitter_block

for delta in (0.0, -0.04, 0.26, 1.0):
    block = beamsplitter_block(delta)
    r = min_loss_for_delta(delta)
    gain = np.linalg.norm(block, 2) ** 2
    print(f"delta={delta:+.2f}  largest power gain={gain:.4f}  R_min={r:.4f}  scaled gain={gain * (1 - r):.4f}")

# The defect shifts the two-photon fringes by half the relevant phase.
theta = np.linspace(0, 2 * math.pi, 40001)
for text in ("s:1,0 i:0,1", "s:0,1 i:1,0", "s:0,1 i:0,1"):
    scan = scan_fringe(Scenario(m=2), DetectionPattern.parse(text), theta)
    print(f"[{text}] peak at theta={theta[np.argmax(scan.values)] % math.pi:.4f}  V={visibility(scan).visibility:.4f}")

# The four-photon (1,1)(1,1) fringe still reaches zero, so its visibility
# stays 1. The sin*sin offset makes alternate peaks unequal instead.
half = np.linspace(0, math.pi, 4001)
for ds, di in ((0.0, 0.0), (0.26, -0.04), (1.0, 1.0)):
    scan = scan_fringe(Scenario(m=4, delta_s=ds, delta_i=di), DetectionPattern.parse("s:1,1 i:1,1"), half)
    first, second = scan.values[half < math.pi / 2].max(), scan.values[half >= math.pi / 2].max()
    print(f"delta=({ds:+.2f}, {di:+.2f})  peaks {first:.4f} and {second:.4f}  min {scan.values.min():.1e}")
