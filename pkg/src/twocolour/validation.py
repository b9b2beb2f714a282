"""Numerical propagation checked against the analytic output states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detection import DELTA_COVERED, DetectionPattern, closed_form_amplitudes, closed_form_probability, pattern_probability
from .scenario import Scenario, ThetaGrid

MEASURED_DELTA = (0.26, -0.04)
TOLERANCE = 1e-10


@dataclass(frozen=True)
class Check:
    m: int
    pattern: str
    delta_s: float
    delta_i: float
    max_deviation: float
    worst_theta: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= TOLERANCE

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} m={self.m} [{self.pattern}] delta=({self.delta_s:+.2f},{self.delta_i:+.2f}) "
            f"max_dev={self.max_deviation:.3e} at theta={self.worst_theta:.6f}"
        )


def run_validation(
    cutoff: int = 6,
    grid: ThetaGrid = ThetaGrid(),
    deltas=((0.0, 0.0), MEASURED_DELTA),
    delta_sign: float = 1.0,
) -> list[Check]:
    """Compare simulated and analytic pattern probabilities for m = 2, 4, 6.

    ``delta_sign = -1`` simulates with mirrored beamsplitter defects while
    keeping the analytic reference unchanged (a deliberate fault).

    Raises:
        TruncationError: ``cutoff`` is too small for the six-photon sector.
    """
    thetas = grid.values()
    checks = []
    for ds, di in deltas:
        for m in (2, 4, 6):
            sim = Scenario(m=m, delta_s=delta_sign * ds, delta_i=delta_sign * di, cutoff=cutoff)
            if ds == 0.0 and di == 0.0:
                keys = list(closed_form_amplitudes(m, 0.0))
            else:
                keys = DELTA_COVERED[m]
            patterns = [DetectionPattern.two_colour(*k) for k in keys]
            dev = np.zeros((len(patterns), len(thetas)))
            for j, theta in enumerate(thetas):
                out = sim.output(float(theta))
                for i, pat in enumerate(patterns):
                    dev[i, j] = abs(pattern_probability(out, pat) - closed_form_probability(m, pat, theta, ds, di))
            for i, pat in enumerate(patterns):
                j = int(np.argmax(dev[i]))
                checks.append(Check(m, str(pat), ds, di, float(dev[i, j]), float(thetas[j])))
    return checks
