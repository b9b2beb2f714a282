"""Small adapters between package states and the (s1, s2, i1, i2) keys used in tests."""

from __future__ import annotations

import cmath

from twocolour.detection import PORTS, _port_groups
from twocolour.fock import Colour

KEYS = [(c, p) for c in (Colour.SIGNAL, Colour.IDLER) for p in PORTS]


def output_amplitudes(scenario, theta: float) -> dict:
    """Output amplitudes of a pure scenario keyed by port counts, global phase removed."""
    ((_, state),) = scenario.output(theta).components
    groups = _port_groups(state, KEYS)
    out = {}
    for occ, amp in state:
        key = tuple(sum(occ[k] for k in g) for g in groups)
        out[key] = out.get(key, 0) + amp * cmath.exp(1j * scenario.m * theta / 2)
    return out


def term_phases(scenario, closed_form, theta: float = 0.7) -> dict:
    """Constant unit phase between each simulated term and its closed form."""
    sim, ref = output_amplitudes(scenario, theta), closed_form(scenario.m, theta)
    return {k: sim[k] / ref[k] for k in ref if abs(ref[k]) > 1e-6}
