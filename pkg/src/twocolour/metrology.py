"""Path-length sensitivity: Cramer-Rao bounds, Fisher information and baselines."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import constants

from .detection import (
    DetectionPattern,
    FringeScan,
    harmonic_analysis,
    period_mean,
    parallel_map,
    pattern_distribution,
    pattern_probability,
)
from .fock import FockState, Path, apply_number_operator, inner_product
from .scenario import Scenario

FD_STEP = 1e-5
EPS = 1e-12


class SensitivityError(ValueError):
    pass


class DegeneratePointError(SensitivityError):
    pass


def hamiltonian_variance(state: FockState, path: Path = Path.B) -> float:
    """Variance of ``sum_k omega_k n_k / c`` over the modes of the sample arm."""
    if abs(state.norm() - 1.0) > 1e-8:
        raise SensitivityError(f"state must be normalised (norm {state.norm():.12g})")
    reg = state.registry
    weights = {m: reg.frequency(m) / reg.c for m in reg.select(path=path)}
    h = apply_number_operator(state, weights)
    mean = inner_product(state, h).real
    second = inner_product(h, h).real
    return max(second - mean**2, 0.0)


def qcrb(state: FockState, nu: int = 1, path: Path = Path.B) -> float:
    """Quantum Cramer-Rao bound on the path length, ``1 / (2 sqrt(nu) dH_L)``."""
    var = hamiltonian_variance(state, path)
    if var <= 0.0:
        raise SensitivityError("zero generator variance: the state carries no path-length information")
    return 1.0 / (2.0 * math.sqrt(nu) * math.sqrt(var))


@dataclass(frozen=True)
class Baselines:
    sql_dL: float
    heisenberg_dL: float
    energy_sql_dL: float
    N: float
    E: float
    omega: float


def baselines(N: float, omega: float, E: float | None = None, units: str = "natural") -> Baselines:
    """Shot-noise and Heisenberg path-length limits for ``N`` photons at ``omega``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    c, hbar = (1.0, 1.0) if units == "natural" else (constants.c, constants.hbar)
    E = N * hbar * omega if E is None else E
    if E <= 0:
        raise ValueError("energy must be positive")
    return Baselines(
        sql_dL=c / (omega * math.sqrt(N)),
        heisenberg_dL=c / (omega * N),
        energy_sql_dL=math.sqrt(c**2 * hbar / (omega * E)),
        N=N,
        E=E,
        omega=omega,
    )


@dataclass(frozen=True)
class SensitivityReport:
    dH_L: float | None
    qcrb_dL: float | None
    fisher_info: float | None
    dL: float
    dL_over_sql: float
    nu: int = 1
    best_theta: float | None = None
    length_unit: str = "c/omega_p"

    def to_dict(self) -> dict:
        units = {
            "dH_L": f"1/({self.length_unit})",
            "qcrb_dL": self.length_unit,
            "fisher_info": "1/rad^2",
            "dL": self.length_unit,
            "dL_over_sql": "dimensionless",
            "nu": "repetitions",
            "best_theta": "rad",
        }
        return {k: {"value": v, "unit": units[k]} for k, v in asdict(self).items() if k in units}


def _sql(registry, photons: float) -> float:
    return registry.c / (registry.omega_pump * math.sqrt(photons))


def state_sensitivity(state: FockState, photons: int, nu: int = 1) -> SensitivityReport:
    """QCRB of ``state`` against ``photons`` photons at the pump frequency."""
    var = hamiltonian_variance(state)
    dL = qcrb(state, nu)
    unit = "c/omega_p" if state.registry.c == 1.0 else "m"
    return SensitivityReport(
        math.sqrt(var), dL, None, dL, dL / _sql(state.registry, photons * nu), nu, None, unit
    )


def _probabilities(scenario: Scenario, theta: float, patterns) -> dict:
    out = scenario.output(theta, physical=True)
    if patterns is None:
        probs = pattern_distribution(out)
    else:
        probs = {p: pattern_probability(out, p) for p in patterns}
    probs[None] = max(1.0 - sum(probs.values()), 0.0)
    return probs


def classical_fisher(
    scenario: Scenario,
    theta: float,
    patterns: Iterable[DetectionPattern] | None = None,
    step: float = FD_STEP,
) -> float:
    """Fisher information about the phase from counting ``patterns``.

    Everything not in ``patterns`` (other patterns, lost photons) is pooled
    into one extra outcome. A non-unitary beamsplitter is given the minimal
    loss it physically requires so that the outcomes form a proper
    measurement. ``None`` means every distinguishable pattern.
    """
    if patterns is not None:
        patterns = list(patterns)
        # the pooled outcome must not change with the pattern order
        patterns = sorted(set(patterns), key=str)
    p0 = _probabilities(scenario, theta, patterns)
    if max(p for k, p in p0.items() if k is not None) <= EPS:
        raise DegeneratePointError(f"all pattern probabilities vanish at theta={theta}")
    plus = _probabilities(scenario, theta + step, patterns)
    minus = _probabilities(scenario, theta - step, patterns)
    total = 0.0
    for key, p in p0.items():
        if p > EPS:
            deriv = (plus.get(key, 0.0) - minus.get(key, 0.0)) / (2 * step)
            total += deriv**2 / p
    return total


def fisher_scan(scenario: Scenario, grid: Sequence[float], patterns=None) -> np.ndarray:
    def at(theta):
        try:
            return classical_fisher(scenario, theta, patterns)
        except DegeneratePointError:
            return 0.0

    return np.array(parallel_map(at, list(grid)))


def fisher_to_dL(fisher: float, registry, nu: int = 1) -> float:
    """Path-length uncertainty from phase Fisher information, ``theta = L omega_p / c``."""
    if fisher <= 0:
        raise SensitivityError("zero Fisher information")
    return registry.c / (registry.omega_pump * math.sqrt(nu * fisher))


def scenario_sensitivity(scenario: Scenario, patterns=None, grid: Sequence[float] | None = None) -> SensitivityReport:
    """Best classical-Fisher sensitivity of a scenario over the phase grid."""
    grid = scenario.theta_grid.values() if grid is None else np.asarray(grid)
    fisher = fisher_scan(scenario, grid, patterns)
    best = int(np.argmax(fisher))
    reg = scenario.registry
    dL = fisher_to_dL(fisher[best], reg, scenario.nu)
    dH = q = None
    comps = scenario.input_state.components
    if len(comps) == 1:
        dH = math.sqrt(hamiltonian_variance(comps[0][1]))
        q = qcrb(comps[0][1], scenario.nu)
    unit = "c/omega_p" if reg.c == 1.0 else "m"
    return SensitivityReport(
        dH, q, float(fisher[best]), dL, dL / _sql(reg, scenario.photons * scenario.nu), scenario.nu, float(grid[best]), unit
    )


def fringe_derivative(theta: np.ndarray, values: np.ndarray) -> np.ndarray:
    """d(values)/d(theta), exact for trigonometric-polynomial fringes.

    Falls back to second-order finite differences when the harmonic fit
    does not reproduce the data.
    """
    weights, residual = harmonic_analysis(theta, values)
    if residual <= 1e-12 * max(float(np.abs(values).max()), 1.0):
        return sum(k * (b * np.cos(k * theta) - a * np.sin(k * theta)) for k, (a, b) in weights.items())
    return np.gradient(values, theta, edge_order=2)


def bernoulli_fisher(q: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Fisher information of a detect / no-detect outcome with probability ``q(theta)``."""
    dq = fringe_derivative(theta, q)
    denom = q * (1.0 - q)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(denom > EPS, dq**2 / denom, 0.0)
    return f


def fringe_sensitivity(scan: FringeScan, m: int | None = None, nu: int = 1) -> SensitivityReport:
    """Sensitivity from monitoring a single fringe.

    The fringe is rescaled so its mean equals its intrinsic efficiency (the
    background-free mean probability of the pattern), which turns a flat
    background into a loss of visibility at fixed efficiency. The outcome is
    then treated as detect / no-detect.
    """
    m = scan.m if m is None else m
    if not m:
        raise SensitivityError("photon number m is required")
    mean = period_mean(scan.theta, scan.values)
    eff = scan.efficiency if scan.efficiency is not None else mean - scan.background
    if mean <= 0 or np.ptp(scan.values) <= EPS * max(mean, 1.0):
        raise SensitivityError("flat fringe carries no phase information")
    q = np.clip(scan.values * (eff / mean), 0.0, 1.0)
    fisher = bernoulli_fisher(q, scan.theta)
    best = int(np.argmax(fisher))
    if fisher[best] <= 0:
        raise SensitivityError("flat fringe carries no phase information")
    dL = 1.0 / math.sqrt(nu * fisher[best])
    qc = 1.0 / (2 * math.sqrt(nu) * scan.dH_L) if scan.dH_L else None
    return SensitivityReport(scan.dH_L, qc, float(fisher[best]), dL, dL * math.sqrt(m * nu), nu, float(scan.theta[best]))


def combined_estimate(ratios: Sequence[float], multiplicities: Sequence[int]) -> float:
    """Combine per-fringe ``dL/SQL`` values by adding their Fisher information."""
    total = sum(k / r**2 for r, k in zip(ratios, multiplicities))
    return 1.0 / math.sqrt(total)
