"""Detection patterns, fringe scans, visibility and harmonic analysis.

Also holds the analytic output-state expansions for two, four and six
photons, used as independent checks on the numerical propagation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fock import Colour, FockState, Path, UnknownModeError
from .scenario import Scenario
from .sources import PairEnsemble

THREADS_ENV = "TWOCOLOUR_THREADS"

_CODE = {Colour.SIGNAL: "s", Colour.IDLER: "i", Colour.PUMP: "p"}
_FROM_CODE = {v: k for k, v in _CODE.items()}
PORTS = (Path.OUT1, Path.OUT2)


class PatternError(ValueError):
    pass


class UnsupportedPatternError(PatternError):
    pass


class InsufficientSpanError(ValueError):
    pass


@dataclass(frozen=True)
class DetectionPattern:
    """Photon counts per ``(colour, output port)``.

    Written ``"s:2,0 i:1,1"``: two signal photons at output 1, none at
    output 2, one idler photon at each output.
    """

    counts: tuple[tuple[Colour, Path, int], ...]

    def __post_init__(self):
        seen = set()
        for colour, port, n in self.counts:
            if port not in PORTS or colour not in _CODE:
                raise PatternError(f"patterns count photons per colour at out1/out2, got {colour}, {port}")
            if n < 0 or int(n) != n:
                raise PatternError("photon counts must be non-negative integers")
            if (colour, port) in seen:
                raise PatternError(f"{colour.value}:{port.value} listed twice")
            seen.add((colour, port))
        order = lambda t: (list(_CODE).index(t[0]), PORTS.index(t[1]))
        object.__setattr__(self, "counts", tuple(sorted(self.counts, key=order)))

    @classmethod
    def from_mapping(cls, counts: Mapping[tuple[Colour, Path], int]) -> DetectionPattern:
        return cls(tuple((c, p, n) for (c, p), n in counts.items()))

    @classmethod
    def two_colour(cls, s1: int, s2: int, i1: int, i2: int) -> DetectionPattern:
        return cls.from_mapping(
            {
                (Colour.SIGNAL, Path.OUT1): s1,
                (Colour.SIGNAL, Path.OUT2): s2,
                (Colour.IDLER, Path.OUT1): i1,
                (Colour.IDLER, Path.OUT2): i2,
            }
        )

    @classmethod
    def parse(cls, text: str) -> DetectionPattern:
        counts = {}
        tokens = text.replace(";", " ").split()
        if not tokens:
            raise PatternError("empty detection pattern")
        for token in tokens:
            code, sep, body = token.partition(":")
            if not sep or code not in _FROM_CODE:
                raise PatternError(f"cannot parse pattern token {token!r}; expected e.g. 's:1,0'")
            try:
                n1, n2 = (int(x) for x in body.split(","))
            except ValueError:
                raise PatternError(f"cannot parse counts in {token!r}; expected two integers") from None
            colour = _FROM_CODE[code]
            if (colour, Path.OUT1) in counts:
                raise PatternError(f"colour {code} listed twice")
            counts[(colour, Path.OUT1)] = n1
            counts[(colour, Path.OUT2)] = n2
        return cls.from_mapping(counts)

    def __str__(self) -> str:
        by_colour: dict[Colour, list[int]] = {}
        for colour, port, n in self.counts:
            by_colour.setdefault(colour, [0, 0])[PORTS.index(port)] = n
        return " ".join(f"{_CODE[c]}:{a},{b}" for c, (a, b) in by_colour.items())

    @property
    def total(self) -> int:
        return sum(n for _, _, n in self.counts)

    def key(self) -> tuple[int, ...]:
        """Counts in (s1, s2, i1, i2) order for two-colour patterns."""
        return tuple(n for _, _, n in self.counts)


def _port_groups(state: FockState, keys: Iterable[tuple[Colour, Path]]) -> list[list[int]]:
    reg = state.registry
    groups = []
    for colour, port in keys:
        idx = [reg.index(m) for m in reg.select(colour, port)]
        if not idx:
            raise UnknownModeError(f"{colour.value}:{port.value}")  # type: ignore[arg-type]
        groups.append(idx)
    return groups


def pattern_probability(state: FockState | PairEnsemble, pattern: DetectionPattern) -> float:
    """Probability of ``pattern``, summed over distinguishability labels and
    ancilla occupations. Not renormalised after a non-unitary beamsplitter."""
    if isinstance(state, PairEnsemble):
        return sum(w * pattern_probability(s, pattern) for w, s in state.components)
    groups = _port_groups(state, [(c, p) for c, p, _ in pattern.counts])
    want = [n for _, _, n in pattern.counts]
    total = 0.0
    for occ, amp in state:
        if all(sum(occ[k] for k in g) == n for g, n in zip(groups, want)):
            total += abs(amp) ** 2
    return total


def pattern_distribution(state: FockState | PairEnsemble) -> dict[DetectionPattern, float]:
    """Probability of every detected pattern over the output ports present."""
    if isinstance(state, PairEnsemble):
        dist: dict[DetectionPattern, float] = defaultdict(float)
        for w, s in state.components:
            for pat, p in pattern_distribution(s).items():
                dist[pat] += w * p
        return dict(dist)
    reg = state.registry
    keys = [(c, p) for c in _CODE for p in PORTS if reg.select(c, p)]
    groups = _port_groups(state, keys)
    raw: dict[tuple[int, ...], float] = defaultdict(float)
    for occ, amp in state:
        raw[tuple(sum(occ[k] for k in g) for g in groups)] += abs(amp) ** 2
    return {
        DetectionPattern(tuple((c, p, n) for (c, p), n in zip(keys, counts))): prob for counts, prob in raw.items()
    }


# Output-state expansions after a lossless balanced beamsplitter, keyed by
# (s1, s2, i1, i2), with the global phase removed.
def closed_form_amplitudes(m: int, theta: float) -> dict[tuple[int, int, int, int], float]:
    c, s = math.cos, math.sin
    t = theta
    if m == 2:
        return {
            (1, 0, 1, 0): c(t) / math.sqrt(2),
            (1, 0, 0, 1): s(t) / math.sqrt(2),
            (0, 1, 1, 0): s(t) / math.sqrt(2),
            (0, 1, 0, 1): c(t) / math.sqrt(2),
        }
    if m == 4:
        plus = (c(2 * t) + 1) / (2 * math.sqrt(3))
        minus = (c(2 * t) - 1) / (2 * math.sqrt(3))
        odd = s(2 * t) / math.sqrt(6)
        return {
            (2, 0, 2, 0): plus,
            (2, 0, 1, 1): odd,
            (2, 0, 0, 2): minus,
            (1, 1, 2, 0): odd,
            (1, 1, 1, 1): c(2 * t) / math.sqrt(3),
            (1, 1, 0, 2): odd,
            (0, 2, 2, 0): minus,
            (0, 2, 1, 1): odd,
            (0, 2, 0, 2): plus,
        }
    if m == 6:
        r3 = math.sqrt(3)
        outer = (c(3 * t) + 3 * c(t)) / 8
        edge_s = (r3 * s(3 * t) + r3 * s(t)) / 8
        edge_c = (r3 * c(3 * t) - r3 * c(t)) / 8
        corner = (s(3 * t) - 3 * s(t)) / 8
        inner_c = (3 * c(3 * t) + c(t)) / 8
        inner_s = (3 * s(3 * t) - s(t)) / 8
        return {
            (3, 0, 3, 0): outer,
            (3, 0, 2, 1): edge_s,
            (3, 0, 1, 2): edge_c,
            (3, 0, 0, 3): corner,
            (2, 1, 3, 0): edge_s,
            (2, 1, 2, 1): inner_c,
            (2, 1, 1, 2): inner_s,
            (2, 1, 0, 3): edge_c,
            (1, 2, 3, 0): edge_c,
            (1, 2, 2, 1): inner_s,
            (1, 2, 1, 2): inner_c,
            (1, 2, 0, 3): edge_s,
            (0, 3, 3, 0): corner,
            (0, 3, 2, 1): edge_c,
            (0, 3, 1, 2): edge_s,
            (0, 3, 0, 3): outer,
        }
    raise UnsupportedPatternError(f"no closed form for m={m}")


def _delta_forms(m: int, key: tuple[int, ...], t: float, ds: float, di: float) -> float | None:
    c, s = math.cos, math.sin
    half = (ds + di) / 2
    if m == 2:
        return {
            (1, 0, 1, 0): 0.5 * c(t) ** 2,
            (1, 0, 0, 1): 0.5 * s(t - di / 2) ** 2,
            (0, 1, 1, 0): 0.5 * s(t - ds / 2) ** 2,
            (0, 1, 0, 1): 0.5 * c(t - half) ** 2,
        }.get(key)
    if m == 4 and key == (1, 1, 1, 1):
        # minus sign: the only sign consistent with the two-photon offsets
        return (c(2 * t - half) - s(ds / 2) * s(di / 2)) ** 2 / 3
    if m == 4 and key == (2, 0, 1, 1):
        return (s(2 * t - di / 2) - s(di / 2)) ** 2 / 6
    if m == 6 and key == (2, 1, 2, 1):
        slow = (4 - 2 * c(ds) - 2 * c(di) + c(ds + di)) * c(t - half)
        skew = (2 * s(ds) + 2 * s(di) - s(ds + di)) * s(t - half)
        return (3 * c(3 * t - half) + slow + skew) ** 2 / 64
    return None


DELTA_COVERED = {
    2: [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)],
    4: [(1, 1, 1, 1), (2, 0, 1, 1)],
    6: [(2, 1, 2, 1)],
}


def closed_form_probability(
    m: int, pattern: DetectionPattern | tuple[int, int, int, int], theta: float, delta_s: float = 0.0, delta_i: float = 0.0
) -> float:
    """Analytic probability of a two-colour pattern for the ideal m-photon state.

    Raw (unnormalised) when ``delta`` is non-zero. Prefactors are those of the
    lossless expansions so the ``delta -> 0`` limits agree.
    """
    key = pattern.key() if isinstance(pattern, DetectionPattern) else tuple(pattern)
    if m not in (2, 4, 6):
        raise UnsupportedPatternError(f"closed forms exist only for m in (2, 4, 6), got {m}")
    value = _delta_forms(m, key, theta, delta_s, delta_i)
    if value is not None:
        return value
    if delta_s == 0.0 and delta_i == 0.0:
        table = closed_form_amplitudes(m, theta)
        if key in table:
            return table[key] ** 2
        if sum(key) == m and len(key) == 4:
            return 0.0
    raise UnsupportedPatternError(f"no closed form for pattern {key} at m={m} with delta != 0")


@dataclass(frozen=True)
class FringeScan:
    theta: np.ndarray
    values: np.ndarray
    pattern: str
    background: float = 0.0
    efficiency: float | None = None
    m: int | None = None
    dH_L: float | None = None

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "values", values)
        if theta.ndim != 1 or theta.shape != values.shape:
            raise ValueError("theta and values must be 1-d arrays of equal length")
        if len(theta) == 0:
            raise ValueError("empty theta grid")
        if np.any(np.diff(theta) <= 0):
            raise ValueError("theta grid must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("probabilities must be non-negative")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta", "probability"])
        for t, v in zip(self.theta, self.values):
            writer.writerow([repr(float(t)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, pattern: str = "") -> FringeScan:
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["theta", "probability"]:
            raise ValueError("unexpected CSV header")
        data = np.array([[float(x) for x in r] for r in rows[1:]])
        return cls(data[:, 0], data[:, 1], pattern)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "theta": [float(x) for x in self.theta],
            "probability": [float(x) for x in self.values],
            "background": self.background,
            "efficiency": self.efficiency,
            "m": self.m,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FringeScan:
        return cls(
            np.array(d["theta"]), np.array(d["probability"]), d["pattern"], d["background"], d.get("efficiency"), d.get("m")
        )


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Sequence) -> list:
    """Map in grid order, threaded when ``TWOCOLOUR_THREADS`` > 1."""
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def scan_fringe(
    scenario: Scenario,
    pattern: DetectionPattern | Sequence[DetectionPattern],
    theta_grid: Sequence[float] | None = None,
    renormalize: bool = False,
    physical: bool = False,
) -> FringeScan:
    """Probability of ``pattern`` (or of any of several patterns) across a phase grid.

    The scenario's flat background is added after propagation.
    """
    patterns = [pattern] if isinstance(pattern, DetectionPattern) else list(pattern)
    if not patterns:
        raise PatternError("no detection pattern given")
    grid = scenario.theta_grid.values() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty theta grid")

    def point(theta: float) -> float:
        out = scenario.output(float(theta), physical=physical, renormalize=renormalize)
        return sum(pattern_probability(out, p) for p in patterns)

    values = np.array(parallel_map(point, list(grid)))
    from .metrology import hamiltonian_variance  # metrology imports this module

    dH = None
    if len(scenario.input_state.components) == 1:
        dH = math.sqrt(hamiltonian_variance(scenario.input_state.components[0][1]))
    scan = FringeScan(
        grid,
        values,
        " + ".join(map(str, patterns)),
        0.0,
        efficiency=period_mean(grid, values) if grid.size > 2 else float(np.mean(values)),
        m=scenario.photons,
        dH_L=dH,
    )
    return add_background(scan, scenario.background) if scenario.background else scan


def scan_all_patterns(
    scenario: Scenario, theta_grid: Sequence[float] | None = None, min_probability: float = 1e-12
) -> dict[DetectionPattern, FringeScan]:
    """One fringe per pattern that occurs anywhere on the grid, propagating each phase once."""
    grid = scenario.theta_grid.values() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty theta grid")
    dists = parallel_map(lambda t: pattern_distribution(scenario.output(float(t))), list(grid))
    seen = sorted({p for d in dists for p, v in d.items() if v > min_probability}, key=str)
    from .metrology import hamiltonian_variance

    comps = scenario.input_state.components
    dH = math.sqrt(hamiltonian_variance(comps[0][1])) if len(comps) == 1 else None
    scans = {}
    for pat in seen:
        values = np.array([d.get(pat, 0.0) for d in dists])
        eff = period_mean(grid, values) if grid.size > 2 else float(np.mean(values))
        scan = FringeScan(grid, values, str(pat), 0.0, efficiency=eff, m=scenario.photons, dH_L=dH)
        scans[pat] = add_background(scan, scenario.background) if scenario.background else scan
    return scans


def add_background(scan: FringeScan, b: float) -> FringeScan:
    if b < 0:
        raise ValueError("background must be non-negative")
    if b == 0:
        return scan
    return replace(scan, values=scan.values + b, background=scan.background + b)


@dataclass(frozen=True)
class VisibilityReport:
    visibility: float
    period: float
    harmonic_weights: dict[int, tuple[float, float]] = field(default_factory=dict)
    spurious_mass: float = 0.0

    def amplitude(self, k: int) -> float:
        a, b = self.harmonic_weights.get(k, (0.0, 0.0))
        return math.hypot(a, b)

    def to_dict(self) -> dict:
        return {
            "visibility": self.visibility,
            "period": self.period,
            "harmonic_weights": {str(k): list(v) for k, v in self.harmonic_weights.items()},
            "spurious_mass": self.spurious_mass,
        }


def harmonic_analysis(theta: np.ndarray, values: np.ndarray, kmax: int = 24):
    """Least-squares fit of ``sum_k a_k cos(k theta) + b_k sin(k theta)``.

    Returns ``{k: (a_k, b_k)}`` for ``k = 0..kmax`` and the rms residual.
    """
    theta = np.asarray(theta, dtype=float)
    kmax = min(kmax, (len(theta) - 1) // 2)
    cols = [np.ones_like(theta)]
    for k in range(1, kmax + 1):
        cols += [np.cos(k * theta), np.sin(k * theta)]
    basis = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(basis, np.asarray(values, dtype=float), rcond=None)
    residual = float(np.sqrt(np.mean((basis @ coef - values) ** 2)))
    weights = {0: (float(coef[0]), 0.0)}
    for k in range(1, kmax + 1):
        weights[k] = (float(coef[2 * k - 1]), float(coef[2 * k]))
    return weights, residual


def period_mean(theta: np.ndarray, values: np.ndarray) -> float:
    """Mean over whole periods; the constant harmonic when the fit is exact."""
    weights, residual = harmonic_analysis(theta, values)
    if residual <= 1e-12 * max(float(np.abs(values).max()), 1.0):
        return weights[0][0]
    return float(np.trapezoid(values, theta) / (theta[-1] - theta[0]))


def visibility(scan: FringeScan, rel_tol: float = 1e-9) -> VisibilityReport:
    """Grid-extrema visibility, fundamental period and harmonic content.

    Harmonics with amplitude below ``rel_tol`` times the largest oscillating
    amplitude are dropped from the report; their total is ``spurious_mass``
    together with the fit residual.
    """
    weights, residual = harmonic_analysis(scan.theta, scan.values)
    amps = {k: math.hypot(*v) for k, v in weights.items() if k}
    top = max(amps.values(), default=0.0)
    kept = {0: weights[0]}
    spurious = residual
    if top > 0:
        for k, a in amps.items():
            if a > rel_tol * top:
                kept[k] = weights[k]
            else:
                spurious += a
    ks = [k for k in kept if k]
    period = 2 * math.pi / math.gcd(*ks) if ks else math.inf
    span = scan.theta[-1] - scan.theta[0]
    if ks and span < period * (1 - 1e-9):
        raise InsufficientSpanError(f"scan spans {span:.4g} rad, less than one period {period:.4g}")
    hi, lo = float(scan.values.max()), float(scan.values.min())
    vis = (hi - lo) / (hi + lo) if hi + lo > 0 else 0.0
    return VisibilityReport(vis, period, kept, spurious)


def scan_json(scan: FringeScan, report: VisibilityReport) -> str:
    return json.dumps({"scan": scan.to_dict(), "visibility": report.to_dict()}, indent=2)
