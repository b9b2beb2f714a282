"""Photon-pair source states.

Bidirectionally pumped four-wave mixing produces signal-idler pairs in both
arms of the interferometer. Post-selecting on ``m`` detected photons gives
an equal-weight superposition over how the ``m/2`` pairs are shared between
the arms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fock import (
    Colour,
    FockError,
    FockState,
    ModeId,
    ModeRegistry,
    ModeTransform,
    Path,
    TruncationError,
    apply_mode_transform,
    create,
    number_distribution,
)


class EmptySectorError(FockError):
    pass


@dataclass(frozen=True)
class SourceSpec:
    alpha: complex = 0.1
    theta_p: float = 0.0
    cutoff: int = 6

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")


@dataclass(frozen=True)
class PairEnsemble:
    """Classical mixture of pure states, ``(weight, state)`` pairs."""

    components: tuple[tuple[float, FockState], ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        weights = [w for w, _ in self.components]
        if not weights or min(weights) < 0 or not math.isclose(sum(weights), 1.0, abs_tol=1e-12):
            raise ValueError("ensemble weights must be non-negative and sum to one")

    @classmethod
    def pure(cls, state: FockState) -> PairEnsemble:
        return cls(((1.0, state),))

    @property
    def registry(self) -> ModeRegistry:
        return self.components[0][1].registry

    def map(self, fn) -> PairEnsemble:
        return PairEnsemble(tuple((w, fn(s)) for w, s in self.components))

    def number_distribution(self, modes: Iterable[ModeId]) -> dict[int, float]:
        modes = list(modes)
        total: dict[int, float] = {}
        for w, state in self.components:
            for n, p in number_distribution(state, modes).items():
                total[n] = total.get(n, 0.0) + w * p
        return dict(sorted(total.items()))


def interferometer_modes(
    colours: Sequence[Colour] = (Colour.SIGNAL, Colour.IDLER),
    labels: Sequence[int] = (0,),
    outputs: bool = True,
) -> list[ModeId]:
    paths = (Path.A, Path.B, Path.OUT1, Path.OUT2) if outputs else (Path.A, Path.B)
    return [ModeId(c, p, lab) for c in colours for lab in labels for p in paths]


def default_registry(labels: Sequence[int] = (0,), colours=(Colour.SIGNAL, Colour.IDLER)) -> ModeRegistry:
    return ModeRegistry(interferometer_modes(colours, labels))


def apply_pair_propagator(
    state: FockState, alpha: complex, signal: ModeId, idler: ModeId, max_pairs: int
) -> FockState:
    """Apply the truncated series ``exp(alpha a_s^dag a_i^dag)`` to ``state``.

    The pair-annihilation part of the interaction is neglected, as is valid
    at low generation rates.
    """
    term = state
    total = state
    for n in range(1, max_pairs + 1):
        term = create(create(term, signal), idler).scaled(alpha / n)
        total = total + term
    return total


def fwm_single_source(alpha: complex, cutoff: int, registry: ModeRegistry | None = None, path: Path = Path.A):
    """Unnormalised output of one pair source: ``sum_n alpha**n |n>_s |n>_i``."""
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    registry = registry or default_registry()
    signal, idler = ModeId(Colour.SIGNAL, path), ModeId(Colour.IDLER, path)
    vac = FockState.vacuum(registry, cutoff)
    return apply_pair_propagator(vac, alpha, signal, idler, cutoff // 2)


def sagnac_state(spec: SourceSpec, registry: ModeRegistry | None = None, label: int = 0) -> FockState:
    """Both counter-propagating sources acting on vacuum.

    Each pair emitted into arm ``b`` picks up ``-exp(2i theta_p)`` relative to
    arm ``a``. Unnormalised and truncated at ``spec.cutoff`` photons.
    """
    registry = registry or default_registry()
    pairs = spec.cutoff // 2
    phase = -cmath.exp(2j * spec.theta_p)
    state = FockState.vacuum(registry, spec.cutoff)
    state = apply_pair_propagator(
        state, spec.alpha, ModeId(Colour.SIGNAL, Path.A, label), ModeId(Colour.IDLER, Path.A, label), pairs
    )
    return apply_pair_propagator(
        state, spec.alpha * phase, ModeId(Colour.SIGNAL, Path.B, label), ModeId(Colour.IDLER, Path.B, label), pairs
    )


def postselect_m(state: FockState, m: int) -> FockState:
    """Project onto ``m`` signal+idler photons and renormalise."""
    if m < 0 or m % 2:
        raise ValueError(f"post-selected photon number must be even and non-negative, got {m}")
    if m > state.cutoff:
        raise TruncationError(f"cutoff {state.cutoff} cannot hold an m={m} photon sector")
    reg = state.registry
    idx = [reg.index(x) for x in reg.select(Colour.SIGNAL) + reg.select(Colour.IDLER)]
    kept = {occ: amp for occ, amp in state if sum(occ[k] for k in idx) == m}
    projected = FockState(reg, kept, state.cutoff)
    if projected.norm() == 0.0:
        raise EmptySectorError(f"the m={m} photon sector of this state is empty")
    return projected.normalized()


def distinguishable_pairs(m: int, theta_p: float = 0.0, registry: ModeRegistry | None = None) -> PairEnsemble:
    """``m/2`` independent two-photon states, each on its own labelled modes."""
    if m < 0 or m % 2:
        raise ValueError("m must be even and non-negative")
    n_pairs = m // 2
    registry = registry or default_registry(labels=range(max(n_pairs, 1)))
    state = FockState.vacuum(registry, m)
    for label in range(n_pairs):
        pair = sagnac_state(SourceSpec(alpha=1.0, theta_p=theta_p, cutoff=2), registry, label)
        state = _product(state, FockState(registry, dict(postselect_m(pair, 2).amplitudes), m))
    return PairEnsemble.pure(state)


def _product(x: FockState, y: FockState) -> FockState:
    out = {}
    for o1, a1 in x:
        for o2, a2 in y:
            key = tuple(p + q for p, q in zip(o1, o2))
            out[key] = out.get(key, 0.0) + a1 * a2
    return FockState(x.registry, out, x.cutoff)


def hadamard(modes: tuple[ModeId, ModeId], out: tuple[ModeId, ModeId] | None = None) -> ModeTransform:
    return ModeTransform(np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0), modes, out)


def holland_burnett(m: int, registry: ModeRegistry | None = None) -> FockState:
    """Degenerate ``|m/2, m/2>`` split by a balanced beamsplitter.

    Uses the pump colour (frequency ``omega_p``) on arms ``a`` and ``b``.
    """
    if m < 0 or m % 2:
        raise ValueError("m must be even and non-negative")
    registry = registry or default_registry(colours=(Colour.PUMP,))
    a, b = ModeId(Colour.PUMP, Path.A), ModeId(Colour.PUMP, Path.B)
    start = FockState.basis(registry, {a: m // 2, b: m // 2}, m)
    return apply_mode_transform(start, hadamard((a, b)))


def pump_photon(registry: ModeRegistry | None = None) -> FockState:
    """A single pump photon shared equally between the arms; the classical fringe reference."""
    registry = registry or default_registry(colours=(Colour.PUMP,))
    a, b = ModeId(Colour.PUMP, Path.A), ModeId(Colour.PUMP, Path.B)
    return apply_mode_transform(FockState.basis(registry, {a: 1}, 1), hadamard((a, b)))
