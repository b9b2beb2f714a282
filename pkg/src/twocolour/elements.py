"""Optical elements expressed as operations on Fock states."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import block_diag

from .fock import (
    Colour,
    FockError,
    FockState,
    ModeId,
    ModeRegistry,
    ModeTransform,
    Path,
    apply_mode_transform,
)


@dataclass(frozen=True)
class PathLengthElement:
    """Dispersionless optical path length ``L`` inserted in one arm."""

    L: float
    target_path: Path = Path.B


def apply_path_length(state: FockState, el: PathLengthElement) -> FockState:
    """Multiply each term by ``exp(-i L/c sum_k omega_k n_k)`` over the target arm.

    Loss ancillas of target-arm modes are included so that loss and phase
    commute; their photons are never detected.
    """
    reg = state.registry
    modes = reg.select(path=el.target_path) + reg.select(path=el.target_path, ancilla=True)
    rates = [(reg.index(m), reg.frequency(m) * el.L / reg.c) for m in modes]
    if el.L == 0 or not rates:
        return state
    return state.map_terms(lambda occ, amp: amp * cmath.exp(-1j * sum(occ[k] * w for k, w in rates)))


def phase_to_length(theta: float, registry: ModeRegistry) -> float:
    """Path length giving pump phase ``theta = L omega_p / c``."""
    return theta * registry.c / registry.omega_pump


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Balanced beamsplitter with a per-colour phase defect ``delta``.

    Colour ``x`` acts as ``a -> (out1 + out2)/sqrt2`` and
    ``b -> (out1 - exp(i delta_x) out2)/sqrt2``. Only ``delta = 0`` is unitary.
    """

    delta: Mapping[Colour, float] = field(default_factory=dict)

    def delta_for(self, colour: Colour) -> float:
        return float(self.delta.get(colour, 0.0))


def beamsplitter_block(delta: float) -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -cmath.exp(1j * delta)]]) / math.sqrt(2.0)


def min_loss_for_delta(delta: float) -> float:
    """Smallest loss ``R`` with ``|sin(delta/2)| <= R / (1 - R)``."""
    if abs(delta) >= math.pi:
        raise ValueError("|delta| must be below pi")
    s = abs(math.sin(delta / 2.0))
    return s / (1.0 + s)


def beamsplitter_transform(spec: BeamsplitterSpec, registry: ModeRegistry, physical: bool = False) -> ModeTransform:
    """Map every ``(colour, a/b, label)`` pair in ``registry`` onto ``out1/out2``.

    With ``physical=True`` each colour block is scaled by the amplitude
    transmission ``sqrt(1 - R_min)`` of the least lossy physical device able to
    show the phase defect; the scaled block is a contraction.
    """
    modes_in, modes_out, blocks = [], [], []
    for mode in registry.select(path=Path.A):
        partner = ModeId(mode.colour, Path.B, mode.label)
        outs = ModeId(mode.colour, Path.OUT1, mode.label), ModeId(mode.colour, Path.OUT2, mode.label)
        for m in (partner,) + outs:
            registry.index(m)
        delta = spec.delta_for(mode.colour)
        block = beamsplitter_block(delta)
        if physical:
            block = block * math.sqrt(1.0 - min_loss_for_delta(delta))
        modes_in += [mode, partner]
        modes_out += list(outs)
        blocks.append(block)
    if not blocks:
        raise FockError("registry has no arm-a modes to combine")
    return ModeTransform(block_diag(*blocks), tuple(modes_in), tuple(modes_out))


def apply_beamsplitter(
    state: FockState, spec: BeamsplitterSpec, physical: bool = False, renormalize: bool = False
) -> FockState:
    out = apply_mode_transform(state, beamsplitter_transform(spec, state.registry, physical))
    return out.normalized() if renormalize else out


@dataclass(frozen=True)
class LossChannel:
    mode: ModeId
    transmission: float

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.transmission}")


class MissingAncillaError(FockError):
    pass


def apply_loss(state: FockState, ch: LossChannel) -> FockState:
    """Beamsplitter of amplitude transmission ``sqrt(eta)`` into the mode's ancilla."""
    anc = ModeId.ancilla_of(ch.mode)
    if anc not in state.registry:
        raise MissingAncillaError(f"no ancilla registered for {ch.mode}")
    t = math.sqrt(ch.transmission)
    r = math.sqrt(1.0 - ch.transmission)
    return apply_mode_transform(state, ModeTransform(np.array([[t, -r], [r, t]]), (ch.mode, anc)))
