"""Sparse Fock-state algebra over a finite set of labelled bosonic modes.

States are stored as a map from occupation tuples to complex amplitudes.
Linear optics acts on creation operators: every creation operator in the
basis expansion of a term is replaced by its image under the transform and
the product is re-expanded multinomially.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

PRUNE_THRESHOLD = 1e-14

Occupation = tuple[int, ...]


class FockError(ValueError):
    """Base class for errors raised by the Fock-state machinery."""


class UnknownModeError(FockError, KeyError):
    def __init__(self, mode: "ModeId"):
        self.mode = mode
        super().__init__(f"mode {mode} is not registered")

    def __str__(self) -> str:
        return self.args[0]


class RegistryMismatchError(FockError):
    pass


class DimensionMismatchError(FockError):
    pass


class TruncationError(FockError):
    pass


class Colour(enum.Enum):
    SIGNAL = "s"
    IDLER = "i"
    PUMP = "p"
    ANCILLA = "anc"


class Path(enum.Enum):
    A = "a"
    B = "b"
    OUT1 = "out1"
    OUT2 = "out2"


_COLOUR_RANK = {Colour.SIGNAL: 0, Colour.IDLER: 1, Colour.PUMP: 2, Colour.ANCILLA: 3}
_PATH_RANK = {Path.A: 0, Path.OUT1: 1, Path.B: 2, Path.OUT2: 3}


@dataclass(frozen=True)
class ModeId:
    """One optical mode: a colour travelling along a path.

    ``label`` tags otherwise identical modes that must stay distinguishable
    (independent photon pairs). Ancilla modes carry a ``parent`` and collect
    the photons removed from it by loss.
    """

    colour: Colour
    path: Path
    label: int = 0
    parent: ModeId | None = None

    def __post_init__(self):
        if (self.colour is Colour.ANCILLA) != (self.parent is not None):
            raise FockError("ancilla modes need exactly one parent and only ancillas have one")
        if self.parent is not None and self.parent.colour is Colour.ANCILLA:
            raise FockError("an ancilla must reference a non-ancilla parent")

    @classmethod
    def ancilla_of(cls, mode: ModeId) -> ModeId:
        return cls(Colour.ANCILLA, mode.path, mode.label, parent=mode)

    @property
    def is_ancilla(self) -> bool:
        return self.colour is Colour.ANCILLA

    def sort_key(self) -> tuple:
        if self.parent is not None:
            return (_COLOUR_RANK[Colour.ANCILLA],) + self.parent.sort_key()
        return (_COLOUR_RANK[self.colour], self.label, _PATH_RANK[self.path])

    def __str__(self) -> str:
        if self.parent is not None:
            return f"anc({self.parent})"
        tag = f"#{self.label}" if self.label else ""
        return f"{self.colour.value}_{self.path.value}{tag}"


SPEED_OF_LIGHT = 299_792_458.0


class ModeRegistry:
    """Ordered set of modes with their angular frequencies.

    The idler frequency is derived as ``2 * omega_pump - omega_signal`` so
    that energy conservation of four-wave mixing holds exactly. In natural
    units ``omega_pump = c = 1``.
    """

    def __init__(
        self,
        modes: Iterable[ModeId],
        omega_pump: float = 1.0,
        omega_signal: float = 720.0 / 625.0,
        c: float = 1.0,
    ):
        modes = list(modes)
        if len(set(modes)) != len(modes):
            raise FockError("duplicate mode in registry")
        for m in modes:
            if m.parent is not None and m.parent not in modes:
                raise FockError(f"ancilla {m} references unregistered parent {m.parent}")
        self.modes: tuple[ModeId, ...] = tuple(sorted(modes, key=ModeId.sort_key))
        self.omega_pump = float(omega_pump)
        self.omega_signal = float(omega_signal)
        self.omega_idler = 2.0 * self.omega_pump - self.omega_signal
        self.c = float(c)
        self._index = {m: k for k, m in enumerate(self.modes)}

    @classmethod
    def physical(cls, modes: Iterable[ModeId], pump_nm: float = 720.0, signal_nm: float = 625.0):
        """Registry in SI units: frequencies in rad/s from vacuum wavelengths."""
        to_omega = lambda nm: 2.0 * math.pi * SPEED_OF_LIGHT / (nm * 1e-9)
        return cls(modes, to_omega(pump_nm), to_omega(signal_nm), SPEED_OF_LIGHT)

    def __len__(self) -> int:
        return len(self.modes)

    def __contains__(self, mode: ModeId) -> bool:
        return mode in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModeRegistry):
            return NotImplemented
        return (
            self.modes == other.modes
            and self.omega_pump == other.omega_pump
            and self.omega_signal == other.omega_signal
            and self.c == other.c
        )

    def __hash__(self):
        return hash((self.modes, self.omega_pump, self.omega_signal, self.c))

    def __repr__(self) -> str:
        return f"ModeRegistry([{', '.join(map(str, self.modes))}])"

    def index(self, mode: ModeId) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise UnknownModeError(mode) from None

    def frequency(self, mode: ModeId) -> float:
        self.index(mode)
        if mode.parent is not None:
            mode = mode.parent
        return {
            Colour.SIGNAL: self.omega_signal,
            Colour.IDLER: self.omega_idler,
            Colour.PUMP: self.omega_pump,
        }[mode.colour]

    def select(self, colour: Colour | None = None, path: Path | None = None, ancilla: bool = False):
        """Modes matching ``colour`` and ``path``; ancillas only if asked for."""
        return [
            m
            for m in self.modes
            if m.is_ancilla == ancilla
            and (colour is None or (m.parent or m).colour is colour)
            and (path is None or m.path is path)
        ]

    def with_modes(self, extra: Iterable[ModeId]) -> ModeRegistry:
        new = [m for m in extra if m not in self._index]
        return ModeRegistry(self.modes + tuple(new), self.omega_pump, self.omega_signal, self.c)


class FockState:
    """Immutable sparse superposition of occupation-number basis states."""

    def __init__(
        self,
        registry: ModeRegistry,
        amplitudes: Mapping[Occupation, complex],
        cutoff: int,
        truncated_mass: float = 0.0,
    ):
        if cutoff < 0:
            raise FockError("cutoff must be non-negative")
        self.registry = registry
        self.cutoff = int(cutoff)
        n = len(registry)
        amps: dict[Occupation, complex] = {}
        dropped = float(truncated_mass)
        counted = [k for k, m in enumerate(registry.modes) if not m.is_ancilla]
        for occ, amp in amplitudes.items():
            occ = tuple(int(x) for x in occ)
            if len(occ) != n or min(occ, default=0) < 0:
                raise DimensionMismatchError(f"occupation {occ} does not fit {n} modes")
            amp = complex(amp)
            if abs(amp) < PRUNE_THRESHOLD:
                continue
            if sum(occ[k] for k in counted) > self.cutoff:
                dropped += abs(amp) ** 2
                continue
            amps[occ] = amp
        self._amps = amps
        self.truncated_mass = dropped

    @classmethod
    def vacuum(cls, registry: ModeRegistry, cutoff: int) -> FockState:
        return cls(registry, {(0,) * len(registry): 1.0}, cutoff)

    @classmethod
    def basis(cls, registry: ModeRegistry, occupation: Mapping[ModeId, int], cutoff: int) -> FockState:
        occ = [0] * len(registry)
        for mode, n in occupation.items():
            occ[registry.index(mode)] = n
        return cls(registry, {tuple(occ): 1.0}, cutoff)

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self):
        return iter(self._amps.items())

    def __repr__(self) -> str:
        terms = sorted(self._amps.items(), key=lambda kv: -abs(kv[1]))[:6]
        body = " + ".join(f"({a:.4g})|{','.join(map(str, o))}>" for o, a in terms)
        more = " + ..." if len(self._amps) > 6 else ""
        return f"FockState({body or '0'}{more})"

    def amplitude(self, occupation: Mapping[ModeId, int]) -> complex:
        occ = [0] * len(self.registry)
        for mode, n in occupation.items():
            occ[self.registry.index(mode)] = n
        return self._amps.get(tuple(occ), 0.0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def normalized(self) -> FockState:
        nrm = self.norm()
        if nrm == 0.0:
            raise FockError("cannot normalise the zero state")
        return self.scaled(1.0 / nrm)

    def scaled(self, factor: complex) -> FockState:
        return FockState(
            self.registry, {o: a * factor for o, a in self._amps.items()}, self.cutoff, self.truncated_mass
        )

    def __add__(self, other: FockState) -> FockState:
        _check_same_registry(self, other)
        out = dict(self._amps)
        for o, a in other._amps.items():
            out[o] = out.get(o, 0.0) + a
        return FockState(
            self.registry, out, max(self.cutoff, other.cutoff), self.truncated_mass + other.truncated_mass
        )

    def __mul__(self, factor: complex) -> FockState:
        return self.scaled(factor)

    __rmul__ = __mul__

    def map_terms(self, fn) -> FockState:
        """New state with each amplitude replaced by ``fn(occupation, amplitude)``."""
        return FockState(
            self.registry, {o: fn(o, a) for o, a in self._amps.items()}, self.cutoff, self.truncated_mass
        )

    def embed(self, registry: ModeRegistry) -> FockState:
        """The same state expressed over a larger registry (new modes empty)."""
        idx = [registry.index(m) for m in self.registry.modes]
        out = {}
        for occ, amp in self._amps.items():
            new = [0] * len(registry)
            for k, n in zip(idx, occ):
                new[k] = n
            out[tuple(new)] = amp
        return FockState(registry, out, self.cutoff, self.truncated_mass)

    def photon_numbers(self) -> dict[int, float]:
        """Distribution of total (non-ancilla) photon number."""
        return number_distribution(self, self.registry.select())


def _check_same_registry(x: FockState, y: FockState) -> None:
    if x.registry != y.registry:
        raise RegistryMismatchError("states live on different mode registries")


def create(state: FockState, mode: ModeId) -> FockState:
    """Apply the creation operator of ``mode``; terms beyond the cutoff are dropped."""
    k = state.registry.index(mode)
    out = {}
    for occ, amp in state:
        n = occ[k]
        new = occ[:k] + (n + 1,) + occ[k + 1 :]
        out[new] = amp * math.sqrt(n + 1)
    return FockState(state.registry, out, state.cutoff, state.truncated_mass)


def annihilate(state: FockState, mode: ModeId) -> FockState:
    k = state.registry.index(mode)
    out = {}
    for occ, amp in state:
        n = occ[k]
        if n:
            out[occ[:k] + (n - 1,) + occ[k + 1 :]] = amp * math.sqrt(n)
    return FockState(state.registry, out, state.cutoff, state.truncated_mass)


def inner_product(x: FockState, y: FockState) -> complex:
    """<x|y>, antilinear in the first argument."""
    _check_same_registry(x, y)
    small, large = (x, y) if len(x) <= len(y) else (y, x)
    total = 0.0j
    for occ, amp in small:
        other = large._amps.get(occ)
        if other is not None:
            total += amp.conjugate() * other if small is x else other.conjugate() * amp
    return total


@dataclass(frozen=True)
class ModeTransform:
    """Linear map on creation operators.

    Column ``j`` of ``matrix`` is the image of the creation operator of
    ``modes_in[j]`` expanded over ``modes_out`` (defaults to ``modes_in``).
    Modes outside ``modes_in`` are left untouched.
    """

    matrix: np.ndarray
    modes_in: tuple[ModeId, ...]
    modes_out: tuple[ModeId, ...] | None = None
    unitary: bool = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "modes_in", tuple(self.modes_in))
        out = self.modes_in if self.modes_out is None else tuple(self.modes_out)
        object.__setattr__(self, "modes_out", out)
        if m.ndim != 2 or m.shape != (len(out), len(self.modes_in)):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match {len(out)} outputs x {len(self.modes_in)} inputs"
            )
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("mode transforms must be square")
        if len(set(self.modes_in)) != len(self.modes_in) or len(set(out)) != len(out):
            raise DimensionMismatchError("repeated mode in transform")
        gram = m.conj().T @ m
        object.__setattr__(self, "unitary", bool(np.abs(gram - np.eye(len(gram))).max() <= 1e-12))

    def then(self, other: ModeTransform) -> ModeTransform:
        """Transform equivalent to applying ``self`` and then ``other``.

        Only defined for in-place transforms on the same ordered modes.
        """
        if self.modes_in != other.modes_in or self.modes_out != self.modes_in or other.modes_out != other.modes_in:
            raise DimensionMismatchError("composition needs in-place transforms on the same modes")
        return ModeTransform(other.matrix @ self.matrix, self.modes_in)


def _power_expansion(column: np.ndarray, n: int) -> list[tuple[tuple[int, ...], complex]]:
    """Multinomial expansion of ``(sum_i column[i] x_i) ** n``."""
    support = [i for i, v in enumerate(column) if v != 0]
    terms = []
    for combo in combinations_with_replacement(support, n):
        powers = [0] * len(column)
        for i in combo:
            powers[i] += 1
        coeff = math.factorial(n)
        value = 1.0 + 0.0j
        for i, p in enumerate(powers):
            if p:
                coeff //= math.factorial(p)
                value *= column[i] ** p
        terms.append((tuple(powers), coeff * value))
    return terms


def apply_mode_transform(state: FockState, t: ModeTransform) -> FockState:
    """Propagate ``state`` through ``t``; never renormalises.

    Amplitudes are converted to monomial coefficients (dividing by the
    square-root factorials), the input creation operators are substituted
    and expanded, and the result is converted back.
    """
    reg = state.registry
    in_idx = [reg.index(m) for m in t.modes_in]
    out_idx = [reg.index(m) for m in t.modes_out]
    cache: dict[tuple[int, int], list] = {}

    def expansion(j: int, n: int):
        key = (j, n)
        if key not in cache:
            cache[key] = _power_expansion(t.matrix[:, j], n)
        return cache[key]

    out: dict[Occupation, complex] = defaultdict(complex)
    for occ, amp in state:
        base = list(occ)
        coeff = amp
        for k in range(len(occ)):
            if occ[k] > 1:
                coeff /= math.sqrt(math.factorial(occ[k]))
        for k in in_idx:
            base[k] = 0
        partial: dict[Occupation, complex] = {tuple(base): coeff}
        for j, k in enumerate(in_idx):
            n = occ[k]
            if n == 0:
                continue
            nxt: dict[Occupation, complex] = defaultdict(complex)
            for mono, c in partial.items():
                for powers, value in expansion(j, n):
                    new = list(mono)
                    for i, p in enumerate(powers):
                        if p:
                            new[out_idx[i]] += p
                    nxt[tuple(new)] += c * value
            partial = nxt
        for mono, c in partial.items():
            for n in mono:
                if n > 1:
                    c *= math.sqrt(math.factorial(n))
            out[mono] += c
    return FockState(reg, out, state.cutoff, state.truncated_mass)


def number_distribution(state: FockState, modes: Iterable[ModeId]) -> dict[int, float]:
    """Distribution of the total photon number held in ``modes``.

    Sums to the squared norm of the state.
    """
    idx = [state.registry.index(m) for m in modes]
    dist: dict[int, float] = defaultdict(float)
    for occ, amp in state:
        dist[sum(occ[k] for k in idx)] += abs(amp) ** 2
    return dict(sorted(dist.items()))


def apply_number_operator(state: FockState, weights: Mapping[ModeId, float]) -> FockState:
    """``sum_k w_k a_k^dagger a_k`` applied to ``state``."""
    result = state.scaled(0.0)
    for mode, w in weights.items():
        result = result + create(annihilate(state, mode), mode).scaled(w)
    return result
