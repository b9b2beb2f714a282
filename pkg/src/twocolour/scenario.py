"""Experiment description and the source -> phase -> beamsplitter -> loss pipeline."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .elements import (
    BeamsplitterSpec,
    LossChannel,
    PathLengthElement,
    apply_beamsplitter,
    apply_loss,
    apply_path_length,
    phase_to_length,
)
from .fock import Colour, FockState, ModeId, ModeRegistry, Path, TruncationError
from .sources import (
    PairEnsemble,
    SourceSpec,
    distinguishable_pairs,
    holland_burnett,
    interferometer_modes,
    postselect_m,
    pump_photon,
    sagnac_state,
)

MODES = ("entangled", "distinguishable", "holland_burnett", "classical")
UNITS = ("natural", "physical")
_COLOUR_CODES = {"s": Colour.SIGNAL, "i": Colour.IDLER, "p": Colour.PUMP}
_PATH_CODES = {"a": Path.A, "b": Path.B, "out1": Path.OUT1, "out2": Path.OUT2, "1": Path.OUT1, "2": Path.OUT2}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ThetaGrid:
    start: float = 0.0
    stop: float = 2.0 * math.pi
    points: int = 721

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"theta grid needs at least 2 points, got {self.points}")
        if not self.stop > self.start:
            raise ConfigError("theta grid stop must exceed start")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))


def parse_mode_key(key: str) -> tuple[Colour, tuple[Path, ...]]:
    """``"s:out1"`` -> (signal, (out1,)); a bare colour code means both outputs."""
    colour, _, path = key.partition(":")
    if colour not in _COLOUR_CODES:
        raise ConfigError(f"unknown colour code in mode key {key!r}")
    if not path:
        return _COLOUR_CODES[colour], (Path.OUT1, Path.OUT2)
    if path not in _PATH_CODES:
        raise ConfigError(f"unknown path in mode key {key!r}")
    return _COLOUR_CODES[colour], (_PATH_CODES[path],)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to turn a fringe phase into detection probabilities.

    ``theta_p`` is the pump phase of the source at zero sample length. Its
    default of pi/2 makes the scanned phase coincide with the phase of the
    standard output-state expansions (bunched maximum at zero).
    """

    m: int = 2
    alpha: complex = 0.1
    theta_p: float = math.pi / 2
    theta_grid: ThetaGrid = field(default_factory=ThetaGrid)
    delta_s: float = 0.26
    delta_i: float = -0.04
    eta: dict[str, float] = field(default_factory=dict)
    background: float = 0.0
    mode: str = "entangled"
    units: str = "natural"
    wavelengths: dict[str, float] | None = None
    cutoff: int | None = None
    nu: int = 1

    def __post_init__(self):
        if self.m < 0 or self.m % 2:
            raise ConfigError(f"m must be even and non-negative, got {self.m}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.units not in UNITS:
            raise ConfigError(f"units must be one of {UNITS}, got {self.units!r}")
        if self.background < 0:
            raise ConfigError("background must be non-negative")
        if self.nu < 1:
            raise ConfigError("nu must be at least 1")
        for key, value in self.eta.items():
            parse_mode_key(key)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"transmission for {key} must lie in [0, 1], got {value}")
        if self.mode in ("distinguishable", "holland_burnett") and self.m == 0:
            raise ConfigError(f"mode {self.mode} needs m >= 2")
        if self.cutoff is not None and self.mode == "entangled" and self.m > self.cutoff:
            raise TruncationError(f"cutoff {self.cutoff} cannot hold m={self.m} photons")
        if self.wavelengths is not None and set(self.wavelengths) - {"pump", "signal"}:
            raise ConfigError("wavelengths accepts only 'pump' and 'signal' (nm)")

    @property
    def effective_cutoff(self) -> int:
        if self.cutoff is not None:
            return self.cutoff
        return max(self.m, 2)

    @property
    def photons(self) -> int:
        """Photon number used for the shot-noise reference."""
        return 1 if self.mode == "classical" else self.m

    @property
    def colours(self) -> tuple[Colour, ...]:
        if self.mode in ("holland_burnett", "classical"):
            return (Colour.PUMP,)
        return (Colour.SIGNAL, Colour.IDLER)

    @property
    def labels(self) -> tuple[int, ...]:
        if self.mode == "distinguishable":
            return tuple(range(self.m // 2))
        return (0,)

    def loss_channels(self) -> list[LossChannel]:
        channels = []
        for key, eta in sorted(self.eta.items()):
            colour, paths = parse_mode_key(key)
            if colour not in self.colours or eta == 1.0:
                continue
            for path in paths:
                for label in self.labels:
                    channels.append(LossChannel(ModeId(colour, path, label), eta))
        return channels

    @cached_property
    def registry(self) -> ModeRegistry:
        modes = interferometer_modes(self.colours, self.labels)
        modes += [ModeId.ancilla_of(ch.mode) for ch in self.loss_channels()]
        if self.units == "physical":
            wl = {"pump": 720.0, "signal": 625.0, **(self.wavelengths or {})}
            return ModeRegistry.physical(modes, wl["pump"], wl["signal"])
        if self.wavelengths:
            wl = {"pump": 720.0, "signal": 625.0, **self.wavelengths}
            return ModeRegistry(modes, 1.0, wl["pump"] / wl["signal"])
        return ModeRegistry(modes)

    @cached_property
    def beamsplitter(self) -> BeamsplitterSpec:
        return BeamsplitterSpec({Colour.SIGNAL: self.delta_s, Colour.IDLER: self.delta_i})

    @cached_property
    def input_state(self) -> PairEnsemble:
        """State inside the interferometer before any sample phase."""
        reg = self.registry
        if self.mode == "entangled":
            state = sagnac_state(SourceSpec(self.alpha, self.theta_p, self.effective_cutoff), reg)
            state = postselect_m(state, self.m) if self.m else state.normalized()
            return PairEnsemble.pure(state)
        if self.mode == "distinguishable":
            return distinguishable_pairs(self.m, self.theta_p, reg)
        if self.mode == "holland_burnett":
            return PairEnsemble.pure(holland_burnett(self.m, reg))
        return PairEnsemble.pure(pump_photon(reg))

    def with_phase(self, theta: float) -> PairEnsemble:
        el = PathLengthElement(phase_to_length(theta, self.registry), Path.B)
        return self.input_state.map(lambda s: apply_path_length(s, el))

    def output(self, theta: float, physical: bool = False, renormalize: bool = False) -> PairEnsemble:
        """Detected-side state at sample phase ``theta``.

        Loss channels on arms a/b act inside the interferometer, those on the
        outputs after the beamsplitter.
        """
        inner = [ch for ch in self.loss_channels() if ch.mode.path in (Path.A, Path.B)]
        outer = [ch for ch in self.loss_channels() if ch.mode.path in (Path.OUT1, Path.OUT2)]

        def run(state: FockState) -> FockState:
            for ch in inner:
                state = apply_loss(state, ch)
            state = apply_beamsplitter(state, self.beamsplitter, physical=physical)
            for ch in outer:
                state = apply_loss(state, ch)
            return state

        out = self.with_phase(theta).map(run)
        if renormalize:
            total = sum(w * detected_norm(s) for w, s in out.components)
            out = out.map(lambda s: s.scaled(1.0 / math.sqrt(total)))
        return out

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["alpha"] = [self.alpha.real, self.alpha.imag] if isinstance(self.alpha, complex) else [float(self.alpha), 0.0]
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Scenario:
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "alpha" in data:
            a = data["alpha"]
            data["alpha"] = complex(*a) if isinstance(a, (list, tuple)) else complex(a)
        if "theta_grid" in data:
            grid = data["theta_grid"]
            if not isinstance(grid, dict):
                raise ConfigError("theta_grid must be an object with start/stop/points")
            data["theta_grid"] = ThetaGrid(**grid)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Scenario:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


def detected_norm(state: FockState) -> float:
    """Probability that no photon ended in an ancilla."""
    anc = [state.registry.index(m) for m in state.registry.modes if m.is_ancilla]
    return sum(abs(a) ** 2 for o, a in state if not any(o[k] for k in anc))
