"""Fock-state simulation of two-colour path-entangled photon interferometry."""

from .detection import (
    DetectionPattern,
    FringeScan,
    VisibilityReport,
    add_background,
    closed_form_amplitudes,
    closed_form_probability,
    harmonic_analysis,
    pattern_distribution,
    pattern_probability,
    scan_fringe,
    visibility,
)
from .elements import (
    BeamsplitterSpec,
    LossChannel,
    PathLengthElement,
    apply_beamsplitter,
    apply_loss,
    apply_path_length,
    beamsplitter_transform,
    min_loss_for_delta,
)
from .fock import (
    Colour,
    FockError,
    FockState,
    ModeId,
    ModeRegistry,
    ModeTransform,
    Path,
    TruncationError,
    annihilate,
    apply_mode_transform,
    create,
    inner_product,
    number_distribution,
)
from .metrology import (
    Baselines,
    SensitivityReport,
    baselines,
    classical_fisher,
    fringe_sensitivity,
    hamiltonian_variance,
    qcrb,
    scenario_sensitivity,
)
from .scenario import Scenario, ThetaGrid
from .sources import (
    PairEnsemble,
    SourceSpec,
    distinguishable_pairs,
    fwm_single_source,
    holland_burnett,
    postselect_m,
    sagnac_state,
)

__version__ = "0.1.0"

__all__ = [
    "add_background",
    "annihilate",
    "apply_beamsplitter",
    "apply_loss",
    "apply_mode_transform",
    "apply_path_length",
    "Baselines",
    "baselines",
    "beamsplitter_transform",
    "BeamsplitterSpec",
    "classical_fisher",
    "closed_form_amplitudes",
    "closed_form_probability",
    "Colour",
    "create",
    "DetectionPattern",
    "distinguishable_pairs",
    "FockError",
    "FockState",
    "fringe_sensitivity",
    "FringeScan",
    "fwm_single_source",
    "hamiltonian_variance",
    "harmonic_analysis",
    "holland_burnett",
    "inner_product",
    "LossChannel",
    "min_loss_for_delta",
    "ModeId",
    "ModeRegistry",
    "ModeTransform",
    "number_distribution",
    "PairEnsemble",
    "Path",
    "PathLengthElement",
    "pattern_distribution",
    "pattern_probability",
    "postselect_m",
    "qcrb",
    "sagnac_state",
    "scan_fringe",
    "Scenario",
    "scenario_sensitivity",
    "SensitivityReport",
    "SourceSpec",
    "ThetaGrid",
    "TruncationError",
    "visibility",
    "VisibilityReport",
]
