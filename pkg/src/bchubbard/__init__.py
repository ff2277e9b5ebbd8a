"""Ground-state correlations of the integrable bond-charge Hubbard chain."""

from ._validation import DomainError
from .analysis import (
    FitReport,
    MonogamyReport,
    ScanResult,
    decay_envelope,
    fit_divergence,
    maxima_scaling,
    monogamy_eta,
    monogamy_region1,
    numerical_derivative,
    pair_record,
    range_decomposition,
    scan,
)
from .correlations import CorrelationRecord, discord_cc_xstate, discord_kspace, discord_region3_closed_form
from .measurement_search import SearchConfig, minimize_conditional_entropy
from .phase_model import (
    ModelPoint,
    PhaseLabel,
    classify_filling,
    classify_phase,
    energy_density,
    ground_state_densities,
    model_point,
    odlro,
)
from .rdm import DensityMatrix, TwoSiteParams, two_site_rdm

__version__ = "0.1.0"

__all__ = [
    "CorrelationRecord",
    "DensityMatrix",
    "DomainError",
    "FitReport",
    "ModelPoint",
    "MonogamyReport",
    "PhaseLabel",
    "ScanResult",
    "SearchConfig",
    "TwoSiteParams",
    "classify_filling",
    "classify_phase",
    "decay_envelope",
    "discord_cc_xstate",
    "discord_kspace",
    "discord_region3_closed_form",
    "energy_density",
    "fit_divergence",
    "ground_state_densities",
    "maxima_scaling",
    "minimize_conditional_entropy",
    "model_point",
    "monogamy_eta",
    "monogamy_region1",
    "numerical_derivative",
    "odlro",
    "pair_record",
    "range_decomposition",
    "scan",
    "two_site_rdm",
]
