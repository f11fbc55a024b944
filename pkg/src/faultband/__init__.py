"""Tensor-factorisation band selection and envelope diagnostics for
cyclostationary vibration signals.

The package covers the full chain: benchmark signal synthesis, segmented
spectrograms, spectral dependence tensors, non-negative CP factorisation
under a family of beta-divergences, classical band selectors for
comparison, selector-driven filtering, squared envelope spectra, and a
Monte-Carlo efficiency harness.
"""

from .dependence import DependenceMap, DependenceTensor, build_tensor, dependence_map, pearson
from .diagnosis import (
    DECISION_THRESHOLD,
    DiagnosisReport,
    EnvelopeSpectrum,
    EnvsiConfig,
    diagnose,
    envsi,
    filter_with_selector,
    selector_diagnosis,
    squared_envelope_spectrum,
)
from .errors import (
    FaultbandError,
    IngestionError,
    NumericalError,
    ParameterError,
    SizeError,
)
from .harness import (
    EfficiencyGrid,
    RunConfig,
    analyze,
    efficiency,
    ingest,
    write_efficiency,
    write_signal,
)
from .ntf import (
    NtfConfig,
    NtfFactors,
    beta_divergence,
    decompose,
    export_factors,
    update_step,
)
from .selectors import (
    QUANTILE_ORDERS,
    SelectorCurve,
    StablePartitions,
    alpha_selector,
    cv_selector,
    cv_statistic,
    energy_centroid,
    excess_kurtosis,
    pearson_selector,
    spectral_kurtosis,
    stable_alpha,
)
from .signal_model import (
    ImpulseNoiseParams,
    Signal,
    SimConfig,
    SoiParams,
    simulate,
    soi_waveform,
)
from .spectral import Spectrogram, StftConfig, analytic_envelope, stft_spectrogram

__version__ = "0.1.0"

__all__ = [
    "DECISION_THRESHOLD",
    "QUANTILE_ORDERS",
    "DependenceMap",
    "DependenceTensor",
    "DiagnosisReport",
    "EfficiencyGrid",
    "EnvelopeSpectrum",
    "EnvsiConfig",
    "FaultbandError",
    "ImpulseNoiseParams",
    "IngestionError",
    "NtfConfig",
    "NtfFactors",
    "NumericalError",
    "ParameterError",
    "RunConfig",
    "SelectorCurve",
    "Signal",
    "SimConfig",
    "SizeError",
    "SoiParams",
    "Spectrogram",
    "StablePartitions",
    "StftConfig",
    "alpha_selector",
    "analytic_envelope",
    "analyze",
    "beta_divergence",
    "build_tensor",
    "cv_selector",
    "cv_statistic",
    "decompose",
    "dependence_map",
    "diagnose",
    "efficiency",
    "energy_centroid",
    "envsi",
    "excess_kurtosis",
    "export_factors",
    "filter_with_selector",
    "ingest",
    "pearson",
    "pearson_selector",
    "selector_diagnosis",
    "simulate",
    "soi_waveform",
    "spectral_kurtosis",
    "squared_envelope_spectrum",
    "stable_alpha",
    "stft_spectrogram",
    "update_step",
    "write_efficiency",
    "write_signal",
]
