"""Regularized adaptive long-AR spectral analysis of short multi-bin signals.

Pipeline in one breath: synthesize (or load) a multi-bin complex dataset,
estimate per-bin AR spectra with classical baselines or the doubly-smooth
regularized estimator (optimized by a Kalman smoother, hyperparameters tuned
by maximum likelihood), then score the sheets against ground truth.
"""

from ._kernel import BACKEND
from .baselines import AlsConfig, als_field, ls_estimate, ls_field, periodogram
from .design import build_design, stacked_designs
from .errors import (
    InvalidArgumentError,
    MissingTruthError,
    NumericalError,
    SpecregError,
    SynthesisError,
)
from .kalman import (
    HomogeneousSchedule,
    SmootherOutput,
    StationaryModel,
    direct_solve,
    homogeneous_schedule,
    kalman_smooth,
    stationary_criterion,
    stationary_model,
)
from .metrics import lr_distance, render_sheet
from .model import ar_psd, reg_criterion, sobolev_distance, sobolev_smoothness
from .scene import (
    SceneSpec,
    SpectralMode,
    build_truth_sheet,
    default_scene,
    fig1_like_scene,
    load_scene,
    sample_scene,
)
from .tuning import (
    PowerWeights,
    TuneResult,
    golden_section,
    hcll_evaluate,
    hcll_sweep,
    power_weights,
    tune,
)
from .types import (
    ArCoefficientField,
    DesignPair,
    HyperParameters,
    RangeBinDataset,
    SpectralMatrix,
    SpectrumSheet,
    WindowingForm,
)

__version__ = "0.1.0"

__all__ = [
    "AlsConfig",
    "ArCoefficientField",
    "BACKEND",
    "DesignPair",
    "HomogeneousSchedule",
    "HyperParameters",
    "InvalidArgumentError",
    "MissingTruthError",
    "NumericalError",
    "PowerWeights",
    "RangeBinDataset",
    "SceneSpec",
    "SmootherOutput",
    "SpecregError",
    "SpectralMatrix",
    "SpectralMode",
    "SpectrumSheet",
    "StationaryModel",
    "SynthesisError",
    "TuneResult",
    "WindowingForm",
    "als_field",
    "ar_psd",
    "build_design",
    "build_truth_sheet",
    "default_scene",
    "direct_solve",
    "fig1_like_scene",
    "golden_section",
    "hcll_evaluate",
    "hcll_sweep",
    "homogeneous_schedule",
    "kalman_smooth",
    "load_scene",
    "lr_distance",
    "ls_estimate",
    "ls_field",
    "periodogram",
    "power_weights",
    "reg_criterion",
    "render_sheet",
    "sample_scene",
    "sobolev_distance",
    "sobolev_smoothness",
    "stacked_designs",
    "stationary_criterion",
    "stationary_model",
    "tune",
]
