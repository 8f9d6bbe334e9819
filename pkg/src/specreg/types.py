"""Shared value types for multi-bin AR spectral analysis.

All types are immutable after construction (arrays are frozen read-only),
so they can be shared freely across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError


def _frozen(arr: np.ndarray, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


class WindowingForm(enum.Enum):
    """Zero-padding convention for an AR(P) least-squares design.

    The value of each member is the token used on the command line.
    """

    NON_WINDOWED = "non"        # covariance method, no padding, L = N - P
    PRE_WINDOWED = "pre"        # zeros before the first sample, L = N
    POST_WINDOWED = "post"      # zeros after the last sample, L = N
    DOUBLE_WINDOWED = "double"  # autocorrelation method, L = N + P

    def row_count(self, n: int, order: int) -> int:
        """Number of prediction-error rows L for a length-n signal."""
        if self is WindowingForm.NON_WINDOWED:
            return n - order
        if self is WindowingForm.DOUBLE_WINDOWED:
            return n + order
        return n


@dataclass(frozen=True)
class SpectrumSheet:
    """M x Q grid of nonnegative PSD values on the frequency grid nu = q/Q.

    pole_bins lists bins whose rendering hit the pole-clamping ceiling.
    """

    values: np.ndarray
    pole_bins: tuple[int, ...] = ()

    def __post_init__(self):
        vals = _frozen(self.values, float)
        if vals.ndim != 2:
            raise InvalidArgumentError("spectrum sheet must be a 2-d array")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise InvalidArgumentError("spectrum sheet entries must be finite and >= 0")
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    @property
    def nu(self) -> np.ndarray:
        """Frequency grid q/Q, q = 0..Q-1."""
        return np.arange(self.q) / self.q


@dataclass(frozen=True)
class RangeBinDataset:
    """M complex signals of common length N, one per range bin.

    Optionally carries the ground-truth spectrum sheet it was drawn from.
    """

    bins: np.ndarray
    truth: Optional[SpectrumSheet] = None

    def __post_init__(self):
        bins = _frozen(self.bins, complex)
        if bins.ndim != 2:
            raise InvalidArgumentError("bins must be an (M, N) complex array")
        m, n = bins.shape
        if m < 1:
            raise InvalidArgumentError("need at least one range bin")
        if n < 2:
            raise InvalidArgumentError("need at least two samples per bin")
        if self.truth is not None and self.truth.m != m:
            raise InvalidArgumentError("truth sheet bin count does not match data")
        object.__setattr__(self, "bins", bins)

    @property
    def m(self) -> int:
        return self.bins.shape[0]

    @property
    def n(self) -> int:
        return self.bins.shape[1]


@dataclass(frozen=True)
class DesignPair:
    """Prediction vector and design matrix for one bin under a windowing form."""

    yvec: np.ndarray   # (L,) complex
    ymat: np.ndarray   # (L, P) complex

    def __post_init__(self):
        yvec = _frozen(self.yvec, complex)
        ymat = _frozen(self.ymat, complex)
        if yvec.ndim != 1 or ymat.ndim != 2 or ymat.shape[0] != yvec.shape[0]:
            raise InvalidArgumentError("design pair shapes are inconsistent")
        object.__setattr__(self, "yvec", yvec)
        object.__setattr__(self, "ymat", ymat)

    @property
    def rows(self) -> int:
        return self.yvec.shape[0]

    @property
    def order(self) -> int:
        return self.ymat.shape[1]


@dataclass(frozen=True)
class SpectralMatrix:
    """Diagonal lag-weighting metric diag[1^2k, ..., P^2k].

    Weights higher AR lags more for k > 0; k = 0 gives the identity.
    Non-integer k is supported (entries are exp(2k ln p)).
    """

    k: float
    order: int
    diag: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.k < 0:
            raise InvalidArgumentError("smoothness order k must be >= 0")
        if self.order < 1:
            raise InvalidArgumentError("model order must be >= 1")
        p = np.arange(1, self.order + 1, dtype=float)
        object.__setattr__(self, "diag", _frozen(np.exp(2.0 * self.k * np.log(p)), float))


@dataclass(frozen=True)
class ArCoefficientField:
    """AR(P) coefficient vectors for M bins plus per-bin prediction-error powers."""

    coeffs: np.ndarray       # (M, P) complex
    err_powers: np.ndarray   # (M,) positive

    def __post_init__(self):
        coeffs = _frozen(self.coeffs, complex)
        err = _frozen(self.err_powers, float)
        if coeffs.ndim != 2:
            raise InvalidArgumentError("coeffs must be an (M, P) complex array")
        if err.shape != (coeffs.shape[0],):
            raise InvalidArgumentError("err_powers must have one entry per bin")
        if np.any(err <= 0):
            raise InvalidArgumentError("err_powers must be strictly positive")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "err_powers", err)

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]

    @property
    def order(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class HyperParameters:
    """Regularization weights and order parameters of the doubly-smooth model.

    lambda_s penalizes per-bin spectral roughness, lambda_d penalizes
    bin-to-bin variation; both are inverse powers (lambda = 1/r).
    """

    lambda_s: float
    lambda_d: float
    k: float = 1.0
    order: int = 1

    def __post_init__(self):
        if not (self.lambda_s > 0 and np.isfinite(self.lambda_s)):
            raise InvalidArgumentError("lambda_s must be finite and > 0")
        if not (self.lambda_d > 0 and np.isfinite(self.lambda_d)):
            raise InvalidArgumentError("lambda_d must be finite and > 0")
        if self.k < 0:
            raise InvalidArgumentError("smoothness order k must be >= 0")
        if self.order < 1:
            raise InvalidArgumentError("model order must be >= 1")

    @property
    def r_s(self) -> float:
        return 1.0 / self.lambda_s

    @property
    def r_d(self) -> float:
        return 1.0 / self.lambda_d

    @property
    def rho(self) -> float:
        """Coupling ratio r_d / r_s = lambda_s / lambda_d."""
        return self.lambda_s / self.lambda_d

    def delta(self) -> SpectralMatrix:
        return SpectralMatrix(self.k, self.order)
