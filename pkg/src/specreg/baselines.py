"""Classical comparison baselines: periodogram, per-bin LS, adaptive LS."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .design import build_design, stacked_designs
from .errors import InvalidArgumentError
from .kalman import residual_powers
from .types import ArCoefficientField, RangeBinDataset, SpectrumSheet, WindowingForm

LSTSQ_RCOND = 1e-10


@dataclass(frozen=True)
class AlsConfig:
    """Adaptive-LS memory: a centered spatial window, or an exponential
    forgetting factor in (0, 1]. Exactly one must be set.

    Odd windows are symmetric around the current bin; even windows carry one
    extra bin on the trailing (increasing-m) side.
    """

    window: Optional[int] = None
    forgetting: Optional[float] = None

    def __post_init__(self):
        if (self.window is None) == (self.forgetting is None):
            raise InvalidArgumentError("set exactly one of window / forgetting")
        if self.window is not None and self.window < 1:
            raise InvalidArgumentError("window length must be >= 1")
        if self.forgetting is not None and not 0.0 < self.forgetting <= 1.0:
            raise InvalidArgumentError("forgetting factor must be in (0, 1]")


def periodogram(data: RangeBinDataset, q: int) -> SpectrumSheet:
    """Zero-padded per-bin periodogram |DFT_Q(y)|^2 / N on nu = q/Q."""
    if q < data.n:
        raise InvalidArgumentError("grid size Q must be >= N")
    spectra = np.abs(np.fft.fft(data.bins, n=q, axis=1)) ** 2 / data.n
    return SpectrumSheet(spectra)


def _solve_design(ymat: np.ndarray, yvec: np.ndarray, context: str) -> np.ndarray:
    a, _, rank, _ = np.linalg.lstsq(ymat, yvec, rcond=LSTSQ_RCOND)
    if rank < ymat.shape[1]:
        warnings.warn(f"rank-deficient design ({context}): least-norm solution used",
                      RuntimeWarning, stacklevel=3)
    return a


def ls_estimate(bin_samples, order: int, form: WindowingForm):
    """Least-squares AR fit of one bin; returns (coefficients, error power).

    The error power is the mean residual power, floored away from zero so a
    noiseless (or empty) bin still renders a valid spectrum.
    """
    pair = build_design(bin_samples, order, form)
    a = _solve_design(pair.ymat, pair.yvec, "ls estimate")
    err = residual_powers(pair.ymat[None], pair.yvec[None], a[None])[0]
    return a, float(err)


def ls_field(data: RangeBinDataset, order: int, form: WindowingForm) -> ArCoefficientField:
    """Independent per-bin LS estimates."""
    coeffs = []
    errs = []
    for m in range(data.m):
        a, err = ls_estimate(data.bins[m], order, form)
        coeffs.append(a)
        errs.append(err)
    return ArCoefficientField(np.array(coeffs), np.array(errs))


def als_field(
    data: RangeBinDataset, order: int, form: WindowingForm, cfg: AlsConfig
) -> ArCoefficientField:
    """Adaptive LS: each bin's fit pools neighboring bins' criteria.

    Sliding window pools the bins in the centered window (truncated at the
    edges); forgetting pools all previous bins with geometric weights. The
    reported error power is the current bin's own mean residual power under
    the pooled coefficients.
    """
    ymat, yvec = stacked_designs(data, order, form)
    n_bins = data.m
    coeffs = np.zeros((n_bins, order), dtype=complex)
    if cfg.window is not None:
        before = (cfg.window - 1) // 2
        after = cfg.window // 2
        for m in range(n_bins):
            lo = max(0, m - before)
            hi = min(n_bins, m + after + 1)
            stacked_y = ymat[lo:hi].reshape(-1, order)
            stacked_v = yvec[lo:hi].ravel()
            coeffs[m] = _solve_design(stacked_y, stacked_v, f"als window, bin {m}")
    else:
        lam = cfg.forgetting
        gram = np.zeros((order, order), dtype=complex)
        rhs = np.zeros(order, dtype=complex)
        for m in range(n_bins):
            gram = lam * gram + ymat[m].conj().T @ ymat[m]
            rhs = lam * rhs + ymat[m].conj().T @ yvec[m]
            coeffs[m] = _solve_design(gram, rhs, f"als forgetting, bin {m}")
    errs = residual_powers(ymat, yvec, coeffs)
    return ArCoefficientField(coeffs, errs)
