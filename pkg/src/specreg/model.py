"""AR power spectral density and the quadratic smoothness/continuity forms."""

from __future__ import annotations

import numpy as np

from .design import build_design
from .errors import InvalidArgumentError
from .types import (
    ArCoefficientField,
    HyperParameters,
    RangeBinDataset,
    SpectralMatrix,
    WindowingForm,
)

# Denominators below this are treated as an on-grid pole of the AR transfer
# function; the PSD is clamped to POLE_CEILING_FACTOR * err_power instead of
# overflowing, so downstream distances stay finite.
POLE_EPS = 1e-300
POLE_CEILING_FACTOR = 1e12


def ar_psd(a, err_power: float, nu, return_poles: bool = False):
    """Power spectral density err_power / |1 - sum_p a_p e^{-2j pi nu p}|^2.

    nu is an array of frequencies in [0, 1). With return_poles=True also
    returns whether any grid point hit the pole-clamping ceiling.
    """
    a = np.asarray(a, dtype=complex).ravel()
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if not (err_power > 0 and np.isfinite(err_power)):
        raise InvalidArgumentError("err_power must be finite and > 0")
    values, hit = psd_rows(a[None, :], np.array([err_power]), nu)
    if return_poles:
        return values[0], bool(hit[0])
    return values[0]


def psd_rows(coeffs: np.ndarray, err_powers: np.ndarray, nu: np.ndarray):
    """Vectorized ar_psd over a whole coefficient field.

    Returns (values (M, len(nu)), pole_hit (M,) bool). One matmul evaluates
    every bin's transfer function on the shared grid.
    """
    lags = np.arange(1, coeffs.shape[1] + 1)
    basis = np.exp(-2j * np.pi * np.outer(nu, lags))
    transfer = 1.0 - basis @ coeffs.T              # (len(nu), M)
    denom = (transfer.real**2 + transfer.imag**2).T
    ceiling = POLE_CEILING_FACTOR * err_powers[:, None]
    values = err_powers[:, None] / np.maximum(denom, POLE_EPS)
    hit = (denom < POLE_EPS) | (values > ceiling)
    values = np.minimum(values, ceiling)
    return values, hit.any(axis=1)


def sobolev_distance(a, b, delta: SpectralMatrix) -> float:
    """Quadratic spectral distance (a-b)^H Delta_k (a-b) between two regressors."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size or a.size != delta.order:
        raise InvalidArgumentError("regressors and metric must share the model order")
    d = a - b
    return float(np.sum(delta.diag * (d.real**2 + d.imag**2)))


def sobolev_smoothness(a, delta: SpectralMatrix) -> float:
    """Distance to a flat spectrum: a^H Delta_k a."""
    a = np.asarray(a, dtype=complex).ravel()
    if a.size != delta.order:
        raise InvalidArgumentError("regressor and metric must share the model order")
    return float(np.sum(delta.diag * (a.real**2 + a.imag**2)))


def reg_criterion(
    field: ArCoefficientField,
    data: RangeBinDataset,
    hp: HyperParameters,
    form: WindowingForm,
    weights,
) -> float:
    """Doubly-regularized least-squares objective for a whole coefficient field.

    Sum of weighted prediction-error energies, per-bin spectral smoothness
    scaled by lambda_s and adjacent-bin continuity scaled by lambda_d.
    weights holds the per-bin powers standing in for the error powers.
    """
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.shape != (data.m,):
        raise InvalidArgumentError("need one weight per bin")
    if np.any(weights <= 0):
        raise InvalidArgumentError("weights must be strictly positive")
    if field.m != data.m or field.order != hp.order:
        raise InvalidArgumentError("field does not match data/hyperparameter shapes")

    delta = hp.delta()
    total = 0.0
    for m in range(data.m):
        pair = build_design(data.bins[m], hp.order, form)
        resid = pair.yvec - pair.ymat @ field.coeffs[m]
        total += float(np.sum(resid.real**2 + resid.imag**2)) / weights[m]
        total += hp.lambda_s * sobolev_smoothness(field.coeffs[m], delta)
    for m in range(data.m - 1):
        total += hp.lambda_d * sobolev_distance(field.coeffs[m], field.coeffs[m + 1], delta)
    return total
