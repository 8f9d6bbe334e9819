"""Spectrum-sheet rendering and normalized spectral distances."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .model import psd_rows
from .types import ArCoefficientField, SpectrumSheet

DEFAULT_GRID = 1024


def render_sheet(field: ArCoefficientField, q: int = DEFAULT_GRID) -> SpectrumSheet:
    """Render every bin's AR PSD on the q-point grid nu = q'/q.

    Bins whose transfer function has a near-pole on the grid are clamped
    (never NaN/Inf) and listed in the sheet's pole_bins.
    """
    if q < 2:
        raise InvalidArgumentError("grid size must be >= 2")
    rows, hit = psd_rows(field.coeffs, field.err_powers, np.arange(q) / q)
    return SpectrumSheet(rows, tuple(int(m) for m in np.flatnonzero(hit)))


def lr_distance(est: SpectrumSheet, truth: SpectrumSheet, r: int = 2) -> float:
    """Normalized accumulated spectral error Sum|est-truth|^r / Sum|truth|^r.

    Returned as a fraction; an all-zero estimate gives exactly 1.0 (100%).
    """
    if r not in (1, 2):
        raise InvalidArgumentError("distance exponent r must be 1 or 2")
    if est.values.shape != truth.values.shape:
        raise InvalidArgumentError("sheets must share M and Q")
    denom = float(np.sum(truth.values**r))
    if denom == 0.0:
        raise InvalidArgumentError("truth sheet is identically zero")
    return float(np.sum(np.abs(est.values - truth.values) ** r) / denom)
