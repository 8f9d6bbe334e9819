"""Windowed design-matrix construction for AR least-squares problems."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .types import DesignPair, RangeBinDataset, WindowingForm

# First prediction row (1-based sample index t) for each form; the last row
# follows from the row count L.
_FIRST_ROW = {
    WindowingForm.NON_WINDOWED: lambda p: p + 1,
    WindowingForm.PRE_WINDOWED: lambda p: 1,
    WindowingForm.POST_WINDOWED: lambda p: p + 1,
    WindowingForm.DOUBLE_WINDOWED: lambda p: 1,
}


def build_design(bin_samples: np.ndarray, order: int, form: WindowingForm) -> DesignPair:
    """Build the prediction vector and shifted-sample matrix for one bin.

    Row t of the matrix holds the samples y[t-1] .. y[t-P] (zero outside the
    observed range, as the windowing form dictates), so that
    yvec - ymat @ a is the AR(P) prediction-error sequence.
    """
    y = np.asarray(bin_samples, dtype=complex).ravel()
    n = y.size
    p = int(order)
    if not 1 <= p <= n - 1:
        raise InvalidArgumentError(f"order must satisfy 1 <= P <= N-1, got P={p}, N={n}")
    rows = form.row_count(n, p)
    if rows < 1:
        raise InvalidArgumentError(f"windowing form {form.value} yields no rows for N={n}, P={p}")

    padded = np.concatenate([np.zeros(p, dtype=complex), y, np.zeros(p, dtype=complex)])
    t0 = _FIRST_ROW[form](p)
    # padded[p + t - 1] is sample y_t for 1-based t, zero outside 1..n.
    t = np.arange(t0, t0 + rows)
    yvec = padded[p + t - 1]
    lags = np.arange(1, p + 1)
    ymat = padded[(p + t - 1)[:, None] - lags[None, :]]
    return DesignPair(yvec=yvec, ymat=ymat)


def stacked_designs(data: RangeBinDataset, order: int, form: WindowingForm):
    """Design matrices for every bin, stacked as (M, L, P) and (M, L) arrays.

    All bins share N, so every design has the same row count; this is the
    layout the filter/smoother kernels consume.
    """
    mats = []
    vecs = []
    for m in range(data.m):
        pair = build_design(data.bins[m], order, form)
        mats.append(pair.ymat)
        vecs.append(pair.yvec)
    return np.array(mats, dtype=complex), np.array(vecs, dtype=complex)
