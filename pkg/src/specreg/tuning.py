"""Unsupervised hyperparameter selection from Kalman-filter by-products.

The marginal co-log-likelihood of the regularization weights is accumulated
by the forward filter alone (sum of ln det of the innovation covariances
plus the whitened innovation energies, constants dropped) and minimized by
coordinate descent with golden-section line searches in log10 space.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .design import stacked_designs
from .errors import InvalidArgumentError, NumericalError
from .kalman import stationary_model
from .types import HyperParameters, RangeBinDataset, WindowingForm

WEIGHT_FLOOR_REL = 1e-12
WEIGHT_FLOOR_ABS = 1e-300

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PowerWeights:
    """Raw per-bin powers and their depth-smoothed version used as weights."""

    raw: np.ndarray
    smoothed: np.ndarray
    window_len: int


@dataclass(frozen=True)
class TuneResult:
    lambda_s: float
    lambda_d: float
    hcll: float
    trace: tuple[tuple[float, float, float], ...]  # (log10 ls, log10 ld, hcll)
    converged: bool = True
    on_boundary: bool = False

    @property
    def log10_lambda_s(self) -> float:
        return math.log10(self.lambda_s)

    @property
    def log10_lambda_d(self) -> float:
        return math.log10(self.lambda_d)


def power_weights(data: RangeBinDataset, window_len: int = 5) -> PowerWeights:
    """Per-bin signal powers y^H y / N, smoothed by a centered moving average.

    The average is truncated at the edges and renormalized so the total power
    is preserved; the result is floored away from zero.
    """
    if window_len < 1 or window_len % 2 == 0:
        raise InvalidArgumentError("smoothing window length must be odd and >= 1")
    raw = np.mean(data.bins.real**2 + data.bins.imag**2, axis=1)
    kernel = np.ones(window_len)
    smoothed = np.convolve(raw, kernel, mode="same") / np.convolve(
        np.ones_like(raw), kernel, mode="same")
    total = raw.sum()
    if total > 0 and smoothed.sum() > 0:
        smoothed *= total / smoothed.sum()
    else:
        warnings.warn("all-zero dataset: power weights forced to the floor",
                      RuntimeWarning, stacklevel=2)
    floor = max(WEIGHT_FLOOR_REL * float(raw.max(initial=0.0)), WEIGHT_FLOOR_ABS)
    smoothed = np.maximum(smoothed, floor)
    return PowerWeights(raw, smoothed, window_len)


def _checked_weights(weights, n_bins: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape != (n_bins,):
        raise InvalidArgumentError("need one weight per bin")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise InvalidArgumentError("weights must be finite and strictly positive")
    return w


def _hcll_arrays(ymat, yvec, weights, hp: HyperParameters) -> float:
    model = stationary_model(hp)
    n_bins = ymat.shape[0]
    dinv = 1.0 / hp.delta().diag
    alphas = np.full(max(n_bins - 1, 0), model.alpha_inf)
    reps = np.full(max(n_bins - 1, 0), model.r_eps_inf)
    try:
        return float(_kernel.filter_loglik(
            ymat, yvec, weights, dinv, alphas, reps, model.r_a_inf, True))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"filter failed: {exc}") from exc


def hcll_evaluate(
    data: RangeBinDataset, hp: HyperParameters, form: WindowingForm, weights
) -> float:
    """Co-log-likelihood of (lambda_s, lambda_d) from a single forward pass."""
    w = _checked_weights(weights, data.m)
    ymat, yvec = stacked_designs(data, hp.order, form)
    return _hcll_arrays(ymat, yvec, w, hp)


def golden_section(f, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Golden-section minimization on [lo, hi]; returns the best evaluated
    (x, f(x)). Robust to non-unimodal f in the sense that it never returns a
    point worse than the best one it saw."""
    if not hi > lo:
        raise InvalidArgumentError("need hi > lo")
    if not tol > 0:
        raise InvalidArgumentError("tolerance must be > 0")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            if fc < best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            if fd < best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def tune(
    data: RangeBinDataset | None,
    form: WindowingForm,
    weights,
    search_box=((-4.0, 4.0), (-4.0, 4.0)),
    tol: float = 1e-4,
    *,
    coord_tol: float = 1e-3,
    max_sweeps: int = 50,
    order: int | None = None,
    k: float = 1.0,
    start: tuple[float, float] | None = None,
    objective=None,
) -> TuneResult:
    """Minimize the co-log-likelihood over (log10 lambda_s, log10 lambda_d).

    Alternates golden-section line searches along each coordinate inside
    search_box until a full sweep improves by less than tol (or max_sweeps).
    The trace records the start point and every accepted coordinate step.
    objective overrides the likelihood with an arbitrary f(u, v) (test hook).
    """
    (ls_lo, ls_hi), (ld_lo, ld_hi) = search_box
    if not (np.isfinite([ls_lo, ls_hi, ld_lo, ld_hi]).all() and ls_hi > ls_lo and ld_hi > ld_lo):
        raise InvalidArgumentError("search box bounds must be finite with hi > lo")
    if not tol > 0:
        raise InvalidArgumentError("tolerance must be > 0")
    if objective is None:
        if data is None:
            raise InvalidArgumentError("need a dataset when no objective is injected")
        if order is None:
            order = data.n - 1
        w = _checked_weights(weights, data.m)
        ymat, yvec = stacked_designs(data, order, form)

        def objective(u, v):
            hp = HyperParameters(10.0**u, 10.0**v, k, order)
            return _hcll_arrays(ymat, yvec, w, hp)

    u, v = start if start is not None else (0.5 * (ls_lo + ls_hi), 0.5 * (ld_lo + ld_hi))
    if not (ls_lo <= u <= ls_hi and ld_lo <= v <= ld_hi):
        raise InvalidArgumentError("start point must lie inside the search box")
    best = objective(u, v)
    trace = [(u, v, best)]
    converged = False
    for _ in range(max_sweeps):
        previous = best
        u_new, fu = golden_section(lambda x: objective(x, v), ls_lo, ls_hi, coord_tol)
        if fu < best:
            u, best = u_new, fu
        trace.append((u, v, best))
        v_new, fv = golden_section(lambda y: objective(u, y), ld_lo, ld_hi, coord_tol)
        if fv < best:
            v, best = v_new, fv
        trace.append((u, v, best))
        if previous - best < tol:
            converged = True
            break
    if not converged:
        warnings.warn("tuner stopped at the sweep limit without meeting tol",
                      RuntimeWarning, stacklevel=2)
    on_boundary = (
        min(u - ls_lo, ls_hi - u) <= coord_tol or min(v - ld_lo, ld_hi - v) <= coord_tol
    )
    return TuneResult(10.0**u, 10.0**v, best, tuple(trace), converged, on_boundary)


def _max_workers(n_tasks: int) -> int:
    limit = min(os.cpu_count() or 1, 8)
    env = os.environ.get("SPECREG_THREADS", "").strip()
    if env:
        try:
            limit = min(limit, max(1, int(env)))
        except ValueError:
            raise InvalidArgumentError(f"SPECREG_THREADS must be an integer, got {env!r}")
    return max(1, min(limit, n_tasks))


def hcll_sweep(
    data: RangeBinDataset,
    form: WindowingForm,
    weights,
    log10_lambda_s,
    log10_lambda_d,
    *,
    order: int | None = None,
    k: float = 1.0,
) -> np.ndarray:
    """Evaluate the co-log-likelihood on the outer grid of the two log10 axes.

    Returns a (len(ls), len(ld)) matrix; nodes whose evaluation fails are NaN.
    Node evaluations are independent and run in parallel (capped by the
    SPECREG_THREADS environment variable).
    """
    if order is None:
        order = data.n - 1
    w = _checked_weights(weights, data.m)
    us = np.asarray(log10_lambda_s, dtype=float).ravel()
    vs = np.asarray(log10_lambda_d, dtype=float).ravel()
    if us.size == 0 or vs.size == 0:
        raise InvalidArgumentError("sweep axes must be non-empty")
    ymat, yvec = stacked_designs(data, order, form)

    def node(idx):
        i, j = idx
        try:
            hp = HyperParameters(10.0 ** us[i], 10.0 ** vs[j], k, order)
            return _hcll_arrays(ymat, yvec, w, hp)
        except (NumericalError, FloatingPointError):
            return math.nan

    indices = [(i, j) for i in range(us.size) for j in range(vs.size)]
    out = np.empty((us.size, vs.size))
    workers = _max_workers(len(indices))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(node, indices))
    else:
        values = [node(idx) for idx in indices]
    for (i, j), value in zip(indices, values):
        out[i, j] = value
    return out
