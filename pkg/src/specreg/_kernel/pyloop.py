"""Pure-numpy filter/smoother kernels (fallback backend).

Same contracts as the compiled twin in _fast.pyx; kept deliberately close
to it line for line so the two can be compared in tests and benchmarks.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve


def _predict(m, a_filt, p_filt, dinv, alphas, reps, r_init):
    if m == 0:
        return np.zeros(dinv.size, dtype=complex), np.diag(r_init * dinv).astype(complex)
    al = alphas[m - 1]
    return al * a_filt[m - 1], al * al * p_filt[m - 1] + np.diag(reps[m - 1] * dinv)


def _correct(ap, pp, ymat, yvec, weight):
    e = yvec - ymat @ ap
    gain = pp @ ymat.conj().T
    cov = weight * np.eye(ymat.shape[0]) + ymat @ gain
    try:
        cf = cho_factor(cov, lower=True)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"innovation covariance not positive definite: {exc}")
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diagonal(cf[0])))))
    x = cho_solve(cf, e)
    af = ap + gain @ x
    pf = pp - gain @ cho_solve(cf, gain.conj().T)
    pf = 0.5 * (pf + pf.conj().T)
    ll_term = logdet + float(np.real(np.vdot(e, x)))
    return e, cov, af, pf, ll_term


def filter_pass(ymat, yvec, weights, dinv, alphas, reps, r_init, correct_first=True):
    """Forward pass over all bins, keeping the full state history.

    ymat (M, L, P) and yvec (M, L) are the per-bin designs, weights (M,) the
    observation noise powers, dinv (P,) the inverse lag-metric diagonal,
    alphas/reps (M-1,) the transition coefficients and state noise powers,
    r_init the initial covariance scale. Returns
    (a_pred, p_pred, a_filt, p_filt, innov, innov_cov, loglik) with loglik
    the sum of ln det R + e^H R^{-1} e over corrected bins.
    """
    n_bins, rows, order = ymat.shape
    a_pred = np.zeros((n_bins, order), dtype=complex)
    p_pred = np.zeros((n_bins, order, order), dtype=complex)
    a_filt = np.zeros((n_bins, order), dtype=complex)
    p_filt = np.zeros((n_bins, order, order), dtype=complex)
    innov = np.zeros((n_bins, rows), dtype=complex)
    innov_cov = np.zeros((n_bins, rows, rows), dtype=complex)
    loglik = 0.0
    for m in range(n_bins):
        ap, pp = _predict(m, a_filt, p_filt, dinv, alphas, reps, r_init)
        a_pred[m], p_pred[m] = ap, pp
        if m == 0 and not correct_first:
            innov[m] = yvec[m] - ymat[m] @ ap
            innov_cov[m] = weights[m] * np.eye(rows) + ymat[m] @ (pp @ ymat[m].conj().T)
            a_filt[m], p_filt[m] = ap, pp
            continue
        try:
            e, cov, af, pf, ll_term = _correct(ap, pp, ymat[m], yvec[m], weights[m])
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"bin {m}: {exc}")
        innov[m], innov_cov[m] = e, cov
        a_filt[m], p_filt[m] = af, pf
        loglik += ll_term
    return a_pred, p_pred, a_filt, p_filt, innov, innov_cov, loglik


def filter_loglik(ymat, yvec, weights, dinv, alphas, reps, r_init, correct_first=True):
    """Forward pass keeping no history; returns only the accumulated loglik term."""
    n_bins = ymat.shape[0]
    af = np.zeros(dinv.size, dtype=complex)
    pf = np.diag(r_init * dinv).astype(complex)
    loglik = 0.0
    for m in range(n_bins):
        if m == 0:
            ap, pp = af, pf
        else:
            al = alphas[m - 1]
            ap = al * af
            pp = al * al * pf + np.diag(reps[m - 1] * dinv)
        if m == 0 and not correct_first:
            continue
        try:
            _, _, af, pf, ll_term = _correct(ap, pp, ymat[m], yvec[m], weights[m])
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"bin {m}: {exc}")
        loglik += ll_term
    return loglik


def smoother_pass(alphas, a_pred, p_pred, a_filt, p_filt):
    """Backward recursion; returns smoothed means (M, P) and covariances (M, P, P)."""
    n_bins, order = a_filt.shape
    a_sm = np.zeros((n_bins, order), dtype=complex)
    p_sm = np.zeros((n_bins, order, order), dtype=complex)
    a_sm[-1] = a_filt[-1]
    p_sm[-1] = p_filt[-1]
    for m in range(n_bins - 2, -1, -1):
        # G = alpha * P_filt[m] @ P_pred[m+1]^{-1}, via the Hermitian solve.
        gain = alphas[m] * np.linalg.solve(p_pred[m + 1], p_filt[m]).conj().T
        a_sm[m] = a_filt[m] + gain @ (a_sm[m + 1] - a_pred[m + 1])
        p = p_filt[m] + gain @ (p_sm[m + 1] - p_pred[m + 1]) @ gain.conj().T
        p_sm[m] = 0.5 * (p + p.conj().T)
    return a_sm, p_sm
