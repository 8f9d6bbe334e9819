# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled filter/smoother kernels; contract identical to pyloop.py."""

import numpy as np

from libc.math cimport log, sqrt

ctypedef double complex c128


cdef int _chol_inplace(c128[:, ::1] s, Py_ssize_t n) noexcept nogil:
    """In-place lower Cholesky of a Hermitian positive-definite matrix."""
    cdef Py_ssize_t i, j, k
    cdef double d
    cdef c128 acc
    for j in range(n):
        d = s[j, j].real
        for k in range(j):
            d -= s[j, k].real * s[j, k].real + s[j, k].imag * s[j, k].imag
        if d <= 0.0:
            return -1
        d = sqrt(d)
        s[j, j] = d
        for i in range(j + 1, n):
            acc = s[i, j]
            for k in range(j):
                acc = acc - s[i, k] * s[j, k].conjugate()
            s[i, j] = acc / d
    return 0


cdef void _chol_solve(c128[:, ::1] l, Py_ssize_t n, c128[::1] x) noexcept nogil:
    """Solve L L^H x = b in place (b passed in x)."""
    cdef Py_ssize_t i, k
    cdef c128 acc
    for i in range(n):
        acc = x[i]
        for k in range(i):
            acc = acc - l[i, k] * x[k]
        x[i] = acc / l[i, i].real
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for k in range(i + 1, n):
            acc = acc - l[k, i].conjugate() * x[k]
        x[i] = acc / l[i, i].real


cdef void _predict_into(Py_ssize_t m, c128[::1] af_prev, c128[:, ::1] pf_prev,
                        double[::1] dinv, double[::1] alphas, double[::1] reps,
                        double r_init, c128[::1] ap, c128[:, ::1] pp,
                        Py_ssize_t order) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double al
    if m == 0:
        for i in range(order):
            ap[i] = 0.0
            for j in range(order):
                pp[i, j] = 0.0
            pp[i, i] = r_init * dinv[i]
    else:
        al = alphas[m - 1]
        for i in range(order):
            ap[i] = al * af_prev[i]
            for j in range(order):
                pp[i, j] = (al * al) * pf_prev[i, j]
            pp[i, i] = pp[i, i] + reps[m - 1] * dinv[i]


cdef double _correct_into(c128[:, ::1] ym, c128[::1] yv, double weight,
                          c128[::1] ap, c128[:, ::1] pp,
                          c128[::1] af, c128[:, ::1] pf,
                          c128[::1] e, c128[:, ::1] cov,
                          c128[:, ::1] gain, c128[:, ::1] fac,
                          c128[::1] xe, c128[::1] col, c128[:, ::1] xk,
                          Py_ssize_t rows, Py_ssize_t order,
                          int* status) noexcept nogil:
    """One measurement update; returns the ln det + quadratic loglik term."""
    cdef Py_ssize_t i, j, l, l2
    cdef c128 acc
    cdef double ll = 0.0
    for l in range(rows):
        acc = yv[l]
        for j in range(order):
            acc = acc - ym[l, j] * ap[j]
        e[l] = acc
    for i in range(order):
        for l in range(rows):
            acc = 0.0
            for j in range(order):
                acc = acc + pp[i, j] * ym[l, j].conjugate()
            gain[i, l] = acc
    for l in range(rows):
        for l2 in range(rows):
            acc = 0.0
            for j in range(order):
                acc = acc + ym[l, j] * gain[j, l2]
            cov[l, l2] = acc
        cov[l, l] = cov[l, l] + weight
    for l in range(rows):
        for l2 in range(rows):
            fac[l, l2] = cov[l, l2]
    if _chol_inplace(fac, rows) != 0:
        status[0] = 1
        return 0.0
    for l in range(rows):
        ll += 2.0 * log(fac[l, l].real)
        xe[l] = e[l]
    _chol_solve(fac, rows, xe)
    for j in range(order):
        for l in range(rows):
            col[l] = gain[j, l].conjugate()
        _chol_solve(fac, rows, col)
        for l in range(rows):
            xk[l, j] = col[l]
    for i in range(order):
        acc = ap[i]
        for l in range(rows):
            acc = acc + gain[i, l] * xe[l]
        af[i] = acc
    for i in range(order):
        for j in range(order):
            acc = pp[i, j]
            for l in range(rows):
                acc = acc - gain[i, l] * xk[l, j]
            pf[i, j] = acc
    for i in range(order):
        for j in range(i + 1, order):
            acc = 0.5 * (pf[i, j] + pf[j, i].conjugate())
            pf[i, j] = acc
            pf[j, i] = acc.conjugate()
        pf[i, i] = pf[i, i].real
    for l in range(rows):
        ll += e[l].real * xe[l].real + e[l].imag * xe[l].imag
    return ll


def filter_pass(ymat, yvec, weights, dinv, alphas, reps, double r_init,
                bint correct_first=True):
    """See pyloop.filter_pass."""
    cdef c128[:, :, ::1] ym = np.ascontiguousarray(ymat, dtype=np.complex128)
    cdef c128[:, ::1] yv = np.ascontiguousarray(yvec, dtype=np.complex128)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(dinv, dtype=np.float64)
    cdef double[::1] al = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef double[::1] re = np.ascontiguousarray(reps, dtype=np.float64)
    cdef Py_ssize_t n_bins = ym.shape[0], rows = ym.shape[1], order = ym.shape[2]

    a_pred_np = np.zeros((n_bins, order), dtype=np.complex128)
    p_pred_np = np.zeros((n_bins, order, order), dtype=np.complex128)
    a_filt_np = np.zeros((n_bins, order), dtype=np.complex128)
    p_filt_np = np.zeros((n_bins, order, order), dtype=np.complex128)
    innov_np = np.zeros((n_bins, rows), dtype=np.complex128)
    innov_cov_np = np.zeros((n_bins, rows, rows), dtype=np.complex128)
    cdef c128[:, ::1] a_pred = a_pred_np, a_filt = a_filt_np, innov = innov_np
    cdef c128[:, :, ::1] p_pred = p_pred_np, p_filt = p_filt_np, innov_cov = innov_cov_np

    gain_np = np.zeros((order, rows), dtype=np.complex128)
    fac_np = np.zeros((rows, rows), dtype=np.complex128)
    xk_np = np.zeros((rows, order), dtype=np.complex128)
    xe_np = np.zeros(rows, dtype=np.complex128)
    col_np = np.zeros(rows, dtype=np.complex128)
    cdef c128[:, ::1] gain = gain_np, fac = fac_np, xk = xk_np
    cdef c128[::1] xe = xe_np, col = col_np

    cdef double loglik = 0.0
    cdef Py_ssize_t m, i, j, l
    cdef int status = 0
    cdef Py_ssize_t bad_bin = -1
    cdef c128 acc
    with nogil:
        for m in range(n_bins):
            _predict_into(m, a_filt[m - 1] if m > 0 else a_filt[0],
                          p_filt[m - 1] if m > 0 else p_filt[0],
                          dv, al, re, r_init, a_pred[m], p_pred[m], order)
            if m == 0 and not correct_first:
                for l in range(rows):
                    acc = yv[0, l]
                    for j in range(order):
                        acc = acc - ym[0, l, j] * a_pred[0, j]
                    innov[0, l] = acc
                for i in range(order):
                    for l in range(rows):
                        acc = 0.0
                        for j in range(order):
                            acc = acc + p_pred[0, i, j] * ym[0, l, j].conjugate()
                        gain[i, l] = acc
                for l in range(rows):
                    for j in range(rows):
                        acc = 0.0
                        for i in range(order):
                            acc = acc + ym[0, l, i] * gain[i, j]
                        innov_cov[0, l, j] = acc
                    innov_cov[0, l, l] = innov_cov[0, l, l] + w[0]
                for i in range(order):
                    a_filt[0, i] = a_pred[0, i]
                    for j in range(order):
                        p_filt[0, i, j] = p_pred[0, i, j]
                continue
            loglik += _correct_into(ym[m], yv[m], w[m], a_pred[m], p_pred[m],
                                    a_filt[m], p_filt[m], innov[m], innov_cov[m],
                                    gain, fac, xe, col, xk, rows, order, &status)
            if status != 0:
                bad_bin = m
                break
    if status != 0:
        raise np.linalg.LinAlgError(
            f"bin {bad_bin}: innovation covariance not positive definite")
    return (a_pred_np, p_pred_np, a_filt_np, p_filt_np, innov_np, innov_cov_np,
            loglik)


def filter_loglik(ymat, yvec, weights, dinv, alphas, reps, double r_init,
                  bint correct_first=True):
    """See pyloop.filter_loglik."""
    cdef c128[:, :, ::1] ym = np.ascontiguousarray(ymat, dtype=np.complex128)
    cdef c128[:, ::1] yv = np.ascontiguousarray(yvec, dtype=np.complex128)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(dinv, dtype=np.float64)
    cdef double[::1] al = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef double[::1] re = np.ascontiguousarray(reps, dtype=np.float64)
    cdef Py_ssize_t n_bins = ym.shape[0], rows = ym.shape[1], order = ym.shape[2]

    af_np = np.zeros(order, dtype=np.complex128)
    pf_np = np.zeros((order, order), dtype=np.complex128)
    ap_np = np.zeros(order, dtype=np.complex128)
    pp_np = np.zeros((order, order), dtype=np.complex128)
    e_np = np.zeros(rows, dtype=np.complex128)
    cov_np = np.zeros((rows, rows), dtype=np.complex128)
    gain_np = np.zeros((order, rows), dtype=np.complex128)
    fac_np = np.zeros((rows, rows), dtype=np.complex128)
    xk_np = np.zeros((rows, order), dtype=np.complex128)
    xe_np = np.zeros(rows, dtype=np.complex128)
    col_np = np.zeros(rows, dtype=np.complex128)
    cdef c128[::1] af = af_np, ap = ap_np, e = e_np, xe = xe_np, col = col_np
    cdef c128[:, ::1] pf = pf_np, pp = pp_np, cov = cov_np
    cdef c128[:, ::1] gain = gain_np, fac = fac_np, xk = xk_np

    cdef double loglik = 0.0
    cdef Py_ssize_t m, i, j
    cdef int status = 0
    cdef Py_ssize_t bad_bin = -1
    with nogil:
        for i in range(order):
            pf[i, i] = r_init * dv[i]
        for m in range(n_bins):
            if m == 0:
                for i in range(order):
                    ap[i] = af[i]
                    for j in range(order):
                        pp[i, j] = pf[i, j]
                if not correct_first:
                    continue
            else:
                _predict_into(m, af, pf, dv, al, re, r_init, ap, pp, order)
            loglik += _correct_into(ym[m], yv[m], w[m], ap, pp, af, pf, e, cov,
                                    gain, fac, xe, col, xk, rows, order, &status)
            if status != 0:
                bad_bin = m
                break
    if status != 0:
        raise np.linalg.LinAlgError(
            f"bin {bad_bin}: innovation covariance not positive definite")
    return loglik


def smoother_pass(alphas, a_pred, p_pred, a_filt, p_filt):
    """See pyloop.smoother_pass."""
    cdef double[::1] al = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef c128[:, ::1] ap = np.ascontiguousarray(a_pred, dtype=np.complex128)
    cdef c128[:, :, ::1] pp = np.ascontiguousarray(p_pred, dtype=np.complex128)
    cdef c128[:, ::1] af = np.ascontiguousarray(a_filt, dtype=np.complex128)
    cdef c128[:, :, ::1] pf = np.ascontiguousarray(p_filt, dtype=np.complex128)
    cdef Py_ssize_t n_bins = af.shape[0], order = af.shape[1]

    a_sm_np = np.zeros((n_bins, order), dtype=np.complex128)
    p_sm_np = np.zeros((n_bins, order, order), dtype=np.complex128)
    cdef c128[:, ::1] a_sm = a_sm_np
    cdef c128[:, :, ::1] p_sm = p_sm_np

    fac_np = np.zeros((order, order), dtype=np.complex128)
    x_np = np.zeros((order, order), dtype=np.complex128)
    g_np = np.zeros((order, order), dtype=np.complex128)
    t_np = np.zeros((order, order), dtype=np.complex128)
    u_np = np.zeros((order, order), dtype=np.complex128)
    col_np = np.zeros(order, dtype=np.complex128)
    cdef c128[:, ::1] fac = fac_np, x = x_np, g = g_np, t = t_np, u = u_np
    cdef c128[::1] col = col_np

    cdef Py_ssize_t m, i, j, k
    cdef int status = 0
    cdef Py_ssize_t bad_bin = -1
    cdef c128 acc
    with nogil:
        for i in range(order):
            a_sm[n_bins - 1, i] = af[n_bins - 1, i]
            for j in range(order):
                p_sm[n_bins - 1, i, j] = pf[n_bins - 1, i, j]
        for m in range(n_bins - 2, -1, -1):
            # G = alpha * P_filt[m] @ P_pred[m+1]^{-1} = alpha * (P_pred[m+1]^{-1} P_filt[m])^H
            for i in range(order):
                for j in range(order):
                    fac[i, j] = pp[m + 1, i, j]
            if _chol_inplace(fac, order) != 0:
                status = 1
                bad_bin = m + 1
                break
            for j in range(order):
                for i in range(order):
                    col[i] = pf[m, i, j]
                _chol_solve(fac, order, col)
                for i in range(order):
                    x[i, j] = col[i]
            for i in range(order):
                for j in range(order):
                    g[i, j] = al[m] * x[j, i].conjugate()
            for i in range(order):
                acc = af[m, i]
                for j in range(order):
                    acc = acc + g[i, j] * (a_sm[m + 1, j] - ap[m + 1, j])
                a_sm[m, i] = acc
            for i in range(order):
                for j in range(order):
                    t[i, j] = p_sm[m + 1, i, j] - pp[m + 1, i, j]
            for i in range(order):
                for j in range(order):
                    acc = 0.0
                    for k in range(order):
                        acc = acc + g[i, k] * t[k, j]
                    u[i, j] = acc
            for i in range(order):
                for j in range(order):
                    acc = pf[m, i, j]
                    for k in range(order):
                        acc = acc + u[i, k] * g[j, k].conjugate()
                    p_sm[m, i, j] = acc
            for i in range(order):
                for j in range(i + 1, order):
                    acc = 0.5 * (p_sm[m, i, j] + p_sm[m, j, i].conjugate())
                    p_sm[m, i, j] = acc
                    p_sm[m, j, i] = acc.conjugate()
                p_sm[m, i, i] = p_sm[m, i, i].real
    if status != 0:
        raise np.linalg.LinAlgError(
            f"bin {bad_bin}: predicted covariance not positive definite")
    return a_sm_np, p_sm_np
