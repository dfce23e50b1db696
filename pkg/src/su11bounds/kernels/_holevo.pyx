# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Holevo-objective kernels (one-sided Jacobi SVD, d <= 16)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef enum:
    MAXD = 16
cdef double SUBGRADIENT_RTOL = 1e-12

MAX_DIM = MAXD


cdef void _imag_z(const double[:, ::1] X, double* B, int d, int r) nogil:
    cdef int j, k, m
    cdef double acc
    for j in range(d):
        for k in range(d):
            acc = 0.0
            for m in range(r):
                acc += X[j, r + m] * X[k, m] - X[j, m] * X[k, r + m]
            B[j * d + k] = acc


cdef double _sumsq(const double[:, ::1] X) nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            acc += X[i, j] * X[i, j]
    return acc


cdef void _jacobi_svd(double* A, double* V, double* s, int n) nogil:
    # one-sided Jacobi: on exit A holds U*diag(s) column-wise, V the right vectors
    cdef int i, p, q, sweep, rotated
    cdef double alpha, beta, gamma, zeta, t, c, sn, tmp
    for i in range(n * n):
        V[i] = 0.0
    for i in range(n):
        V[i * n + i] = 1.0
    for sweep in range(60):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(n):
                    alpha += A[i * n + p] * A[i * n + p]
                    beta += A[i * n + q] * A[i * n + q]
                    gamma += A[i * n + p] * A[i * n + q]
                if gamma == 0.0 or fabs(gamma) <= 1e-15 * sqrt(alpha * beta):
                    continue
                rotated = 1
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                sn = c * t
                for i in range(n):
                    tmp = A[i * n + p]
                    A[i * n + p] = c * tmp - sn * A[i * n + q]
                    A[i * n + q] = sn * tmp + c * A[i * n + q]
                    tmp = V[i * n + p]
                    V[i * n + p] = c * tmp - sn * V[i * n + q]
                    V[i * n + q] = sn * tmp + c * V[i * n + q]
        if not rotated:
            break
    for p in range(n):
        alpha = 0.0
        for i in range(n):
            alpha += A[i * n + p] * A[i * n + p]
        s[p] = sqrt(alpha)


cdef double _value(const double[:, ::1] X) nogil:
    cdef int d = X.shape[0]
    cdef int r = X.shape[1] // 2
    cdef double B[MAXD * MAXD]
    cdef double V[MAXD * MAXD]
    cdef double s[MAXD]
    cdef double acc
    cdef int i
    _imag_z(X, B, d, r)
    _jacobi_svd(B, V, s, d)
    acc = _sumsq(X)
    for i in range(d):
        acc += s[i]
    return acc


cdef double _gradient(const double[:, ::1] X, double mu, int smooth, double[:, ::1] out) nogil:
    # out <- 2X + (G^T - G)[b, -a] with G = sum_i w_i u_i v_i^T
    cdef int d = X.shape[0]
    cdef int r = X.shape[1] // 2
    cdef double B[MAXD * MAXD]
    cdef double V[MAXD * MAXD]
    cdef double G[MAXD * MAXD]
    cdef double s[MAXD]
    cdef double w[MAXD]
    cdef double val, smax, kjl
    cdef int i, j, l, m
    _imag_z(X, B, d, r)
    _jacobi_svd(B, V, s, d)
    val = _sumsq(X)
    smax = 1.0
    for i in range(d):
        if s[i] > smax:
            smax = s[i]
    for i in range(d):
        if smooth:
            w[i] = sqrt(s[i] * s[i] + mu * mu)
            val += w[i]
            w[i] = 1.0 / w[i]
        else:
            val += s[i]
            w[i] = 1.0 / s[i] if s[i] > SUBGRADIENT_RTOL * smax else 0.0
    # B now holds U diag(s); so U_i s_i * w_i with w_i = 1/s_i or 1/sqrt(s^2+mu^2)
    for j in range(d):
        for l in range(d):
            kjl = 0.0
            for i in range(d):
                kjl += B[j * d + i] * w[i] * V[l * d + i]
            G[j * d + l] = kjl
    for j in range(d):
        for m in range(2 * r):
            out[j, m] = 2.0 * X[j, m]
    for j in range(d):
        for l in range(d):
            kjl = G[l * d + j] - G[j * d + l]
            if kjl == 0.0:
                continue
            for m in range(r):
                out[j, m] += kjl * X[l, r + m]
                out[j, r + m] -= kjl * X[l, m]
    return val


def _check(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] % 2 or X.shape[0] > MAXD:
        raise ValueError(f"unsupported kernel input shape {X.shape}")
    return X


def holevo_value(X):
    cdef double[:, ::1] xv = _check(X)
    return _value(xv)


def holevo_values(Xs):
    Xs = np.ascontiguousarray(Xs, dtype=np.float64)
    if Xs.ndim != 3 or Xs.shape[2] % 2 or Xs.shape[1] > MAXD:
        raise ValueError(f"unsupported kernel input shape {Xs.shape}")
    cdef double[:, :, ::1] xs = Xs
    cdef Py_ssize_t n = xs.shape[0], i
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _value(xs[i])
    return out


def holevo_subgradient(X):
    cdef double[:, ::1] xv = _check(X)
    grad = np.empty_like(np.asarray(xv))
    cdef double val = _gradient(xv, 0.0, 0, grad)
    return val, grad


def smoothed_holevo(X, double mu):
    cdef double[:, ::1] xv = _check(X)
    grad = np.empty_like(np.asarray(xv))
    cdef double val = _gradient(xv, mu, 1, grad)
    return val, grad
