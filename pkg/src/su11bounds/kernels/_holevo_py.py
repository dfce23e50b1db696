"""Numpy reference implementation of the Holevo-objective kernels.

A point is a real array ``X`` of shape (d, 2r) holding ``[Re u | Im u]``
where ``u[k, m] = <e0|X_k|e_m>``.  With ``a, b = X[:, :r], X[:, r:]``:
``Re Z = a a^T + b b^T`` and ``Im Z = b a^T - a b^T``.
"""
import numpy as np

SUBGRADIENT_RTOL = 1e-12


def imag_z(X):
    r = X.shape[-1] // 2
    a, b = X[..., :r], X[..., r:]
    return b @ np.swapaxes(a, -1, -2) - a @ np.swapaxes(b, -1, -2)


def holevo_value(X):
    X = np.asarray(X, dtype=float)
    return float((X * X).sum() + np.linalg.svd(imag_z(X), compute_uv=False).sum())


def holevo_values(Xs):
    Xs = np.asarray(Xs, dtype=float)
    sv = np.linalg.svd(imag_z(Xs), compute_uv=False)
    return (Xs * Xs).sum(axis=(1, 2)) + sv.sum(axis=1)


def _chain(X, G):
    # d/dX of Tr(G^T ImZ(X)) for fixed G
    r = X.shape[1] // 2
    a, b = X[:, :r], X[:, r:]
    K = G.T - G
    return np.hstack([K @ b, -K @ a])


def holevo_subgradient(X):
    X = np.asarray(X, dtype=float)
    B = imag_z(X)
    U, s, Vt = np.linalg.svd(B)
    keep = s > SUBGRADIENT_RTOL * max(s.max(initial=0.0), 1.0)
    G = U[:, keep] @ Vt[keep]
    val = float((X * X).sum() + s.sum())
    return val, 2.0 * X + _chain(X, G)


def smoothed_holevo(X, mu):
    """Tr Re Z + sum_i sqrt(sigma_i^2 + mu^2) and its gradient."""
    X = np.asarray(X, dtype=float)
    B = imag_z(X)
    U, s, Vt = np.linalg.svd(B)
    root = np.sqrt(s * s + mu * mu)
    G = (U * (s / root)) @ Vt
    val = float((X * X).sum() + root.sum())
    return val, 2.0 * X + _chain(X, G)
