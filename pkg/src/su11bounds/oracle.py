"""Independent brute-force checks of the Holevo bound.

Nothing here reuses the engine's constraint system, objective or kernels.
Estimator operators are built as explicit Hermitian matrices on
span{e_0..e_r}, the unbiasedness map is assembled from matrix traces
applied to unit parameter vectors, and TrAbs is taken from the eigenvalues
of the Hermitian matrix i Im Z.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from .errors import InfeasibleConstraints
from .model import OrthonormalFrame


def _operators(params: np.ndarray, d: int, r: int) -> np.ndarray:
    """Hermitian X_k with <e0|X_k|e_m> = t + i s, zero elsewhere; params shape (d, r, 2)."""
    n = r + 1
    X = np.zeros((d, n, n), dtype=complex)
    u = params[..., 0] + 1j * params[..., 1]
    X[:, 0, 1:] = u
    X[:, 1:, 0] = u.conj()
    return X


class _Model:
    def __init__(self, frame: OrthonormalFrame):
        self.d, self.r = frame.d, frame.r
        vecs = frame.A  # row j: components of psi_j
        psi0 = vecs[0]
        self.rho = np.outer(psi0, psi0.conj())
        self.drho = [np.outer(v, psi0.conj()) + np.outer(psi0, v.conj()) for v in vecs[1:]]
        self.n_params = self.d * self.r * 2

        def constraint_map(p):
            X = _operators(p.reshape(self.d, self.r, 2), self.d, self.r)
            return np.array(
                [np.trace(self.drho[j] @ X[k]).real for j in range(self.d) for k in range(self.d)]
            )

        cols = [constraint_map(col) for col in np.eye(self.n_params)]
        self.L = np.array(cols).T
        self.target = np.eye(self.d).ravel()
        rank = np.linalg.matrix_rank(self.L, tol=1e-10 * max(1.0, np.abs(self.L).max()))
        if rank < self.d * self.d:
            raise InfeasibleConstraints()
        self.p0 = np.linalg.lstsq(self.L, self.target, rcond=None)[0]
        self.N = null_space(self.L, rcond=1e-10)

    def values(self, P: np.ndarray, mu: float = 0.0) -> np.ndarray:
        """h for a batch of parameter vectors, shape (batch, n_params).

        ``mu > 0`` replaces each |lambda| by sqrt(lambda^2 + mu^2).
        """
        u = (P[:, 0::2] + 1j * P[:, 1::2]).reshape(-1, self.d, self.r)
        # Tr(rho X_j X_k) = <e0|X_j X_k|e0> = sum_m u_jm conj(u_km)
        Z = u @ np.conj(np.swapaxes(u, 1, 2))
        tr_re = np.einsum("bii->b", Z).real
        lam = np.linalg.eigvalsh(1j * Z.imag)
        if mu:
            return tr_re + np.sqrt(lam * lam + mu * mu).sum(axis=1)
        return tr_re + np.abs(lam).sum(axis=1)

    def value_matrix(self, p: np.ndarray) -> float:
        """Single-point h straight from operator products."""
        X = _operators(p.reshape(self.d, self.r, 2), self.d, self.r)
        Z = np.array([[np.trace(self.rho @ X[j] @ X[k]) for k in range(self.d)] for j in range(self.d)])
        lam = np.linalg.eigvalsh(1j * Z.imag)
        return float(np.trace(Z).real + np.abs(lam).sum())


def hcrb_oracle(frame: OrthonormalFrame, samples: int = 100_000, seed: int = 12345,
                max_evals: int = 200_000) -> float:
    """Upper estimate of the Holevo bound: random search, then direction-set descent."""
    model = _Model(frame)
    p0, N = model.p0, model.N
    if N.shape[1] == 0:
        return model.value_matrix(p0)
    k = N.shape[1]
    rng = np.random.default_rng(seed)
    base = 1.0 + np.linalg.norm(p0)
    best_y, best_f = np.zeros(k), float(model.values(p0[None])[0])
    center = best_y
    for radius in base * np.array([1.0, 0.3, 0.1, 0.03]):
        for _ in range(max(1, samples // (4 * 25_000))):
            Y = center + radius * rng.standard_normal((25_000, k))
            f = model.values(p0 + Y @ N.T)
            i = int(np.argmin(f))
            if f[i] < best_f:
                best_f, best_y = float(f[i]), Y[i].copy()
        center = best_y

    # Powell conjugate-direction sweeps on sum_i sqrt(lambda_i^2 + mu^2),
    # tightening mu; the exact objective only decides which iterate to keep
    y, fy = best_y, best_f
    for mu in base * np.logspace(-1, -9, 9):
        def smooth(yy, mu=mu):
            return float(model.values((p0 + N @ yy)[None], mu)[0])
        res = minimize(smooth, y, method="Powell",
                       options={"xtol": 1e-12, "ftol": 1e-15, "maxfev": max_evals})
        f_new = float(model.values((p0 + N @ res.x)[None])[0])
        if f_new <= fy:
            y, fy = res.x, f_new
    return model.value_matrix(p0 + N @ y)


def hcrb_dual_bound(frame: OrthonormalFrame, iters: int = 3000) -> float:
    """Lower bound on the Holevo bound by projected ascent on its dual.

    For real antisymmetric K with spectral norm <= 1, the minimum of
    Tr Re Z + Tr(K^T Im Z) over locally unbiased tuples never exceeds the
    bound; this maximises that minimum over K.
    """
    model = _Model(frame)
    d, r = model.d, model.r
    p0, N = model.p0, model.N
    # quadratic form matrices on the parameter vector: Re Z and Im Z entries
    n = model.n_params

    def imz_form(j, k):
        # Im Z_jk = sum_m s_jm t_km - t_jm s_km for params (t, s)
        F = np.zeros((n, n))
        for m in range(r):
            tj, sj = 2 * (j * r + m), 2 * (j * r + m) + 1
            tk, sk = 2 * (k * r + m), 2 * (k * r + m) + 1
            F[sj, tk] += 0.5
            F[tk, sj] += 0.5
            F[tj, sk] -= 0.5
            F[sk, tj] -= 0.5
        return F

    forms = {(j, k): imz_form(j, k) for j in range(d) for k in range(d)}

    def inner(K):
        H = np.eye(n) + sum(K[j, k] * forms[j, k] for j in range(d) for k in range(d))
        if N.shape[1]:
            y = np.linalg.lstsq(N.T @ H @ N, -N.T @ H @ p0, rcond=None)[0]
            p = p0 + N @ y
        else:
            p = p0
        imz = np.array([[p @ forms[j, k] @ p for k in range(d)] for j in range(d)])
        return float(p @ H @ p), imz

    K = np.zeros((d, d))
    best = -np.inf
    for it in range(iters):
        v, imz = inner(K)
        best = max(best, v)
        K = K + (0.5 / np.sqrt(it + 1.0)) * imz
        K = 0.5 * (K - K.T)
        U, s, Vt = np.linalg.svd(K)
        K = U @ np.diag(np.minimum(s, 1.0)) @ Vt
        K = 0.5 * (K - K.T)
    return best
