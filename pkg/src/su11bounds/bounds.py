"""SLD and Holevo Cramer-Rao bounds for pure-state models.

For a pure model the estimator operators only matter through the vectors
``X_k|e0>``.  Components along e0 are fixed to zero by the zero-mean
conditions and components outside the derivative span only add a PSD term
to Re Z without touching the constraints, so the unknowns are
``u[k, m] = <e0|X_k|e_m>`` for k = 1..d, m = 1..r.  The unbiasedness
conditions read ``2 Re sum_m u[k, m] A[j, m] = delta_jk`` with
``A[j, m] = <e_m|psi_j>``, and ``Z = u u^dag``.

Real coordinates: ``X = [Re u | Im u]`` of shape (d, 2r), flattened row-major.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import InfeasibleConstraints, ModelNotIdentifiable
from .model import OrthonormalFrame

CONSTRAINT_TOL = 1e-10
RANK_TOL = 1e-10


def qfim_pure(frame: OrthonormalFrame) -> np.ndarray:
    """Q_jk = 4 Re[<psi_j|psi_k> - <psi_j|psi0><psi0|psi_k>]."""
    D = frame.derivative_block
    Q = 4.0 * (D.conj() @ D.T).real
    return 0.5 * (Q + Q.T)


def sld_crb(Q: np.ndarray) -> float:
    Q = np.asarray(Q, dtype=float)
    ev = np.linalg.eigvalsh(Q)
    if ev.min() <= RANK_TOL * max(1.0, ev.max()):
        raise ModelNotIdentifiable()
    return float(np.trace(np.linalg.inv(Q)))


def holevo_objective(u: np.ndarray):
    """Z = u u^dag and h = Tr Re Z + TrAbs Im Z for complex ``u`` of shape (d, r)."""
    u = np.asarray(u, dtype=complex)
    Z = u @ u.conj().T
    h = float(np.trace(Z.real) + np.linalg.svd(Z.imag, compute_uv=False).sum())
    return Z, h


def to_complex(X: np.ndarray) -> np.ndarray:
    r = X.shape[1] // 2
    return X[:, :r] + 1j * X[:, r:]


def to_real(u: np.ndarray) -> np.ndarray:
    return np.hstack([u.real, u.imag])


@dataclass
class HcrbProblem:
    frame: OrthonormalFrame
    C: np.ndarray
    e: np.ndarray
    particular: np.ndarray
    null_basis: np.ndarray

    @property
    def d(self) -> int:
        return self.frame.d

    @property
    def r(self) -> int:
        return self.frame.r

    @property
    def n_unknowns(self) -> int:
        return self.C.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.C.shape[0]

    @property
    def null_dim(self) -> int:
        return self.null_basis.shape[1]

    def point(self, y: np.ndarray) -> np.ndarray:
        x = self.particular + self.null_basis @ y
        return x.reshape(self.d, 2 * self.r)

    def coords(self, X: np.ndarray) -> np.ndarray:
        return self.null_basis.T @ (X.ravel() - self.particular)

    def residual(self, X: np.ndarray) -> float:
        return float(np.linalg.norm(self.C @ X.ravel() - self.e))

    def sld_point(self) -> np.ndarray:
        """Feasible point built from the SLD operators, u = 2 Q^{-1} conj(A)."""
        D = self.frame.derivative_block
        Q = qfim_pure(self.frame)
        return to_real(2.0 * np.linalg.solve(Q, D.conj()))


def hcrb_constraints(frame: OrthonormalFrame) -> HcrbProblem:
    d, r = frame.d, frame.r
    D = frame.derivative_block
    M = np.hstack([D.real, -D.imag])  # x_k . M[j] = Re sum_m u[k, m] A[j, m]
    n = 2 * r
    C = np.zeros((d * d, d * n))
    e = np.zeros(d * d)
    for j in range(d):
        for k in range(d):
            C[j * d + k, k * n:(k + 1) * n] = M[j]
            e[j * d + k] = 0.5 if j == k else 0.0
    U, s, Vt = np.linalg.svd(C)
    rank = int((s > RANK_TOL * max(1.0, s.max(initial=0.0))).sum())
    if rank < d * d:
        raise InfeasibleConstraints()
    particular = Vt[:rank].T @ ((U[:, :rank].T @ e) / s[:rank])
    null_basis = Vt[rank:].T.copy()
    return HcrbProblem(frame, C, e, particular, null_basis)


@dataclass
class HcrbOptions:
    seed: int = 0
    n_starts: int = 8
    subgradient_iters: int = 200
    smoothing: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9)
    rel_tol: float = 1e-6
    perturbation: float = 0.5


@dataclass
class HcrbSolution:
    value: float
    u: np.ndarray
    Z: np.ndarray
    residual: float
    spread: float
    status: str
    start_values: list = field(default_factory=list)
    null_dim: int = 0
    backend: str = kernels.BACKEND

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "residual": self.residual,
            "spread": self.spread,
            "null_dim": self.null_dim,
            "start_values": list(self.start_values),
            "u": [[[float(z.real), float(z.imag)] for z in row] for row in self.u],
            "Z": [[[float(z.real), float(z.imag)] for z in row] for row in self.Z],
        }


def _descend(problem: HcrbProblem, y: np.ndarray, opts: HcrbOptions) -> np.ndarray:
    N = problem.null_basis

    def value(yy):
        return kernels.holevo_value(problem.point(yy))

    # subgradient warm start with diminishing normalised steps
    best_y, best_f = y.copy(), value(y)
    step0 = 0.2 * (1.0 + np.linalg.norm(problem.point(y)))
    for it in range(opts.subgradient_iters):
        f, gX = kernels.holevo_subgradient(problem.point(y))
        if f < best_f:
            best_y, best_f = y.copy(), f
        gy = N.T @ gX.ravel()
        gn = np.linalg.norm(gy)
        if gn < 1e-14:
            break
        y = y - (step0 / math.sqrt(it + 1.0)) * gy / gn
    y = best_y

    # smoothing continuation: sum_i sqrt(sigma_i^2 + mu^2) replaces TrAbs
    scale = 1.0 + best_f
    for mu in opts.smoothing:
        mu_s = mu * scale

        def fun(yy, mu_s=mu_s):
            f, gX = kernels.smoothed_holevo(problem.point(yy), mu_s)
            return f, N.T @ gX.ravel()

        res = minimize(fun, y, jac=True, method="L-BFGS-B",
                       options={"maxiter": 2000, "gtol": 1e-12, "ftol": 1e-16})
        if value(res.x) <= value(y) + 1e-15 * scale or mu == opts.smoothing[0]:
            y = res.x
    return y


def hcrb_pure(frame: OrthonormalFrame, opts: Optional[HcrbOptions] = None) -> HcrbSolution:
    """Minimise the Holevo functional over locally unbiased operator tuples."""
    opts = opts or HcrbOptions()
    problem = hcrb_constraints(frame)
    if problem.null_dim == 0:
        X = problem.point(np.zeros(0))
        Z, h = holevo_objective(to_complex(X))
        return HcrbSolution(h, to_complex(X), Z, problem.residual(X), 0.0, "exact", [h], 0)

    y_sld = problem.coords(problem.sld_point())
    starts = [y_sld]
    radius = opts.perturbation * (1.0 + np.linalg.norm(y_sld))
    for i in range(1, opts.n_starts):
        rng = np.random.default_rng([opts.seed, i])
        starts.append(y_sld + radius * rng.standard_normal(problem.null_dim))

    finals = []
    for y0 in starts:
        y = _descend(problem, y0, opts)
        finals.append((kernels.holevo_value(problem.point(y)), y))
    values = [f for f, _ in finals]
    best = min(range(len(finals)), key=lambda i: (values[i], i))
    h, y = finals[best]
    X = problem.point(y)
    u = to_complex(X)
    Z, h = holevo_objective(u)
    spread = max(values) - min(values)
    status = "converged" if spread <= opts.rel_tol * (1.0 + h) else "stalled"
    return HcrbSolution(h, u, Z, problem.residual(X), float(spread), status, values,
                        problem.null_dim)


@dataclass(frozen=True)
class ReferenceBounds:
    g: float
    cs: float
    ch: float
    cf: float
    fi_diag: float


def paper_reference_bounds(g: float) -> ReferenceBounds:
    """Closed-form curves quoted for the interferometer model."""
    if g < 0:
        raise ValueError("g must be non-negative")
    ch = 8.0 * math.exp(-2.0 * g)
    return ReferenceBounds(g, 4.0 / math.cosh(2.0 * g), ch, ch, math.exp(2.0 * g) / 2.0)
