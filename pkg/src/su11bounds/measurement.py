"""Dual-homodyne Fisher information and Monte Carlo estimator checks."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .bounds import hcrb_pure, paper_reference_bounds, qfim_pure, sld_crb
from .config import DualHomodyneScheme, ModelConfig
from .errors import ParametersNotIdentifiable
from .gaussian import LinearGaussianOutcomeModel, homodyne_outcome_model, outcome_models
from .model import gaussian_gram, orthonormalize, paper_frame

DEFAULT_BLOCK = 1 << 16


def fisher_information(model: LinearGaussianOutcomeModel) -> np.ndarray:
    """F = J^T Sigma^{-1} J for a Gaussian model whose covariance does not depend on theta."""
    J = model.jacobian
    F = J.T @ np.linalg.solve(model.sigma, J)
    return 0.5 * (F + F.T)


def scheme_fisher_information(config: ModelConfig, scheme: DualHomodyneScheme) -> np.ndarray:
    """Per-shot FI of a scheme; alternated settings contribute with their weights."""
    return sum(w * fisher_information(m) for w, m in outcome_models(config, scheme))


def trace_inverse_fi(F: np.ndarray) -> Optional[float]:
    """Tr F^{-1}, or None when F is singular."""
    ev = np.linalg.eigvalsh(F)
    if ev.min() <= 1e-10 * max(1.0, ev.max()):
        return None
    return float(np.trace(np.linalg.inv(F)))


@dataclass
class OutcomeBatch:
    data: np.ndarray  # (shots, channels)
    theta_true: np.ndarray
    seed: int
    block_size: int
    labels: List[str]

    @property
    def shots(self) -> int:
        return self.data.shape[0]

    def save(self, path) -> Path:
        """Column-major float64 payload at ``path`` plus a ``.json`` sidecar."""
        path = Path(path)
        np.asfortranarray(self.data, dtype="<f8").T.tofile(path)
        sidecar = path.with_suffix(path.suffix + ".json")
        meta = {
            "shots": self.shots,
            "channels": self.data.shape[1],
            "layout": "column-major float64 little-endian",
            "block_size": self.block_size,
            "seed": self.seed,
            "theta_true": [float(t) for t in self.theta_true],
            "labels": list(self.labels),
        }
        sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return sidecar

    @classmethod
    def load(cls, path) -> "OutcomeBatch":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        flat = np.fromfile(path, dtype="<f8")
        data = flat.reshape(meta["channels"], meta["shots"]).T.copy()
        return cls(data, np.array(meta["theta_true"]), meta["seed"], meta["block_size"], meta["labels"])


def _sample_block(mean, L, seed, index, n):
    rng = np.random.default_rng([seed, index])
    return mean + rng.standard_normal((n, L.shape[0])) @ L.T


def sample_outcomes(model: LinearGaussianOutcomeModel, theta_true, shots: int, seed: int,
                    block_size: int = DEFAULT_BLOCK, workers: int = 1) -> OutcomeBatch:
    """Draw i.i.d. outcomes in fixed-size blocks, block b seeded by (seed, b).

    The result depends on ``(seed, block_size)`` only, not on ``workers``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    theta_true = np.asarray(theta_true, dtype=float)
    mean = model.offset + model.jacobian @ theta_true
    L = np.linalg.cholesky(model.sigma)
    sizes = [min(block_size, shots - s) for s in range(0, shots, block_size)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(lambda a: _sample_block(mean, L, seed, *a), enumerate(sizes)))
    else:
        blocks = [_sample_block(mean, L, seed, b, n) for b, n in enumerate(sizes)]
    return OutcomeBatch(np.vstack(blocks), theta_true, seed, block_size, list(model.labels))


@dataclass
class EstimationResult:
    shots: int
    seed: int
    theta_true: np.ndarray
    theta_hat_mean: np.ndarray
    bias_se: np.ndarray
    mse: np.ndarray
    mse_se: np.ndarray
    tr_mse: float
    tr_mse_se: float

    def to_dict(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            out[key] = val.tolist() if isinstance(val, np.ndarray) else val
        return out


def gls_matrix(model: LinearGaussianOutcomeModel) -> np.ndarray:
    """(J^T S^-1 J)^-1 J^T S^-1, raising when J lacks full column rank."""
    J = model.jacobian
    if np.linalg.matrix_rank(J, tol=1e-10 * max(1.0, np.abs(J).max())) < J.shape[1]:
        raise ParametersNotIdentifiable()
    SiJ = np.linalg.solve(model.sigma, J)
    return np.linalg.solve(J.T @ SiJ, SiJ.T)


def estimate_and_mse(batch: OutcomeBatch, model: LinearGaussianOutcomeModel, theta_true) -> EstimationResult:
    """Per-shot GLS estimates and their empirical (single-shot) MSE matrix."""
    W = gls_matrix(model)
    theta_true = np.asarray(theta_true, dtype=float)
    est = (batch.data - model.offset) @ W.T
    err = est - theta_true
    M = err.shape[0]
    outer = err[:, :, None] * err[:, None, :]
    mse = outer.mean(axis=0)
    mse_se = outer.std(axis=0, ddof=1) / math.sqrt(M) if M > 1 else np.zeros_like(mse)
    sq = (err * err).sum(axis=1)
    return EstimationResult(
        shots=M,
        seed=batch.seed,
        theta_true=theta_true,
        theta_hat_mean=est.mean(axis=0),
        bias_se=(err.std(axis=0, ddof=1) / math.sqrt(M)) if M > 1 else np.zeros(err.shape[1]),
        mse=mse,
        mse_se=mse_se,
        tr_mse=float(sq.mean()),
        tr_mse_se=float(sq.std(ddof=1) / math.sqrt(M)) if M > 1 else 0.0,
    )


BOUNDS_COLUMNS = (
    "g",
    "cs_engine",
    "ch_engine",
    "ch_status",
    "cs_paper",
    "ch_paper",
    "cf_paper",
    "tr_finv_engine",
    "tr_mse_mc",
)


@dataclass
class BoundsRecord:
    g: float
    cs_engine: float
    ch_engine: float
    ch_status: str
    cs_paper: float
    ch_paper: float
    cf_paper: float
    tr_finv_engine: Optional[float] = None
    tr_mse_mc: Optional[float] = None

    def ordering_violations(self, tol: float = 1e-6) -> List[str]:
        flags = []
        if self.ch_status in ("converged", "exact"):
            if self.ch_engine < self.cs_engine - tol:
                flags.append("ch_engine < cs_engine")
            if self.ch_engine > 2.0 * self.cs_engine + tol:
                flags.append("ch_engine > 2 cs_engine")
        if self.tr_finv_engine is not None and self.tr_finv_engine < self.ch_engine - tol * (1 + self.ch_engine):
            flags.append("tr_finv_engine < ch_engine")
        return flags

    def row(self) -> list:
        return [getattr(self, c) for c in BOUNDS_COLUMNS]


def engine_frame(alpha: float, g: float, gram: str = "paper", config: Optional[ModelConfig] = None):
    if gram == "paper":
        return paper_frame(alpha, g)
    if gram == "gaussian":
        return orthonormalize(gaussian_gram(config or ModelConfig(alpha=alpha, g=g)))
    raise ValueError(f"unknown gram source {gram!r}")


def bound_comparison(g: float, scheme: DualHomodyneScheme, alpha: float = 1.0,
                     theta_g: float = math.pi / 2, kappa: float = 0.5, gram: str = "paper",
                     shots: Optional[int] = None, seed: int = 0) -> BoundsRecord:
    """One row of engine bounds next to the closed-form reference curves."""
    config = ModelConfig(alpha=alpha, g=g, theta_g=theta_g, kappa=kappa)
    frame = engine_frame(alpha, g, gram, config)
    cs = sld_crb(qfim_pure(frame))
    sol = hcrb_pure(frame)
    ref = paper_reference_bounds(g)
    tr_finv = trace_inverse_fi(scheme_fisher_information(config, scheme))
    tr_mc = None
    if shots is not None and scheme.single and tr_finv is not None:
        model = homodyne_outcome_model(config, scheme)
        theta = np.zeros(model.n_params)
        tr_mc = estimate_and_mse(sample_outcomes(model, theta, shots, seed), model, theta).tr_mse
    return BoundsRecord(g, cs, sol.value, sol.status, ref.cs, ref.ch, ref.cf, tr_finv, tr_mc)
