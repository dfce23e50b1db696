"""Phase-space Gaussian states and the interferometer's symplectic maps.

Quadrature ordering is (q1, p1, q2, p2, ...) with q = (a + a^dag)/2 and
p = (a - a^dag)/2i.  With this convention [q, p] = i/2 and the vacuum
covariance is I/4.  A map ``(S, d)`` sends a state with moments
``(mean, cov)`` to ``(S mean + d, S cov S^T)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .config import DualHomodyneScheme, MeasurementSetting, ModelConfig
from .errors import InvalidState, SchemeError

VACUUM_VARIANCE = 0.25
SYMPLECTIC_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureConvention:
    vacuum_variance: float = VACUUM_VARIANCE
    kappa: float = 0.5
    ordering: str = "q1,p1,q2,p2"

    def __post_init__(self):
        if self.vacuum_variance != VACUUM_VARIANCE:
            raise ValueError("vacuum variance is fixed to 1/4")


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of ``cov`` (each value listed once)."""
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    return np.sort(np.abs(ev.real))[::2]


@dataclass
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        n2 = self.mean.shape[0]
        if n2 % 2 or self.cov.shape != (n2, n2):
            raise InvalidState(
                f"mean of length {n2} and cov of shape {self.cov.shape} are inconsistent"
            )

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    def validate(self, atol: float = 1e-10) -> None:
        if not np.allclose(self.cov, self.cov.T, atol=atol):
            raise InvalidState("covariance matrix is not symmetric")
        herm = self.cov + 0.25j * symplectic_form(self.n_modes)
        if np.linalg.eigvalsh(herm).min() < -atol:
            raise InvalidState("covariance violates the uncertainty relation")

    def is_pure(self, atol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(symplectic_eigenvalues(self.cov) - VACUUM_VARIANCE) < atol))

    def marginal(self, mode: int) -> Tuple[np.ndarray, np.ndarray]:
        sl = slice(2 * mode, 2 * mode + 2)
        return self.mean[sl].copy(), self.cov[sl, sl].copy()


@dataclass
class SymplecticTransform:
    S: np.ndarray
    d: np.ndarray = field(default=None)

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=float)
        if self.d is None:
            self.d = np.zeros(self.S.shape[0])
        self.d = np.asarray(self.d, dtype=float)

    @classmethod
    def identity(cls, n_modes: int = 2) -> "SymplecticTransform":
        return cls(np.eye(2 * n_modes))

    def symplectic_defect(self) -> float:
        om = symplectic_form(self.S.shape[0] // 2)
        return float(np.abs(self.S @ om @ self.S.T - om).max())

    def apply(self, state: GaussianState) -> GaussianState:
        return GaussianState(self.S @ state.mean + self.d, self.S @ state.cov @ self.S.T)

    def then(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """Composite map: ``self`` first, then ``other``."""
        return SymplecticTransform(other.S @ self.S, other.S @ self.d + other.d)

    def inverse(self) -> "SymplecticTransform":
        s_inv = np.linalg.inv(self.S)
        return SymplecticTransform(s_inv, -s_inv @ self.d)


@dataclass(frozen=True)
class PhaseSpaceEllipse:
    """1-sigma contour of one mode's Wigner function."""

    stage: str
    mode: int
    center: Tuple[float, float]
    semi_major: float
    semi_minor: float
    angle: float

    @classmethod
    def from_marginal(cls, stage: str, mode: int, mean, cov) -> "PhaseSpaceEllipse":
        evals, evecs = np.linalg.eigh(cov)
        minor, major = np.sqrt(np.clip(evals, 0.0, None))
        if major - minor <= 1e-12 * major:
            angle = 0.0
        else:
            vx, vy = evecs[:, 1]
            angle = math.atan2(vy, vx) % math.pi
            if angle >= math.pi - 1e-15:
                angle = 0.0
        return cls(stage, mode, (float(mean[0]), float(mean[1])), float(major), float(minor), float(angle))


@dataclass
class LinearGaussianOutcomeModel:
    """Outcomes x ~ N(J theta + offset, sigma) around theta = 0."""

    jacobian: np.ndarray
    sigma: np.ndarray
    labels: List[str]
    offset: np.ndarray = None

    def __post_init__(self):
        self.jacobian = np.asarray(self.jacobian, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.offset is None:
            self.offset = np.zeros(self.jacobian.shape[0])
        m = self.jacobian.shape[0]
        if self.sigma.shape != (m, m) or len(self.labels) != m:
            raise ValueError("jacobian, sigma and labels disagree on the channel count")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-12):
            raise ValueError("outcome covariance must be symmetric")
        if np.linalg.eigvalsh(self.sigma).min() <= 0:
            raise ValueError("outcome covariance must be positive definite")

    @property
    def n_outcomes(self) -> int:
        return self.jacobian.shape[0]

    @property
    def n_params(self) -> int:
        return self.jacobian.shape[1]


def make_input_state(alpha: float, theta_alpha: float = 0.0) -> GaussianState:
    """Coherent state on mode 1, vacuum on mode 2."""
    mean = np.array([alpha * math.cos(theta_alpha), alpha * math.sin(theta_alpha), 0.0, 0.0])
    return GaussianState(mean, VACUUM_VARIANCE * np.eye(4))


def two_mode_squeezer(g: float, theta_g: float = math.pi / 2) -> SymplecticTransform:
    """a -> cosh(g) a - e^{i theta_g} sinh(g) b^dag, and the same with a <-> b."""
    ch, sh = math.cosh(g), math.sinh(g)
    c, s = math.cos(theta_g), math.sin(theta_g)
    S = np.array(
        [
            [ch, 0.0, -sh * c, -sh * s],
            [0.0, ch, -sh * s, sh * c],
            [-sh * c, -sh * s, ch, 0.0],
            [-sh * s, sh * c, 0.0, ch],
        ]
    )
    return SymplecticTransform(S)


def beam_splitter_5050(phase: float = math.pi / 2) -> SymplecticTransform:
    """Balanced splitter a -> (a + e^{i phase} b)/sqrt 2, b -> (a - e^{i phase} b)/sqrt 2.

    Any phase maps a two-mode squeezed vacuum to a product state; choosing
    ``phase`` equal to the squeezer phase aligns the squeezing axes with
    q and p, squeezed along orthogonal quadratures in the two outputs.
    """
    c, s = math.cos(phase), math.sin(phase)
    S = np.array(
        [
            [1.0, 0.0, c, -s],
            [0.0, 1.0, s, c],
            [1.0, 0.0, -c, s],
            [0.0, 1.0, -s, -c],
        ]
    ) / math.sqrt(2.0)
    return SymplecticTransform(S)


def encode_displacements(theta: Sequence[float], kappa: float = 0.5) -> SymplecticTransform:
    """Shift mode-1 (q, p) by kappa*(theta1, theta2) and mode-2 by kappa*(theta3, theta4)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (4,):
        raise ValueError("theta must have four components")
    return SymplecticTransform(np.eye(4), kappa * theta)


STAGES = ("input", "nbs", "encoded", "bs")


def pipeline_transforms(config: ModelConfig, theta=(0.0, 0.0, 0.0, 0.0)) -> List[SymplecticTransform]:
    return [
        two_mode_squeezer(config.g, config.theta_g),
        encode_displacements(theta, config.kappa),
        beam_splitter_5050(config.beam_splitter_phase),
    ]


def propagate_pipeline(config: ModelConfig, theta=(0.0, 0.0, 0.0, 0.0)):
    """States after each interferometer stage plus per-mode 1-sigma ellipses.

    Returns ``(stages, ellipses)`` where ``stages`` is a list of
    ``(label, GaussianState)`` in the order input, nbs, encoded, bs.
    """
    state = make_input_state(config.alpha, config.theta_alpha)
    stages = [(STAGES[0], state)]
    for label, tr in zip(STAGES[1:], pipeline_transforms(config, theta)):
        state = tr.apply(state)
        stages.append((label, state))
    ellipses = [
        PhaseSpaceEllipse.from_marginal(label, mode, *st.marginal(mode))
        for label, st in stages
        for mode in range(st.n_modes)
    ]
    return stages, ellipses


def _quadrature_row(mode: int, phi: float, n_modes: int = 2) -> np.ndarray:
    row = np.zeros(2 * n_modes)
    row[2 * mode] = math.cos(phi)
    row[2 * mode + 1] = math.sin(phi)
    return row


def setting_outcome_model(config: ModelConfig, setting: MeasurementSetting) -> LinearGaussianOutcomeModel:
    """Outcome statistics of one detector setting on the post-splitter state."""
    if len(setting.angles) != 2:
        raise SchemeError("a dual-homodyne setting must address both output modes")
    stages, _ = propagate_pipeline(config)
    out = stages[-1][1]
    bs = beam_splitter_5050(config.beam_splitter_phase)
    # mean of output = S_bs (mean_nbs + kappa theta) so d mean / d theta = kappa S_bs
    dmean = config.kappa * bs.S
    rows, penalty, labels = [], [], []
    for mode, phi, penalised in setting.channels():
        rows.append(_quadrature_row(mode, phi))
        penalty.append(VACUUM_VARIANCE if penalised else 0.0)
        labels.append(f"mode{mode + 1}@{phi:.6g}{'+het' if penalised else ''}")
    R = np.array(rows)
    sigma = R @ out.cov @ R.T + np.diag(penalty)
    sigma = 0.5 * (sigma + sigma.T)
    return LinearGaussianOutcomeModel(R @ dmean, sigma, labels, offset=R @ out.mean)


def homodyne_outcome_model(config: ModelConfig, scheme: DualHomodyneScheme) -> LinearGaussianOutcomeModel:
    """Outcome model of a single-setting scheme."""
    if not scheme.single:
        raise SchemeError(
            "alternating schemes have one outcome model per setting; use outcome_models()"
        )
    return setting_outcome_model(config, scheme.settings[0])


def outcome_models(config: ModelConfig, scheme: DualHomodyneScheme):
    """``[(weight, LinearGaussianOutcomeModel), ...]`` for every setting."""
    return [(w, setting_outcome_model(config, s)) for w, s in zip(scheme.weights, scheme.settings)]
