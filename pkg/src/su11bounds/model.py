"""Pure-state statistical model: Gram data of the state and its derivatives.

Index 0 is the state |psi0>, indices 1..d the derivative states
|psi_j> = d|psi>/d theta_j at theta = 0.  ``G[j, k] = <psi_j|psi_k>``.

Frame coefficients follow the bra-ket layout of a basis expansion:
``A[j, m] = <e_m|psi_j>``, hence ``G = A.conj() @ A.T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ModelConfig
from .gaussian import beam_splitter_5050, propagate_pipeline, symplectic_form

GRAM_NORM_TOL = 1e-8


def _complex_to_pairs(arr: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(arr)]


def _pairs_to_complex(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


@dataclass
class PureModelGram:
    G: np.ndarray

    def __post_init__(self):
        self.G = np.asarray(self.G, dtype=complex)
        if self.G.ndim != 2 or self.G.shape[0] != self.G.shape[1] or self.G.shape[0] < 2:
            raise ValueError(f"Gram matrix must be square with size >= 2, got {self.G.shape}")

    @property
    def d(self) -> int:
        return self.G.shape[0] - 1

    def is_hermitian_psd(self, atol: float = 1e-10) -> bool:
        if not np.allclose(self.G, self.G.conj().T, atol=atol):
            return False
        return bool(np.linalg.eigvalsh(0.5 * (self.G + self.G.conj().T)).min() >= -atol)

    def to_dict(self) -> dict:
        return {"kind": "pure_model_gram", "d": self.d, "G": _complex_to_pairs(self.G)}

    @classmethod
    def from_dict(cls, data: dict) -> "PureModelGram":
        return cls(_pairs_to_complex(data["G"]))


@dataclass
class OrthonormalFrame:
    """Expansion of |psi_0..d> in an orthonormal basis {e_0, ..., e_r}, e_0 = psi0."""

    A: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        if not np.allclose(self.A[0], np.eye(1, self.A.shape[1])[0], atol=1e-12):
            raise ValueError("row 0 of a frame must be (1, 0, ..., 0)")

    @property
    def d(self) -> int:
        return self.A.shape[0] - 1

    @property
    def r(self) -> int:
        return self.A.shape[1] - 1

    @property
    def derivative_block(self) -> np.ndarray:
        """Components of the derivative states orthogonal to psi0, shape (d, r)."""
        return self.A[1:, 1:]

    def gram(self) -> PureModelGram:
        return PureModelGram(self.A.conj() @ self.A.T)

    def to_dict(self) -> dict:
        return {"kind": "orthonormal_frame", "d": self.d, "r": self.r, "A": _complex_to_pairs(self.A)}

    @classmethod
    def from_dict(cls, data: dict) -> "OrthonormalFrame":
        return cls(_pairs_to_complex(data["A"]))


def paper_coefficients(alpha: float, g: float, sinh_signs=(1, 1)) -> np.ndarray:
    """Basis-expansion coefficients of the four-parameter interferometer model.

    ``sinh_signs`` flips the sign of the sinh(g)/2 entries of (psi1, psi3)
    and of (psi2, psi4) respectively; ``(1, 1)`` is the literal expansion.
    """
    ch, sh = math.cosh(g), math.sinh(g)
    s13, s24 = sinh_signs
    a = abs(alpha)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [-1j * a * ch, s13 * 1j * sh / 2, -1j * ch / 2],
            [0.0, -s24 * sh / 2, -ch / 2],
            [-1j * a * sh, 1j * ch / 2, -s13 * 1j * sh / 2],
            [0.0, ch / 2, s24 * sh / 2],
        ],
        dtype=complex,
    )


def paper_frame(alpha: float, g: float, sinh_signs=(1, 1)) -> OrthonormalFrame:
    return OrthonormalFrame(paper_coefficients(alpha, g, sinh_signs))


def paper_gram(alpha: float, g: float, sinh_signs=(1, 1)) -> PureModelGram:
    return paper_frame(alpha, g, sinh_signs).gram()


# (pre-splitter quadrature index, scalar) such that d/d theta_j D = scalar * x_idx * D
# at theta = 0, with D = exp(2 i kappa (theta2 q1 - theta1 p1)) etc.
_GENERATORS = ((1, -1j), (0, 1j), (3, -1j), (2, 1j))


def derivative_generators(config: ModelConfig):
    """Per-parameter ``(lambda_j, w_j)`` with |psi_j> = lambda_j (w_j . x)|psi_out>.

    ``w_j`` is expressed in post-splitter quadratures.
    """
    if config.d != 4:
        raise ValueError("the interferometer model has exactly four parameters")
    s_inv_t = np.linalg.inv(beam_splitter_5050(config.beam_splitter_phase).S).T
    gens = []
    for idx, phase in _GENERATORS:
        e = np.zeros(4)
        e[idx] = 1.0
        gens.append((2.0 * config.kappa * phase, s_inv_t @ e))
    return gens


def gaussian_gram(config: ModelConfig) -> PureModelGram:
    """Gram data from the first and second moments of the output state."""
    stages, _ = propagate_pipeline(config)
    out = stages[-1][1]
    mu = out.mean
    second = out.cov + np.outer(mu, mu) + 0.25j * symplectic_form(2)
    gens = derivative_generators(config)
    d = len(gens)
    G = np.zeros((d + 1, d + 1), dtype=complex)
    G[0, 0] = 1.0
    for j, (lj, wj) in enumerate(gens, start=1):
        G[0, j] = lj * (wj @ mu)
        G[j, 0] = np.conj(G[0, j])
        for k, (lk, wk) in enumerate(gens, start=1):
            G[j, k] = np.conj(lj) * lk * (wj @ second @ wk)
    return PureModelGram(G)


def _factor(G: np.ndarray) -> np.ndarray:
    """Rows v_j with vdot(v_j, v_k) = G[j, k]."""
    H = 0.5 * (G + G.conj().T)
    lam, V = np.linalg.eigh(H)
    lam = np.clip(lam, 0.0, None)
    return (V * np.sqrt(lam)).conj()


def orthonormalize(gram: PureModelGram, rank_tol: float = 1e-10) -> OrthonormalFrame:
    """Gram-Schmidt (two passes) over psi0, psi1, ..., psi_d.

    A derivative state opens a new basis direction when its residual norm
    squared exceeds ``rank_tol`` times the largest Gram eigenvalue.  Each new
    basis vector is phased so its defining coefficient is real positive.
    """
    G = gram.G
    if abs(G[0, 0] - 1.0) > GRAM_NORM_TOL:
        raise ValueError(f"state is not normalised: G00 = {G[0, 0]}")
    vecs = _factor(G)
    scale = max(float(np.linalg.eigvalsh(0.5 * (G + G.conj().T)).max()), 1.0)
    basis = [vecs[0] / np.linalg.norm(vecs[0])]
    for v in vecs[1:]:
        res = v.copy()
        for _ in range(2):
            for e in basis:
                res -= np.vdot(e, res) * e
        nrm2 = float(np.vdot(res, res).real)
        if nrm2 > rank_tol * scale:
            basis.append(res / math.sqrt(nrm2))
    E = np.array(basis)
    A = E.conj() @ vecs.T  # A[m, j] = <e_m|psi_j>
    A = A.T.copy()
    A[0] = 0.0
    A[0, 0] = 1.0
    return OrthonormalFrame(A)


def align_frame(frame: OrthonormalFrame, reference: np.ndarray) -> OrthonormalFrame:
    """Rotate the derivative basis {e_1..e_r} by the unitary that best matches ``reference``.

    Both frames must describe the same Gram data; the result then reproduces
    ``reference`` exactly.  Bound values are invariant under this rotation.
    """
    ref = np.asarray(reference, dtype=complex)
    if ref.shape != frame.A.shape:
        raise ValueError("reference coefficients must match the frame shape")
    # find unitary W minimising ||B W - R|| over the derivative block
    B, R = frame.A[1:, 1:], ref[1:, 1:]
    u, _, vh = np.linalg.svd(B.conj().T @ R)
    W = u @ vh
    A = frame.A.copy()
    A[1:, 1:] = B @ W
    return OrthonormalFrame(A)
