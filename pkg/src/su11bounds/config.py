"""Model configuration and measurement-scheme descriptions.

Quadrature ordering throughout the package is (q1, p1, q2, p2) with
q = (a + a^dag)/2 and p = (a - a^dag)/2i, so the vacuum variance is 1/4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import SchemeError

ALLOWED_GAINS = (0.5, 1.0 / math.sqrt(2.0), 1.0)


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of the interferometer model evaluated at theta = 0.

    ``bs_phase`` is the phase of the final balanced beam splitter; ``None``
    ties it to ``theta_g`` so the two-mode squeezed state leaves the splitter
    as a product of quadrature-aligned squeezed states.
    """

    alpha: float = 1.0
    theta_alpha: float = 0.0
    g: float = 0.0
    theta_g: float = math.pi / 2
    kappa: float = 0.5
    d: int = 4
    bs_phase: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.g)):
            raise ValueError("alpha and g must be finite")
        if self.alpha < 0 or self.g < 0:
            raise ValueError("alpha and g must be non-negative")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not any(math.isclose(self.kappa, k, rel_tol=1e-12) for k in ALLOWED_GAINS):
            raise ValueError(f"kappa must be one of {ALLOWED_GAINS}, got {self.kappa}")

    @property
    def beam_splitter_phase(self) -> float:
        return self.theta_g if self.bs_phase is None else self.bs_phase


@dataclass(frozen=True)
class MeasurementSetting:
    """One detector configuration: measured quadrature angles per output mode.

    A quadrature at angle ``phi`` is ``q cos(phi) + p sin(phi)``.  A
    heterodyne mode reads both ``phi`` and ``phi + pi/2`` and pays one extra
    vacuum variance per channel.
    """

    angles: Tuple[Tuple[float, ...], ...]
    heterodyne: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.angles) != len(self.heterodyne):
            raise SchemeError("angles and heterodyne flags must cover the same modes")
        for mode, (phis, het) in enumerate(zip(self.angles, self.heterodyne)):
            if het:
                if len(phis) != 1:
                    raise SchemeError(
                        f"heterodyne mode {mode} takes a single base angle, got {len(phis)}"
                    )
                continue
            for i in range(len(phis)):
                for j in range(i + 1, len(phis)):
                    if abs(math.sin(phis[i] - phis[j])) > 1e-12:
                        raise SchemeError(
                            f"mode {mode}: non-commuting quadratures measured "
                            "without the heterodyne penalty"
                        )
                    raise SchemeError(f"mode {mode}: quadrature measured twice")

    def channels(self):
        """Yield ``(mode, angle, penalised)`` for every outcome channel."""
        for mode, (phis, het) in enumerate(zip(self.angles, self.heterodyne)):
            if het:
                yield mode, phis[0], True
                yield mode, phis[0] + math.pi / 2, True
            else:
                for phi in phis:
                    yield mode, phi, False


@dataclass(frozen=True)
class DualHomodyneScheme:
    """A measurement scheme: one or more settings used with fixed weights."""

    settings: Tuple[MeasurementSetting, ...]
    weights: Tuple[float, ...] = field(default=(1.0,))
    name: str = "custom"

    def __post_init__(self):
        if len(self.settings) == 0 or len(self.settings) != len(self.weights):
            raise SchemeError("need one weight per setting")
        if any(w < 0 for w in self.weights) or not math.isclose(
            sum(self.weights), 1.0, abs_tol=1e-12
        ):
            raise SchemeError("setting weights must be non-negative and sum to 1")

    @property
    def single(self) -> bool:
        return len(self.settings) == 1


def _setting(angles: Sequence[Sequence[float]], het: Sequence[bool]) -> MeasurementSetting:
    return MeasurementSetting(tuple(tuple(a) for a in angles), tuple(het))


HALF_PI = math.pi / 2


def named_scheme(name: str) -> DualHomodyneScheme:
    """Built-in schemes addressable from the command line.

    ``homodyne-squeezed`` reads p on mode 1 and q on mode 2, the squeezed
    quadratures of the default (theta_g = pi/2) output product state.
    """
    if name == "heterodyne":
        s = _setting([[0.0], [0.0]], [True, True])
        return DualHomodyneScheme((s,), (1.0,), name)
    if name == "homodyne-squeezed":
        s = _setting([[HALF_PI], [0.0]], [False, False])
        return DualHomodyneScheme((s,), (1.0,), name)
    if name == "homodyne-antisqueezed":
        s = _setting([[0.0], [HALF_PI]], [False, False])
        return DualHomodyneScheme((s,), (1.0,), name)
    if name == "homodyne-alternating":
        a = _setting([[HALF_PI], [0.0]], [False, False])
        b = _setting([[0.0], [HALF_PI]], [False, False])
        return DualHomodyneScheme((a, b), (0.5, 0.5), name)
    raise SchemeError(f"unknown scheme {name!r}; choose from {', '.join(SCHEME_NAMES)}")


SCHEME_NAMES = (
    "heterodyne",
    "homodyne-squeezed",
    "homodyne-antisqueezed",
    "homodyne-alternating",
)
