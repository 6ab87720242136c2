"""Model families: nonlinear restoring terms, damping coefficients, initial data.

Each nonlinearity exposes the restoring term force(s), its derivative
force_prime(s), and the potential(s) with potential(0) = 0, so that
potential' = force.  Damping coefficients are callables h(t) >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import Field, Grid1D

__all__ = [
    "SineGordon",
    "KleinGordon",
    "LinearMass",
    "Nonlinearity",
    "ZeroDamping",
    "ConstantDamping",
    "PowerDecayDamping",
    "PowerGrowthDamping",
    "TailoredDamping",
    "Damping",
    "preset_damping",
    "lojasiewicz_theta",
    "admissible_alpha",
    "lyapunov_weight_alpha",
    "initial_profile",
]


@dataclass(frozen=True)
class SineGordon:
    """force(s) = b sin(s), potential(s) = b (1 - cos s), b > 0."""

    b: float = 1.0

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise ValueError("b must be positive")

    def force(self, s):
        return self.b * np.sin(s)

    def force_prime(self, s):
        return self.b * np.cos(s)

    def potential(self, s):
        return self.b * (1.0 - np.cos(s))


@dataclass(frozen=True)
class KleinGordon:
    """force(s) = a s + |s|^(p-1) s with p >= 1.

    The odd power is evaluated as sign(s) |s|^p so non-integer p is fine.
    """

    a: float
    p: float

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("p must be at least 1")

    def force(self, s):
        return self.a * s + np.sign(s) * np.abs(s) ** self.p

    def force_prime(self, s):
        return self.a + self.p * np.abs(s) ** (self.p - 1.0)

    def potential(self, s):
        return 0.5 * self.a * s * s + np.abs(s) ** (self.p + 1.0) / (self.p + 1.0)


@dataclass(frozen=True)
class LinearMass:
    """force(s) = b s; the linear model used for scheme verification."""

    b: float

    def force(self, s):
        return self.b * s

    def force_prime(self, s):
        return self.b * np.ones_like(np.asarray(s, dtype=float))

    def potential(self, s):
        return 0.5 * self.b * s * s


Nonlinearity = Union[SineGordon, KleinGordon, LinearMass]


@dataclass(frozen=True)
class ZeroDamping:
    """h(t) = 0."""

    alpha: float = 0.0

    def __call__(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class ConstantDamping:
    """h(t) = c."""

    c: float = 1.0
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError("c must be nonnegative")
        if self.alpha != 0.0:
            raise ValueError("constant damping has exponent 0")

    def __call__(self, t: float) -> float:
        return self.c


@dataclass(frozen=True)
class PowerDecayDamping:
    """h(t) = c (t+1)^(-alpha), asymptotically vanishing friction."""

    c: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    def __call__(self, t: float) -> float:
        return self.c * (t + 1.0) ** (-self.alpha)


@dataclass(frozen=True)
class PowerGrowthDamping:
    """h(t) = c t^alpha, growing friction."""

    c: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    def __call__(self, t: float) -> float:
        return self.c * t**self.alpha


@dataclass(frozen=True)
class TailoredDamping:
    """h(t) = (t+1)^(-alpha) - mu (t+1)/(1+alpha) - alpha/(t+1), alpha < -1.

    Built so that w(t) = 1 - mu (t+1)^(1+alpha)/(1+alpha) solves
    w'' + h w' + mu w = 0 exactly.  Since w -> 1, a single-mode trajectory
    with this coefficient freezes at a profile that is not an equilibrium.
    All three terms are positive on t >= 0, so h > 0 throughout.
    """

    mu: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.alpha < -1:
            raise ValueError("alpha must be below -1")

    def __call__(self, t: float) -> float:
        tp = t + 1.0
        return tp ** (-self.alpha) - self.mu * tp / (1.0 + self.alpha) - self.alpha / tp


Damping = Union[
    ZeroDamping, ConstantDamping, PowerDecayDamping, PowerGrowthDamping, TailoredDamping
]

_PRESET_DAMPINGS = (
    ZeroDamping(),
    ConstantDamping(1.0),
    PowerDecayDamping(1.0, 0.5),
    PowerDecayDamping(1.0, 1.0),
    PowerGrowthDamping(1.0, 0.5),
    PowerGrowthDamping(1.0, 1.0),
    PowerGrowthDamping(1.0, 1.5),
)


def preset_damping(index: int) -> Damping:
    """The standard damping family h0..h6 used by the experiment presets.

    h0 = 0, h1 = 1, h2 = (t+1)^(-1/2), h3 = (t+1)^(-1),
    h4 = t^(1/2), h5 = t, h6 = t^(3/2).
    """
    if not 0 <= index <= 6:
        raise ValueError(f"damping preset index {index} outside 0..6")
    return _PRESET_DAMPINGS[index]


def lojasiewicz_theta(nl: Nonlinearity, mu0: float) -> float:
    """Lojasiewicz exponent of the stationary energy near an equilibrium.

    1/2 for sine-Gordon, linear-mass, and Klein-Gordon with a > -mu0;
    1/(p+1) for Klein-Gordon with a <= -mu0 (degenerate well).
    """
    if not mu0 > 0:
        raise ValueError("mu0 must be positive")
    if isinstance(nl, KleinGordon) and nl.a <= -mu0:
        return 1.0 / (nl.p + 1.0)
    return 0.5


def admissible_alpha(damping: Damping, theta: float) -> bool | None:
    """Whether the damping exponent sits in the convergence window [0, theta/(1-theta)).

    Zero and constant damping count as exponent 0 (always admissible).
    Returns None for TailoredDamping, whose mixed-power coefficient has no
    single exponent for the window to test.
    """
    if not 0.0 < theta <= 0.5:
        raise ValueError("theta must lie in (0, 1/2]")
    if isinstance(damping, TailoredDamping):
        return None
    return 0.0 <= damping.alpha < theta / (1.0 - theta)


def lyapunov_weight_alpha(damping: Damping) -> float:
    """Exponent of the (t+1)^(-alpha) weight in the Lyapunov cross term.

    The damping's own exponent for the power families (decaying or growing),
    0 otherwise.
    """
    if isinstance(damping, (PowerDecayDamping, PowerGrowthDamping)):
        return damping.alpha
    return 0.0


def initial_profile(grid: Grid1D, wave_speed: float) -> tuple[Field, Field]:
    """Zero displacement plus the sech-shaped velocity kick.

    u(0, x) = 0 and u_t(0, x) = 4 k / cosh(k x) with k = sqrt(1 - c^2).
    """
    if not 0.0 < wave_speed < 1.0:
        raise ValueError("wave_speed must lie in (0, 1)")
    k = math.sqrt(1.0 - wave_speed**2)
    u0 = grid.zeros()
    v0 = Field(4.0 * k / np.cosh(grid.nodes * k), grid)
    return u0, v0
