"""Single-mode reductions: the damped oscillator w'' + h(t) w' + mu w = 0.

Restricting the wave equation with a linear mass term to one discrete
eigenvector e_k turns it into this scalar oscillator with
mu = lambda_k + b.  The lab integrates it with a classical 4th-order
one-step method (closed-form comparisons need small truncation error) and
verifies the explicitly constructed non-convergent solution

    w(t) = 1 - mu (t+1)^(1+alpha) / (1+alpha),      alpha < -1,

whose damping coefficient is derived, not transcribed: it is the unique
h(t) = (t+1)^(-alpha) - mu (t+1)/(1+alpha) - alpha/(t+1) making w exact.
Since w -> 1, the mode freezes at e_k, which is not an equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import stationary_residual
from .grid import Grid1D, hm1_norm, l2_norm, laplacian_eigenvalue, laplacian_eigenvector
from .integrator import BlowUpError
from .physics import Damping, LinearMass, TailoredDamping

__all__ = [
    "ModeODE",
    "ModeTrajectory",
    "integrate_mode",
    "tailored_damping",
    "ExplicitSolutionReport",
    "explicit_solution_check",
]


@dataclass(frozen=True)
class ModeODE:
    """One damped mode: w'' + h(t) w' + mu w = 0 with initial (omega0, omega0_dot)."""

    mu: float
    damping: Damping
    omega0: float
    omega0_dot: float
    dt: float = 0.01
    t_final: float = 200.0

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least one step")


@dataclass
class ModeTrajectory:
    t: np.ndarray
    omega: np.ndarray
    omega_dot: np.ndarray
    mu: float

    @property
    def energy(self) -> np.ndarray:
        """Oscillation energy 1/2 w'^2 + 1/2 mu w^2."""
        return 0.5 * self.omega_dot**2 + 0.5 * self.mu * self.omega**2


def integrate_mode(mode: ModeODE) -> ModeTrajectory:
    """Classical RK4 on the first-order system (w, w')."""
    h = mode.damping
    mu = mode.mu
    dt = mode.dt
    n = round(mode.t_final / mode.dt)
    t = np.arange(n + 1) * dt
    omega = np.empty(n + 1)
    omega_dot = np.empty(n + 1)
    w, wd = mode.omega0, mode.omega0_dot
    omega[0], omega_dot[0] = w, wd
    for i in range(n):
        tn = i * dt
        k1w, k1v = wd, -h(tn) * wd - mu * w
        w2, v2 = w + 0.5 * dt * k1w, wd + 0.5 * dt * k1v
        k2w, k2v = v2, -h(tn + 0.5 * dt) * v2 - mu * w2
        w3, v3 = w + 0.5 * dt * k2w, wd + 0.5 * dt * k2v
        k3w, k3v = v3, -h(tn + 0.5 * dt) * v3 - mu * w3
        w4, v4 = w + dt * k3w, wd + dt * k3v
        k4w, k4v = v4, -h(tn + dt) * v4 - mu * w4
        w = w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        wd = wd + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (math.isfinite(w) and math.isfinite(wd)):
            raise BlowUpError(tn)
        omega[i + 1], omega_dot[i + 1] = w, wd
    return ModeTrajectory(t, omega, omega_dot, mu)


def tailored_damping(mu: float, alpha: float) -> TailoredDamping:
    """The coefficient under which w(t) = 1 - mu (t+1)^(1+alpha)/(1+alpha) is exact."""
    return TailoredDamping(mu, alpha)


def _drift_solution(mu: float, alpha: float, t):
    """w, w', w'' of the explicit freezing solution."""
    tp = np.asarray(t, dtype=float) + 1.0
    w = 1.0 - mu * tp ** (1.0 + alpha) / (1.0 + alpha)
    wd = -mu * tp**alpha
    wdd = -mu * alpha * tp ** (alpha - 1.0)
    return w, wd, wdd


@dataclass(frozen=True)
class ExplicitSolutionReport:
    """Residual certificates for the explicit freezing solution u = w(t) e_k."""

    mu: float
    alpha: float
    mass_coefficient: float  # b = mu - lambda_k
    ode_residual_max: float  # max |w'' + h w' + mu w| over the sample times
    pde_residual_max: float  # max-norm of the full discrete residual field
    limit_distances: tuple[float, ...]  # ||u(T) - e_k||_L2 at growing T
    limit_residual_hm1: float  # hm1_norm(G(e_k)) = mu * hm1_norm(e_k) > 0
    initial_value: float  # w(0) = 1 - mu/(1+alpha)
    initial_velocity: float  # w'(0) = -mu


def explicit_solution_check(
    mu: float,
    alpha: float,
    grid: Grid1D,
    mode_index: int = 1,
    sample_times: np.ndarray | None = None,
    limit_times: tuple[float, ...] = (10.0, 100.0, 1000.0),
) -> ExplicitSolutionReport:
    """Verify the freezing solution by direct substitution.

    (i) the scalar ODE residual of w under the derived coefficient,
    (ii) the full discrete residual u_tt - Lap_h u + h u_t + b u with
    u = w(t) e_k and exact time derivatives of w (exact because e_k is a
    discrete eigenvector), and (iii) the limit state e_k, which the H^-1
    residual certifies is not an equilibrium of the linear-mass model.
    """
    damping = tailored_damping(mu, alpha)
    mode = laplacian_eigenvector(grid, mode_index)
    b = mu - laplacian_eigenvalue(grid, mode_index)
    model = LinearMass(b)
    if sample_times is None:
        sample_times = np.linspace(0.0, 100.0, 50)
    w, wd, wdd = _drift_solution(mu, alpha, sample_times)
    h_vals = np.array([damping(float(s)) for s in sample_times])
    ode_residual = np.abs(wdd + h_vals * wd + mu * w)

    pde_residual = 0.0
    for wi, wdi, wddi, hi in zip(w, wd, wdd, h_vals):
        u_field = wi * mode
        residual_field = (
            wddi * mode.values
            + stationary_residual(u_field, model).values
            + hi * wdi * mode.values
        )
        pde_residual = max(pde_residual, float(np.max(np.abs(residual_field))))

    limit_distances = tuple(
        float(abs(_drift_solution(mu, alpha, t_end)[0] - 1.0)) * l2_norm(mode)
        for t_end in limit_times
    )
    return ExplicitSolutionReport(
        mu=mu,
        alpha=alpha,
        mass_coefficient=b,
        ode_residual_max=float(np.max(ode_residual)),
        pde_residual_max=pde_residual,
        limit_distances=limit_distances,
        limit_residual_hm1=hm1_norm(stationary_residual(mode, model)),
        initial_value=float(_drift_solution(mu, alpha, 0.0)[0]),
        initial_velocity=-mu,
    )
