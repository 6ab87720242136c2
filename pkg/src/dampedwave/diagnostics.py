"""Scalar functionals along trajectories: energies, residuals, Lyapunov value.

total energy      E_u  = 1/2 ||u_t||^2 + 1/2 ||grad u||^2 + integral of potential(u)
stationary energy E_0  = the same without the kinetic term
residual          G(v) = -Lap v + force(v), zero exactly at equilibria
Lyapunov value    H    = E_u - E_0(psi) + eta (t+1)^(-alpha) <G(u), u_t>_{H^-1}

E_u is non-increasing along damped trajectories (E_u' = -h ||u_t||^2); the
dissipation residual measures how well a recorded run satisfies that
identity between samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import (
    Field,
    _laplacian_values,
    h1_seminorm,
    inverse_laplacian,
    l2_inner,
    l2_norm,
)
from .physics import Damping, Nonlinearity, lyapunov_weight_alpha

__all__ = [
    "DiagnosticsRow",
    "stationary_energy",
    "total_energy",
    "stationary_residual",
    "lyapunov",
    "make_row",
    "rows_from_snapshots",
    "dissipation_residuals",
    "attach_dissipation_residuals",
    "lyapunov_decay_ratios",
]


@dataclass(frozen=True)
class DiagnosticsRow:
    """One recorded time sample; the unit serialized to CSV by the CLI."""

    t: float
    l2_u: float
    h1_u: float
    l2_ut: float
    hm1_G: float
    E_u: float
    E0_u: float
    H_lyap: float
    l2_dist_psi: float
    velocity_one_sided: bool = False
    dissipation_residual: float = math.nan


def stationary_energy(v: Field, nl: Nonlinearity) -> float:
    """E_0(v) = 1/2 ||grad v||^2 + sum(potential(v_i)) dx."""
    return 0.5 * h1_seminorm(v) ** 2 + float(np.sum(nl.potential(v.values))) * v.grid.dx


def total_energy(u: Field, ut: Field, nl: Nonlinearity) -> float:
    """E_u = E_0(u) + 1/2 ||u_t||^2."""
    return stationary_energy(u, nl) + 0.5 * l2_norm(ut) ** 2


def stationary_residual(v: Field, nl: Nonlinearity) -> Field:
    """G(v) = -Lap v + force(v); vanishes exactly at equilibria."""
    return Field(-_laplacian_values(v.values, v.grid.dx) + nl.force(v.values), v.grid)


def lyapunov(
    u: Field,
    ut: Field,
    nl: Nonlinearity,
    damping: Damping,
    psi: Field,
    eta: float,
    t: float,
) -> float:
    """Energy plus the small weighted cross term that makes decay monotone.

    H = E_u - E_0(psi) + eta (t+1)^(-alpha) <G(u), u_t>_{H^-1}, with alpha
    the damping's exponent (0 for zero/constant damping).
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError("eta must lie in [0, 1)")
    alpha = lyapunov_weight_alpha(damping)
    cross = l2_inner(ut, inverse_laplacian(stationary_residual(u, nl)))
    return (
        total_energy(u, ut, nl)
        - stationary_energy(psi, nl)
        + eta * (t + 1.0) ** (-alpha) * cross
    )


def make_row(
    t: float,
    u: Field,
    ut: Field,
    nl: Nonlinearity,
    damping: Damping,
    psi: Field,
    e0_psi: float,
    eta: float,
    one_sided: bool = False,
) -> DiagnosticsRow:
    """Evaluate every recorded functional at one time sample.

    A single Poisson solve serves both the H^-1 residual norm and the
    Lyapunov cross term.
    """
    residual = stationary_residual(u, nl)
    lifted = inverse_laplacian(residual)
    hm1_G = math.sqrt(max(l2_inner(residual, lifted), 0.0))
    cross = l2_inner(ut, lifted)
    e0_u = stationary_energy(u, nl)
    l2_ut = l2_norm(ut)
    e_u = e0_u + 0.5 * l2_ut**2
    alpha = lyapunov_weight_alpha(damping)
    h_lyap = e_u - e0_psi + eta * (t + 1.0) ** (-alpha) * cross
    return DiagnosticsRow(
        t=t,
        l2_u=l2_norm(u),
        h1_u=h1_seminorm(u),
        l2_ut=l2_ut,
        hm1_G=hm1_G,
        E_u=e_u,
        E0_u=e0_u,
        H_lyap=h_lyap,
        l2_dist_psi=l2_norm(u - psi),
        velocity_one_sided=one_sided,
    )


def rows_from_snapshots(
    snapshots: list[tuple[float, Field, Field, bool]],
    nl: Nonlinearity,
    damping: Damping,
    psi: Field,
    eta: float,
) -> list[DiagnosticsRow]:
    """Re-evaluate rows against a different reference equilibrium."""
    e0_psi = stationary_energy(psi, nl)
    return [
        make_row(t, u, ut, nl, damping, psi, e0_psi, eta, one_sided)
        for t, u, ut, one_sided in snapshots
    ]


def _check_consecutive(rows: list[DiagnosticsRow]) -> None:
    times = [r.t for r in rows]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("rows must come from one run, in increasing time order")


def dissipation_residuals(
    rows: list[DiagnosticsRow], damping: Damping
) -> np.ndarray:
    """|dE/dt + h ||u_t||^2| at each interior sample, centered differences.

    The energy slope uses the two neighbouring samples; the friction term
    is evaluated at the middle one.  Expected O(dt^2) + O(sample spacing^2)
    for a well-resolved run; a diagnostic, not an assertion.  Samples whose
    stencil touches a one-sided-velocity row are reported as nan: the
    backward difference carries an O(dt) velocity error that would swamp
    the centered estimate.
    """
    if len(rows) < 3:
        raise ValueError("need at least three consecutive rows")
    _check_consecutive(rows)
    out = np.empty(len(rows) - 2)
    for i in range(1, len(rows) - 1):
        before, mid, after = rows[i - 1], rows[i], rows[i + 1]
        if before.velocity_one_sided or mid.velocity_one_sided or after.velocity_one_sided:
            out[i - 1] = math.nan
            continue
        slope = (after.E_u - before.E_u) / (after.t - before.t)
        out[i - 1] = abs(slope + damping(mid.t) * mid.l2_ut**2)
    return out


def lyapunov_decay_ratios(
    rows: list[DiagnosticsRow], damping: Damping
) -> np.ndarray:
    """Measured -H'/( (t+1)^(-alpha) (||u_t||^2 + ||G||_{H^-1}^2) ) at interior samples.

    Exposes the empirical constant of the monotone-decay estimate for
    inspection; samples where the denominator underflows give nan.
    """
    if len(rows) < 3:
        raise ValueError("need at least three consecutive rows")
    _check_consecutive(rows)
    alpha = lyapunov_weight_alpha(damping)
    out = np.empty(len(rows) - 2)
    for i in range(1, len(rows) - 1):
        before, mid, after = rows[i - 1], rows[i], rows[i + 1]
        slope = (after.H_lyap - before.H_lyap) / (after.t - before.t)
        denom = (mid.t + 1.0) ** (-alpha) * (mid.l2_ut**2 + mid.hm1_G**2)
        out[i - 1] = -slope / denom if denom > 0 else math.nan
    return out


def attach_dissipation_residuals(
    rows: list[DiagnosticsRow], damping: Damping
) -> list[DiagnosticsRow]:
    """Copy of rows with the interior dissipation residuals filled in."""
    residuals = dissipation_residuals(rows, damping)
    filled = list(rows)
    for i, value in enumerate(residuals, start=1):
        if math.isfinite(value):
            filled[i] = replace(filled[i], dissipation_residual=float(value))
    return filled
