"""Newton solver for the stationary problem -Lap psi + force(psi) = 0,
plus a numerical probe of the energy-residual power law near an equilibrium.

Residuals are measured in the H^-1 norm throughout, the norm in which the
Lojasiewicz-type inequality relates ||G(v)|| to |E_0(v) - E_0(psi)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid1D, h1_seminorm, hm1_norm, laplacian_eigenvector
from .diagnostics import stationary_energy, stationary_residual
from .physics import Nonlinearity

__all__ = [
    "SingularJacobianError",
    "DegenerateSamplesError",
    "EquilibriumResult",
    "LojasiewiczProbe",
    "solve_tridiagonal",
    "solve_equilibrium",
    "bump_profile",
    "lojasiewicz_probe",
]

MIN_PIVOT = 1e-14


class SingularJacobianError(RuntimeError):
    """Tridiagonal elimination hit a pivot below the singularity threshold."""


class DegenerateSamplesError(RuntimeError):
    """Too few probe samples carried a resolvable energy difference."""


def solve_tridiagonal(
    diag: np.ndarray, off: float, rhs: np.ndarray, min_pivot: float = MIN_PIVOT
) -> np.ndarray:
    """Thomas elimination for a symmetric tridiagonal system with constant
    off-diagonal entries.  No pivoting; raises on pivots below min_pivot."""
    n = len(diag)
    scratch_c = np.empty(n)
    scratch_d = np.empty(n)
    pivot = diag[0]
    if abs(pivot) < min_pivot:
        raise SingularJacobianError(f"pivot {pivot:.3e} at row 0")
    scratch_c[0] = off / pivot
    scratch_d[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - off * scratch_c[i - 1]
        if abs(pivot) < min_pivot:
            raise SingularJacobianError(f"pivot {pivot:.3e} at row {i}")
        scratch_c[i] = off / pivot
        scratch_d[i] = (rhs[i] - off * scratch_d[i - 1]) / pivot
    x = np.empty(n)
    x[-1] = scratch_d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = scratch_d[i] - scratch_c[i] * x[i + 1]
    return x


@dataclass(frozen=True)
class EquilibriumResult:
    psi: Field
    residual_hm1: float
    iterations: int
    converged: bool
    e0: float
    residual_history: tuple[float, ...]


def solve_equilibrium(
    guess: Field,
    nl: Nonlinearity,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> EquilibriumResult:
    """Damped Newton iteration on G(v) = -Lap v + force(v).

    Each step solves (-Lap + diag(force'(v))) delta = -G(v) and halves the
    step (up to 30 times) whenever the H^-1 residual fails to decrease.
    Convergence means hm1_norm(G(v)) <= tol.  When max_iter runs out the
    best iterate is returned with converged = False.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = guess.grid
    dx2 = grid.dx**2
    v = guess
    residual = hm1_norm(stationary_residual(v, nl))
    history = [residual]
    iterations = 0
    while residual > tol and iterations < max_iter:
        g_vals = stationary_residual(v, nl).values
        jac_diag = 2.0 / dx2 + nl.force_prime(v.values)
        delta = solve_tridiagonal(jac_diag, -1.0 / dx2, -g_vals)
        scale = 1.0
        improved = False
        for _ in range(30):
            candidate = Field(v.values + scale * delta, grid)
            candidate_residual = hm1_norm(stationary_residual(candidate, nl))
            if candidate_residual < residual:
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
        v = candidate
        residual = candidate_residual
        history.append(residual)
        iterations += 1
    return EquilibriumResult(
        psi=v,
        residual_hm1=residual,
        iterations=iterations,
        converged=residual <= tol,
        e0=stationary_energy(v, nl),
        residual_history=tuple(history),
    )


def bump_profile(grid: Grid1D, amplitude: float) -> Field:
    """Canonical nontrivial-equilibrium seed: amplitude * (1 - (x/L)^2).

    For the cubic model with negative linear coefficient a, the flat
    interior of the equilibrium balances at |psi| = sqrt(|a|), so that is
    the natural amplitude to seed with.
    """
    x = grid.nodes / grid.half_length
    return Field(amplitude * (1.0 - x * x), grid)


@dataclass(frozen=True)
class LojasiewiczProbe:
    """Fitted exponent of ||G|| against |E_0 - E_0(psi)| near an equilibrium.

    slope estimates 1 - theta; r_squared is measured on the shared-slope
    regression (one intercept per probe direction, since the power-law
    constant is direction dependent).
    """

    slope: float
    r_squared: float
    epsilon_range: tuple[float, float]
    direction_count: int
    direction_slopes: tuple[float, ...]


def _default_directions(grid: Grid1D, seed: int = 12345) -> list[Field]:
    rng = np.random.default_rng(seed)
    return [
        laplacian_eigenvector(grid, 1),
        laplacian_eigenvector(grid, 2),
        Field(rng.standard_normal(grid.n_interior), grid),
    ]


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    coeffs = np.polyfit(x, y, 1)
    fitted = np.polyval(coeffs, x)
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coeffs[0]), r2


def lojasiewicz_probe(
    equilibrium: EquilibriumResult,
    nl: Nonlinearity,
    directions: list[Field] | None = None,
    epsilons: np.ndarray | None = None,
) -> LojasiewiczProbe:
    """Sample log ||G(psi + eps phi)||_{H^-1} against log |E_0(psi + eps phi) - E_0(psi)|.

    Directions are normalized in the H1 seminorm; epsilons default to 12
    geometric points in [1e-3, 1e-1] (below 1e-3 the energy difference of a
    quadratic minimum drowns in round-off).  Samples with |energy difference|
    <= 1e-13 are dropped; fewer than 4 usable samples raises.

    The fit shares one slope across directions but gives each direction its
    own intercept: the power law's constant depends on the direction, its
    exponent does not.
    """
    if not equilibrium.converged:
        raise ValueError("probe requires a converged equilibrium")
    psi = equilibrium.psi
    grid = psi.grid
    if directions is None:
        directions = _default_directions(grid)
    if epsilons is None:
        epsilons = np.geomspace(1e-3, 1e-1, 12)
    epsilons = np.asarray(epsilons, dtype=float)
    if len(epsilons) < 6:
        raise ValueError("need at least 6 epsilon values")
    if np.any(epsilons <= 0.0) or np.any(epsilons > 1.0):
        raise ValueError("epsilons must lie in (0, 1]")

    xs: list[float] = []
    ys: list[float] = []
    tags: list[int] = []
    for d_index, raw in enumerate(directions):
        scale = h1_seminorm(raw)
        if scale == 0.0:
            raise ValueError("probe directions must be nonzero")
        direction = raw * (1.0 / scale)
        for eps in epsilons:
            probe_point = psi + float(eps) * direction
            de = stationary_energy(probe_point, nl) - equilibrium.e0
            if abs(de) <= 1e-13:
                continue
            xs.append(math.log(abs(de)))
            ys.append(math.log(hm1_norm(stationary_residual(probe_point, nl))))
            tags.append(d_index)
    if len(xs) < 4:
        raise DegenerateSamplesError(
            f"only {len(xs)} samples carried a resolvable energy difference"
        )

    x = np.array(xs)
    y = np.array(ys)
    tag = np.array(tags)
    n_dir = len(directions)

    # shared slope, one intercept per direction: columns [x, 1_{dir 0}, ...]
    design = np.zeros((len(x), 1 + n_dir))
    design[:, 0] = x
    for d_index in range(n_dir):
        design[tag == d_index, 1 + d_index] = 1.0
    coeffs, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coeffs
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot

    per_direction = []
    for d_index in range(n_dir):
        mask = tag == d_index
        if int(np.sum(mask)) >= 2:
            slope_d, _ = _line_fit(x[mask], y[mask])
            per_direction.append(slope_d)
        else:
            per_direction.append(math.nan)

    return LojasiewiczProbe(
        slope=float(coeffs[0]),
        r_squared=r_squared,
        epsilon_range=(float(np.min(epsilons)), float(np.max(epsilons))),
        direction_count=n_dir,
        direction_slopes=tuple(per_direction),
    )
