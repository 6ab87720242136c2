"""Finite-difference lab for 1D semilinear waves with time-dependent damping.

Simulates u_tt - Lap u + h(t) u_t + force(u) = 0 on (-L, L) with Dirichlet
boundaries, tracks the energy and Lyapunov diagnostics along trajectories,
solves the stationary problem, probes the energy-residual power law near
equilibria, and fits the long-time decay laws.
"""

from .grid import (
    Field,
    Grid1D,
    first_eigenvalue,
    h1_seminorm,
    hm1_inner,
    hm1_norm,
    inverse_laplacian,
    l2_inner,
    l2_norm,
    laplacian,
    laplacian_eigenvalue,
    laplacian_eigenvector,
)
from .physics import (
    ConstantDamping,
    Damping,
    KleinGordon,
    LinearMass,
    Nonlinearity,
    PowerDecayDamping,
    PowerGrowthDamping,
    SineGordon,
    TailoredDamping,
    ZeroDamping,
    admissible_alpha,
    initial_profile,
    lojasiewicz_theta,
    preset_damping,
)
from .integrator import (
    BlowUpError,
    RunResult,
    SchemeConfig,
    WaveState,
    bootstrap,
    cfl_check,
    run,
    step,
    velocity,
)
from .diagnostics import (
    DiagnosticsRow,
    dissipation_residuals,
    lyapunov,
    stationary_energy,
    stationary_residual,
    total_energy,
)
from .equilibria import (
    DegenerateSamplesError,
    EquilibriumResult,
    LojasiewiczProbe,
    SingularJacobianError,
    bump_profile,
    lojasiewicz_probe,
    solve_equilibrium,
)
from .rates import (
    RateFit,
    classify_longtime,
    fit_polynomial_decay,
    fit_stretched_exponential,
    theoretical_lambda_sup,
)
from .ode_lab import (
    ExplicitSolutionReport,
    ModeODE,
    ModeTrajectory,
    explicit_solution_check,
    integrate_mode,
    tailored_damping,
)

__version__ = "0.1.0"
