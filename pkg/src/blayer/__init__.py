"""Boundary layers of minimizers for repelling particles against a barrier.

The package computes, for n particles on [0, ∞) with pairwise repulsion
V and confinement U:

  * the continuum equilibrium density ρ* = [C_U - U]^+ and its energy,
  * discrete energy minimizers (damped Newton) and recovery configurations,
  * the boundary-layer profile ν* minimizing the obstacle functional F,
  * diagnostics splitting the rescaled energy gap γ(E_n - E^γ(ρ*)) into
    five exact terms and measuring vague convergence of ν_n to ν*.

A compiled extension accelerates the O(n²) pair sums when available; a
pure-numpy fallback is selected automatically (see `blayer.backend`).
"""

from .backend import COMPILED
from .boundary_layer import (
    BoundaryLayerProfile,
    F_quadratic_form,
    F_value,
    GridMeasure,
    minimize_F,
    profile_rho_star_gamma,
)
from .config import ExperimentConfig, GammaRule, load_config, parse_config, parse_gamma_rule
from .confinement import ConfiningPotential, make_confinement
from .continuum import ContinuumDensity, energy_E, energy_Egamma, rho_bar, solve_continuum
from .diagnostics import (
    Fn_terms,
    FnTerms,
    NuN,
    gamma_sweep,
    test_panel,
    to_nu_n,
    vague_distance,
)
from .discrete import (
    MinimizeInfo,
    ParticleConfiguration,
    density_crosses,
    energy,
    gradient,
    hessian,
    minimize,
    quantile_init,
)
from .errors import (
    BlayerError,
    CollisionError,
    ConfigError,
    ConsistencyError,
    DomainTooSmallError,
    IterationLimitError,
    TwoRouteMismatch,
)
from .potentials import (
    InteractionPotential,
    RegularizedPotential,
    make_potential,
    make_power_potential,
    make_table_potential,
    make_wall_potential,
    regularize,
    tail_integral,
    verify_assumptions,
)

__version__ = "1.0.0"

__all__ = [
    "COMPILED",
    "BoundaryLayerProfile",
    "F_quadratic_form",
    "F_value",
    "GridMeasure",
    "minimize_F",
    "profile_rho_star_gamma",
    "ExperimentConfig",
    "GammaRule",
    "load_config",
    "parse_config",
    "parse_gamma_rule",
    "ConfiningPotential",
    "make_confinement",
    "ContinuumDensity",
    "energy_E",
    "energy_Egamma",
    "rho_bar",
    "solve_continuum",
    "Fn_terms",
    "FnTerms",
    "NuN",
    "gamma_sweep",
    "test_panel",
    "to_nu_n",
    "vague_distance",
    "MinimizeInfo",
    "ParticleConfiguration",
    "density_crosses",
    "energy",
    "gradient",
    "hessian",
    "minimize",
    "quantile_init",
    "BlayerError",
    "CollisionError",
    "ConfigError",
    "ConsistencyError",
    "DomainTooSmallError",
    "IterationLimitError",
    "TwoRouteMismatch",
    "InteractionPotential",
    "RegularizedPotential",
    "make_potential",
    "make_power_potential",
    "make_table_potential",
    "make_wall_potential",
    "regularize",
    "tail_integral",
    "verify_assumptions",
    "__version__",
]
