"""Python bindings for the leafwalk library."""

from ._leafwalk import (
    ConfigError,
    Discretization,
    GeometryError,
    GroupAtlas,
    OrbitMeasure,
    ProjectiveError,
    RepTable,
    WordError,
    cayley,
    cayley_inverse,
    circle_point,
    conditional_measure,
    contraction_series,
    dist,
    fs_dist,
    generator_ratio,
    harnack_constant,
    holonomy_of_word,
    integrability_stats,
    lyapunov_gap,
    markov_residual,
    mean_value_residual,
    poisson_exit_sample,
    poisson_ratio,
    run,
    stationary_cloud,
    uniqueness_gap,
    wasserstein1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
