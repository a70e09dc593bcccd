"""Distortion bounds and simulation for a two-way feedback protocol."""

from ._twoway import (
    ConfigError,
    Distribution,
    DomainError,
    DualSchedule,
    EnergySchedule,
    NonConvergenceError,
    UnsupportedError,
    __version__,
    allocate_energies,
    avg_energy,
    distortion_upper,
    dual_distortion_uniform,
    goblick_bound,
    marcum_q1,
    p2_pairwise,
    rician_distortion_two,
    rician_pm,
    rician_uncorrectable,
    run_config,
    simulate_dual,
    simulate_single,
    single_split_bound,
    total_error,
    uncorrectable_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
