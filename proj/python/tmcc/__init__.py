"""Python bindings for the TMCC key-distribution simulator."""

from ._core import (
    InsufficientData,
    TruncationError,
    amplitude_for_mean,
    chi_square_sf,
    decision_threshold,
    error_factor,
    error_probability,
    fit_test,
    mean_photons,
    mean_square_photons,
    mismatch_rate,
    poisson_pmf,
    prob_zero,
    run_session,
    tmcc_pmf,
    variance,
)

__all__ = [
    "InsufficientData",
    "TruncationError",
    "amplitude_for_mean",
    "chi_square_sf",
    "decision_threshold",
    "error_factor",
    "error_probability",
    "fit_test",
    "mean_photons",
    "mean_square_photons",
    "mismatch_rate",
    "poisson_pmf",
    "prob_zero",
    "run_session",
    "tmcc_pmf",
    "variance",
]
