"""Exact and stochastic SIS/SIR epidemics on networks.

The heavy lifting lives in the C++ extension ``epinet._core``: exact
master-equation solves over the full 2^N/3^N state space, Gillespie
simulation, quasi-stationary distributions, and spectral threshold bounds.
"""

from epinet._core import (
    ConvergenceError,
    Graph,
    InvalidArgumentError,
    SizeCapError,
    SpectralData,
    ensemble,
    epsilon_g,
    estimate_threshold,
    exact_solve,
    nimfa_dominance,
    nimfa_solve,
    nimfa_trajectory,
    peak_prevalence,
    qs_simulate,
    quasi_stationary,
    residual_suite,
    simulate,
    spectral_radius,
    threshold_lower_bound,
    threshold_report,
    threshold_upper_bound,
)

__all__ = [
    "ConvergenceError",
    "Graph",
    "InvalidArgumentError",
    "SizeCapError",
    "SpectralData",
    "ensemble",
    "epsilon_g",
    "estimate_threshold",
    "exact_solve",
    "nimfa_dominance",
    "nimfa_solve",
    "nimfa_trajectory",
    "peak_prevalence",
    "qs_simulate",
    "quasi_stationary",
    "residual_suite",
    "simulate",
    "spectral_radius",
    "threshold_lower_bound",
    "threshold_report",
    "threshold_upper_bound",
]
