"""Robust fusion of per-sensor state estimates under sparse integrity attacks.

Thin re-export of the C++ extension. See the project README for the model,
the estimator and the CLI.
"""

from ._core import (
    BoundReport,
    CovarianceStructure,
    RecoveryEstimate,
    RobustFuseError,
    SteadyKalman,
    SystemModel,
    big_f,
    build_steady_kalman,
    c_of_u,
    check_translation_invariance,
    coordinate_minimize,
    dare_solve,
    huber_f,
    kappa_hi,
    kappa_lo,
    lyapunov_solve,
    mmse_region_check,
    phi,
    recovery_probability,
    robust_fuse,
    robustness_condition,
    run_table1,
    demo_model,
    simulate_trajectory,
    soft_threshold,
    steady_covariances,
    worst_case_bound,
)

__all__ = [
    "BoundReport",
    "CovarianceStructure",
    "RecoveryEstimate",
    "RobustFuseError",
    "SteadyKalman",
    "SystemModel",
    "big_f",
    "build_steady_kalman",
    "c_of_u",
    "check_translation_invariance",
    "coordinate_minimize",
    "dare_solve",
    "huber_f",
    "kappa_hi",
    "kappa_lo",
    "lyapunov_solve",
    "mmse_region_check",
    "phi",
    "recovery_probability",
    "robust_fuse",
    "robustness_condition",
    "run_table1",
    "demo_model",
    "simulate_trajectory",
    "soft_threshold",
    "steady_covariances",
    "worst_case_bound",
]
