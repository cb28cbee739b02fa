"""Quantum target ranging with a hetero-homodyne receiver.

Simulates the measurement-outcome model of an entanglement-assisted
ranging protocol (heterodyne the d returned modes, pick the homodyne
angle from their principal component, homodyne the idler, decode by
maximum likelihood), computes the closed-form error exponents and
error-probability curves, and cross-checks the mathematics with
independent Monte Carlo oracles.
"""

from .analytics import (
    CctRegime,
    ExponentReport,
    ctr_exact_log_error,
    ctr_signal_strength,
    exponent_report,
    hh_advantage_factor,
    lambda_gap_mean,
    qtr_error_log_bound,
    ratio_curve,
    wishart_lambda_max_mean_closed,
    xi_cct,
    xi_ctr,
    xi_hh,
    xi_hh_asymptotic,
    xi_qtr,
)
from .errors import NumericalError, ParameterError, StatisticalFloorError
from .harness import (
    ErrorEstimate,
    SweepPoint,
    estimate_error_probability,
    exponent_fit,
    exponent_fit_stats,
    run_trial_batch,
    sweep_qtr_vs_ctr,
    trial_generator,
    wilson_interval,
)
from .model import (
    ConditionalIdler,
    CovarianceMatrix,
    Mode,
    ProtocolParams,
    PulseOutcome,
    cct_joint_covariance,
    conditional_idler,
    homodyne_mean,
    homodyne_variance,
    sample_heterodyne_round,
    sample_homodyne,
    tmsv_covariance,
    trial_homodyne_variance,
)
from .oracles import (
    OracleResult,
    ctr_error_mc,
    principal_angle_eig,
    wishart_lambda_max_mean_mc,
)
from .receiver import (
    ScatterMatrix,
    TrialRecord,
    homodyne_angle,
    ml_estimate,
    ml_gain,
    run_trial,
    scatter_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "CctRegime",
    "ConditionalIdler",
    "CovarianceMatrix",
    "ErrorEstimate",
    "ExponentReport",
    "Mode",
    "NumericalError",
    "OracleResult",
    "ParameterError",
    "ProtocolParams",
    "PulseOutcome",
    "ScatterMatrix",
    "StatisticalFloorError",
    "SweepPoint",
    "TrialRecord",
    "cct_joint_covariance",
    "conditional_idler",
    "ctr_error_mc",
    "ctr_exact_log_error",
    "ctr_signal_strength",
    "estimate_error_probability",
    "exponent_fit",
    "exponent_fit_stats",
    "exponent_report",
    "hh_advantage_factor",
    "homodyne_angle",
    "homodyne_mean",
    "homodyne_variance",
    "lambda_gap_mean",
    "ml_estimate",
    "ml_gain",
    "principal_angle_eig",
    "qtr_error_log_bound",
    "ratio_curve",
    "run_trial",
    "run_trial_batch",
    "sample_heterodyne_round",
    "sample_homodyne",
    "scatter_matrix",
    "sweep_qtr_vs_ctr",
    "tmsv_covariance",
    "trial_generator",
    "trial_homodyne_variance",
    "wilson_interval",
    "wishart_lambda_max_mean_closed",
    "wishart_lambda_max_mean_mc",
    "xi_cct",
    "xi_ctr",
    "xi_hh",
    "xi_hh_asymptotic",
    "xi_qtr",
]
