"""Eigenmode transmission with semi-orthogonal user selection on the
MIMO broadcast channel: Monte Carlo link simulation, greedy and
exhaustive scheduling, two zero-forcing transmit structures, and the
closed-form statistics that validate them."""

from .backend import active_backend, get_kernels
from .channel import (ChannelRealization, EigenMode, TrialStream,
                      eigenmodes, generate_channels)
from .selection import (DeltaSchedule, SelectionConfig, SelectionOutcome,
                        delta_value, exhaustive_select, project_residual,
                        sus_select)
from .transceiver import (GapPredictions, PowerPolicy, TransmissionResult,
                          ZfbfPrecoder, allocate_powers, det_upper_bound,
                          gap_terms, snr_gap_predictions, sum_rate, transmit,
                          waterfill, zfbf_gains, zfdpc_gains)
from .analytic import (AnalyticCurve, ScalingLaws, WishartSpec,
                       asymptotic_sum_rate, candidate_probability,
                       delta_admissible, effective_gain_cdf_bounds,
                       effective_gain_tail_bounds, max_eigenvalue_cdf,
                       max_eigenvalue_pdf, multiuser_scaling,
                       projection_joint_density, residual_fraction_cdf,
                       wishart_coefficients, zfbf_snr_loss_bound)
from .harness import (ExperimentConfig, SweepResult, emit_csv, figure_recipes,
                      run_trial, sweep)

__version__ = "0.1.0"

__all__ = [
    "active_backend", "get_kernels",
    "ChannelRealization", "EigenMode", "TrialStream", "eigenmodes",
    "generate_channels",
    "DeltaSchedule", "SelectionConfig", "SelectionOutcome", "delta_value",
    "exhaustive_select", "project_residual", "sus_select",
    "GapPredictions", "PowerPolicy", "TransmissionResult", "ZfbfPrecoder",
    "allocate_powers", "det_upper_bound", "gap_terms", "snr_gap_predictions",
    "sum_rate", "transmit", "waterfill", "zfbf_gains", "zfdpc_gains",
    "AnalyticCurve", "ScalingLaws", "WishartSpec", "asymptotic_sum_rate",
    "candidate_probability", "delta_admissible", "effective_gain_cdf_bounds",
    "effective_gain_tail_bounds", "max_eigenvalue_cdf", "max_eigenvalue_pdf",
    "multiuser_scaling", "projection_joint_density", "residual_fraction_cdf",
    "wishart_coefficients", "zfbf_snr_loss_bound",
    "ExperimentConfig", "SweepResult", "emit_csv", "figure_recipes",
    "run_trial", "sweep",
]
