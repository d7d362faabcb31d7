"""
Data corruption package.

- models: random state-space systems and the named corruption models
- statistics: mean transfer functions, generalized Lyapunov solves, deviation autocorrelations
- simulation: forward simulation of corrupted streams
- spectra: corrupted and cross spectra built from H and theta
"""
from .models import (
    Outcome,
    RandomStateSpace,
    CorruptionModel,
    RandomDelay,
    PacketDrop,
    MeasurementNoise,
    Disinformation,
    RawStateSpace,
    SeriesComposition,
    compose_models,
    lower_to_state_space,
    CorruptionAssignment,
)
from .statistics import (
    truncate_autocorrelation,
    mean_tf,
    second_moment_operator,
    check_gen_lyapunov,
    delta_x_autocorr,
    delta_u_autocorr,
    delay_deviation_variance,
    packet_drop_constant,
    packet_drop_output_autocorr,
    packet_drop_mean_autocorr,
    packet_drop_delta_autocorr,
    theta_spectrum,
)
from .simulation import apply_corruption, corrupt_panel
from .spectra import (
    mean_responses,
    assignment_thetas,
    corrupted_psd,
    corrupted_cross_psd,
    perturbation_document,
    write_perturbation_json,
)

__all__ = [
    'Outcome',
    'RandomStateSpace',
    'CorruptionModel',
    'RandomDelay',
    'PacketDrop',
    'MeasurementNoise',
    'Disinformation',
    'RawStateSpace',
    'SeriesComposition',
    'compose_models',
    'lower_to_state_space',
    'CorruptionAssignment',
    'truncate_autocorrelation',
    'mean_tf',
    'second_moment_operator',
    'check_gen_lyapunov',
    'delta_x_autocorr',
    'delta_u_autocorr',
    'delay_deviation_variance',
    'packet_drop_constant',
    'packet_drop_output_autocorr',
    'packet_drop_mean_autocorr',
    'packet_drop_delta_autocorr',
    'theta_spectrum',
    'apply_corruption',
    'corrupt_panel',
    'mean_responses',
    'assignment_thetas',
    'corrupted_psd',
    'corrupted_cross_psd',
    'perturbation_document',
    'write_perturbation_json',
]
