"""
Dynamic Influence Model package.

- transfer_function: rational filters in z^-1
- dim_system: the (G, e) pair and its stability check
- simulation: time-domain simulation and the panel container
- spectral_matrix: matrix fields on a frequency grid
- psd: exact spectra, inverse spectra and autocorrelations
"""
from .transfer_function import TransferFunction, eval_tf
from .dim_system import NoiseSpec, DimSystem, check_stability
from .spectral_matrix import SpectralMatrix, frequency_grid
from .simulation import TimeSeriesPanel, simulate_dim
from .psd import (
    analytic_psd,
    analytic_inverse_psd,
    inverse_psd_entry,
    autocorrelation_from_psd,
    channel_autocorrelation,
)

__all__ = [
    'TransferFunction',
    'eval_tf',
    'NoiseSpec',
    'DimSystem',
    'check_stability',
    'SpectralMatrix',
    'frequency_grid',
    'TimeSeriesPanel',
    'simulate_dim',
    'analytic_psd',
    'analytic_inverse_psd',
    'inverse_psd_entry',
    'autocorrelation_from_psd',
    'channel_autocorrelation',
]
