"""
Spectral estimation and structure recovery.

- welch: Welch cross-spectral estimation, trial averaging, coherence
- inversion: ridge-loaded per-frequency inversion with a condition cap
- support: scores, thresholded support graphs and the end-to-end reconstruction
"""
from .welch import WelchConfig, estimate_cross_psd, average_spectra, coherence
from .inversion import invert_spectrum, ridge_levels
from .support import (
    SupportConfig,
    score_matrix,
    dc_scores,
    support_from_scores,
    support_graph,
    reconstruct_from_spectrum,
    reconstruct,
    write_scores_csv,
    read_scores_csv,
)

__all__ = [
    'WelchConfig',
    'estimate_cross_psd',
    'average_spectra',
    'coherence',
    'invert_spectrum',
    'ridge_levels',
    'SupportConfig',
    'score_matrix',
    'dc_scores',
    'support_from_scores',
    'support_graph',
    'reconstruct_from_spectrum',
    'reconstruct',
    'write_scores_csv',
    'read_scores_csv',
]
