"""
Spurious-link prediction package.

- theory: perturbed-graph prediction, grading and graded DOT output
- woodbury: rank-one downdates of inverse spectra
- analytic: exact corrupted-spectrum pipeline and thresholded support
- instances: random DAG systems and corruption assignments
"""
from .theory import (
    TRUE_KIN,
    PREDICTED_SPURIOUS,
    VIOLATION,
    MISSING,
    PredictionSummary,
    PredictionReport,
    predict_spurious,
    classify_edges,
    grade,
    realization_rate,
    graded_dot,
    predicted_dot,
)
from .woodbury import woodbury_step, woodbury_iterates, woodbury_sequence, direct_inverse, rank_one_term
from .analytic import analytic_scores, analytic_support, AnalyticOutcome, analytic_recovery
from .instances import random_dag_system, random_corruption, random_assignment, DEFAULT_KINDS

__all__ = [
    'TRUE_KIN',
    'PREDICTED_SPURIOUS',
    'VIOLATION',
    'MISSING',
    'PredictionSummary',
    'PredictionReport',
    'predict_spurious',
    'classify_edges',
    'grade',
    'realization_rate',
    'graded_dot',
    'predicted_dot',
    'woodbury_step',
    'woodbury_iterates',
    'woodbury_sequence',
    'direct_inverse',
    'rank_one_term',
    'analytic_scores',
    'analytic_support',
    'AnalyticOutcome',
    'analytic_recovery',
    'random_dag_system',
    'random_corruption',
    'random_assignment',
    'DEFAULT_KINDS',
]
