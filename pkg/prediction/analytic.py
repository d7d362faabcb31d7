"""Noise-free pipeline: exact corrupted spectrum, exact inverse, support."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from corruption.models import CorruptionAssignment
from corruption.spectra import assignment_thetas, corrupted_psd
from dynamics.dim_system import DimSystem
from dynamics.psd import analytic_psd
from dynamics.spectral_matrix import SpectralMatrix, frequency_grid
from graphs.structures import UndirectedGraph, make_edge
from prediction.theory import PredictionReport, grade
from prediction.woodbury import woodbury_sequence
from spectral.inversion import invert_spectrum
from utilities import config, get_logger
from utilities.exceptions import SingularSpectrumError

logger = get_logger('prediction.analytic')


def analytic_scores(inv: SpectralMatrix) -> np.ndarray:
    return np.abs(inv.values).max(axis=0)


def analytic_support(inv: SpectralMatrix, threshold: Optional[float] = None) -> UndirectedGraph:
    """Edges whose max-over-grid magnitude exceeds ``threshold`` times the largest entry."""
    threshold = config.analytic_threshold if threshold is None else threshold
    scores = analytic_scores(inv)
    peak = float(scores.max()) if scores.size else 0.0
    n = inv.n
    if peak <= 0.0:
        return UndirectedGraph(n)
    edges = frozenset(
        make_edge(i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if max(scores[i, j], scores[j, i]) > threshold * peak
    )
    return UndirectedGraph(n, edges)


@dataclass(frozen=True)
class AnalyticOutcome:
    clean: SpectralMatrix
    corrupted: SpectralMatrix
    inverse: SpectralMatrix
    thetas: Dict[int, np.ndarray]
    recovered: UndirectedGraph
    report: PredictionReport
    woodbury_deviation: Optional[float]


def analytic_recovery(
    sys: DimSystem,
    assignment: CorruptionAssignment,
    freqs=None,
    threshold: Optional[float] = None,
) -> AnalyticOutcome:
    """Grade the support of the exact inverse of ``H Phi_yy H* + diag(theta)``.

    The Woodbury iteration is cross-checked against the dense inverse when
    ``H Phi_yy H*`` is itself invertible (it is not once a node carries pure
    disinformation).
    """
    omegas = frequency_grid() if freqs is None else np.asarray(freqs, dtype=float)
    clean = analytic_psd(sys, omegas)
    thetas = assignment_thetas(sys, assignment, omegas)
    corrupted = corrupted_psd(clean, assignment, thetas)
    inverse = invert_spectrum(corrupted, reg=0.0)
    recovered = analytic_support(inverse, threshold)
    report = grade(sys.generative_graph(), assignment.perturbed_set(), recovered)

    deviation = None
    psi0 = corrupted_psd(clean, assignment, {})
    try:
        iterated = woodbury_sequence(psi0, list(assignment.models), thetas)
        deviation = iterated.max_abs_deviation(inverse)
    except SingularSpectrumError as exc:
        logger.debug(f"Woodbury cross-check skipped: {exc}")

    return AnalyticOutcome(clean, corrupted, inverse, thetas, recovered, report, deviation)


__all__ = ["analytic_scores", "analytic_support", "AnalyticOutcome", "analytic_recovery"]
