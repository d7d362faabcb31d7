"""Spectra of corrupted node streams: ``Phi_uu = H Phi_yy H* + diag(theta)``."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np

from corruption.models import CorruptionAssignment
from corruption.statistics import mean_tf, theta_spectrum
from dynamics.dim_system import DimSystem
from dynamics.psd import channel_autocorrelation
from dynamics.spectral_matrix import SpectralMatrix
from utilities import get_logger
from utilities.exceptions import DimensionMismatchError, InvalidModelError

logger = get_logger('corruption.spectra')


def mean_responses(assignment: CorruptionAssignment, freqs) -> np.ndarray:
    """``(F, n)`` diagonal of ``H``; one for unperturbed nodes."""
    omegas = np.asarray(freqs, dtype=float)
    h = np.ones((omegas.size, assignment.n), dtype=complex)
    for node, model in assignment.items():
        h[:, node] = mean_tf(model).freqresp(omegas)
    return h


def assignment_thetas(sys: DimSystem, assignment: CorruptionAssignment, freqs) -> Dict[int, np.ndarray]:
    """``theta_i`` on ``freqs`` for every corrupted node of ``sys``."""
    if assignment.n != sys.n:
        raise DimensionMismatchError(f"assignment covers {assignment.n} nodes, system has {sys.n}")
    omegas = np.asarray(freqs, dtype=float)
    thetas = {}
    for node, model in assignment.items():
        r_yy = channel_autocorrelation(sys, node)
        thetas[node] = theta_spectrum(model, r_yy, omegas)
        logger.debug(f"node {node + 1}: theta in [{thetas[node].min():.4g}, {thetas[node].max():.4g}]")
    return thetas


def _check(clean: SpectralMatrix, assignment: CorruptionAssignment) -> None:
    if clean.n != assignment.n:
        raise DimensionMismatchError(f"spectrum has {clean.n} nodes, assignment covers {assignment.n}")


def corrupted_psd(
    clean: SpectralMatrix,
    assignment: CorruptionAssignment,
    thetas: Mapping[int, np.ndarray],
) -> SpectralMatrix:
    """``H Phi_yy H* + diag(theta)`` with ``H_p = 1`` and ``theta_p = 0`` off the assignment."""
    _check(clean, assignment)
    if not clean.is_hermitian():
        raise InvalidModelError("clean spectrum must be Hermitian")
    extra = set(thetas) - set(assignment.models)
    if extra:
        raise InvalidModelError(f"theta given for unassigned nodes {sorted(extra)}")
    h = mean_responses(assignment, clean.freqs)
    values = h[:, :, None] * clean.values * np.conj(h)[:, None, :]
    for node in assignment.models:
        theta = np.asarray(thetas.get(node, np.zeros(len(clean))), dtype=float).reshape(-1)
        if theta.size != len(clean):
            raise DimensionMismatchError(f"theta for node {node} has {theta.size} samples, grid has {len(clean)}")
        values[:, node, node] += theta
    return SpectralMatrix(clean.freqs, values)


def corrupted_cross_psd(clean: SpectralMatrix, assignment: CorruptionAssignment) -> SpectralMatrix:
    """``Phi_uy = H Phi_yy``."""
    _check(clean, assignment)
    h = mean_responses(assignment, clean.freqs)
    return SpectralMatrix(clean.freqs, h[:, :, None] * clean.values)


def perturbation_document(
    assignment: CorruptionAssignment,
    freqs,
    thetas: Mapping[int, np.ndarray],
    labels: Optional[list] = None,
) -> dict:
    """``H`` and ``theta`` of every corrupted node on the grid, JSON-ready."""
    omegas = np.asarray(freqs, dtype=float)
    labels = labels or [str(k + 1) for k in range(assignment.n)]
    h = mean_responses(assignment, omegas)
    nodes = {}
    for node, model in assignment.items():
        tf = mean_tf(model)
        nodes[labels[node]] = {
            "model": model.describe(),
            "mean_tf": tf.to_dict(),
            "h_real": np.real(h[:, node]).tolist(),
            "h_imag": np.imag(h[:, node]).tolist(),
            "theta": np.asarray(thetas[node], dtype=float).tolist() if node in thetas else None,
        }
    return {"freqs": omegas.tolist(), "nodes": nodes}


def write_perturbation_json(document: dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return path


__all__ = [
    "mean_responses",
    "assignment_thetas",
    "corrupted_psd",
    "corrupted_cross_psd",
    "perturbation_document",
    "write_perturbation_json",
]
