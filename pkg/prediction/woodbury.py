"""Rank-one Woodbury downdates of an inverse spectrum, one corrupted node at a time."""
from __future__ import annotations

from typing import List, Mapping, Optional, Sequence

import numpy as np

from dynamics.spectral_matrix import SpectralMatrix
from spectral.inversion import invert_spectrum
from utilities import config, get_logger
from utilities.exceptions import InvalidModelError, SingularSpectrumError

logger = get_logger('prediction.woodbury')


def _theta(thetas: Mapping[int, np.ndarray], node: int, size: int) -> np.ndarray:
    theta = np.asarray(thetas.get(node, np.zeros(size)), dtype=float).reshape(-1)
    if theta.size == 1:
        theta = np.full(size, float(theta[0]))
    if theta.size != size:
        raise InvalidModelError(f"theta for node {node} has {theta.size} samples, grid has {size}")
    if np.any(theta < -1e-12):
        raise InvalidModelError(f"theta for node {node} must be non-negative")
    return theta


def woodbury_step(psi_inv: np.ndarray, node: int, theta: np.ndarray, freqs: np.ndarray, tolerance: float) -> np.ndarray:
    """``(Psi + theta b b^T)^-1`` from ``Psi^-1`` with ``b`` the ``node`` basis vector.

    ``Psi^-1 - Psi^-1 b b^T Psi^-1 / (1/theta + b^T Psi^-1 b)``; frequencies
    with ``theta = 0`` are left unchanged.
    """
    active = theta > 0
    out = psi_inv.copy()
    if not np.any(active):
        return out
    column = psi_inv[active, :, node]
    row = psi_inv[active, node, :]
    pivot = 1.0 / theta[active] + psi_inv[active, node, node]
    bad = np.abs(pivot) < tolerance
    if np.any(bad):
        raise SingularSpectrumError(
            f"Woodbury pivot vanishes for node {node}", np.asarray(freqs)[active][bad]
        )
    out[active] -= column[:, :, None] * row[:, None, :] / pivot[:, None, None]
    return out


def woodbury_iterates(
    psi0: SpectralMatrix,
    z: Sequence[int],
    thetas: Mapping[int, np.ndarray],
    tolerance: Optional[float] = None,
) -> List[SpectralMatrix]:
    """``[Psi_0^-1, Psi_1^-1, ..., Psi_m^-1]`` adding ``theta_k b_k b_k^T`` in the order of ``z``."""
    tolerance = config.woodbury_tolerance if tolerance is None else tolerance
    current = invert_spectrum(psi0, reg=0.0).values
    steps = [SpectralMatrix(psi0.freqs, current)]
    for node in z:
        if not 0 <= node < psi0.n:
            raise InvalidModelError(f"node {node} outside a {psi0.n}-node spectrum")
        theta = _theta(thetas, node, len(psi0))
        current = woodbury_step(current, node, theta, psi0.freqs, tolerance)
        steps.append(SpectralMatrix(psi0.freqs, current))
        logger.debug(f"Woodbury step for node {node + 1} done")
    return steps


def woodbury_sequence(
    psi0: SpectralMatrix,
    z: Sequence[int],
    thetas: Mapping[int, np.ndarray],
    tolerance: Optional[float] = None,
) -> SpectralMatrix:
    """Final inverse ``Psi_m^-1`` of the Woodbury iteration."""
    return woodbury_iterates(psi0, z, thetas, tolerance)[-1]


def direct_inverse(psi0: SpectralMatrix, z: Sequence[int], thetas: Mapping[int, np.ndarray]) -> SpectralMatrix:
    """Dense inverse of ``Psi_0 + sum_k theta_k b_k b_k^T``."""
    values = psi0.values.copy()
    for node in z:
        values[:, node, node] += _theta(thetas, node, len(psi0))
    return invert_spectrum(SpectralMatrix(psi0.freqs, values), reg=0.0)


def rank_one_term(psi_inv: SpectralMatrix, node: int) -> SpectralMatrix:
    """``Psi^-1 b b^T Psi^-1``: nonzero only where row/column ``node`` of ``Psi^-1`` is."""
    column = psi_inv.values[:, :, node]
    row = psi_inv.values[:, node, :]
    return SpectralMatrix(psi_inv.freqs, column[:, :, None] * row[:, None, :])


__all__ = [
    "woodbury_step",
    "woodbury_iterates",
    "woodbury_sequence",
    "direct_inverse",
    "rank_one_term",
]
