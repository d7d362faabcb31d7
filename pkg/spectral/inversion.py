"""Per-frequency inversion of spectral matrices."""
from __future__ import annotations

from typing import Optional

import numpy as np

from dynamics.spectral_matrix import SpectralMatrix
from utilities import config, get_logger
from utilities.exceptions import InvalidModelError, SingularSpectrumError

logger = get_logger('spectral.inversion')


def ridge_levels(s: SpectralMatrix, reg: Optional[float] = None) -> np.ndarray:
    """Diagonal loading per frequency.

    ``None`` means ``ridge_factor * trace / n`` at each frequency; a number is
    used as an absolute epsilon (``0`` disables loading).
    """
    if reg is None:
        trace = np.real(np.trace(s.values, axis1=1, axis2=2))
        return config.ridge_factor * np.abs(trace) / max(s.n, 1)
    if reg < 0:
        raise InvalidModelError(f"ridge epsilon must be non-negative, got {reg}")
    return np.full(len(s), float(reg))


def invert_spectrum(
    s: SpectralMatrix,
    reg: Optional[float] = None,
    condition_cap: Optional[float] = None,
) -> SpectralMatrix:
    """``(S + eps I)^-1`` at every frequency, Hermitian-symmetrized."""
    if not s.is_hermitian():
        raise InvalidModelError("only Hermitian spectra can be inverted")
    cap = config.condition_cap if condition_cap is None else float(condition_cap)
    eps = ridge_levels(s, reg)
    loaded = s.hermitian_part().values + eps[:, None, None] * np.eye(s.n)[None, :, :]

    eigs = np.linalg.eigvalsh(loaded)
    smallest = eigs[:, 0]
    largest = np.abs(eigs).max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = np.where(smallest > 0, largest / smallest, np.inf)
    bad = condition > cap
    if np.any(bad):
        raise SingularSpectrumError(
            f"spectrum is singular or ill-conditioned (condition number above {cap:.1e})",
            s.freqs[bad],
        )
    if np.any(eps > 0):
        logger.debug(f"ridge applied, eps in [{eps.min():.3e}, {eps.max():.3e}]")

    inverse = np.linalg.inv(loaded)
    inverse = 0.5 * (inverse + np.conj(np.swapaxes(inverse, 1, 2)))
    return SpectralMatrix(s.freqs, inverse)


__all__ = ["invert_spectrum", "ridge_levels"]
