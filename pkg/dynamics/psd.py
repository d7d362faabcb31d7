"""Exact spectra of a DIM.

``Phi_yy = (I - G)^-1 Phi_e (I - G)^-H`` with ``Phi_ij = E[Y_i conj(Y_j)]``,
so the inverse is available in closed form as ``(I - G)^H Phi_e^-1 (I - G)``.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from dynamics.dim_system import DimSystem
from dynamics.spectral_matrix import SpectralMatrix, frequency_grid
from utilities import config, get_logger
from utilities.exceptions import InvalidModelError, SingularSpectrumError

logger = get_logger('dynamics.psd')


def _loop_matrix(sys: DimSystem, omegas: np.ndarray) -> np.ndarray:
    return np.eye(sys.n)[None, :, :] - sys.transfer_matrix(omegas)


def _psd_values(sys: DimSystem, omegas: np.ndarray) -> np.ndarray:
    loop = _loop_matrix(sys, omegas)
    dets = np.abs(np.linalg.det(loop))
    bad = dets < config.singular_tolerance
    if np.any(bad):
        raise SingularSpectrumError("I - G(e^{j omega}) is singular", omegas[bad])
    transfer = np.linalg.inv(loop)
    phi_e = sys.noise_spectra(omegas)
    return (transfer * phi_e[:, None, :]) @ np.conj(np.swapaxes(transfer, 1, 2))


def analytic_psd(sys: DimSystem, freqs=None) -> SpectralMatrix:
    """Joint PSD of the node outputs on ``freqs`` (default grid from config)."""
    omegas = frequency_grid() if freqs is None else np.asarray(freqs, dtype=float)
    return SpectralMatrix(omegas, _psd_values(sys, omegas))


def analytic_inverse_psd(sys: DimSystem, freqs=None) -> SpectralMatrix:
    """``(I - G)^H Phi_e^-1 (I - G)`` evaluated directly, no matrix inversion."""
    omegas = frequency_grid() if freqs is None else np.asarray(freqs, dtype=float)
    phi_e = sys.noise_spectra(omegas)
    bad = np.any(phi_e <= 0.0, axis=1)
    if np.any(bad):
        raise SingularSpectrumError("node noise spectrum vanishes", omegas[bad])
    loop = _loop_matrix(sys, omegas)
    weighted = loop / phi_e[:, :, None]
    return SpectralMatrix(omegas, np.conj(np.swapaxes(loop, 1, 2)) @ weighted)


def inverse_psd_entry(sys: DimSystem, i: int, j: int, freqs=None) -> np.ndarray:
    """Entry ``(i, j)`` of the inverse PSD written in terms of the DIM filters.

    For ``i != j`` this is ``-G_ij/phi_i - conj(G_ji)/phi_j`` plus
    ``conj(G_ki) G_kj / phi_k`` over the common children ``k`` of ``i`` and
    ``j``; it vanishes unless ``j`` is a kin of ``i``.
    """
    if not (0 <= i < sys.n and 0 <= j < sys.n):
        raise InvalidModelError(f"entry ({i}, {j}) outside a {sys.n}-node system")
    omegas = frequency_grid() if freqs is None else np.asarray(freqs, dtype=float)
    phi = sys.noise_spectra(omegas)

    def g(a: int, b: int) -> np.ndarray:
        tf = sys.g.get((a, b))
        return np.zeros(omegas.size, dtype=complex) if tf is None else tf.freqresp(omegas)

    if i == j:
        total = 1.0 / phi[:, i] + 0j
        for (k, source) in sys.g:
            if source == i:
                total = total + np.abs(g(k, i)) ** 2 / phi[:, k]
        return total

    total = -g(i, j) / phi[:, i] - np.conj(g(j, i)) / phi[:, j]
    children_i = {k for (k, source) in sys.g if source == i}
    children_j = {k for (k, source) in sys.g if source == j}
    for k in sorted(children_i & children_j):
        total = total + np.conj(g(k, i)) * g(k, j) / phi[:, k]
    return total


def autocorrelation_from_psd(values: np.ndarray, max_lag: int) -> np.ndarray:
    """``R[0..max_lag]`` from a PSD sampled at ``2 pi m / M``, ``m = 0..M-1``.

    ``R[k] = (1/M) sum_m Phi(omega_m) e^{j omega_m k}``, which is exact up to
    aliasing of lags separated by ``M``.
    """
    values = np.asarray(values)
    if values.ndim != 1:
        raise InvalidModelError("expected a one-dimensional PSD sample")
    if max_lag >= values.size // 2:
        raise InvalidModelError(f"grid of {values.size} points cannot resolve lag {max_lag}")
    r = np.fft.ifft(values)
    return np.real(r[: max_lag + 1])


def channel_autocorrelation(
    sys: DimSystem,
    i: int,
    max_lag: Optional[int] = None,
    grid_size: Optional[int] = None,
) -> np.ndarray:
    """Autocorrelation of node ``i`` from its exact spectrum on the full circle."""
    max_lag = config.max_lag if max_lag is None else int(max_lag)
    grid_size = grid_size or config.psd_oversampling
    omegas = 2.0 * np.pi * np.arange(grid_size) / grid_size
    phi = _psd_values(sys, omegas)[:, i, i]
    return autocorrelation_from_psd(np.real(phi), max_lag)


__all__ = [
    "analytic_psd",
    "analytic_inverse_psd",
    "inverse_psd_entry",
    "autocorrelation_from_psd",
    "channel_autocorrelation",
]
