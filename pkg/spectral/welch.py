"""Welch estimation of the joint spectrum of a multichannel panel."""
from __future__ import annotations

from typing import Iterable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import signal

from dynamics.simulation import TimeSeriesPanel
from dynamics.spectral_matrix import SpectralMatrix
from utilities import config, get_logger
from utilities.exceptions import DimensionMismatchError, InvalidModelError

logger = get_logger('spectral.welch')


class WelchConfig(BaseModel):
    """Averaged modified periodograms over windowed, overlapping segments."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    segment_length: int = Field(default=512, ge=2, description="Samples per segment")
    overlap: float = Field(default=0.5, ge=0.0, lt=1.0, description="Fraction of a segment shared with the next")
    window: str = Field(default="hann", description="scipy.signal window name")
    nfft: int = Field(default=512, ge=2, description="FFT length per segment")
    detrend: Literal["none", "constant", "linear"] = Field(
        default="none", description="Per-segment detrending before windowing"
    )

    @model_validator(mode="after")
    def _nfft_covers_segment(self) -> "WelchConfig":
        if self.nfft < self.segment_length:
            raise ValueError(f"nfft ({self.nfft}) must be at least segment_length ({self.segment_length})")
        signal.get_window(self.window, self.segment_length)
        return self

    @classmethod
    def from_defaults(cls, **overrides) -> "WelchConfig":
        values = dict(config.welch_defaults)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def noverlap(self) -> int:
        return int(np.floor(self.overlap * self.segment_length))


def estimate_cross_psd(panel: TimeSeriesPanel, cfg: Optional[WelchConfig] = None) -> SpectralMatrix:
    """``Phi[i, j](omega) ~ E[Y_i conj(Y_j)]`` for every channel pair.

    ``scipy.signal.csd(x, y)`` averages ``conj(X) Y``, so entry ``(i, j)`` is
    ``csd(y_j, y_i)``. The one-sided density is folded back to the two-sided
    convention in which white noise of variance ``s`` has spectrum ``s``.
    """
    cfg = cfg or WelchConfig.from_defaults()
    if cfg.segment_length > panel.length:
        raise InvalidModelError(
            f"Welch segment ({cfg.segment_length}) is longer than the record ({panel.length} samples)"
        )
    data = panel.data
    f, pxy = signal.csd(
        data[None, :, :],
        data[:, None, :],
        fs=1.0,
        window=cfg.window,
        nperseg=cfg.segment_length,
        noverlap=cfg.noverlap,
        nfft=cfg.nfft,
        detrend=False if cfg.detrend == "none" else cfg.detrend,
        return_onesided=True,
        scaling="density",
        axis=-1,
    )
    values = np.moveaxis(pxy, -1, 0).astype(complex)
    interior = np.ones(f.size, dtype=bool)
    interior[0] = False
    if cfg.nfft % 2 == 0:
        interior[-1] = False
    values[interior] *= 0.5
    values = 0.5 * (values + np.conj(np.swapaxes(values, 1, 2)))
    logger.debug(f"Welch estimate: {panel.n} channels, {f.size} bins, {panel.length} samples")
    return SpectralMatrix(2.0 * np.pi * f, values)


def average_spectra(spectra: Iterable[SpectralMatrix]) -> SpectralMatrix:
    """Entrywise mean of spectra sampled on a common grid."""
    items: List[SpectralMatrix] = list(spectra)
    if not items:
        raise InvalidModelError("nothing to average")
    first = items[0]
    total = np.zeros_like(first.values)
    for s in items:
        if s.values.shape != first.values.shape or not np.allclose(s.freqs, first.freqs):
            raise DimensionMismatchError("spectra to average must share shape and frequency grid")
        total += s.values
    return SpectralMatrix(first.freqs, total / len(items))


def coherence(s: SpectralMatrix) -> np.ndarray:
    """Magnitude-squared coherence ``|S_ij|^2 / (S_ii S_jj)`` as ``(F, n, n)``."""
    diag = s.diagonal()
    denom = diag[:, :, None] * diag[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, np.abs(s.values) ** 2 / denom, 0.0)
    return out


__all__ = ["WelchConfig", "estimate_cross_psd", "average_spectra", "coherence"]
