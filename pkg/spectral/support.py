"""Undirected structure from the support of an inverse spectrum."""
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from dynamics.simulation import TimeSeriesPanel
from dynamics.spectral_matrix import SpectralMatrix
from graphs.structures import UndirectedGraph, make_edge
from spectral.inversion import invert_spectrum
from spectral.welch import WelchConfig, estimate_cross_psd
from utilities import config, get_logger

logger = get_logger('spectral.support')


class SupportConfig(BaseModel):
    """How inverse-spectrum magnitudes become edges."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    aggregate: Literal["max", "mean"] = Field(default="max", description="Reduction over the frequency grid")
    threshold_mode: Literal["relative", "absolute"] = Field(default="relative")
    tau: float = Field(default=0.08, gt=0.0)
    regularization: Optional[float] = Field(
        default=None, ge=0.0, description="Absolute ridge epsilon; unset means ridge_factor * trace / n"
    )
    normalize: bool = Field(default=False, description="Score partial coherence instead of raw magnitude")

    @classmethod
    def from_defaults(cls, **overrides) -> "SupportConfig":
        values = {k: v for k, v in config.support_defaults.items() if k in cls.model_fields}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def score_matrix(inv: SpectralMatrix, cfg: Optional[SupportConfig] = None) -> np.ndarray:
    """``n x n`` aggregate of ``|inv(omega)_ij|`` over the grid (diagonal kept for display)."""
    cfg = cfg or SupportConfig.from_defaults()
    magnitude = np.abs(inv.values)
    if cfg.normalize:
        diag = np.sqrt(np.abs(inv.diagonal()))
        denom = diag[:, :, None] * diag[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            magnitude = np.where(denom > 0, magnitude / denom, 0.0)
    if cfg.aggregate == "max":
        return magnitude.max(axis=0)
    return magnitude.mean(axis=0)


def dc_scores(inv: SpectralMatrix) -> np.ndarray:
    """``|inv|`` at the grid point closest to ``omega = 0``."""
    return np.abs(inv.values[int(np.argmin(np.abs(inv.freqs)))])


def support_from_scores(scores: np.ndarray, cfg: SupportConfig) -> UndirectedGraph:
    n = scores.shape[0]
    off = scores[~np.eye(n, dtype=bool)]
    if cfg.threshold_mode == "relative":
        peak = float(off.max()) if off.size else 0.0
        if peak <= 0.0:
            return UndirectedGraph(n)
        threshold = cfg.tau * peak
    else:
        threshold = cfg.tau
    edges = frozenset(
        make_edge(i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if max(scores[i, j], scores[j, i]) > threshold
    )
    return UndirectedGraph(n, edges)


def support_graph(inv: SpectralMatrix, cfg: Optional[SupportConfig] = None) -> UndirectedGraph:
    """Edge ``{i, j}`` iff the aggregated score exceeds the threshold."""
    cfg = cfg or SupportConfig.from_defaults()
    return support_from_scores(score_matrix(inv, cfg), cfg)


def reconstruct_from_spectrum(s: SpectralMatrix, cfg: Optional[SupportConfig] = None) -> UndirectedGraph:
    cfg = cfg or SupportConfig.from_defaults()
    return support_graph(invert_spectrum(s, cfg.regularization), cfg)


def reconstruct(
    panel: TimeSeriesPanel,
    welch: Optional[WelchConfig] = None,
    support: Optional[SupportConfig] = None,
) -> UndirectedGraph:
    """Welch estimate, inversion and support thresholding in one step."""
    if panel.n == 1:
        return UndirectedGraph(1)
    return reconstruct_from_spectrum(estimate_cross_psd(panel, welch), support)


def write_scores_csv(scores: np.ndarray, path: Union[str, Path], labels: Optional[Sequence[str]] = None) -> Path:
    labels = list(labels or [str(k + 1) for k in range(scores.shape[0])])
    frame = pd.DataFrame(scores, index=labels, columns=labels)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, float_format="%.6g", index_label="node")
    return path


def read_scores_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, index_col="node", dtype={"node": str})


__all__ = [
    "SupportConfig",
    "score_matrix",
    "dc_scores",
    "support_from_scores",
    "support_graph",
    "reconstruct_from_spectrum",
    "reconstruct",
    "write_scores_csv",
    "read_scores_csv",
]
