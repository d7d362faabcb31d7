"""Matrix-valued functions of frequency sampled on a grid in [0, pi]."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from utilities import config
from utilities.exceptions import DimensionMismatchError, InvalidModelError


def frequency_grid(size: Optional[int] = None) -> np.ndarray:
    """``size`` uniformly spaced angles covering ``[0, pi]`` inclusive."""
    size = size or config.grid_size
    if size < 2:
        raise InvalidModelError("frequency grid needs at least two points")
    return np.linspace(0.0, np.pi, int(size))


@dataclass(frozen=True)
class SpectralMatrix:
    """``values[f]`` is the ``n x n`` complex matrix at ``freqs[f]``.

    Holds Phi_yy, Phi_uu, Phi_uy, the Woodbury iterates Psi_k and their inverses.
    """

    freqs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 3 or values.shape[1] != values.shape[2]:
            raise DimensionMismatchError(f"expected (F, n, n) values, got shape {values.shape}")
        if values.shape[0] != freqs.size:
            raise DimensionMismatchError(
                f"{freqs.size} frequencies but {values.shape[0]} matrices"
            )
        if freqs.size and (freqs.min() < -1e-12 or freqs.max() > np.pi + 1e-12):
            raise InvalidModelError("frequencies must lie in [0, pi]")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.freqs.size

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.values[:, i, j]

    def diagonal(self) -> np.ndarray:
        """``(F, n)`` real diagonal."""
        return np.real(np.diagonal(self.values, axis1=1, axis2=2))

    def conj_transpose(self) -> "SpectralMatrix":
        return SpectralMatrix(self.freqs, np.conj(np.swapaxes(self.values, 1, 2)))

    def hermitian_error(self) -> float:
        return float(np.max(np.abs(self.values - np.conj(np.swapaxes(self.values, 1, 2))), initial=0.0))

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values), initial=0.0)))
        return self.hermitian_error() <= tol * scale

    def hermitian_part(self) -> "SpectralMatrix":
        return SpectralMatrix(self.freqs, 0.5 * (self.values + np.conj(np.swapaxes(self.values, 1, 2))))

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue over the grid of the Hermitian part."""
        eigs = np.linalg.eigvalsh(self.hermitian_part().values)
        return float(eigs.min())

    def matmul(self, other: "SpectralMatrix") -> "SpectralMatrix":
        self._check_compatible(other)
        return SpectralMatrix(self.freqs, self.values @ other.values)

    def __add__(self, other: "SpectralMatrix") -> "SpectralMatrix":
        self._check_compatible(other)
        return SpectralMatrix(self.freqs, self.values + other.values)

    def __sub__(self, other: "SpectralMatrix") -> "SpectralMatrix":
        self._check_compatible(other)
        return SpectralMatrix(self.freqs, self.values - other.values)

    def max_abs_deviation(self, other: "SpectralMatrix") -> float:
        self._check_compatible(other)
        return float(np.max(np.abs(self.values - other.values), initial=0.0))

    def _check_compatible(self, other: "SpectralMatrix") -> None:
        if self.values.shape != other.values.shape:
            raise DimensionMismatchError(
                f"spectral shapes differ: {self.values.shape} vs {other.values.shape}"
            )
        if not np.allclose(self.freqs, other.freqs):
            raise DimensionMismatchError("spectral matrices are sampled on different grids")

    @classmethod
    def identity(cls, freqs, n: int) -> "SpectralMatrix":
        freqs = np.asarray(freqs, dtype=float)
        return cls(freqs, np.broadcast_to(np.eye(n, dtype=complex), (freqs.size, n, n)).copy())

    def to_json_dict(self) -> Dict[str, list]:
        return {
            "freqs": self.freqs.tolist(),
            "real": np.real(self.values).tolist(),
            "imag": np.imag(self.values).tolist(),
        }

    @classmethod
    def from_json_dict(cls, document: Dict[str, list]) -> "SpectralMatrix":
        values = np.asarray(document["real"], dtype=float) + 1j * np.asarray(document["imag"], dtype=float)
        return cls(np.asarray(document["freqs"], dtype=float), values)


__all__ = ["SpectralMatrix", "frequency_grid"]
