"""Dynamic Influence Model: ``y = G(z) y + e`` with independent node noises."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import linalg

from dynamics.transfer_function import TransferFunction
from graphs.structures import DirectedGraph
from utilities import config, get_logger
from utilities.exceptions import InvalidModelError

logger = get_logger('dynamics.dim_system')


@dataclass(frozen=True)
class NoiseSpec:
    """Node noise ``e_i``: white Gaussian with ``variance``, optionally colored by ``shaping``."""

    variance: float = 1.0
    shaping: Optional[TransferFunction] = None

    def __post_init__(self):
        if not self.variance > 0:
            raise InvalidModelError(f"noise variance must be positive, got {self.variance}")
        if self.shaping is not None and not self.shaping.is_stable():
            raise InvalidModelError("noise shaping filter must be stable")

    def spectrum(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        if self.shaping is None:
            return np.full(omegas.shape, self.variance)
        return self.variance * np.abs(self.shaping.freqresp(omegas)) ** 2


@dataclass(frozen=True)
class DimSystem:
    """``n`` nodes, ``g[(i, j)]`` is G_ij (the influence of j on i), per-node noise."""

    n: int
    g: Dict[Tuple[int, int], TransferFunction] = field(default_factory=dict)
    noise: Tuple[NoiseSpec, ...] = ()

    def __post_init__(self):
        noise = tuple(self.noise) if self.noise else tuple(NoiseSpec() for _ in range(self.n))
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "g", {(int(i), int(j)): tf for (i, j), tf in self.g.items()})
        if len(noise) != self.n:
            raise InvalidModelError(f"expected {self.n} noise specs, got {len(noise)}")
        for (i, j) in self.g:
            if i == j:
                raise InvalidModelError(f"diagonal entry G_{i}{i} must be absent")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidModelError(f"entry G_{i}{j} outside a {self.n}-node system")

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.g.items())), self.noise))

    @classmethod
    def from_arcs(
        cls,
        n: int,
        arcs: Iterable[Tuple[int, int, TransferFunction]],
        noise: Optional[Iterable[NoiseSpec]] = None,
    ) -> "DimSystem":
        """Build from ``(source, target, tf)`` arcs, i.e. ``G[target, source] = tf``."""
        g = {}
        for source, target, tf in arcs:
            g[(target, source)] = tf
        return cls(n, g, tuple(noise) if noise is not None else ())

    def generative_graph(self) -> DirectedGraph:
        return DirectedGraph(self.n, frozenset((j, i) for (i, j) in self.g))

    def transfer_matrix(self, omegas) -> np.ndarray:
        """``G(e^{j omega})`` stacked as ``(F, n, n)``."""
        omegas = np.asarray(omegas, dtype=float)
        out = np.zeros((omegas.size, self.n, self.n), dtype=complex)
        for (i, j), tf in self.g.items():
            out[:, i, j] = tf.freqresp(omegas)
        return out

    def noise_spectra(self, omegas) -> np.ndarray:
        """Diagonal of ``Phi_e`` as ``(F, n)``."""
        return np.stack([spec.spectrum(omegas) for spec in self.noise], axis=-1)

    def instantaneous_gain(self) -> np.ndarray:
        g0 = np.zeros((self.n, self.n))
        for (i, j), tf in self.g.items():
            g0[i, j] = tf.direct_gain
        return g0

    def closed_loop_matrix(self) -> np.ndarray:
        """State matrix of the interconnection of every G_ij realization.

        Each entry is realized by ``tf2ss``; with ``o = C x + D y_src`` and
        ``y = sum(o) + e`` the output solve uses ``(I - G0)^-1``.
        """
        blocks = []
        for (i, j), tf in sorted(self.g.items()):
            a, b, c, d = tf.to_state_space()
            blocks.append((i, j, a, b, c))
        size = sum(a.shape[0] for _, _, a, _, _ in blocks)
        if size == 0:
            return np.zeros((0, 0))
        a_blk = np.zeros((size, size))
        b_blk = np.zeros((size, self.n))
        c_blk = np.zeros((self.n, size))
        offset = 0
        for i, j, a, b, c in blocks:
            k = a.shape[0]
            a_blk[offset:offset + k, offset:offset + k] = a
            b_blk[offset:offset + k, j] = b[:, 0]
            c_blk[i, offset:offset + k] += c[0, :]
            offset += k
        loop = np.linalg.solve(np.eye(self.n) - self.instantaneous_gain(), c_blk)
        return a_blk + b_blk @ loop

    def labels(self) -> List[str]:
        return [str(k + 1) for k in range(self.n)]


def check_stability(sys: DimSystem, tolerance: Optional[float] = None, grid_size: Optional[int] = None) -> bool:
    """Closed-loop stability and well-posedness of a DIM.

    True iff every G_ij and shaping filter is stable, ``I - G0`` is
    invertible (``|det| > tolerance``, so static loops with gain above one
    are accepted), the interconnected realization has all poles strictly
    inside the unit circle, and ``|det(I - G)|`` stays above ``tolerance``
    over a fine frequency grid.
    """
    tolerance = config.stability_tolerance if tolerance is None else tolerance
    grid_size = grid_size or 4 * config.grid_size

    for (i, j), tf in sys.g.items():
        if not tf.is_stable():
            logger.debug(f"G_{i}{j} has poles on/outside the unit circle")
            return False
    for k, spec in enumerate(sys.noise):
        if spec.shaping is not None and not spec.shaping.is_stable():
            return False

    if not sys.g:
        return True

    static_det = abs(float(np.linalg.det(np.eye(sys.n) - sys.instantaneous_gain())))
    if static_det <= tolerance:
        logger.debug(f"I - G0 is singular (|det| = {static_det:.3e})")
        return False

    a_cl = sys.closed_loop_matrix()
    if a_cl.size and np.max(np.abs(linalg.eigvals(a_cl))) >= 1.0:
        logger.debug("closed-loop realization has a pole on/outside the unit circle")
        return False

    omegas = np.linspace(0.0, np.pi, grid_size)
    dets = np.linalg.det(np.eye(sys.n)[None, :, :] - sys.transfer_matrix(omegas))
    min_det = float(np.min(np.abs(dets)))
    if min_det <= tolerance:
        logger.debug(f"min |det(I - G)| = {min_det:.3e} below tolerance {tolerance:.1e}")
        return False
    return True


__all__ = ["NoiseSpec", "DimSystem", "check_stability"]
