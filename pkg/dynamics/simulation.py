"""Time-domain simulation of a DIM and the panel container for its output."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import networkx as nx
import numpy as np
import pandas as pd

from dynamics.dim_system import DimSystem, check_stability
from utilities import config, get_logger
from utilities.exceptions import InvalidModelError, UnstableSystemError

logger = get_logger('dynamics.simulation')

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True)
class TimeSeriesPanel:
    """``n`` channels by ``T`` samples."""

    data: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if data.shape[1] == 0:
            raise InvalidModelError("panel must contain at least one sample")
        if not np.all(np.isfinite(data)):
            raise InvalidModelError("panel contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        labels = tuple(self.labels) if self.labels is not None else tuple(str(k + 1) for k in range(data.shape[0]))
        if len(labels) != data.shape[0]:
            raise InvalidModelError("one label per channel is required")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def length(self) -> int:
        return self.data.shape[1]

    def channel(self, i: int) -> np.ndarray:
        return self.data[i]

    def with_channel(self, i: int, values: np.ndarray) -> "TimeSeriesPanel":
        data = np.array(self.data)
        data[i] = values
        return TimeSeriesPanel(data, self.labels)

    def covariance(self) -> np.ndarray:
        return np.cov(self.data, bias=True)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.data.T, columns=list(self.labels))

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "TimeSeriesPanel":
        frame = pd.read_csv(path)
        return cls(frame.to_numpy(dtype=float).T, tuple(str(c) for c in frame.columns))


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _node_noise(sys: DimSystem, rng: np.random.Generator, total: int) -> np.ndarray:
    white = rng.standard_normal((sys.n, total))
    noise = np.empty_like(white)
    for k, spec in enumerate(sys.noise):
        scaled = np.sqrt(spec.variance) * white[k]
        noise[k] = scaled if spec.shaping is None else spec.shaping.filter(scaled)
    return noise


def _simulate_acyclic(sys: DimSystem, noise: np.ndarray) -> np.ndarray:
    order = list(nx.topological_sort(sys.generative_graph().to_networkx()))
    y = np.zeros_like(noise)
    for i in order:
        y[i] = noise[i]
        for (target, source), tf in sys.g.items():
            if target == i:
                y[i] += tf.filter(y[source])
    return y


def _simulate_recursive(sys: DimSystem, noise: np.ndarray) -> np.ndarray:
    """Step-by-step recursion solving the instantaneous coupling ``(I - G0) y[t] = r[t]``."""
    n, total = noise.shape
    entries = []
    for (i, j), tf in sorted(sys.g.items()):
        num, den = tf.padded()
        entries.append((i, j, num / den[0], den / den[0]))
    lhs = np.eye(n) - sys.instantaneous_gain()
    y = np.zeros((n, total))
    outputs = [np.zeros(total) for _ in entries]
    for t in range(total):
        rhs = noise[:, t].copy()
        partial = []
        for k, (i, j, b, a) in enumerate(entries):
            acc = 0.0
            for lag in range(1, len(b)):
                if t - lag < 0:
                    break
                acc += b[lag] * y[j, t - lag] - a[lag] * outputs[k][t - lag]
            partial.append(acc)
            rhs[i] += acc
        y[:, t] = np.linalg.solve(lhs, rhs)
        for k, (i, j, b, a) in enumerate(entries):
            outputs[k][t] = partial[k] + b[0] * y[j, t]
    return y


def simulate_dim(
    sys: DimSystem,
    t: int,
    seed: SeedLike,
    burn_in: Optional[int] = None,
    force_recursive: bool = False,
) -> TimeSeriesPanel:
    """Simulate ``y_i[t] = sum_j (G_ij * y_j)[t] + e_i[t]`` from zero initial conditions.

    Acyclic generative graphs are filtered node by node in topological order
    with ``lfilter``; anything else falls back to the per-step recursion.
    The first ``burn_in`` samples are discarded.
    """
    if t <= 0:
        raise InvalidModelError(f"sample count must be positive, got {t}")
    burn_in = config.burn_in if burn_in is None else int(burn_in)
    if burn_in < 0:
        raise InvalidModelError("burn-in must be non-negative")
    if not check_stability(sys):
        raise UnstableSystemError("cannot simulate an unstable or ill-posed network")

    rng = _as_generator(seed)
    total = t + burn_in
    noise = _node_noise(sys, rng, total)

    if not force_recursive and sys.generative_graph().is_acyclic():
        y = _simulate_acyclic(sys, noise)
    else:
        y = _simulate_recursive(sys, noise)

    logger.debug(f"simulated {sys.n} nodes for {t} samples (burn-in {burn_in})")
    return TimeSeriesPanel(y[:, burn_in:])


__all__ = ["TimeSeriesPanel", "simulate_dim"]
