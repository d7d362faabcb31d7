"""Forward simulation of a corrupted data stream from ``x[0] = 0``."""
from __future__ import annotations

from typing import Dict, Optional, Tuple, Union

import numpy as np

from corruption.models import (
    CorruptionAssignment,
    CorruptionModel,
    PacketDrop,
    RandomDelay,
    RandomStateSpace,
)
from corruption.statistics import check_contractive
from dynamics.simulation import TimeSeriesPanel
from utilities import CORRUPTION_STREAM, derive_seed_sequence, get_logger
from utilities.exceptions import InvalidModelError

logger = get_logger('corruption.simulation')

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _draw(ss: RandomStateSpace, rng: np.random.Generator, length: int) -> Tuple[np.ndarray, np.ndarray]:
    """Outcome index per step, then the joint ``(w, v)`` noise as ``(length, k + 1)``."""
    outcomes = rng.choice(len(ss.outcomes), size=length, p=ss.probabilities)
    if ss.has_noise:
        noise = rng.multivariate_normal(
            np.zeros(ss.state_dim + 1), ss.noise_cov, size=length, method="eigh"
        )
    else:
        noise = np.zeros((length, ss.state_dim + 1))
    return outcomes, noise


def _run_state_space(ss: RandomStateSpace, y: np.ndarray, outcomes: np.ndarray, noise: np.ndarray) -> np.ndarray:
    k = ss.state_dim
    a = np.stack([o.a for o in ss.outcomes])
    b = np.stack([o.b[:, 0] for o in ss.outcomes])
    c = np.stack([o.c[0, :] for o in ss.outcomes])
    d = np.array([o.d[0, 0] for o in ss.outcomes])
    x = np.zeros(k)
    u = np.empty_like(y)
    for t in range(y.size):
        m = outcomes[t]
        u[t] = c[m] @ x + d[m] * y[t] + noise[t, k]
        x = a[m] @ x + b[m] * y[t] + noise[t, :k]
    return u


def _run_delay(m: RandomDelay, y: np.ndarray, outcomes: np.ndarray) -> np.ndarray:
    delays = np.array([d for d, _ in m.delays])[outcomes]
    source = np.arange(y.size) - delays
    return np.where(source >= 0, y[np.clip(source, 0, None)], 0.0)


def _run_packet_drop(y: np.ndarray, outcomes: np.ndarray) -> np.ndarray:
    # Outcome 0 is a delivered packet; otherwise hold the last delivered sample.
    delivered = np.where(outcomes == 0, np.arange(y.size), -1)
    last = np.maximum.accumulate(delivered)
    return np.where(last >= 0, y[np.clip(last, 0, None)], 0.0)


def apply_corruption(
    m: CorruptionModel,
    y: np.ndarray,
    seed: SeedLike,
    force_general: bool = False,
) -> np.ndarray:
    """Corrupted version of the channel ``y``.

    Random delays and packet drops have vectorized paths that consume the
    same random draws as the general per-step recursion, so both give the
    same output for the same seed.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size == 0:
        raise InvalidModelError("cannot corrupt an empty channel")
    ss = m.lower()
    check_contractive(ss)
    rng = _as_generator(seed)
    outcomes, noise = _draw(ss, rng, y.size)

    if not force_general and isinstance(m, RandomDelay):
        return _run_delay(m, y, outcomes)
    if not force_general and isinstance(m, PacketDrop):
        return _run_packet_drop(y, outcomes)
    return _run_state_space(ss, y, outcomes, noise)


def corrupt_panel(
    panel: TimeSeriesPanel,
    assignment: CorruptionAssignment,
    master_seed: int,
    trial: int = 0,
) -> TimeSeriesPanel:
    """Corrupt every assigned channel with its own ``(CORRUPTION_STREAM, trial, node)`` seed."""
    if assignment.n != panel.n:
        raise InvalidModelError(f"assignment covers {assignment.n} nodes, panel has {panel.n}")
    data = np.array(panel.data)
    for node, model in assignment.items():
        seed = derive_seed_sequence(master_seed, CORRUPTION_STREAM, trial, node)
        data[node] = apply_corruption(model, data[node], seed)
        logger.debug(f"trial {trial}: corrupted node {node + 1} with {model.describe()}")
    return TimeSeriesPanel(data, panel.labels)


__all__ = ["apply_corruption", "corrupt_panel"]
