"""Random stable networks and corruption assignments for property suites."""
from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from corruption.models import (
    CorruptionAssignment,
    Disinformation,
    MeasurementNoise,
    PacketDrop,
    RandomDelay,
)
from dynamics.dim_system import DimSystem
from dynamics.transfer_function import TransferFunction
from utilities import config

DEFAULT_KINDS = ("random_delay", "packet_drop", "measurement_noise", "disinformation")


def random_dag_system(
    rng: np.random.Generator,
    n: int,
    edge_prob: Optional[float] = None,
    coefficient_range: Optional[Tuple[float, float]] = None,
    max_taps: int = 2,
) -> DimSystem:
    """DAG over a random topological order with FIR edges and unit white noise.

    Every arc carries 1..``max_taps`` coefficients drawn uniformly from
    ``coefficient_range`` (with random sign), optionally preceded by one
    sample of delay.
    """
    edge_prob = config.get('prediction.random_edge_probability', 0.3) if edge_prob is None else edge_prob
    low, high = coefficient_range or tuple(config.get('prediction.fir_coefficient_range', [0.3, 1.2]))
    order = rng.permutation(n)
    arcs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                taps = int(rng.integers(1, max_taps + 1))
                coefficients = rng.uniform(low, high, size=taps) * rng.choice([-1.0, 1.0], size=taps)
                lead = int(rng.integers(0, 2))
                tf = TransferFunction(tuple([0.0] * lead + coefficients.tolist()))
                arcs.append((int(order[a]), int(order[b]), tf))
    return DimSystem.from_arcs(n, arcs)


def random_corruption(rng: np.random.Generator, kinds: Sequence[str] = DEFAULT_KINDS):
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "random_delay":
        support = sorted(rng.choice(np.arange(0, 4), size=int(rng.integers(1, 3)), replace=False).tolist())
        weights = rng.dirichlet(np.ones(len(support)))
        weights = weights / weights.sum()
        return RandomDelay(dict(zip(support, weights.tolist())))
    if kind == "packet_drop":
        return PacketDrop(float(rng.uniform(0.3, 0.9)))
    if kind == "measurement_noise":
        return MeasurementNoise(float(rng.uniform(0.5, 2.0)))
    if kind == "disinformation":
        return Disinformation(float(rng.uniform(0.5, 2.0)))
    raise ValueError(f"unknown corruption kind {kind!r}")


def random_assignment(
    rng: np.random.Generator,
    n: int,
    max_size: Optional[int] = None,
    kinds: Sequence[str] = DEFAULT_KINDS,
) -> CorruptionAssignment:
    """Random non-empty node set Z, each node with an independently drawn model."""
    max_size = max_size or max(1, n // 2)
    size = int(rng.integers(1, min(max_size, n) + 1))
    nodes = rng.choice(n, size=size, replace=False)
    return CorruptionAssignment(n, {int(i): random_corruption(rng, kinds) for i in nodes})


__all__ = ["random_dag_system", "random_corruption", "random_assignment", "DEFAULT_KINDS"]
