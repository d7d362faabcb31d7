"""
Randomized state-space corruption models.

A corrupted stream is produced from the clean node output ``y`` by

    x[t+1] = A[t] x[t] + B[t] y[t] + w[t]
    u[t]   = C[t] x[t] + D[t] y[t] + v[t]

where the matrices are drawn IID per step from a finite mixture and
``(w, v)`` is zero-mean Gaussian with covariance ``[[W, S], [S^T, V]]``,
independent of the matrices. Every named model below lowers to this form.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from dynamics.transfer_function import TransferFunction
from graphs.structures import NodeSet
from utilities import get_logger
from utilities.exceptions import DimensionMismatchError, InvalidModelError

logger = get_logger('corruption.models')

PROBABILITY_TOLERANCE = 1e-9
PSD_TOLERANCE = 1e-12


def _matrix(value, rows: int, cols: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        arr = np.zeros((rows, cols))
    arr = arr.reshape(rows, cols) if arr.size == rows * cols else arr
    if arr.shape != (rows, cols):
        raise DimensionMismatchError(f"{name} must be {rows}x{cols}, got {arr.shape}")
    return arr


@dataclass(frozen=True)
class Outcome:
    """One mixture component ``(A, B, C, D)`` with its probability."""

    probability: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @property
    def block(self) -> np.ndarray:
        """``[[A, B], [C, D]]``."""
        return np.block([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True, eq=False)
class RandomStateSpace:
    """Finite mixture of ``(A, B, C, D)`` drawn IID per step plus Gaussian ``(w, v)``."""

    outcomes: Tuple[Outcome, ...]
    w: np.ndarray = None
    s: np.ndarray = None
    v: np.ndarray = None

    def __post_init__(self):
        if not self.outcomes:
            raise InvalidModelError("a random state-space model needs at least one outcome")
        k = np.asarray(self.outcomes[0].a).reshape(-1).size
        k = int(round(np.sqrt(k)))
        normalized = []
        for o in self.outcomes:
            if not o.probability > 0:
                raise InvalidModelError(f"outcome probabilities must be positive, got {o.probability}")
            normalized.append(Outcome(
                float(o.probability),
                _matrix(o.a, k, k, "A"),
                _matrix(o.b, k, 1, "B"),
                _matrix(o.c, 1, k, "C"),
                _matrix(o.d, 1, 1, "D"),
            ))
        total = sum(o.probability for o in normalized)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise InvalidModelError(f"outcome probabilities sum to {total}, expected 1")
        object.__setattr__(self, "outcomes", tuple(normalized))
        object.__setattr__(self, "w", _matrix(self.w if self.w is not None else [], k, k, "W"))
        object.__setattr__(self, "s", _matrix(self.s if self.s is not None else [], k, 1, "S"))
        object.__setattr__(self, "v", _matrix(self.v if self.v is not None else [], 1, 1, "V"))

        joint = self.noise_cov
        if not np.allclose(joint, joint.T, atol=PSD_TOLERANCE):
            raise InvalidModelError("noise covariance [[W, S], [S^T, V]] must be symmetric")
        if joint.size and np.linalg.eigvalsh(joint).min() < -PSD_TOLERANCE * max(1.0, np.abs(joint).max()):
            raise InvalidModelError("noise covariance [[W, S], [S^T, V]] must be positive semidefinite")

    @classmethod
    def deterministic(cls, a, b, c, d, w=None, s=None, v=None) -> "RandomStateSpace":
        return cls((Outcome(1.0, np.asarray(a), np.asarray(b), np.asarray(c), np.asarray(d)),), w, s, v)

    @property
    def state_dim(self) -> int:
        return self.outcomes[0].a.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([o.probability for o in self.outcomes])

    @property
    def noise_cov(self) -> np.ndarray:
        return np.block([[self.w, self.s], [self.s.T, self.v]])

    @property
    def has_noise(self) -> bool:
        return bool(np.any(self.noise_cov != 0.0))

    @property
    def has_v_noise(self) -> bool:
        return bool(self.v[0, 0] != 0.0)

    def mean(self) -> Outcome:
        """``(A_bar, B_bar, C_bar, D_bar)`` with probability 1."""
        p = self.probabilities
        return Outcome(
            1.0,
            sum(pk * o.a for pk, o in zip(p, self.outcomes)),
            sum(pk * o.b for pk, o in zip(p, self.outcomes)),
            sum(pk * o.c for pk, o in zip(p, self.outcomes)),
            sum(pk * o.d for pk, o in zip(p, self.outcomes)),
        )

    def deviations(self) -> Tuple[Outcome, ...]:
        """Per-outcome ``(dA, dB, dC, dD)`` about the mean."""
        m = self.mean()
        return tuple(
            Outcome(o.probability, o.a - m.a, o.b - m.b, o.c - m.c, o.d - m.d) for o in self.outcomes
        )

    def is_deterministic(self, which: str = "abcd") -> bool:
        m = self.mean()
        for o in self.outcomes:
            for name in which:
                if not np.allclose(getattr(o, name), getattr(m, name), atol=0.0, rtol=0.0):
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "outcomes": [
                {
                    "probability": o.probability,
                    "a": o.a.tolist(),
                    "b": o.b.tolist(),
                    "c": o.c.tolist(),
                    "d": o.d.tolist(),
                }
                for o in self.outcomes
            ],
            "w": self.w.tolist(),
            "s": self.s.tolist(),
            "v": self.v.tolist(),
        }


def _noise_realization(variance: float, shaping: Optional[TransferFunction], feedthrough: float) -> RandomStateSpace:
    """``u = feedthrough * y + (shaping * n)`` with ``n`` white of ``variance``."""
    if shaping is None:
        return RandomStateSpace.deterministic(
            np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[feedthrough]], v=[[variance]]
        )
    a, b, c, d = shaping.to_state_space()
    k = a.shape[0]
    b = np.asarray(b, dtype=float).reshape(k, 1)
    dh = float(np.asarray(d).reshape(-1)[0])
    return RandomStateSpace.deterministic(
        a,
        np.zeros((k, 1)),
        np.asarray(c, dtype=float).reshape(1, k),
        [[feedthrough]],
        w=variance * b @ b.T,
        s=variance * dh * b,
        v=[[variance * dh * dh]],
    )


class CorruptionModel(ABC):
    """Named corruption of a single node's data stream."""

    kind: str = "abstract"

    @abstractmethod
    def lower(self) -> RandomStateSpace:
        """Equivalent random state-space description."""

    def describe(self) -> str:
        return self.kind


@dataclass(frozen=True)
class RandomDelay(CorruptionModel):
    """``u[t] = y[t - d[t]]`` with ``d[t]`` IID over ``delays`` (value -> probability)."""

    delays: Tuple[Tuple[int, float], ...]
    kind: str = field(default="random_delay", init=False)

    def __init__(self, delays):
        items = delays.items() if isinstance(delays, dict) else delays
        pairs = tuple(sorted((int(d), float(p)) for d, p in items))
        object.__setattr__(self, "delays", pairs)
        object.__setattr__(self, "kind", "random_delay")
        if not pairs:
            raise InvalidModelError("random delay needs at least one delay value")
        if len({d for d, _ in pairs}) != len(pairs):
            raise InvalidModelError("delay values must be distinct")
        if any(d < 0 for d, _ in pairs):
            raise InvalidModelError("delay values must be non-negative")
        if any(not p > 0 for _, p in pairs):
            raise InvalidModelError("delay probabilities must be positive")
        total = sum(p for _, p in pairs)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise InvalidModelError(f"delay probabilities sum to {total}, expected 1")

    @property
    def max_delay(self) -> int:
        return max(d for d, _ in self.delays)

    @property
    def probability_vector(self) -> np.ndarray:
        """``p[d]`` for ``d = 0..max_delay``."""
        p = np.zeros(self.max_delay + 1)
        for d, prob in self.delays:
            p[d] = prob
        return p

    def lower(self) -> RandomStateSpace:
        # Shift register x[t] = (y[t-1], ..., y[t-L]); C picks b_d, delay 0 goes through D.
        size = self.max_delay
        a = np.eye(size, k=-1)
        b = np.zeros((size, 1))
        if size:
            b[0, 0] = 1.0
        outcomes = []
        for d, prob in self.delays:
            c = np.zeros((1, size))
            if d > 0:
                c[0, d - 1] = 1.0
            outcomes.append(Outcome(prob, a, b, c, np.array([[1.0 if d == 0 else 0.0]])))
        return RandomStateSpace(tuple(outcomes))

    def describe(self) -> str:
        return "random delay " + ", ".join(f"{d}:{p:g}" for d, p in self.delays)


@dataclass(frozen=True)
class PacketDrop(CorruptionModel):
    """Keep ``y[t]`` with probability ``p``, otherwise repeat the last delivered value."""

    p: float
    kind: str = field(default="packet_drop", init=False)

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise InvalidModelError(f"packet success probability must lie in (0, 1], got {self.p}")

    def lower(self) -> RandomStateSpace:
        delivered = Outcome(self.p, np.array([[0.0]]), np.array([[1.0]]), np.array([[0.0]]), np.array([[1.0]]))
        if self.p == 1.0:
            return RandomStateSpace((delivered,))
        held = Outcome(1.0 - self.p, np.array([[1.0]]), np.array([[0.0]]), np.array([[1.0]]), np.array([[0.0]]))
        return RandomStateSpace((delivered, held))

    def describe(self) -> str:
        return f"packet drop p={self.p:g}"


@dataclass(frozen=True)
class MeasurementNoise(CorruptionModel):
    """``u = y + v``; ``v`` white with ``variance`` or colored by ``shaping``."""

    variance: float
    shaping: Optional[TransferFunction] = None
    kind: str = field(default="measurement_noise", init=False)

    def __post_init__(self):
        if self.variance < 0:
            raise InvalidModelError("measurement noise variance must be non-negative")
        if self.shaping is not None and not self.shaping.is_stable():
            raise InvalidModelError("measurement noise shaping filter must be stable")

    def lower(self) -> RandomStateSpace:
        return _noise_realization(self.variance, self.shaping, 1.0)

    def noise_spectrum(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        if self.shaping is None:
            return np.full(omegas.shape, float(self.variance))
        return self.variance * np.abs(self.shaping.freqresp(omegas)) ** 2

    def describe(self) -> str:
        colour = "white" if self.shaping is None else "colored"
        return f"{colour} measurement noise var={self.variance:g}"


@dataclass(frozen=True)
class Disinformation(CorruptionModel):
    """``u = v``: the true stream is replaced by a false one."""

    variance: float
    shaping: Optional[TransferFunction] = None
    kind: str = field(default="disinformation", init=False)

    def __post_init__(self):
        if not self.variance > 0:
            raise InvalidModelError("disinformation variance must be positive")
        if self.shaping is not None and not self.shaping.is_stable():
            raise InvalidModelError("disinformation shaping filter must be stable")

    def lower(self) -> RandomStateSpace:
        return _noise_realization(self.variance, self.shaping, 0.0)

    def noise_spectrum(self, omegas) -> np.ndarray:
        return MeasurementNoise(self.variance, self.shaping).noise_spectrum(omegas)

    def describe(self) -> str:
        return f"disinformation var={self.variance:g}"


@dataclass(frozen=True, eq=False)
class RawStateSpace(CorruptionModel):
    """A user-supplied random state-space system."""

    system: RandomStateSpace
    kind: str = field(default="raw_state_space", init=False)

    def lower(self) -> RandomStateSpace:
        return self.system

    def describe(self) -> str:
        return f"random state space ({len(self.system.outcomes)} outcomes, {self.system.state_dim} states)"


@dataclass(frozen=True, eq=False)
class SeriesComposition(CorruptionModel):
    """``second`` applied to the output of ``first``."""

    first: CorruptionModel
    second: CorruptionModel
    kind: str = field(default="composition", init=False)

    def lower(self) -> RandomStateSpace:
        one = self.first.lower()
        two = self.second.lower()
        k1, k2 = one.state_dim, two.state_dim
        outcomes = []
        for o1 in one.outcomes:
            for o2 in two.outcomes:
                a = np.block([[o1.a, np.zeros((k1, k2))], [o2.b @ o1.c, o2.a]])
                b = np.vstack([o1.b, o2.b @ o1.d])
                c = np.hstack([o2.d @ o1.c, o2.c])
                d = o2.d @ o1.d
                outcomes.append(Outcome(o1.probability * o2.probability, a, b, c, d))

        # (w, v) of the cascade only involve B2 and D2 through v1; both are
        # fixed (or v1 vanishes) by the composition precondition.
        m2 = two.mean()
        b2, d2 = m2.b, m2.d
        w = np.block([
            [one.w, one.s @ b2.T],
            [b2 @ one.s.T, b2 @ one.v @ b2.T + two.w],
        ])
        s = np.vstack([one.s @ d2.T, b2 @ one.v @ d2.T + two.s])
        v = d2 @ one.v @ d2.T + two.v
        return RandomStateSpace(tuple(outcomes), w, s, v)

    def describe(self) -> str:
        return f"{self.first.describe()} then {self.second.describe()}"


def compose_models(first: CorruptionModel, second: CorruptionModel) -> SeriesComposition:
    """Series composition, allowed when the cascade noise stays independent of the matrices."""
    one = first.lower()
    two = second.lower()
    if one.has_v_noise and not two.is_deterministic("bd"):
        raise InvalidModelError(
            "cannot compose: the first stage injects measurement noise and the second stage "
            "has random B/D, so the cascade noise would depend on the matrices"
        )
    return SeriesComposition(first, second)


def lower_to_state_space(m: CorruptionModel) -> RandomStateSpace:
    return m.lower()


@dataclass(frozen=True, eq=False)
class CorruptionAssignment:
    """Node index -> corruption model; unlisted nodes are observed cleanly."""

    n: int
    models: Dict[int, CorruptionModel] = field(default_factory=dict)

    def __post_init__(self):
        models = {int(i): m for i, m in self.models.items()}
        for i, m in models.items():
            if not 0 <= i < self.n:
                raise InvalidModelError(f"corrupted node {i} outside a {self.n}-node network")
            if not isinstance(m, CorruptionModel):
                raise InvalidModelError(f"node {i}: {m!r} is not a corruption model")
        object.__setattr__(self, "models", dict(sorted(models.items())))

    @classmethod
    def empty(cls, n: int) -> "CorruptionAssignment":
        return cls(n, {})

    def perturbed_set(self) -> NodeSet:
        return NodeSet(self.models.keys())

    def items(self) -> Iterable[Tuple[int, CorruptionModel]]:
        return self.models.items()

    def __contains__(self, node: object) -> bool:
        return node in self.models

    def __len__(self) -> int:
        return len(self.models)


__all__ = [
    "Outcome",
    "RandomStateSpace",
    "CorruptionModel",
    "RandomDelay",
    "PacketDrop",
    "MeasurementNoise",
    "Disinformation",
    "RawStateSpace",
    "SeriesComposition",
    "compose_models",
    "lower_to_state_space",
    "CorruptionAssignment",
]
