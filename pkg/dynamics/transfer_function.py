"""Rational transfer functions in the backward-shift operator z^-1.

``num[k]`` and ``den[k]`` multiply ``z^-k``. The same coefficient arrays,
zero-padded to equal length, are the descending-power polynomials that
``scipy.signal`` expects for discrete-time systems, so realizations and
filtering go straight through ``tf2ss`` / ``ss2tf`` / ``lfilter``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import signal

from utilities.exceptions import InvalidModelError, SingularEvaluationError

EVAL_TOLERANCE = 1e-12


def _trim(coeffs: Sequence[float]) -> Tuple[float, ...]:
    values = [float(c) for c in coeffs]
    while len(values) > 1 and values[-1] == 0.0:
        values.pop()
    return tuple(values) if values else (0.0,)


@dataclass(frozen=True)
class TransferFunction:
    """``num(z^-1) / den(z^-1)``."""

    num: Tuple[float, ...]
    den: Tuple[float, ...] = (1.0,)

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if not np.all(np.isfinite(num)) or not np.all(np.isfinite(den)):
            raise InvalidModelError("transfer function coefficients must be finite")
        if den[0] == 0.0:
            raise InvalidModelError("den[0] must be nonzero")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    # Constructors
    @classmethod
    def constant(cls, gain: float) -> "TransferFunction":
        return cls((float(gain),))

    @classmethod
    def delay(cls, k: int, gain: float = 1.0) -> "TransferFunction":
        if k < 0:
            raise InvalidModelError("delay must be non-negative")
        return cls(tuple([0.0] * k + [float(gain)]))

    @classmethod
    def from_state_space(cls, a, b, c, d) -> "TransferFunction":
        """SISO transfer function of ``(A, B, C, D)`` via ``scipy.signal.ss2tf``."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.size == 0:
            return cls.constant(float(np.asarray(d, dtype=float).reshape(-1)[0]))
        num, den = signal.ss2tf(a, np.atleast_2d(b), np.atleast_2d(c), np.atleast_2d(d))
        num = np.real_if_close(np.asarray(num, dtype=complex).reshape(-1)).real
        den = np.real_if_close(np.asarray(den, dtype=complex).reshape(-1)).real
        num[np.abs(num) < 1e-14] = 0.0
        den[np.abs(den) < 1e-14] = 0.0
        return cls(tuple(num / den[0]), tuple(den / den[0]))

    # Properties
    @property
    def order(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    @property
    def direct_gain(self) -> float:
        """Value at ``z = infinity`` (instantaneous feed-through)."""
        return self.num[0] / self.den[0]

    @property
    def is_fir(self) -> bool:
        return len(self.den) == 1

    def padded(self) -> Tuple[np.ndarray, np.ndarray]:
        size = max(len(self.num), len(self.den))
        num = np.zeros(size)
        den = np.zeros(size)
        num[: len(self.num)] = self.num
        den[: len(self.den)] = self.den
        return num, den

    def poles(self) -> np.ndarray:
        """Poles in the z-plane: roots of ``den`` read as a descending polynomial in z."""
        if len(self.den) == 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self.den)

    def is_stable(self) -> bool:
        poles = self.poles()
        return bool(poles.size == 0 or np.max(np.abs(poles)) < 1.0)

    def freqresp(self, omegas) -> np.ndarray:
        """Vectorized evaluation at ``z = e^{j omega}``."""
        x = np.exp(-1j * np.asarray(omegas, dtype=float))
        num = np.polyval(self.num[::-1], x)
        den = np.polyval(self.den[::-1], x)
        if np.any(np.abs(den) < EVAL_TOLERANCE):
            bad = np.asarray(omegas, dtype=float).reshape(-1)[np.abs(den).reshape(-1) < EVAL_TOLERANCE]
            raise SingularEvaluationError(
                f"denominator vanishes at omega = {[round(float(w), 6) for w in bad[:5]]}"
            )
        return num / den

    def impulse(self, length: int) -> np.ndarray:
        impulse = np.zeros(length)
        if length:
            impulse[0] = 1.0
        return signal.lfilter(self.num, self.den, impulse)

    def filter(self, x: np.ndarray) -> np.ndarray:
        """Zero-initial-condition response to ``x`` (``scipy.signal.lfilter``)."""
        return signal.lfilter(self.num, self.den, x)

    def to_state_space(self):
        """Controllable realization ``(A, B, C, D)``; empty A for a static gain."""
        num, den = self.padded()
        if len(num) == 1:
            return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.array([[num[0] / den[0]]])
        a, b, c, d = signal.tf2ss(num, den)
        return a, b, c, d

    def to_dict(self) -> dict:
        return {"num": list(self.num), "den": list(self.den)}


def eval_tf(tf: TransferFunction, omega: float) -> complex:
    """``num(e^{-j omega}) / den(e^{-j omega})``."""
    return complex(tf.freqresp(np.array([omega]))[0])


__all__ = ["TransferFunction", "eval_tf", "EVAL_TOLERANCE"]
