"""
Second-order statistics of corrupted streams.

For a clean channel with autocorrelation ``R_yy`` the corrupted stream
satisfies ``Phi_uu = H Phi_yy H* + theta`` where ``H`` is the transfer
function of the mean matrices and ``theta`` is the spectrum of
``du = u - h * y``. The general route goes through the stationary
covariance of ``dx = x - x_bar``, a generalized Lyapunov equation
``P = E[A P A^T] + Q``; the named models also have closed forms.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from corruption.models import (
    CorruptionModel,
    Disinformation,
    MeasurementNoise,
    PacketDrop,
    RandomDelay,
    RandomStateSpace,
)
from dynamics.transfer_function import TransferFunction
from utilities import config, get_logger
from utilities.exceptions import (
    InvalidModelError,
    NoStationarySolutionError,
    TruncationError,
    UnstableSystemError,
)

logger = get_logger('corruption.statistics')

CONTRACTION_MARGIN = 1e-12
IMPULSE_FLOOR = 1e-17
MAX_IMPULSE_LENGTH = 100_000


def spectral_radius(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(linalg.eigvals(matrix))))


def truncate_autocorrelation(r_yy, max_lag: Optional[int] = None) -> np.ndarray:
    """Cut ``R_yy[0..]`` at ``max_lag`` or once the tail drops below ``tail_tolerance * R_yy[0]``.

    Raises ``TruncationError`` when the mass beyond the cut is still above
    ``summability_tolerance * R_yy[0]``.
    """
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    if r.size == 0 or not r[0] > 0:
        raise InvalidModelError("autocorrelation must start with a positive variance")
    if not np.all(np.isfinite(r)):
        raise TruncationError("autocorrelation contains non-finite values")
    max_lag = config.max_lag if max_lag is None else int(max_lag)
    significant = np.nonzero(np.abs(r) >= config.tail_tolerance * r[0])[0]
    cut = min(int(significant[-1]) + 1, max_lag + 1)
    tail = float(np.sum(np.abs(r[cut:])))
    if cut < r.size and tail > config.summability_tolerance * r[0]:
        raise TruncationError(
            f"autocorrelation tail beyond lag {cut - 1} carries {tail / r[0]:.2e} of the variance; "
            "raise corruption.max_lag"
        )
    if cut == r.size == max_lag + 1 and abs(r[-1]) > config.summability_tolerance * r[0]:
        raise TruncationError(
            f"autocorrelation has not decayed by lag {max_lag} (|R[{max_lag}]|/R[0] = {abs(r[-1]) / r[0]:.2e})"
        )
    return r[:cut].copy()


def _lag(r: np.ndarray, k: int) -> float:
    k = abs(k)
    return float(r[k]) if k < r.size else 0.0


def _toeplitz(r: np.ndarray, size: int) -> np.ndarray:
    column = np.zeros(size)
    column[: min(size, r.size)] = r[:size]
    return linalg.toeplitz(column)


def mean_tf(m) -> TransferFunction:
    """Transfer function of the mean matrices ``(A_bar, B_bar, C_bar, D_bar)``."""
    ss = m.lower() if isinstance(m, CorruptionModel) else m
    mean = ss.mean()
    if ss.state_dim == 0:
        return TransferFunction.constant(float(mean.d[0, 0]))
    if spectral_radius(mean.a) >= 1.0:
        raise UnstableSystemError("mean corruption system is not stable")
    return TransferFunction.from_state_space(mean.a, mean.b, mean.c, mean.d)


def second_moment_operator(ss: RandomStateSpace) -> np.ndarray:
    """``E[A (x) A]``."""
    return sum(o.probability * np.kron(o.a, o.a) for o in ss.outcomes)


def check_contractive(ss: RandomStateSpace) -> float:
    """Spectral radius of ``E[A (x) A]``; raises when it is not below one."""
    if ss.state_dim == 0:
        return 0.0
    rho = spectral_radius(second_moment_operator(ss))
    if rho >= 1.0 - CONTRACTION_MARGIN:
        raise NoStationarySolutionError(
            f"E[A (x) A] has spectral radius {rho:.6f} >= 1; the corruption has no stationary regime"
        )
    return rho


def check_gen_lyapunov(ss: RandomStateSpace, q) -> np.ndarray:
    """Solve ``P = E[A P A^T] + Q`` through ``(I - E[A (x) A]) vec(P) = vec(Q)``."""
    k = ss.state_dim
    q = np.asarray(q, dtype=float).reshape(k, k) if k else np.zeros((0, 0))
    if k == 0:
        return q
    if not np.allclose(q, q.T, atol=1e-12 * max(1.0, np.abs(q).max())):
        raise InvalidModelError("Q must be symmetric")
    if np.linalg.eigvalsh(q).min() < -1e-10 * max(1.0, np.abs(q).max()):
        raise InvalidModelError("Q must be positive semidefinite")
    check_contractive(ss)
    operator = np.eye(k * k) - second_moment_operator(ss)
    p = np.linalg.solve(operator, q.reshape(-1)).reshape(k, k)
    return 0.5 * (p + p.T)


def _impulse_length(ss: RandomStateSpace, lags: int) -> int:
    mean = ss.mean()
    rho = spectral_radius(mean.a)
    if rho == 0.0:
        horizon = ss.state_dim
    elif rho >= 1.0:
        raise UnstableSystemError("mean corruption system is not stable")
    else:
        horizon = int(np.ceil(np.log(IMPULSE_FLOOR) / np.log(rho))) + ss.state_dim
    length = horizon + lags
    if length > MAX_IMPULSE_LENGTH:
        raise TruncationError(f"mean corruption system decays too slowly (spectral radius {rho:.6f})")
    return length


def mean_state_moments(ss: RandomStateSpace, r_yy: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """``(R_xbar_xbar[0], R_xbar_y[0], R_yy[0])`` for ``x_bar[t+1] = A_bar x_bar + B_bar y``.

    ``x_bar[t] = sum_{m >= 1} A_bar^{m-1} B_bar y[t-m]``, so both moments are
    quadratic forms of the impulse response against ``R_yy``.
    """
    k = ss.state_dim
    r0 = float(r_yy[0])
    if k == 0:
        return np.zeros((0, 0)), np.zeros((0, 1)), r0
    mean = ss.mean()
    length = _impulse_length(ss, r_yy.size)
    g = np.zeros((k, length))
    column = mean.b[:, 0].copy()
    for m in range(length):
        g[:, m] = column
        column = mean.a @ column
    toeplitz = _toeplitz(r_yy, length)
    r_xx = g @ toeplitz @ g.T
    lags = np.array([_lag(r_yy, m + 1) for m in range(length)])
    r_xy = (g @ lags).reshape(k, 1)
    return 0.5 * (r_xx + r_xx.T), r_xy, r0


def _joint(r_xx: np.ndarray, r_xy: np.ndarray, r0: float) -> np.ndarray:
    return np.block([[r_xx, r_xy], [r_xy.T, np.array([[r0]])]])


def _deviation_forms(ss: RandomStateSpace, sigma: np.ndarray):
    """``E[[dA dB] S [dA dB]^T]`` and ``E[[dA dB] S [dC dD]^T]``."""
    k = ss.state_dim
    state = np.zeros((k, k))
    cross = np.zeros((k, 1))
    output = 0.0
    for dev in ss.deviations():
        top = np.hstack([dev.a, dev.b])
        bottom = np.hstack([dev.c, dev.d])
        state += dev.probability * top @ sigma @ top.T
        cross += dev.probability * top @ sigma @ bottom.T
        output += dev.probability * (bottom @ sigma @ bottom.T).item()
    return state, cross, output


def delta_x_autocorr(ss: RandomStateSpace, r_yy, max_lag: Optional[int] = None) -> np.ndarray:
    """``R_dxdx[k]`` for ``k = 0..max_lag`` as a ``(max_lag + 1, n, n)`` array.

    ``R_dxdx[0]`` solves ``P = E[A P A^T] + W + E[[dA dB] Sigma [dA dB]^T]``
    with ``Sigma`` the joint covariance of ``(x_bar, y)``; later lags are
    ``A_bar^k R_dxdx[0]``.
    """
    max_lag = config.max_lag if max_lag is None else int(max_lag)
    r = truncate_autocorrelation(r_yy)
    k = ss.state_dim
    out = np.zeros((max_lag + 1, k, k))
    if k == 0:
        return out
    check_contractive(ss)
    sigma = _joint(*mean_state_moments(ss, r))
    quad, _, _ = _deviation_forms(ss, sigma)
    p = check_gen_lyapunov(ss, ss.w + quad)
    a_bar = ss.mean().a
    current = p
    for lag in range(max_lag + 1):
        out[lag] = current
        current = a_bar @ current
    return out


def delta_u_autocorr(ss: RandomStateSpace, r_yy, max_lag: Optional[int] = None) -> np.ndarray:
    """``R_dudu[k]`` for ``k = 0..max_lag`` (symmetric in ``k``).

    ``du = C_bar dx + dC x + dD y + v``. At lag 0 this gives
    ``C_bar P C_bar^T + V + E[[dC dD] Sigma_xy [dC dD]^T]``; for ``k > 0``
    ``C_bar A_bar^{k-1} (A_bar P C_bar^T + S + E[[dA dB] Sigma_xy [dC dD]^T])``,
    where ``Sigma_xy`` is the covariance of ``(x, y)``.
    """
    max_lag = config.max_lag if max_lag is None else int(max_lag)
    r = truncate_autocorrelation(r_yy)
    k = ss.state_dim
    mean = ss.mean()
    out = np.zeros(max_lag + 1)
    if k == 0:
        _, _, output = _deviation_forms(ss, np.array([[r[0]]]))
        out[0] = output + float(ss.v[0, 0])
        return out

    r_xbar, r_xy, r0 = mean_state_moments(ss, r)
    check_contractive(ss)
    quad, _, _ = _deviation_forms(ss, _joint(r_xbar, r_xy, r0))
    p = check_gen_lyapunov(ss, ss.w + quad)

    _, cross, output = _deviation_forms(ss, _joint(r_xbar + p, r_xy, r0))
    out[0] = (mean.c @ p @ mean.c.T).item() + float(ss.v[0, 0]) + output
    step = mean.a @ p @ mean.c.T + ss.s + cross
    for lag in range(1, max_lag + 1):
        out[lag] = (mean.c @ step).item()
        step = mean.a @ step
    return out


def delay_deviation_variance(m: RandomDelay, r_yy) -> float:
    """``R_yy[0] - p^T Toeplitz(R_yy) p`` over delays ``0..max_delay``."""
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    p = m.probability_vector
    return float(r[0] - p @ _toeplitz(r, p.size) @ p)


def _drop_weights(p: float, r: np.ndarray) -> np.ndarray:
    """``U[j] = sum_{k >= j} (1-p)^{k-j} R_yy[k]`` for ``j >= 0`` (zero beyond the cut)."""
    q = 1.0 - p
    u = np.zeros(r.size + 1)
    for j in range(r.size - 1, -1, -1):
        u[j] = r[j] + q * u[j + 1]
    return u


def packet_drop_constant(p: float, r_yy) -> float:
    """``sum_{j <= 0} sum_{k >= j} p^2 (1-p)^{k-2j} R_yy[k]``, i.e. the lag-0 value of ``h * R_yy * h~``.

    The double sum is over all pairs of geometric weights ``p (1-p)^m``; summing
    the geometric series in closed form leaves
    ``p / (2 - p) * (R_yy[0] + 2 sum_{k >= 1} (1-p)^k R_yy[k])``.
    """
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    q = 1.0 - p
    weights = q ** np.arange(1, r.size)
    return p / (2.0 - p) * (r[0] + 2.0 * float(weights @ r[1:]))


def packet_drop_output_autocorr(p: float, r_yy, max_lag: int) -> np.ndarray:
    """``R_uu[t] = (1-p)^t R_yy[0] + sum_{j=1}^{t} sum_{k >= j} p^2 (1-p)^{t+k-2j} R_yy[k]``."""
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    q = 1.0 - p
    u = _drop_weights(p, r)
    out = np.zeros(max_lag + 1)
    partial = 0.0
    for t in range(max_lag + 1):
        if t > 0:
            partial = q * partial + (u[t] if t < u.size else 0.0)
        out[t] = q ** t * r[0] + p * p * partial
    return out


def packet_drop_mean_autocorr(p: float, r_yy, max_lag: int) -> np.ndarray:
    """``(h * R_yy * h~)[t] = sum_{j <= t} sum_{k >= j} p^2 (1-p)^{t+k-2j} R_yy[k]``.

    Terms with ``j >= 1`` are shared with :func:`packet_drop_output_autocorr`;
    the ``j <= 0`` part is ``(1-p)^t`` times :func:`packet_drop_constant`.
    """
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    q = 1.0 - p
    constant = packet_drop_constant(p, r)
    return packet_drop_output_autocorr(p, r, max_lag) - q ** np.arange(max_lag + 1) * (r[0] - constant)


def packet_drop_delta_autocorr(p: float, r_yy, max_lag: int) -> np.ndarray:
    """``R_dudu[t] = (1-p)^|t| (R_yy[0] - C)`` with ``C`` from :func:`packet_drop_constant`."""
    r = np.asarray(r_yy, dtype=float).reshape(-1)
    return (1.0 - p) ** np.arange(max_lag + 1) * (r[0] - packet_drop_constant(p, r))


def _spectrum_from_sequence(seq: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    lags = np.arange(1, seq.size)
    return seq[0] + 2.0 * np.cos(np.outer(omegas, lags)) @ seq[1:]


def theta_spectrum(m: CorruptionModel, r_yy, freqs) -> np.ndarray:
    """Spectrum of ``du = u - h * y`` on ``freqs``.

    Closed forms are used for measurement noise, disinformation, random
    delays and packet drops; everything else goes through
    :func:`delta_u_autocorr`.
    """
    omegas = np.asarray(freqs, dtype=float)
    if isinstance(m, (MeasurementNoise, Disinformation)):
        return m.noise_spectrum(omegas)

    r = truncate_autocorrelation(r_yy)
    if isinstance(m, RandomDelay):
        return np.full(omegas.shape, delay_deviation_variance(m, r))
    if isinstance(m, PacketDrop):
        q = 1.0 - m.p
        level = r[0] - packet_drop_constant(m.p, r)
        return (1.0 - q * q) * level / np.abs(1.0 - q * np.exp(-1j * omegas)) ** 2

    ss = m.lower()
    max_lag = config.max_lag
    seq = delta_u_autocorr(ss, r, max_lag)
    if abs(seq[-1]) > config.summability_tolerance * max(abs(seq[0]), 1e-300):
        raise TruncationError(
            f"deviation autocorrelation has not decayed by lag {max_lag}; raise corruption.max_lag"
        )
    return _spectrum_from_sequence(seq, omegas)


__all__ = [
    "spectral_radius",
    "truncate_autocorrelation",
    "mean_tf",
    "second_moment_operator",
    "check_contractive",
    "check_gen_lyapunov",
    "mean_state_moments",
    "delta_x_autocorr",
    "delta_u_autocorr",
    "delay_deviation_variance",
    "packet_drop_constant",
    "packet_drop_output_autocorr",
    "packet_drop_mean_autocorr",
    "packet_drop_delta_autocorr",
    "theta_spectrum",
]
