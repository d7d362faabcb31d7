"""
Tests for corrupted data streams.

Tests cover:
- Validation and lowering of the named corruption models
- Series composition rules and contractivity
- Generalized Lyapunov solves and deviation autocorrelations
- Packet-drop and random-delay closed forms against the general route
- Forward simulation paths and per-node seeding
- Corrupted spectra
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from corruption import (
    CorruptionAssignment,
    Disinformation,
    MeasurementNoise,
    Outcome,
    PacketDrop,
    RandomDelay,
    RandomStateSpace,
    RawStateSpace,
    apply_corruption,
    assignment_thetas,
    check_gen_lyapunov,
    compose_models,
    corrupt_panel,
    corrupted_cross_psd,
    corrupted_psd,
    delay_deviation_variance,
    delta_u_autocorr,
    mean_responses,
    mean_tf,
    packet_drop_constant,
    packet_drop_delta_autocorr,
    packet_drop_mean_autocorr,
    packet_drop_output_autocorr,
    perturbation_document,
    theta_spectrum,
    truncate_autocorrelation,
    write_perturbation_json,
)
from corruption.statistics import check_contractive
from dynamics import (
    DimSystem,
    NoiseSpec,
    TimeSeriesPanel,
    TransferFunction,
    analytic_psd,
    autocorrelation_from_psd,
    frequency_grid,
    simulate_dim,
)
from spectral import WelchConfig, average_spectra, coherence, estimate_cross_psd
from utilities.exceptions import (
    DimensionMismatchError,
    InvalidModelError,
    NoStationarySolutionError,
    TruncationError,
    UnstableSystemError,
)

AR_POLE = 0.5

CORRUPTIONS = [
    PacketDrop(0.6),
    RandomDelay({1: 0.5, 2: 0.5}),
    MeasurementNoise(0.5),
    MeasurementNoise(0.5, TransferFunction((1.0,), (1.0, -0.5))),
    Disinformation(1.0),
    RawStateSpace(RandomStateSpace(
        (
            Outcome(0.7, [[0.3]], [[1.0]], [[0.5]], [[1.0]]),
            Outcome(0.3, [[0.6]], [[0.0]], [[1.0]], [[0.2]]),
        ),
        v=[[0.1]],
    )),
]
CORRUPTION_IDS = ["packet-drop", "random-delay", "white-noise", "colored-noise", "disinformation", "raw-state-space"]


def ar1_autocorrelation(a: float = AR_POLE, lags: int = 120) -> np.ndarray:
    """``a^k / (1 - a^2)`` for unit-variance white input."""
    return a ** np.arange(lags + 1) / (1.0 - a * a)


def ar1_system(a: float = AR_POLE) -> DimSystem:
    return DimSystem(1, {}, (NoiseSpec(1.0, TransferFunction((1.0,), (1.0, -a))),))


def filtered_autocorrelation(h: np.ndarray, r: np.ndarray, max_lag: int) -> np.ndarray:
    """``(h * R * h~)[t]`` by direct summation over a finite impulse response."""
    c = np.correlate(h, h, mode="full")
    shifts = np.arange(-(h.size - 1), h.size)
    out = np.zeros(max_lag + 1)
    for t in range(max_lag + 1):
        k = np.abs(t - shifts)
        values = np.where(k < r.size, r[np.clip(k, 0, r.size - 1)], 0.0)
        out[t] = c @ values
    return out


def diamond_system() -> DimSystem:
    arcs = [
        (0, 1, TransferFunction((0.5, 0.3))),
        (0, 2, TransferFunction((0.0, -0.7))),
        (1, 3, TransferFunction((0.4,))),
        (2, 3, TransferFunction((0.2, 0.6))),
        (3, 4, TransferFunction((0.0, 0.9))),
    ]
    return DimSystem.from_arcs(5, arcs)


class TestModels:
    """Validation and lowering of the named models."""

    def test_delay_validation(self):
        with pytest.raises(InvalidModelError):
            RandomDelay({1: 0.5, 2: 0.6})
        with pytest.raises(InvalidModelError):
            RandomDelay({-1: 1.0})
        with pytest.raises(InvalidModelError):
            RandomDelay([(1, 0.5), (1, 0.5)])
        with pytest.raises(InvalidModelError):
            RandomDelay({})

    def test_other_validation(self):
        with pytest.raises(InvalidModelError):
            PacketDrop(0.0)
        with pytest.raises(InvalidModelError):
            PacketDrop(1.5)
        with pytest.raises(InvalidModelError):
            MeasurementNoise(-1.0)
        with pytest.raises(InvalidModelError):
            Disinformation(0.0)
        with pytest.raises(InvalidModelError):
            MeasurementNoise(1.0, TransferFunction((1.0,), (1.0, -1.5)))

    def test_state_space_validation(self):
        with pytest.raises(InvalidModelError):
            RandomStateSpace((Outcome(0.4, [[0.5]], [[1.0]], [[1.0]], [[0.0]]),))
        with pytest.raises(DimensionMismatchError):
            RandomStateSpace.deterministic([[0.5]], [[1.0], [1.0]], [[1.0]], [[0.0]])
        with pytest.raises(InvalidModelError):
            RandomStateSpace.deterministic([[0.5]], [[1.0]], [[1.0]], [[0.0]], v=[[-1.0]])

    def test_delay_lowering_is_a_shift_register(self):
        ss = RandomDelay({0: 0.2, 3: 0.8}).lower()
        assert ss.state_dim == 3
        assert_allclose(ss.mean().a, np.eye(3, k=-1))
        assert_allclose(ss.mean().d, [[0.2]])
        assert_allclose(ss.mean().c, [[0.0, 0.0, 0.8]])

    def test_mean_transfer_functions(self):
        omegas = frequency_grid(32)
        delay = RandomDelay({1: 0.25, 2: 0.75})
        expected = 0.25 * np.exp(-1j * omegas) + 0.75 * np.exp(-2j * omegas)
        assert_allclose(mean_tf(delay).freqresp(omegas), expected, atol=1e-12)

        p = 0.3
        drop = PacketDrop(p)
        assert_allclose(
            mean_tf(drop).freqresp(omegas), p / (1.0 - (1.0 - p) * np.exp(-1j * omegas)), atol=1e-12
        )
        assert_allclose(mean_tf(MeasurementNoise(2.0)).freqresp(omegas), 1.0)
        assert_allclose(mean_tf(Disinformation(2.0)).freqresp(omegas), 0.0)
        print("✅ TEST 1 PASSED: mean transfer functions of the named models")

    def test_assignment_validation(self):
        with pytest.raises(InvalidModelError):
            CorruptionAssignment(3, {5: PacketDrop(0.5)})
        with pytest.raises(InvalidModelError):
            CorruptionAssignment(3, {0: "drop"})
        assignment = CorruptionAssignment(4, {2: PacketDrop(0.5), 0: MeasurementNoise(1.0)})
        assert list(assignment.models) == [0, 2]
        assert assignment.perturbed_set().members == frozenset({0, 2})
        assert 2 in assignment and 1 not in assignment


class TestComposition:
    """Series composition of corruptions."""

    def test_noise_after_drop_is_allowed(self):
        m = compose_models(PacketDrop(0.5), MeasurementNoise(0.2))
        omegas = frequency_grid(16)
        assert_allclose(mean_tf(m).freqresp(omegas), mean_tf(PacketDrop(0.5)).freqresp(omegas), atol=1e-10)
        ss = m.lower()
        assert len(ss.outcomes) == 2
        assert ss.v[0, 0] == pytest.approx(0.2)

    def test_noise_before_drop_is_rejected(self):
        with pytest.raises(InvalidModelError):
            compose_models(MeasurementNoise(0.2), PacketDrop(0.5))

    def test_cascaded_delays_multiply_mean_responses(self):
        first = RandomDelay({0: 0.5, 1: 0.5})
        second = RandomDelay({1: 0.4, 2: 0.6})
        m = compose_models(first, second)
        omegas = frequency_grid(16)
        expected = mean_tf(first).freqresp(omegas) * mean_tf(second).freqresp(omegas)
        assert_allclose(mean_tf(m).freqresp(omegas), expected, atol=1e-10)
        assert len(m.lower().outcomes) == 4

    def test_composed_simulation_matches_stages(self, rng):
        """A fixed delay followed by lossless delivery is a pure shift."""
        y = rng.standard_normal(200)
        m = compose_models(RandomDelay({2: 1.0}), PacketDrop(1.0))
        assert_allclose(apply_corruption(m, y, seed=5), np.concatenate([[0.0, 0.0], y[:-2]]))


class TestLyapunov:
    """Contractivity and the generalized Lyapunov equation."""

    def test_packet_drop_closed_form(self):
        for p in (0.25, 0.5, 0.9):
            ss = PacketDrop(p).lower()
            assert_allclose(check_gen_lyapunov(ss, [[2.0]]), [[2.0 / p]])

    def test_matches_fixed_point_iteration(self):
        ss = RandomStateSpace((
            Outcome(0.3, [[0.5, 0.2], [0.0, 0.4]], [[1.0], [0.0]], [[1.0, 0.0]], [[0.0]]),
            Outcome(0.7, [[-0.3, 0.0], [0.6, 0.1]], [[0.0], [1.0]], [[0.0, 1.0]], [[1.0]]),
        ))
        q = np.array([[1.0, 0.2], [0.2, 0.5]])
        p = np.zeros((2, 2))
        for _ in range(500):
            p = sum(o.probability * o.a @ p @ o.a.T for o in ss.outcomes) + q
        assert_allclose(check_gen_lyapunov(ss, q), p, atol=1e-10)

    def test_non_contractive_is_rejected(self):
        ss = RandomStateSpace((
            Outcome(0.5, [[1.5]], [[1.0]], [[1.0]], [[0.0]]),
            Outcome(0.5, [[0.2]], [[1.0]], [[1.0]], [[0.0]]),
        ))
        with pytest.raises(NoStationarySolutionError):
            check_contractive(ss)
        with pytest.raises(NoStationarySolutionError):
            apply_corruption(RawStateSpace(ss), np.ones(10), seed=1)

    def test_unstable_mean_is_rejected(self):
        ss = RandomStateSpace.deterministic([[1.2]], [[1.0]], [[1.0]], [[0.0]])
        with pytest.raises(UnstableSystemError):
            mean_tf(ss)

    def test_rejects_indefinite_q(self):
        with pytest.raises(InvalidModelError):
            check_gen_lyapunov(PacketDrop(0.5).lower(), [[-1.0]])


class TestDeviationStatistics:
    """Autocorrelation of ``u - h * y`` by the general route and by closed forms."""

    def test_truncation(self):
        assert truncate_autocorrelation(ar1_autocorrelation()).size < 60
        with pytest.raises(TruncationError):
            truncate_autocorrelation(0.999 ** np.arange(201), max_lag=200)
        with pytest.raises(InvalidModelError):
            truncate_autocorrelation([0.0, 1.0])

    def test_packet_drop_white_input(self):
        """``p = 1/2`` on white input: variance 2/3, lag one 1/3."""
        r = np.array([1.0])
        assert packet_drop_constant(0.5, r) == pytest.approx(1.0 / 3.0)
        assert_allclose(packet_drop_delta_autocorr(0.5, r, 2), [2 / 3, 1 / 3, 1 / 6])
        general = delta_u_autocorr(PacketDrop(0.5).lower(), r, max_lag=2)
        assert_allclose(general, [2 / 3, 1 / 3, 1 / 6], atol=1e-12)
        print("✅ TEST 2 PASSED: packet-drop deviation on white input")

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.9])
    def test_packet_drop_identities(self, p):
        r = truncate_autocorrelation(ar1_autocorrelation())
        lags = 40
        output = packet_drop_output_autocorr(p, r, lags)
        mean = packet_drop_mean_autocorr(p, r, lags)
        delta = packet_drop_delta_autocorr(p, r, lags)
        assert_allclose(mean + delta, output, atol=1e-12)

        h = mean_tf(PacketDrop(p)).impulse(400)
        assert_allclose(mean, filtered_autocorrelation(h, r, lags), atol=1e-8)

        grid = 4096
        theta = theta_spectrum(PacketDrop(p), r, 2.0 * np.pi * np.arange(grid) / grid)
        assert_allclose(autocorrelation_from_psd(theta, lags), delta, atol=1e-6)

        general = delta_u_autocorr(PacketDrop(p).lower(), r, max_lag=lags)
        assert_allclose(general, delta, atol=1e-8)

    def test_random_delay_is_white(self):
        m = RandomDelay({0: 0.5, 2: 0.3, 3: 0.2})
        r = truncate_autocorrelation(ar1_autocorrelation())
        general = delta_u_autocorr(m.lower(), r, max_lag=10)
        assert general[0] == pytest.approx(delay_deviation_variance(m, r), abs=1e-10)
        assert_allclose(general[1:], 0.0, atol=1e-10)
        p = m.probability_vector
        expected = r[0] - sum(p[a] * p[b] * r[abs(a - b)] for a in range(4) for b in range(4))
        assert delay_deviation_variance(m, r) == pytest.approx(expected)

    def test_deterministic_delay_has_no_deviation(self):
        r = truncate_autocorrelation(ar1_autocorrelation())
        assert delay_deviation_variance(RandomDelay({3: 1.0}), r) == pytest.approx(0.0, abs=1e-12)

    def test_white_measurement_noise(self):
        r = truncate_autocorrelation(ar1_autocorrelation())
        seq = delta_u_autocorr(MeasurementNoise(0.3).lower(), r, max_lag=5)
        assert_allclose(seq, [0.3, 0, 0, 0, 0, 0], atol=1e-12)

    def test_colored_measurement_noise(self):
        a = 0.6
        m = MeasurementNoise(0.5, TransferFunction((1.0,), (1.0, -a)))
        r = truncate_autocorrelation(ar1_autocorrelation())
        seq = delta_u_autocorr(m.lower(), r, max_lag=10)
        assert_allclose(seq, 0.5 * a ** np.arange(11) / (1.0 - a * a), atol=1e-10)

    def test_general_route_matches_closed_theta(self):
        """A packet drop wrapped as a raw system goes through the lemma path."""
        p = 0.4
        r = ar1_autocorrelation()
        omegas = frequency_grid(64)
        closed = theta_spectrum(PacketDrop(p), r, omegas)
        general = theta_spectrum(RawStateSpace(PacketDrop(p).lower()), r, omegas)
        assert_allclose(general, closed, rtol=1e-6)


class TestSimulation:
    """Forward simulation of corrupted channels."""

    def test_identity_corruptions(self, rng):
        y = rng.standard_normal(100)
        assert_allclose(apply_corruption(PacketDrop(1.0), y, seed=1), y)
        assert_allclose(apply_corruption(RandomDelay({0: 1.0}), y, seed=1), y)

    def test_fixed_delay_shifts(self, rng):
        y = rng.standard_normal(50)
        u = apply_corruption(RandomDelay({2: 1.0}), y, seed=1)
        assert_allclose(u, np.concatenate([[0.0, 0.0], y[:-2]]))

    @pytest.mark.parametrize("model", [RandomDelay({0: 0.3, 1: 0.3, 4: 0.4}), PacketDrop(0.35)])
    def test_vectorized_and_general_paths_agree(self, model, rng):
        y = rng.standard_normal(2000)
        fast = apply_corruption(model, y, seed=11)
        slow = apply_corruption(model, y, seed=11, force_general=True)
        assert_allclose(fast, slow, atol=1e-12)

    def test_packet_drop_holds_past_samples(self, rng):
        y = rng.standard_normal(500)
        u = apply_corruption(PacketDrop(0.4), y, seed=3)
        for t in range(y.size):
            assert u[t] == 0.0 or u[t] in y[: t + 1]
        assert np.mean(u == y) > 0.3

    def test_disinformation_ignores_input(self, rng):
        y = rng.standard_normal(300)
        a = apply_corruption(Disinformation(1.0), y, seed=8)
        b = apply_corruption(Disinformation(1.0), 10.0 * y, seed=8)
        assert_allclose(a, b)

    def test_empty_channel(self):
        with pytest.raises(InvalidModelError):
            apply_corruption(PacketDrop(0.5), np.array([]), seed=1)

    def test_panel_corruption_is_per_node_and_reproducible(self):
        panel = simulate_dim(diamond_system(), 400, seed=2, burn_in=20)
        assignment = CorruptionAssignment(5, {1: PacketDrop(0.5), 3: RandomDelay({1: 0.5, 2: 0.5})})
        a = corrupt_panel(panel, assignment, master_seed=7, trial=0)
        b = corrupt_panel(panel, assignment, master_seed=7, trial=0)
        c = corrupt_panel(panel, assignment, master_seed=7, trial=1)
        assert np.array_equal(a.data, b.data)
        assert not np.array_equal(a.data[1], c.data[1])
        for node in (0, 2, 4):
            assert np.array_equal(a.data[node], panel.data[node])

    def test_panel_size_mismatch(self):
        panel = TimeSeriesPanel(np.zeros((2, 10)))
        with pytest.raises(InvalidModelError):
            corrupt_panel(panel, CorruptionAssignment(3, {}), master_seed=1)

    @pytest.mark.slow
    @pytest.mark.parametrize("model", [PacketDrop(0.5), RandomDelay({1: 0.6, 3: 0.4})])
    def test_empirical_deviation_matches_lemma(self, model):
        """Sample autocorrelation of ``u - h * y`` at lags 0..3 over 2e5 samples."""
        y = simulate_dim(ar1_system(), 200_000, seed=21, burn_in=500).data[0]
        u = apply_corruption(model, y, seed=22)
        du = (u - mean_tf(model).filter(y))[500:]
        lags = 3
        empirical = np.array([du[: du.size - k] @ du[k:] / (du.size - k) for k in range(lags + 1)])
        expected = delta_u_autocorr(model.lower(), ar1_autocorrelation(), max_lag=lags)
        assert_allclose(empirical, expected, atol=0.02)


class TestCorruptedSpectra:
    """``Phi_uu = H Phi_yy H* + diag(theta)``."""

    def setup_method(self):
        self.sys = diamond_system()
        self.omegas = frequency_grid(64)
        self.assignment = CorruptionAssignment(
            5, {1: PacketDrop(0.5), 3: RandomDelay({1: 0.5, 2: 0.5})}
        )
        self.clean = analytic_psd(self.sys, self.omegas)

    def test_hermitian_and_untouched_block(self):
        thetas = assignment_thetas(self.sys, self.assignment, self.omegas)
        corrupted = corrupted_psd(self.clean, self.assignment, thetas)
        assert corrupted.is_hermitian()
        for i in (0, 2, 4):
            for j in (0, 2, 4):
                assert_allclose(corrupted.entry(i, j), self.clean.entry(i, j))
        assert corrupted.min_eigenvalue() > 0

    def test_diagonal_adds_theta(self):
        thetas = assignment_thetas(self.sys, self.assignment, self.omegas)
        corrupted = corrupted_psd(self.clean, self.assignment, thetas)
        h = mean_responses(self.assignment, self.omegas)
        expected = np.abs(h[:, 1]) ** 2 * np.real(self.clean.entry(1, 1)) + thetas[1]
        assert_allclose(np.real(corrupted.entry(1, 1)), expected, atol=1e-10)

    def test_cross_spectrum(self):
        cross = corrupted_cross_psd(self.clean, self.assignment)
        h = mean_responses(self.assignment, self.omegas)
        assert_allclose(cross.entry(1, 0), h[:, 1] * self.clean.entry(1, 0))
        assert_allclose(cross.entry(0, 1), self.clean.entry(0, 1))

    def test_rejects_theta_for_clean_node(self):
        with pytest.raises(InvalidModelError):
            corrupted_psd(self.clean, self.assignment, {0: np.zeros(len(self.omegas))})

    def test_rejects_size_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            assignment_thetas(self.sys, CorruptionAssignment(3, {}), self.omegas)

    def test_perturbation_document(self, tmp_path):
        thetas = assignment_thetas(self.sys, self.assignment, self.omegas)
        document = perturbation_document(self.assignment, self.omegas, thetas)
        assert set(document["nodes"]) == {"2", "4"}
        assert len(document["nodes"]["2"]["theta"]) == len(self.omegas)
        path = write_perturbation_json(document, tmp_path / "perturbations.json")
        assert path.exists()

    @pytest.mark.slow
    @pytest.mark.parametrize("model", CORRUPTIONS, ids=CORRUPTION_IDS)
    def test_corrupted_spectrum_matches_simulation(self, model):
        """Averaged Welch estimates of a corrupted AR(1) source against ``H Phi H* + diag(theta)``."""
        sys = DimSystem.from_arcs(
            2,
            [(0, 1, TransferFunction((0.0, 0.8)))],
            (NoiseSpec(1.0, TransferFunction((1.0,), (1.0, -AR_POLE))), NoiseSpec(1.0)),
        )
        assignment = CorruptionAssignment(2, {0: model})
        welch = WelchConfig(segment_length=256, overlap=0.5, window="hann", nfft=256)
        estimates = []
        for trial in range(10):
            panel = simulate_dim(sys, 100_000, seed=1000 + trial)
            estimates.append(estimate_cross_psd(corrupt_panel(panel, assignment, master_seed=7, trial=trial), welch))
        estimated = average_spectra(estimates)

        clean = analytic_psd(sys, estimated.freqs)
        predicted = corrupted_psd(clean, assignment, assignment_thetas(sys, assignment, estimated.freqs))
        assert_allclose(estimated.diagonal(), predicted.diagonal(), rtol=0.10)

        cross = corrupted_cross_psd(clean, assignment)
        assert_allclose(predicted.entry(0, 1), cross.entry(0, 1), atol=1e-12)
        assert np.max(np.abs(coherence(estimated)[:, 0, 1] - coherence(predicted)[:, 0, 1])) < 0.05
