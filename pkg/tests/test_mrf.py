"""
Tests for the Markov random field checks.

Tests cover:
- Gaussian models, precision support and Schur-complement marginals
- Perturbed Gaussian observations against the perturbed moral graph
- Discrete fields: joins, enumeration, marginals and CI tests
- Pairwise Markov agreement for chains, stars and random fields
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from graphs import NodeSet, UndirectedGraph, chain_graph, make_edge, moral_graph, perturbed_graph
from mrf import (
    DiscreteMrf,
    Factor,
    GaussianNetworkModel,
    GaussianPerturbation,
    MarginalTable,
    PerturbFactor,
    PrecisionMatrix,
    brute_marginal,
    ci_test,
    conditional_independence,
    gaussian_joint_with_perturbations,
    join_with_perturbations,
    joint_table,
    marginal_precision,
    noisy_copy,
    observed_precision,
    precision_of,
    random_gaussian_model,
    random_gaussian_perturbations,
    random_perturbations,
    random_positive_mrf,
    sample_gaussian_model,
    verify_gaussian,
    verify_pairwise_markov,
)
from utilities.exceptions import DimensionMismatchError, EnumerationCapError, InvalidModelError


def edges(*pairs):
    """1-based pairs to an edge set."""
    return frozenset(make_edge(i - 1, j - 1) for i, j in pairs)


def diamond_model() -> GaussianNetworkModel:
    """Unit-gain static version of 1->2, 1->3, 2->4, 3->4, 4->5."""
    return GaussianNetworkModel.from_arcs(5, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (3, 4, 1.0)])


def chain_model(n: int = 5) -> GaussianNetworkModel:
    return GaussianNetworkModel.from_arcs(n, [(k, k + 1, 0.8) for k in range(n - 1)])


def binary_chain(n: int = 4) -> DiscreteMrf:
    factors = [Factor((k, k + 1), [[2.0, 0.5], [0.7, 1.6]]) for k in range(n - 1)]
    return DiscreteMrf((2,) * n, tuple(factors))


class TestGaussianModel:
    """Static Gaussian networks and their precisions."""

    def test_no_arcs_gives_identity(self):
        gm = GaussianNetworkModel.from_arcs(4, [])
        assert_allclose(precision_of(gm).values, np.eye(4))

    def test_diamond_support_is_moral_graph(self):
        gm = diamond_model()
        support = precision_of(gm).support(1e-9)
        assert support.edges == moral_graph(gm.generative_graph()).edges
        assert support.has_edge(1, 2)
        print("✅ TEST 1 PASSED: static precision supported on the moral graph")

    def test_precision_inverts_covariance(self):
        gm = GaussianNetworkModel.from_arcs(3, [(0, 1, 0.5), (1, 2, -1.1)], [1.0, 2.0, 0.5])
        assert_allclose(precision_of(gm).values @ gm.covariance(), np.eye(3), atol=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidModelError):
            GaussianNetworkModel(2, np.array([[0.0, 1.0], [1.0, 0.0]]), np.ones(2))
        with pytest.raises(InvalidModelError):
            GaussianNetworkModel(2, np.array([[0.5, 0.0], [0.0, 0.0]]), np.ones(2))
        with pytest.raises(InvalidModelError):
            GaussianNetworkModel.from_arcs(2, [(0, 1, 1.0)], [1.0, 0.0])
        with pytest.raises(DimensionMismatchError):
            GaussianNetworkModel(2, np.zeros((3, 3)), np.ones(2))
        with pytest.raises(InvalidModelError):
            PrecisionMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(InvalidModelError):
            GaussianPerturbation(0, gain=0.0)

    def test_samples_match_covariance(self):
        gm = diamond_model()
        draws = sample_gaussian_model(gm, 200_000, seed=5)
        assert draws.shape == (200_000, 5)
        assert_allclose(np.cov(draws, rowvar=False), gm.covariance(), atol=0.1)


class TestMarginalPrecision:
    """Schur complements."""

    def test_chain_fill_in(self):
        """Hiding node 2 of a chain couples only its two neighbours."""
        marginal = marginal_precision(precision_of(chain_model()), NodeSet({1}))
        assert marginal.nodes == (0, 2, 3, 4)
        support = marginal.support(1e-9, n=5)
        assert support.edges == edges((1, 3), (3, 4), (4, 5))

    def test_matches_inverse_of_marginal_covariance(self):
        gm = diamond_model()
        keep = [0, 2, 4]
        expected = np.linalg.inv(gm.covariance()[np.ix_(keep, keep)])
        marginal = marginal_precision(precision_of(gm), NodeSet({1, 3}))
        assert_allclose(marginal.values, expected, atol=1e-10)

    def test_nothing_hidden(self):
        p = precision_of(chain_model())
        assert marginal_precision(p, NodeSet()) is p

    def test_rejects_bad_requests(self):
        p = precision_of(chain_model(3))
        with pytest.raises(InvalidModelError):
            marginal_precision(p, NodeSet({0, 1, 2}))
        with pytest.raises(InvalidModelError):
            marginal_precision(p, NodeSet({7}))


class TestGaussianPerturbations:
    """Observing noisy copies of corrupted nodes."""

    def test_joint_layout(self):
        joint = gaussian_joint_with_perturbations(chain_model(3), [GaussianPerturbation(1, 2.0, 0.5)])
        assert joint.size == 4
        assert joint.values[1, 3] == pytest.approx(-4.0)
        assert joint.values[3, 3] == pytest.approx(2.0)
        assert joint.values[0, 3] == 0.0

    def test_duplicate_perturbation(self):
        with pytest.raises(InvalidModelError):
            gaussian_joint_with_perturbations(
                chain_model(3), [GaussianPerturbation(1), GaussianPerturbation(1)]
            )

    def test_chain_nodes_two_and_three(self):
        perts = [GaussianPerturbation(1), GaussianPerturbation(2, gain=-0.7, noise_variance=0.3)]
        result = verify_gaussian(chain_model(), perts, 1e-9)
        assert result.ok
        assert result.perturbed.edges == chain_graph(5).edges | edges((1, 3), (1, 4), (2, 4))
        assert result.realized

    def test_observed_precision_is_indexed_by_node(self):
        p = observed_precision(diamond_model(), [GaussianPerturbation(3, 1.0, 0.5)])
        assert p.nodes == (0, 1, 2, 3, 4)
        support = p.support(1e-9)
        assert support.has_edge(1, 4) and support.has_edge(2, 4)
        assert not support.has_edge(0, 4) and not support.has_edge(0, 3)

    def test_to_dict(self):
        result = verify_gaussian(diamond_model(), [GaussianPerturbation(3)], 1e-9)
        document = result.to_dict(["a", "b", "c", "d", "e"])
        assert ["b", "e"] in document["perturbed"]
        assert document["violations"] == []
        assert document["support_equals_perturbed"] is True

    def test_random_instances_have_no_violations(self, rng):
        """200 random static models with random noisy-gain perturbations."""
        violations = 0
        for _ in range(200):
            n = int(rng.integers(3, 9))
            gm = random_gaussian_model(rng, n)
            perts = random_gaussian_perturbations(rng, n)
            violations += len(verify_gaussian(gm, perts).violations)
        assert violations == 0
        print("✅ TEST 2 PASSED: zero Gaussian violations over 200 instances")


class TestDiscreteField:
    """Factor tables, joins and enumeration."""

    def test_factor_validation(self):
        with pytest.raises(InvalidModelError):
            Factor((0, 1), [[1.0, -0.1], [1.0, 1.0]])
        with pytest.raises(DimensionMismatchError):
            Factor((0, 1), [1.0, 1.0])
        with pytest.raises(InvalidModelError):
            Factor((0, 0), [[1.0, 1.0], [1.0, 1.0]])

    def test_field_validation(self):
        with pytest.raises(InvalidModelError):
            DiscreteMrf((2, 2, 2), (Factor((0, 2), np.ones((2, 2))),), chain_graph(3))
        with pytest.raises(DimensionMismatchError):
            DiscreteMrf((2, 3), (Factor((0, 1), np.ones((2, 2))),))

    def test_default_graph_and_labels(self):
        mrf = binary_chain(3)
        assert mrf.graph == chain_graph(3)
        assert mrf.labels == ("1", "2", "3")
        assert mrf.state_count == 8

    def test_join_with_noisy_copy(self):
        mrf = binary_chain(3)
        joined = join_with_perturbations(mrf, [PerturbFactor(1, noisy_copy(2, 0.1))])
        assert joined.n == 4
        assert len(joined.factors) == len(mrf.factors) + 1
        assert joined.labels[-1] == "u2"
        assert joined.graph.has_edge(1, 3)

    def test_join_validation(self):
        mrf = binary_chain(3)
        with pytest.raises(InvalidModelError):
            join_with_perturbations(mrf, [PerturbFactor(1, np.eye(2)), PerturbFactor(1, np.eye(2))])
        with pytest.raises(DimensionMismatchError):
            join_with_perturbations(mrf, [PerturbFactor(1, np.ones((3, 2)))])

    def test_joint_is_normalized_product(self):
        mrf = binary_chain(3)
        joint = joint_table(mrf)
        a = np.array([[2.0, 0.5], [0.7, 1.6]])
        expected = a[:, :, None] * a[None, :, :]
        assert_allclose(joint, expected / expected.sum())

    def test_endpoint_marginal_matches_transfer_matrix(self):
        mrf = binary_chain(3)
        table = brute_marginal(mrf, NodeSet({0, 2}))
        a = np.array([[2.0, 0.5], [0.7, 1.6]])
        product = a @ a
        assert_allclose(table.table, product / product.sum())
        assert table.variables == (0, 2)

    def test_enumeration_cap(self):
        with pytest.raises(EnumerationCapError):
            joint_table(binary_chain(4), cap=8)

    def test_noisy_copy(self):
        table = noisy_copy(3, 0.3)
        assert_allclose(table.sum(axis=1), 1.0)
        assert table[0, 0] == pytest.approx(0.7)
        with pytest.raises(InvalidModelError):
            noisy_copy(2, 1.0)


class TestConditionalIndependence:
    """Exact CI tests on enumerated tables."""

    def test_chain_endpoints(self):
        mrf = binary_chain(3)
        full = brute_marginal(mrf, NodeSet({0, 1, 2}))
        assert conditional_independence(full, 0, 2, [1])
        assert not conditional_independence(full, 0, 2, [])
        ends = brute_marginal(mrf, NodeSet({0, 2}))
        assert not conditional_independence(ends, 0, 2)
        print("✅ TEST 3 PASSED: chain endpoints independent only given the middle")

    def test_zero_probability_cells_are_skipped(self):
        table = np.zeros((2, 2, 2))
        table[:, :, 0] = [[0.25, 0.25], [0.25, 0.25]]
        result = ci_test(MarginalTable((0, 1, 2), table), 0, 1)
        assert result.zero_cells == 1
        assert result.independent

    def test_rejects_bad_queries(self):
        full = brute_marginal(binary_chain(3), NodeSet({0, 1, 2}))
        with pytest.raises(InvalidModelError):
            ci_test(full, 0, 0)
        with pytest.raises(InvalidModelError):
            ci_test(full, 0, 2, [0])
        with pytest.raises(InvalidModelError):
            ci_test(full, 0, 5)


class TestPairwiseMarkov:
    """Pairwise CI verdicts against the perturbed graph."""

    def test_no_perturbation(self):
        agreement = verify_pairwise_markov(binary_chain(4), [])
        assert agreement.agreement_rate == 1.0
        assert agreement.ok and not agreement.genericity_exceptions

    def test_chain_node_two(self):
        agreement = verify_pairwise_markov(binary_chain(4), [PerturbFactor(1, noisy_copy(2, 0.2))])
        dependent = {v.pair for v in agreement.pairs if not v.independent}
        assert dependent == {("1", "2"), ("2", "3"), ("3", "4"), ("1", "3")}
        assert agreement.agreement_rate == 1.0
        assert agreement.perturbed == ["2"]

    def test_star_hub(self):
        star = UndirectedGraph.from_pairs(5, [(0, k) for k in range(1, 5)])
        factors = tuple(Factor((0, k), [[1.8, 0.6], [0.5, 1.3 + 0.1 * k]]) for k in range(1, 5))
        mrf = DiscreteMrf((2,) * 5, factors, star)
        agreement = verify_pairwise_markov(mrf, [PerturbFactor(0, noisy_copy(2, 0.25))])
        assert all(not v.independent for v in agreement.pairs)
        assert agreement.ok

    def test_zero_cells_are_totalled_over_pairs(self):
        """Nodes 1 and 3 are pinned to state 0, so pairs (1, 2) and (2, 3) each skip one cell."""
        pinned = [1.0, 0.0]
        factors = (
            Factor((0,), pinned),
            Factor((2,), pinned),
            Factor((0, 1), [[1.0, 2.0], [3.0, 1.0]]),
            Factor((1, 2), [[2.0, 1.0], [1.0, 3.0]]),
        )
        agreement = verify_pairwise_markov(DiscreteMrf((2, 2, 2), factors, chain_graph(3)), [])
        assert agreement.zero_cells == 2
        assert agreement.summary()["zero_cells"] == 2

    def test_violation_reporting(self):
        """A pair marked dependent outside the graph surfaces as a violation."""
        agreement = verify_pairwise_markov(binary_chain(3), [])
        tampered = agreement.model_copy(
            update={"pairs": [p.model_copy(update={"independent": False}) for p in agreement.pairs]}
        )
        assert tampered.violations == [("1", "3")]
        assert not tampered.ok
        assert tampered.summary()["violations"] == [["1", "3"]]

    def test_random_fields(self, rng):
        """100 random positive fields: no violations and at least 95% agreement."""
        verdicts = agreed = violations = 0
        for _ in range(100):
            n = int(rng.integers(3, 8))
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
            graph = UndirectedGraph.from_pairs(n, pairs)
            mrf = random_positive_mrf(rng, graph)
            z = NodeSet(v for v in range(n) if rng.random() < 0.3)
            agreement = verify_pairwise_markov(mrf, random_perturbations(rng, mrf, z))
            expected = perturbed_graph(graph, z)
            assert all(v.adjacent == expected.has_edge(int(v.pair[0]) - 1, int(v.pair[1]) - 1) for v in agreement.pairs)
            verdicts += len(agreement.pairs)
            agreed += sum(v.agrees for v in agreement.pairs)
            violations += len(agreement.violations)
        assert violations == 0
        assert agreed / verdicts >= 0.95
        print("✅ TEST 4 PASSED: pairwise Markov agreement over 100 random fields")
