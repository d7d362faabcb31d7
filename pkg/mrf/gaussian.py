"""
Static Gaussian network models ``y = M y + e`` and their precision matrices.

The precision ``(I - M)^T E^-1 (I - M)`` factorizes over the moral graph of
``M``. Hiding nodes is a Schur complement, and corrupted nodes are modeled
as noisy gains ``u_i = c_i y_i + n_i`` so the joint of ``(y, u_Z)`` stays
Gaussian.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from graphs.operations import moral_graph, perturbed_graph
from graphs.structures import DirectedGraph, NodeSet, UndirectedGraph, make_edge, sorted_edges
from utilities import config, get_logger
from utilities.exceptions import DimensionMismatchError, InvalidModelError

logger = get_logger('mrf.gaussian')

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True, eq=False)
class GaussianNetworkModel:
    """``m[i, j]`` is the static gain from ``y_j`` to ``y_i``; ``variances`` is diag(E)."""

    n: int
    m: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        variances = np.asarray(self.variances, dtype=float).reshape(-1)
        if m.shape != (self.n, self.n):
            raise DimensionMismatchError(f"M must be {self.n}x{self.n}, got {m.shape}")
        if variances.size != self.n:
            raise DimensionMismatchError(f"expected {self.n} variances, got {variances.size}")
        if np.any(np.diag(m) != 0.0):
            raise InvalidModelError("M must have a zero diagonal")
        if np.any(variances <= 0.0):
            raise InvalidModelError("noise variances must be positive")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "variances", variances)
        if not self.generative_graph().is_acyclic():
            raise InvalidModelError("support of M must be acyclic")

    @classmethod
    def from_arcs(
        cls,
        n: int,
        arcs: Iterable[Tuple[int, int, float]],
        variances: Optional[Sequence[float]] = None,
    ) -> "GaussianNetworkModel":
        """Arcs ``(source, target, gain)``, i.e. ``M[target, source] = gain``."""
        m = np.zeros((n, n))
        for source, target, gain in arcs:
            m[target, source] = float(gain)
        return cls(n, m, np.ones(n) if variances is None else np.asarray(variances, dtype=float))

    def generative_graph(self) -> DirectedGraph:
        rows, cols = np.nonzero(self.m)
        return DirectedGraph(self.n, frozenset((int(j), int(i)) for i, j in zip(rows, cols)))

    def covariance(self) -> np.ndarray:
        transfer = np.linalg.inv(np.eye(self.n) - self.m)
        return transfer @ np.diag(self.variances) @ transfer.T


@dataclass(frozen=True, eq=False)
class PrecisionMatrix:
    """Symmetric positive definite precision over the variables ``nodes``."""

    values: np.ndarray
    nodes: Tuple[int, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionMismatchError(f"precision must be square, got {values.shape}")
        scale = max(1.0, float(np.abs(values).max(initial=0.0)))
        if not np.allclose(values, values.T, atol=1e-10 * scale):
            raise InvalidModelError("precision must be symmetric")
        try:
            linalg.cholesky(0.5 * (values + values.T))
        except linalg.LinAlgError as exc:
            raise InvalidModelError("precision must be positive definite") from exc
        nodes = tuple(int(v) for v in self.nodes) if self.nodes else tuple(range(values.shape[0]))
        if len(nodes) != values.shape[0]:
            raise DimensionMismatchError("one node index per precision row is required")
        object.__setattr__(self, "values", 0.5 * (values + values.T))
        object.__setattr__(self, "nodes", nodes)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def support(self, threshold: Optional[float] = None, n: Optional[int] = None) -> UndirectedGraph:
        """Off-diagonal entries above ``threshold`` times the largest magnitude, mapped to node indices."""
        threshold = config.analytic_threshold if threshold is None else threshold
        peak = float(np.abs(self.values).max(initial=0.0))
        n = n if n is not None else max(self.nodes) + 1
        edges = set()
        for a in range(self.size):
            for b in range(a + 1, self.size):
                if abs(self.values[a, b]) > threshold * peak:
                    edges.add(make_edge(self.nodes[a], self.nodes[b]))
        return UndirectedGraph(n, frozenset(edges))


@dataclass(frozen=True)
class GaussianPerturbation:
    """``u_i = gain * y_i + n_i`` with ``n_i ~ N(0, noise_variance)``."""

    node: int
    gain: float = 1.0
    noise_variance: float = 1.0

    def __post_init__(self):
        if self.gain == 0.0:
            raise InvalidModelError("perturbation gain must be nonzero")
        if not self.noise_variance > 0.0:
            raise InvalidModelError("perturbation noise variance must be positive")


def precision_of(gm: GaussianNetworkModel) -> PrecisionMatrix:
    """``(I - M)^T E^-1 (I - M)``."""
    loop = np.eye(gm.n) - gm.m
    return PrecisionMatrix(loop.T @ np.diag(1.0 / gm.variances) @ loop)


def marginal_precision(p: PrecisionMatrix, hidden: NodeSet) -> PrecisionMatrix:
    """Schur complement ``P_oo - P_oh P_hh^-1 P_ho`` over the variables not in ``hidden``."""
    hidden_pos = [k for k, node in enumerate(p.nodes) if node in hidden.members]
    if len(hidden_pos) != len(hidden):
        missing = sorted(hidden.members - set(p.nodes))
        raise InvalidModelError(f"hidden nodes {missing} are not variables of this precision")
    observed_pos = [k for k in range(p.size) if k not in set(hidden_pos)]
    if not observed_pos:
        raise InvalidModelError("cannot hide every variable")
    if not hidden_pos:
        return p
    v = p.values
    p_oo = v[np.ix_(observed_pos, observed_pos)]
    p_oh = v[np.ix_(observed_pos, hidden_pos)]
    p_hh = v[np.ix_(hidden_pos, hidden_pos)]
    schur = p_oo - p_oh @ linalg.solve(p_hh, p_oh.T, assume_a="pos")
    return PrecisionMatrix(schur, tuple(p.nodes[k] for k in observed_pos))


def _check_perturbations(n: int, perts: Sequence[GaussianPerturbation]) -> None:
    seen = set()
    for pert in perts:
        if not 0 <= pert.node < n:
            raise InvalidModelError(f"perturbation on node {pert.node} outside a {n}-node model")
        if pert.node in seen:
            raise InvalidModelError(f"node {pert.node} is perturbed twice")
        seen.add(pert.node)


def gaussian_joint_with_perturbations(
    gm: GaussianNetworkModel, perts: Sequence[GaussianPerturbation]
) -> PrecisionMatrix:
    """Precision of ``(y_0..y_{n-1}, u_{z_1}, ..., u_{z_k})``.

    Variable ``n + k`` is ``u`` of ``perts[k].node``.
    """
    _check_perturbations(gm.n, perts)
    size = gm.n + len(perts)
    joint = np.zeros((size, size))
    joint[: gm.n, : gm.n] = precision_of(gm).values
    for k, pert in enumerate(perts):
        i, u = pert.node, gm.n + k
        weight = 1.0 / pert.noise_variance
        joint[i, i] += pert.gain ** 2 * weight
        joint[i, u] = joint[u, i] = -pert.gain * weight
        joint[u, u] = weight
    return PrecisionMatrix(joint)


def observed_precision(gm: GaussianNetworkModel, perts: Sequence[GaussianPerturbation]) -> PrecisionMatrix:
    """Precision of ``y`` on clean nodes and ``u`` on perturbed nodes, indexed by node."""
    joint = gaussian_joint_with_perturbations(gm, perts)
    z = [pert.node for pert in perts]
    marginal = marginal_precision(joint, NodeSet(z))
    relabel = {gm.n + k: pert.node for k, pert in enumerate(perts)}
    nodes = tuple(relabel.get(v, v) for v in marginal.nodes)
    order = np.argsort(nodes)
    return PrecisionMatrix(marginal.values[np.ix_(order, order)], tuple(sorted(nodes)))


@dataclass(frozen=True)
class GaussianVerification:
    moral: UndirectedGraph
    perturbed: UndirectedGraph
    support: UndirectedGraph
    violations: frozenset = field(default_factory=frozenset)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def realized(self) -> bool:
        return self.support.edges == self.perturbed.edges

    def to_dict(self, labels: Optional[Sequence[str]] = None) -> dict:
        labels = list(labels or [str(k + 1) for k in range(self.moral.n)])

        def named(edges):
            return [[labels[i], labels[j]] for i, j in sorted_edges(edges)]

        return {
            "moral": named(self.moral.edges),
            "perturbed": named(self.perturbed.edges),
            "support": named(self.support.edges),
            "violations": named(self.violations),
            "support_equals_perturbed": self.realized,
        }


def verify_gaussian(
    gm: GaussianNetworkModel,
    perts: Sequence[GaussianPerturbation],
    threshold: Optional[float] = None,
) -> GaussianVerification:
    """Support of the observed precision against the perturbed moral graph."""
    moral = moral_graph(gm.generative_graph())
    z = NodeSet(p.node for p in perts)
    perturbed = perturbed_graph(moral, z)
    support = observed_precision(gm, perts).support(threshold, gm.n)
    violations = frozenset(support.edges - perturbed.edges)
    if violations:
        logger.warning(f"Gaussian support outside the perturbed graph: {sorted_edges(violations)}")
    return GaussianVerification(moral, perturbed, support, violations)


def random_gaussian_model(
    rng: np.random.Generator,
    n: int,
    edge_prob: Optional[float] = None,
    gain_range: Tuple[float, float] = (0.3, 1.2),
) -> GaussianNetworkModel:
    """DAG over a random order with gains of random sign and variances in [0.5, 2]."""
    edge_prob = config.get('prediction.random_edge_probability', 0.3) if edge_prob is None else edge_prob
    order = rng.permutation(n)
    arcs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                gain = rng.uniform(*gain_range) * rng.choice([-1.0, 1.0])
                arcs.append((int(order[a]), int(order[b]), float(gain)))
    return GaussianNetworkModel.from_arcs(n, arcs, rng.uniform(0.5, 2.0, size=n))


def random_gaussian_perturbations(rng: np.random.Generator, n: int, max_size: Optional[int] = None) -> List[GaussianPerturbation]:
    max_size = max_size or max(1, n // 2)
    size = int(rng.integers(1, min(max_size, n) + 1))
    nodes = sorted(int(v) for v in rng.choice(n, size=size, replace=False))
    return [
        GaussianPerturbation(v, float(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])), float(rng.uniform(0.2, 2.0)))
        for v in nodes
    ]


def sample_gaussian_model(gm: GaussianNetworkModel, samples: int, seed: SeedLike) -> np.ndarray:
    """``(samples, n)`` draws of ``y = (I - M)^-1 e``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    e = rng.standard_normal((samples, gm.n)) * np.sqrt(gm.variances)
    return linalg.solve(np.eye(gm.n) - gm.m, e.T).T


__all__ = [
    "GaussianNetworkModel",
    "PrecisionMatrix",
    "GaussianPerturbation",
    "precision_of",
    "marginal_precision",
    "gaussian_joint_with_perturbations",
    "observed_precision",
    "GaussianVerification",
    "verify_gaussian",
    "random_gaussian_model",
    "random_gaussian_perturbations",
    "sample_gaussian_model",
]
