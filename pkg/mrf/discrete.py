"""
Discrete Markov random fields by exhaustive enumeration.

Variables are integers ``0..n-1``; perturbation variables appended by
``join_with_perturbations`` take the indices after them. Joint tables are
built by broadcasting every factor onto the full state space, so the state
count is capped (``mrf.enumeration_cap``).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from graphs.operations import maximal_cliques, perturbed_graph
from graphs.structures import NodeSet, UndirectedGraph, make_edge
from utilities import config, get_logger
from utilities.exceptions import DimensionMismatchError, EnumerationCapError, InvalidModelError

logger = get_logger('mrf.discrete')


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table whose axes follow ``nodes``."""

    nodes: Tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        table = np.asarray(self.table, dtype=float)
        if len(set(nodes)) != len(nodes):
            raise InvalidModelError(f"factor repeats a node: {nodes}")
        if table.ndim != len(nodes):
            raise DimensionMismatchError(f"factor over {nodes} needs a {len(nodes)}-d table, got {table.ndim}-d")
        if np.any(table < 0.0):
            raise InvalidModelError(f"factor over {nodes} has negative entries")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "table", table)


@dataclass(frozen=True, eq=False)
class DiscreteMrf:
    alphabet: Tuple[int, ...]
    factors: Tuple[Factor, ...]
    graph: Optional[UndirectedGraph] = None
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        alphabet = tuple(int(a) for a in self.alphabet)
        if any(a < 1 for a in alphabet):
            raise InvalidModelError("alphabet sizes must be positive")
        n = len(alphabet)
        for factor in self.factors:
            for axis, node in enumerate(factor.nodes):
                if not 0 <= node < n:
                    raise InvalidModelError(f"factor node {node} outside a {n}-variable field")
                if factor.table.shape[axis] != alphabet[node]:
                    raise DimensionMismatchError(
                        f"factor over {factor.nodes}: axis {axis} has {factor.table.shape[axis]} states, "
                        f"node {node} has {alphabet[node]}"
                    )
        graph = self.graph
        if graph is None:
            graph = UndirectedGraph(
                n, frozenset(make_edge(a, b) for f in self.factors for a, b in combinations(f.nodes, 2))
            )
        elif graph.n != n:
            raise DimensionMismatchError(f"graph has {graph.n} nodes, field has {n} variables")
        for factor in self.factors:
            for a, b in combinations(factor.nodes, 2):
                if not graph.has_edge(a, b):
                    raise InvalidModelError(f"factor over {factor.nodes} is not a clique of the graph")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "labels", tuple(self.labels) or tuple(str(k + 1) for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.alphabet)

    @property
    def state_count(self) -> int:
        return int(np.prod(self.alphabet, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class PerturbFactor:
    """Kernel ``table[y_i, u_i] >= 0`` attaching a perturbation variable to ``node``."""

    node: int
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2:
            raise DimensionMismatchError("perturbation table must be 2-d (y states x u states)")
        if np.any(table < 0.0):
            raise InvalidModelError(f"perturbation table for node {self.node} has negative entries")
        object.__setattr__(self, "table", table)

    @property
    def output_alphabet(self) -> int:
        return self.table.shape[1]


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Normalized probabilities with one axis per entry of ``variables``."""

    variables: Tuple[int, ...]
    table: np.ndarray

    def axis(self, variable: int) -> int:
        try:
            return self.variables.index(variable)
        except ValueError as exc:
            raise InvalidModelError(f"variable {variable} is not in the table") from exc


def join_with_perturbations(mrf: DiscreteMrf, perts: Sequence[PerturbFactor]) -> DiscreteMrf:
    """Field over ``Y`` and ``U_Z``; variable ``n + k`` is the output of ``perts[k]``."""
    if not perts:
        return mrf
    seen = set()
    alphabet = list(mrf.alphabet)
    factors = list(mrf.factors)
    edges = set(mrf.graph.edges)
    labels = list(mrf.labels)
    for k, pert in enumerate(perts):
        if not 0 <= pert.node < mrf.n:
            raise InvalidModelError(f"perturbation on node {pert.node} outside a {mrf.n}-variable field")
        if pert.node in seen:
            raise InvalidModelError(f"node {pert.node} is perturbed twice")
        seen.add(pert.node)
        if pert.table.shape[0] != mrf.alphabet[pert.node]:
            raise DimensionMismatchError(
                f"perturbation table for node {pert.node} has {pert.table.shape[0]} input states, "
                f"node has {mrf.alphabet[pert.node]}"
            )
        u = mrf.n + k
        alphabet.append(pert.output_alphabet)
        factors.append(Factor((pert.node, u), pert.table))
        edges.add(make_edge(pert.node, u))
        labels.append(f"u{mrf.labels[pert.node]}")
    n = len(alphabet)
    return DiscreteMrf(tuple(alphabet), tuple(factors), UndirectedGraph(n, frozenset(edges)), tuple(labels))


def joint_table(mrf: DiscreteMrf, cap: Optional[int] = None) -> np.ndarray:
    """Normalized joint over all variables, one axis per variable."""
    cap = config.enumeration_cap if cap is None else cap
    if mrf.state_count > cap:
        raise EnumerationCapError(f"{mrf.state_count} joint states exceed the enumeration cap {cap}")
    joint = np.ones(mrf.alphabet)
    for factor in mrf.factors:
        order = np.argsort(factor.nodes)
        shape = [1] * mrf.n
        for node in factor.nodes:
            shape[node] = mrf.alphabet[node]
        joint = joint * np.transpose(factor.table, order).reshape(shape)
    total = joint.sum()
    if not total > 0.0:
        raise InvalidModelError("partition function is zero")
    return joint / total


def brute_marginal(mrf: DiscreteMrf, keep: NodeSet, cap: Optional[int] = None) -> MarginalTable:
    keep.validate(mrf.n)
    if not len(keep):
        raise InvalidModelError("at least one variable must be kept")
    joint = joint_table(mrf, cap)
    summed = tuple(v for v in range(mrf.n) if v not in keep)
    table = joint.sum(axis=summed) if summed else joint
    return MarginalTable(tuple(keep), table)


@dataclass(frozen=True)
class CiTest:
    max_deviation: float
    zero_cells: int
    tolerance: float

    @property
    def independent(self) -> bool:
        return self.max_deviation < self.tolerance


def ci_test(
    table: MarginalTable,
    i: int,
    j: int,
    conditioning: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> CiTest:
    """Largest ``|P(i,j|c) - P(i|c) P(j|c)|`` over conditioning cells with ``P(c) > 0``."""
    tolerance = config.ci_tolerance if tolerance is None else tolerance
    if i == j:
        raise InvalidModelError("conditional independence needs two distinct variables")
    if conditioning is None:
        conditioning = [v for v in table.variables if v not in (i, j)]
    conditioning = list(conditioning)
    if i in conditioning or j in conditioning:
        raise InvalidModelError("tested variables cannot be conditioned on")

    wanted = [i, j] + conditioning
    axes = [table.axis(v) for v in wanted]
    others = tuple(a for a in range(table.table.ndim) if a not in axes)
    reduced = table.table.sum(axis=others) if others else table.table
    remaining = [a for a in range(table.table.ndim) if a not in others]
    reduced = np.transpose(reduced, [remaining.index(a) for a in axes])
    reduced = reduced.reshape(reduced.shape[0], reduced.shape[1], -1)

    p_c = reduced.sum(axis=(0, 1))
    live = p_c > 0.0
    zero_cells = int(np.count_nonzero(~live))
    if zero_cells:
        logger.warning(f"{zero_cells} zero-probability conditioning cells skipped for pair ({i}, {j})")
    if not np.any(live):
        return CiTest(0.0, zero_cells, tolerance)
    cond = reduced[:, :, live] / p_c[live]
    p_i = cond.sum(axis=1, keepdims=True)
    p_j = cond.sum(axis=0, keepdims=True)
    deviation = float(np.abs(cond - p_i * p_j).max())
    return CiTest(deviation, zero_cells, tolerance)


def conditional_independence(
    table: MarginalTable,
    i: int,
    j: int,
    conditioning: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> bool:
    return ci_test(table, i, j, conditioning, tolerance).independent


class PairVerdict(BaseModel):
    pair: Tuple[str, str]
    adjacent: bool
    independent: bool
    max_deviation: float

    @property
    def agrees(self) -> bool:
        return self.adjacent != self.independent


class MarkovAgreement(BaseModel):
    """Pairwise CI verdicts against adjacency in the perturbed graph."""

    perturbed: List[str] = Field(default_factory=list)
    pairs: List[PairVerdict] = Field(default_factory=list)
    zero_cells: int = Field(default=0, description="Zero-probability conditioning cells skipped, summed over pairs")

    @property
    def violations(self) -> List[Tuple[str, str]]:
        """Dependent pairs that are not edges of the perturbed graph."""
        return [v.pair for v in self.pairs if not v.adjacent and not v.independent]

    @property
    def genericity_exceptions(self) -> List[Tuple[str, str]]:
        """Edges of the perturbed graph whose endpoints nevertheless test independent."""
        return [v.pair for v in self.pairs if v.adjacent and v.independent]

    @property
    def agreement_rate(self) -> float:
        if not self.pairs:
            return 1.0
        return sum(v.agrees for v in self.pairs) / len(self.pairs)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> Dict:
        return {
            "perturbed": self.perturbed,
            "agreement_rate": self.agreement_rate,
            "violations": [list(p) for p in self.violations],
            "genericity_exceptions": [list(p) for p in self.genericity_exceptions],
            "zero_cells": self.zero_cells,
            "pairs": [v.model_dump() for v in self.pairs],
        }


def verify_pairwise_markov(
    mrf: DiscreteMrf,
    perts: Sequence[PerturbFactor],
    tolerance: Optional[float] = None,
    cap: Optional[int] = None,
) -> MarkovAgreement:
    """Observe ``u_i`` on perturbed nodes and ``y_i`` elsewhere; test every pair given the rest."""
    joint = join_with_perturbations(mrf, perts)
    observed_of = {v: v for v in range(mrf.n)}
    for k, pert in enumerate(perts):
        observed_of[pert.node] = mrf.n + k
    table = brute_marginal(joint, NodeSet(observed_of.values()), cap)

    z = NodeSet(p.node for p in perts)
    expected = perturbed_graph(mrf.graph, z)
    verdicts = []
    zero_cells = 0
    for i, j in combinations(range(mrf.n), 2):
        result = ci_test(table, observed_of[i], observed_of[j], tolerance=tolerance)
        zero_cells += result.zero_cells
        verdicts.append(
            PairVerdict(
                pair=(mrf.labels[i], mrf.labels[j]),
                adjacent=expected.has_edge(i, j),
                independent=result.independent,
                max_deviation=result.max_deviation,
            )
        )
    agreement = MarkovAgreement(perturbed=[mrf.labels[v] for v in z], pairs=verdicts, zero_cells=zero_cells)
    if agreement.violations:
        logger.warning(f"dependence outside the perturbed graph: {agreement.violations}")
    logger.debug(f"pairwise agreement {agreement.agreement_rate:.3f} over {len(verdicts)} pairs")
    return agreement


def random_positive_mrf(
    rng: np.random.Generator,
    graph: UndirectedGraph,
    alphabet: int = 2,
    spread: float = 1.0,
) -> DiscreteMrf:
    """One log-normal positive factor per maximal clique."""
    factors = []
    for clique in maximal_cliques(graph):
        nodes = tuple(clique)
        factors.append(Factor(nodes, np.exp(spread * rng.standard_normal((alphabet,) * len(nodes)))))
    return DiscreteMrf((alphabet,) * graph.n, tuple(factors), graph)


def random_perturbations(
    rng: np.random.Generator,
    mrf: DiscreteMrf,
    z: NodeSet,
    output_alphabet: int = 2,
    spread: float = 1.0,
) -> List[PerturbFactor]:
    return [
        PerturbFactor(i, np.exp(spread * rng.standard_normal((mrf.alphabet[i], output_alphabet))))
        for i in z.validate(mrf.n)
    ]


def noisy_copy(alphabet: int, flip: float) -> np.ndarray:
    """Channel that reports the state with probability ``1 - flip``, otherwise a uniform other state."""
    if not 0.0 <= flip < 1.0:
        raise InvalidModelError("flip probability must lie in [0, 1)")
    if alphabet == 1:
        return np.ones((1, 1))
    table = np.full((alphabet, alphabet), flip / (alphabet - 1))
    np.fill_diagonal(table, 1.0 - flip)
    return table


__all__ = [
    "Factor",
    "DiscreteMrf",
    "PerturbFactor",
    "MarginalTable",
    "join_with_perturbations",
    "joint_table",
    "brute_marginal",
    "CiTest",
    "ci_test",
    "conditional_independence",
    "PairVerdict",
    "MarkovAgreement",
    "verify_pairwise_markov",
    "random_positive_mrf",
    "random_perturbations",
    "noisy_copy",
]
