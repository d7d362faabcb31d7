"""
Spurious-link prediction and grading.

Corrupting the node set Z can only add links between nodes joined by a path
whose intermediate nodes all lie in Z; the perturbed moral graph is the
envelope of what a reconstruction may legitimately contain.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field

from graphs.graph_io import default_labels, to_dot
from graphs.operations import moral_graph, perturbed_graph
from graphs.structures import DirectedGraph, Edge, NodeSet, UndirectedGraph, edge_tuple, sorted_edges
from utilities import get_logger
from utilities.exceptions import DimensionMismatchError

logger = get_logger('prediction.theory')

TRUE_KIN = "true_kin"
PREDICTED_SPURIOUS = "predicted_spurious"
VIOLATION = "violation"
MISSING = "missing"

EDGE_STYLES = {
    TRUE_KIN: {"style": "solid"},
    PREDICTED_SPURIOUS: {"style": "dashed", "color": "red"},
    VIOLATION: {"style": "bold", "color": "black", "penwidth": "3"},
    MISSING: {"style": "dotted", "color": "grey"},
}


class PredictionSummary(BaseModel):
    """JSON view of a :class:`PredictionReport` with 1-based node labels."""

    perturbed_nodes: List[str] = Field(default_factory=list)
    true_moral: List[List[str]] = Field(default_factory=list)
    perturbed: List[List[str]] = Field(default_factory=list)
    admissible_spurious: List[List[str]] = Field(default_factory=list)
    recovered: Optional[List[List[str]]] = None
    violations: List[List[str]] = Field(default_factory=list)
    missing: List[List[str]] = Field(default_factory=list)
    classification: Dict[str, str] = Field(default_factory=dict)
    recovered_equals_perturbed: Optional[bool] = None


@dataclass(frozen=True)
class PredictionReport:
    z: NodeSet
    true_moral: UndirectedGraph
    perturbed: UndirectedGraph
    admissible_spurious: FrozenSet[Edge]
    recovered: Optional[UndirectedGraph] = None
    violations: FrozenSet[Edge] = frozenset()
    missing: FrozenSet[Edge] = frozenset()
    classification: Dict[Edge, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.true_moral.n

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def realized(self) -> bool:
        """Recovered graph equals the perturbed graph."""
        return self.recovered is not None and self.recovered.edges == self.perturbed.edges

    def edge_styles(self) -> Dict[Edge, Dict[str, str]]:
        styles = {edge: EDGE_STYLES[kind] for edge, kind in self.classification.items()}
        for edge in self.missing:
            styles[edge] = EDGE_STYLES[MISSING]
        return styles

    def to_summary(self, labels: Optional[Sequence[str]] = None) -> PredictionSummary:
        labels = list(labels or default_labels(self.n))

        def named(edges: Iterable[Edge]) -> List[List[str]]:
            return [[labels[i], labels[j]] for i, j in sorted_edges(edges)]

        return PredictionSummary(
            perturbed_nodes=[labels[i] for i in self.z],
            true_moral=named(self.true_moral.edges),
            perturbed=named(self.perturbed.edges),
            admissible_spurious=named(self.admissible_spurious),
            recovered=named(self.recovered.edges) if self.recovered is not None else None,
            violations=named(self.violations),
            missing=named(self.missing),
            classification={
                f"{labels[i]}-{labels[j]}": self.classification[frozenset((i, j))]
                for i, j in sorted_edges(self.classification)
            },
            recovered_equals_perturbed=self.realized if self.recovered is not None else None,
        )


def predict_spurious(g: DirectedGraph, z: NodeSet) -> PredictionReport:
    """Moral graph, perturbed graph and the admissible spurious links for ``z``."""
    z.validate(g.n)
    moral = moral_graph(g)
    perturbed = perturbed_graph(moral, z)
    return PredictionReport(
        z=z,
        true_moral=moral,
        perturbed=perturbed,
        admissible_spurious=frozenset(perturbed.edges - moral.edges),
    )


def classify_edges(report: PredictionReport, recovered: UndirectedGraph) -> Dict[Edge, str]:
    out = {}
    for edge in recovered.edges:
        if edge in report.true_moral.edges:
            out[edge] = TRUE_KIN
        elif edge in report.admissible_spurious:
            out[edge] = PREDICTED_SPURIOUS
        else:
            out[edge] = VIOLATION
    return out


def grade(g: DirectedGraph, z: NodeSet, recovered: UndirectedGraph) -> PredictionReport:
    """Compare a recovered graph against the prediction for ``(g, z)``."""
    if recovered.n != g.n:
        raise DimensionMismatchError(f"recovered graph has {recovered.n} nodes, generative graph {g.n}")
    base = predict_spurious(g, z)
    classification = classify_edges(base, recovered)
    violations = frozenset(e for e, kind in classification.items() if kind == VIOLATION)
    missing = frozenset(base.true_moral.edges - recovered.edges)
    if violations:
        logger.warning(
            f"{len(violations)} recovered edge(s) outside the perturbed graph: {sorted_edges(violations)}"
        )
    return PredictionReport(
        z=base.z,
        true_moral=base.true_moral,
        perturbed=base.perturbed,
        admissible_spurious=base.admissible_spurious,
        recovered=recovered,
        violations=violations,
        missing=missing,
        classification=classification,
    )


def realization_rate(reports: Iterable[PredictionReport]) -> float:
    """Share of graded reports whose recovered graph equals the perturbed graph."""
    graded = [r for r in reports if r.recovered is not None]
    if not graded:
        return 0.0
    return sum(r.realized for r in graded) / len(graded)


def graded_dot(report: PredictionReport, labels: Optional[Sequence[str]] = None, name: str = "recovered") -> str:
    """DOT text of the recovered graph (or the prediction) with edge classes styled."""
    if report.recovered is None:
        styles = {e: EDGE_STYLES[TRUE_KIN] for e in report.true_moral.edges}
        styles.update({e: EDGE_STYLES[PREDICTED_SPURIOUS] for e in report.admissible_spurious})
        return to_dot(report.perturbed, labels, name=name, edge_styles=styles, highlight=report.z.members)
    return to_dot(
        report.recovered,
        labels,
        name=name,
        edge_styles=report.edge_styles(),
        extra_edges=report.missing,
        highlight=report.z.members,
    )


def predicted_dot(report: PredictionReport, labels: Optional[Sequence[str]] = None) -> str:
    bare = PredictionReport(report.z, report.true_moral, report.perturbed, report.admissible_spurious)
    return graded_dot(bare, labels, name="predicted")


__all__ = [
    "TRUE_KIN",
    "PREDICTED_SPURIOUS",
    "VIOLATION",
    "MISSING",
    "PredictionSummary",
    "PredictionReport",
    "predict_spurious",
    "classify_edges",
    "grade",
    "realization_rate",
    "graded_dot",
    "predicted_dot",
]
