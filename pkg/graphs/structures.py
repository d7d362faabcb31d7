"""Immutable graph values shared by every package.

Nodes are dense 0-based indices so that graphs and spectral matrices share
indexing; human-readable labels are attached only at the CLI boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, Tuple

import networkx as nx

from utilities.exceptions import InvalidModelError

Arc = Tuple[int, int]
Edge = FrozenSet[int]


def make_edge(i: int, j: int) -> Edge:
    """Unordered pair ``{i, j}``; rejects self-loops."""
    if i == j:
        raise InvalidModelError(f"self-loop on node {i} is not allowed")
    return frozenset((int(i), int(j)))


def edge_tuple(edge: Edge) -> Tuple[int, int]:
    """Sorted tuple form of an unordered edge, for stable output."""
    i, j = sorted(edge)
    return i, j


def sorted_edges(edges: Iterable[Edge]) -> list:
    return sorted(edge_tuple(e) for e in edges)


@dataclass(frozen=True)
class NodeSet:
    """A set of node indices (corrupted set Z, neighbor sets, cliques)."""

    members: FrozenSet[int] = field(default_factory=frozenset)

    def __init__(self, members: Iterable[int] = ()):
        object.__setattr__(self, "members", frozenset(int(m) for m in members))

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item: object) -> bool:
        return item in self.members

    def validate(self, n: int) -> "NodeSet":
        bad = [m for m in self.members if m < 0 or m >= n]
        if bad:
            raise InvalidModelError(f"node indices {sorted(bad)} out of range for {n} nodes")
        return self

    def __repr__(self) -> str:
        return f"NodeSet({sorted(self.members)})"


@dataclass(frozen=True)
class DirectedGraph:
    """Generative graph: ``n`` nodes and arcs ``(i, j)`` meaning i -> j."""

    n: int
    arcs: FrozenSet[Arc] = field(default_factory=frozenset)

    def __post_init__(self):
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.n < 0:
            raise InvalidModelError("node count must be non-negative")
        for i, j in arcs:
            if i == j:
                raise InvalidModelError(f"self-loop {i}->{j} is not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidModelError(f"arc {i}->{j} references a node outside 0..{self.n - 1}")

    def parents(self, j: int) -> FrozenSet[int]:
        return frozenset(i for i, k in self.arcs if k == j)

    def children(self, i: int) -> FrozenSet[int]:
        return frozenset(k for j, k in self.arcs if j == i)

    def skeleton(self) -> "UndirectedGraph":
        return UndirectedGraph(self.n, frozenset(make_edge(i, j) for i, j in self.arcs))

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.arcs)
        return g

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())


@dataclass(frozen=True)
class UndirectedGraph:
    """Undirected graph over ``n`` nodes (moral, perturbed and recovered graphs)."""

    n: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset(frozenset(int(v) for v in e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 0:
            raise InvalidModelError("node count must be non-negative")
        for e in edges:
            if len(e) != 2:
                raise InvalidModelError(f"edge {sorted(e)} is a self-loop or malformed")
            if any(v < 0 or v >= self.n for v in e):
                raise InvalidModelError(f"edge {sorted(e)} references a node outside 0..{self.n - 1}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "UndirectedGraph":
        return cls(n, frozenset(make_edge(i, j) for i, j in pairs))

    @classmethod
    def complete(cls, n: int, nodes: Iterable[int] = None) -> "UndirectedGraph":
        members = sorted(range(n) if nodes is None else nodes)
        return cls(n, frozenset(
            make_edge(a, b) for k, a in enumerate(members) for b in members[k + 1:]
        ))

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and frozenset((i, j)) in self.edges

    def neighbors(self, i: int) -> NodeSet:
        return NodeSet(v for e in self.edges if i in e for v in e if v != i)

    def edge_list(self) -> list:
        return sorted_edges(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edge_list())
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph, n: int) -> "UndirectedGraph":
        return cls(n, frozenset(make_edge(i, j) for i, j in g.edges() if i != j))

    def __repr__(self) -> str:
        return f"UndirectedGraph(n={self.n}, edges={self.edge_list()})"
