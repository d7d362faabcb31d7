"""
Structural constructions on generative and undirected graphs.

Covers kinship and moralization of a generative digraph, the perturbed graph
obtained when a node set Z is corrupted, graph separation, maximal cliques
and the comparison of a recovered graph against a reference.
"""
from __future__ import annotations

import itertools
from typing import List, Tuple

import networkx as nx

from graphs.structures import DirectedGraph, Edge, NodeSet, UndirectedGraph, make_edge
from utilities.exceptions import DimensionMismatchError, InvalidModelError


def kins(g: DirectedGraph, j: int) -> NodeSet:
    """Children, parents and spouses (co-parents of a shared child) of ``j``."""
    if not 0 <= j < g.n:
        raise InvalidModelError(f"node {j} out of range for {g.n} nodes")
    children = g.children(j)
    spouses = {p for c in children for p in g.parents(c)}
    return NodeSet((children | g.parents(j) | spouses) - {j})


def moral_graph(g: DirectedGraph) -> UndirectedGraph:
    """Connect every node to its kins.

    Equivalent to the skeleton of ``g`` plus an edge between every pair of
    parents sharing a child (``networkx.moral_graph``).
    """
    moral = g.skeleton().to_networkx()
    for child in range(g.n):
        moral.add_edges_from(itertools.combinations(sorted(g.parents(child)), 2))
    return UndirectedGraph.from_networkx(moral, g.n)


def perturbed_graph(g: UndirectedGraph, z: NodeSet) -> UndirectedGraph:
    """Add ``i - j`` whenever a path joins them with every intermediate node in ``z``.

    For each connected component of the subgraph induced by ``z``, all nodes
    adjacent to (or inside) that component become pairwise adjacent. This is
    the same set of pairs as a search whose intermediate hops are restricted
    to ``z``.
    """
    z.validate(g.n)
    base = g.to_networkx()
    result = base.copy()
    induced = base.subgraph(z.members)
    for component in nx.connected_components(induced):
        boundary = set(component)
        for v in component:
            boundary.update(base.neighbors(v))
        result.add_edges_from(itertools.combinations(sorted(boundary), 2))
    return UndirectedGraph.from_networkx(result, g.n)


def is_separated(g: UndirectedGraph, a: NodeSet, b: NodeSet, c: NodeSet) -> bool:
    """True iff every path from ``a`` to ``b`` passes through ``c``."""
    for s in (a, b, c):
        s.validate(g.n)
    if (a.members & b.members) or (a.members & c.members) or (b.members & c.members):
        raise InvalidModelError("separation query requires pairwise disjoint node sets")
    if not a.members or not b.members:
        return True
    pruned = g.to_networkx()
    pruned.remove_nodes_from(c.members)
    reachable = set()
    for source in a.members:
        reachable.update(nx.node_connected_component(pruned, source))
    return not (reachable & b.members)


def maximal_cliques(g: UndirectedGraph) -> List[NodeSet]:
    """All maximal cliques (Bron-Kerbosch via ``networkx.find_cliques``)."""
    cliques = [NodeSet(c) for c in nx.find_cliques(g.to_networkx())]
    return sorted(cliques, key=lambda c: (sorted(c.members), len(c)))


def diff_graphs(reference: UndirectedGraph, candidate: UndirectedGraph) -> Tuple[frozenset, frozenset]:
    """Return ``(spurious, missing)`` edge sets of ``candidate`` against ``reference``."""
    if reference.n != candidate.n:
        raise DimensionMismatchError(
            f"cannot compare graphs with {reference.n} and {candidate.n} nodes"
        )
    spurious = candidate.edges - reference.edges
    missing = reference.edges - candidate.edges
    return frozenset(spurious), frozenset(missing)


def induced_component_boundary(g: UndirectedGraph, z: NodeSet, edge: Edge) -> NodeSet:
    """Z-components touched by a spurious ``edge`` together with their neighbors.

    Used to check that every erroneous link stays local to the corrupted
    region that produced it.
    """
    base = g.to_networkx()
    induced = base.subgraph(z.members)
    i, j = sorted(edge)
    region = set()
    for component in nx.connected_components(induced):
        touch = set(component)
        for v in component:
            touch.update(base.neighbors(v))
        if i in touch and j in touch:
            region |= touch
    return NodeSet(region)


def chain_digraph(n: int) -> DirectedGraph:
    """``0 -> 1 -> ... -> n-1``."""
    return DirectedGraph(n, frozenset((k, k + 1) for k in range(n - 1)))


def star_digraph(n: int, hub: int = 0) -> DirectedGraph:
    """Broadcast star: ``hub -> every other node``."""
    return DirectedGraph(n, frozenset((hub, k) for k in range(n) if k != hub))


def chain_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, frozenset(make_edge(k, k + 1) for k in range(n - 1)))
