"""
Graph representations and structural constructions.

- structures: immutable DirectedGraph / UndirectedGraph / NodeSet values
- operations: kins, moral graph, perturbed graph, separation, cliques, diffs
- graph_io: edge-list CSV and DOT import/export
"""
from .structures import DirectedGraph, UndirectedGraph, NodeSet, Edge, make_edge, edge_tuple, sorted_edges
from .operations import (
    kins,
    moral_graph,
    perturbed_graph,
    is_separated,
    maximal_cliques,
    diff_graphs,
    induced_component_boundary,
    chain_digraph,
    star_digraph,
    chain_graph,
)
from .graph_io import default_labels, write_edge_list, read_edge_list, to_dot, write_dot

__all__ = [
    'DirectedGraph',
    'UndirectedGraph',
    'NodeSet',
    'Edge',
    'make_edge',
    'edge_tuple',
    'sorted_edges',
    'kins',
    'moral_graph',
    'perturbed_graph',
    'is_separated',
    'maximal_cliques',
    'diff_graphs',
    'induced_component_boundary',
    'chain_digraph',
    'star_digraph',
    'chain_graph',
    'default_labels',
    'write_edge_list',
    'read_edge_list',
    'to_dot',
    'write_dot',
]
