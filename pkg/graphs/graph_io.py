"""Edge-list and DOT import/export for graphs.

Edge lists are CSV files with a ``source,target`` header preceded by a
``# nodes:`` comment that carries the full ordered label list (so isolated
nodes survive a round trip). DOT output is plain Graphviz text.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd

from graphs.structures import DirectedGraph, Edge, UndirectedGraph, edge_tuple
from utilities.exceptions import InvalidModelError

GraphLike = Union[DirectedGraph, UndirectedGraph]

NODES_PREFIX = "# nodes:"


def default_labels(n: int) -> List[str]:
    """1-based string labels, as used in experiment documents and reports."""
    return [str(k + 1) for k in range(n)]


def write_edge_list(graph: GraphLike, path: Union[str, Path], labels: Optional[Sequence[str]] = None) -> Path:
    labels = list(labels or default_labels(graph.n))
    if isinstance(graph, DirectedGraph):
        pairs = sorted(graph.arcs)
    else:
        pairs = graph.edge_list()
    frame = pd.DataFrame(
        [(labels[i], labels[j]) for i, j in pairs], columns=["source", "target"]
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"{NODES_PREFIX} {' '.join(labels)}\n")
        frame.to_csv(f, index=False)
    return path


def read_edge_list(path: Union[str, Path], directed: bool = False):
    """Return ``(graph, labels)`` parsed from :func:`write_edge_list` output."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip()
    if not first.startswith(NODES_PREFIX):
        raise InvalidModelError(f"{path}: missing '{NODES_PREFIX}' header line")
    labels = first[len(NODES_PREFIX):].split()
    index: Dict[str, int] = {label: k for k, label in enumerate(labels)}
    frame = pd.read_csv(path, comment="#", dtype=str)
    pairs = []
    for source, target in zip(frame.get("source", []), frame.get("target", [])):
        if source not in index or target not in index:
            raise InvalidModelError(f"{path}: edge {source}-{target} uses an undeclared node")
        pairs.append((index[source], index[target]))
    if directed:
        return DirectedGraph(len(labels), frozenset(pairs)), labels
    return UndirectedGraph.from_pairs(len(labels), pairs), labels


def to_dot(
    graph: GraphLike,
    labels: Optional[Sequence[str]] = None,
    name: str = "G",
    edge_styles: Optional[Dict[Edge, Dict[str, str]]] = None,
    extra_edges: Iterable[Edge] = (),
    highlight: Iterable[int] = (),
) -> str:
    """Graphviz text. ``edge_styles`` maps an edge to DOT attributes."""
    labels = list(labels or default_labels(graph.n))
    directed = isinstance(graph, DirectedGraph)
    connector = "->" if directed else "--"
    highlight = set(highlight)
    lines = [f"{'digraph' if directed else 'graph'} {name} {{"]
    for k, label in enumerate(labels):
        attrs = ' shape=doublecircle' if k in highlight else ''
        lines.append(f'  "{label}" [label="{label}"{attrs}];')
    if directed:
        for i, j in sorted(graph.arcs):
            lines.append(f'  "{labels[i]}" {connector} "{labels[j]}";')
    else:
        styles = edge_styles or {}
        all_edges = set(graph.edges) | {frozenset(e) for e in extra_edges}
        for edge in sorted(all_edges, key=edge_tuple):
            i, j = edge_tuple(edge)
            attrs = styles.get(edge, {})
            rendered = "" if not attrs else " [" + ", ".join(f'{k}="{v}"' for k, v in sorted(attrs.items())) + "]"
            lines.append(f'  "{labels[i]}" {connector} "{labels[j]}"{rendered};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(graph: GraphLike, path: Union[str, Path], **kwargs) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_dot(graph, **kwargs), encoding="utf-8")
    return path


__all__ = [
    "default_labels",
    "write_edge_list",
    "read_edge_list",
    "to_dot",
    "write_dot",
]
