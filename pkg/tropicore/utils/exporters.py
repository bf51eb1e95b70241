"""
Graphviz DOT rendering of the digraph of a matrix, its condensation and its
critical graph. Node labels are 1-based.
"""

import logging
from typing import Iterable, List

import networkx as nx

from .algebra import DEFAULT_TOLERANCE, Matrix, Tolerance
from .graphs import digraph_of, frobenius_form, to_networkx
from .spectral import CriticalGraph, critical_graph, max_cycle_mean

logger = logging.getLogger(__name__)


def _label(nodes: Iterable[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(nodes)) + "}"


def _render(name: str, graph: nx.DiGraph, labels=None, attrs=None) -> str:
    lines = [f"digraph {name} {{"]
    for node in sorted(graph.nodes):
        label = labels[node] if labels else str(node + 1)
        lines.append(f'  n{node} [label="{label}"];')
    for u, v in sorted(graph.edges):
        extra = attrs(u, v) if attrs else ""
        lines.append(f"  n{u} -> n{v}{extra};")
    lines.append("}")
    return "\n".join(lines)


def digraph_dot(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> str:
    g = to_networkx(digraph_of(a, tol))

    def weight(u, v):
        return f' [label="{a.entries[u, v]:.6g}"]'

    return _render("A", g, attrs=weight)


def condensation_dot(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> str:
    """Classes in Frobenius order; an edge mu -> nu when class mu has an edge into nu"""
    fnf = frobenius_form(a, tol)
    g = nx.DiGraph()
    g.add_nodes_from(range(len(fnf.classes)))
    g.add_edges_from(fnf.reduced_edges)
    labels = {mu: _label(members) for mu, members in enumerate(fnf.classes)}
    return _render("condensation", g, labels=labels)


def critical_dot(crit: CriticalGraph) -> str:
    g = nx.DiGraph()
    g.add_nodes_from(crit.nodes)
    g.add_edges_from(crit.edges)
    return _render("critical", g)


def export_dot(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> str:
    """All three graphs of A, one DOT document after another"""
    parts: List[str] = [digraph_dot(a, tol), condensation_dot(a, tol)]
    if max_cycle_mean(a, tol) > 0:
        parts.append(critical_dot(critical_graph(a, tol)))
    else:
        logger.debug("acyclic pattern; no critical graph to export")
    return "\n\n".join(parts) + "\n"
