"""
Graph Structure Module

Digraph view of a nonnegative matrix: strongly connected components, the
Frobenius normal form with its reduced graph and access relation, cyclicity
and cyclic classes of components, and Boolean graph powers.

Node (i, j) is an edge whenever a_ij is nonzero, so i accesses j when a path
leads from i to j.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .algebra import DEFAULT_TOLERANCE, Matrix, Semiring, Tolerance, mat_power
from .errors import NotStronglyConnectedError, PreconditionError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes 0..n-1 with optional positive edge weights"""

    n: int
    edges: FrozenSet[Edge]
    weights: Optional[Dict[Edge, float]] = field(default=None, compare=False)

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise PreconditionError(f"edge ({i}, {j}) outside node range 0..{self.n - 1}")
        if self.weights is not None and set(self.weights) != set(self.edges):
            raise PreconditionError("weights must be given for exactly the edges")

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n))
        for i, j in self.edges:
            adj[i, j] = 1.0
        return adj

    def has_loop(self, node: int) -> bool:
        return (node, node) in self.edges

    def is_trivial(self, nodes: Iterable[int]) -> bool:
        """One node and no loop"""
        nodes = list(nodes)
        return len(nodes) == 1 and not self.has_loop(nodes[0])

    def restricted(self, nodes: Iterable[int]) -> "Digraph":
        keep = set(nodes)
        edges = frozenset((i, j) for i, j in self.edges if i in keep and j in keep)
        weights = None if self.weights is None else {e: self.weights[e] for e in edges}
        return Digraph(self.n, edges, weights)


@dataclass(frozen=True)
class CyclicStructure:
    """Cyclicity of a strongly connected component and its cyclic classes"""

    sigma: int
    cyclic_classes: Tuple[Tuple[int, ...], ...]

    def class_index(self, node: int) -> int:
        for t, members in enumerate(self.cyclic_classes):
            if node in members:
                return t
        raise KeyError(node)

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(i for members in self.cyclic_classes for i in members))


@dataclass(frozen=True)
class FrobeniusForm:
    """
    Classes of a matrix ordered so the permuted matrix is block-lower-triangular.

    access[mu, nu] is True when class mu accesses class nu (reflexive).
    reduced_edges holds (mu, nu) with mu > nu whenever some edge leads from
    class mu into class nu.
    """

    perm: Tuple[int, ...]
    classes: Tuple[Tuple[int, ...], ...]
    reduced_edges: FrozenSet[Edge]
    access: np.ndarray
    trivial: Tuple[bool, ...]

    def accessing(self, nu: int) -> List[int]:
        """Classes that access nu, nu included, in increasing order"""
        return [mu for mu in range(len(self.classes)) if self.access[mu, nu]]

    def nodes_accessing(self, targets: Iterable[int]) -> Tuple[int, ...]:
        targets = list(targets)
        found = set()
        for mu in range(len(self.classes)):
            if any(self.access[mu, nu] for nu in targets):
                found.update(self.classes[mu])
        return tuple(sorted(found))


def digraph_of(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Digraph:
    rows, cols = np.nonzero(a.entries > tol.abs_eps)
    weights = {(int(i), int(j)): float(a.entries[i, j]) for i, j in zip(rows, cols)}
    return Digraph(a.n, frozenset(weights), weights)


def to_networkx(g: Digraph) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(g.n))
    for edge in sorted(g.edges):
        weight = 1.0 if g.weights is None else g.weights[edge]
        graph.add_edge(*edge, weight=weight)
    return graph


def components(g: Digraph) -> List[Tuple[int, ...]]:
    """Strongly connected node sets ordered by smallest member"""
    found = nx.strongly_connected_components(to_networkx(g))
    return sorted((tuple(sorted(c)) for c in found), key=lambda c: c[0])


def nontrivial_components(g: Digraph) -> List[Tuple[int, ...]]:
    return [c for c in components(g) if not g.is_trivial(c)]


def frobenius_form(a, tol: Tolerance = DEFAULT_TOLERANCE) -> FrobeniusForm:
    """Frobenius normal form of a Matrix or Digraph"""
    g = a if isinstance(a, Digraph) else digraph_of(a, tol)
    graph = to_networkx(g)
    condensed = nx.condensation(graph)
    members = {c: tuple(sorted(condensed.nodes[c]["members"])) for c in condensed.nodes}

    # final classes first, so every edge goes from a later class to an earlier one
    order = list(nx.lexicographical_topological_sort(
        condensed.reverse(copy=True), key=lambda c: members[c][0]
    ))
    position = {c: index for index, c in enumerate(order)}
    classes = tuple(members[c] for c in order)

    reduced = frozenset((position[u], position[v]) for u, v in condensed.edges)
    r = len(classes)
    access = np.eye(r, dtype=bool)
    for c in order:
        for d in nx.descendants(condensed, c):
            access[position[c], position[d]] = True

    perm = tuple(node for members_ in classes for node in members_)
    trivial = tuple(g.is_trivial(members_) for members_ in classes)
    logger.debug("frobenius form: %d classes, perm=%s", r, perm)
    return FrobeniusForm(perm, classes, reduced, access, trivial)


def cyclicity_of_component(g: Digraph, nodes: Iterable[int]) -> CyclicStructure:
    """Cyclicity and cyclic classes by BFS level labelling"""
    nodes = sorted(set(nodes))
    if not nodes:
        raise PreconditionError("component must contain at least one node")
    sub = g.restricted(nodes)
    if len(nodes) == 1:
        return CyclicStructure(1, (tuple(nodes),))
    if not nx.is_strongly_connected(to_networkx(sub).subgraph(nodes)):
        raise NotStronglyConnectedError(
            f"nodes {nodes} do not induce a strongly connected subgraph"
        )

    successors: Dict[int, List[int]] = {i: [] for i in nodes}
    for i, j in sorted(sub.edges):
        successors[i].append(j)
    root = nodes[0]
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in successors[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)

    sigma = 0
    for u, v in sub.edges:
        sigma = math.gcd(sigma, abs(level[u] + 1 - level[v]))

    # edges map C_t into C_{t-1}
    buckets: List[List[int]] = [[] for _ in range(sigma)]
    for node in nodes:
        buckets[(-level[node]) % sigma].append(node)
    return CyclicStructure(sigma, tuple(tuple(b) for b in buckets))


def graph_power(g: Digraph, k: int) -> Digraph:
    if k < 1:
        raise PreconditionError(f"power must be a positive integer, got {k}")
    boolean = mat_power(Matrix(g.adjacency(), Semiring.BOOLEAN), k)
    rows, cols = np.nonzero(boolean.entries)
    return Digraph(g.n, frozenset((int(i), int(j)) for i, j in zip(rows, cols)))


def lcm_all(values: Iterable[int]) -> int:
    return math.lcm(1, *values)


def gcd_all(values: Sequence[int]) -> int:
    return math.gcd(*values) if values else 0
