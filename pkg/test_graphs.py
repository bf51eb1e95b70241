import math

import numpy as np
import pytest

from tropicore.utils.algebra import Matrix
from tropicore.utils.errors import NotStronglyConnectedError
from tropicore.utils.graphs import (
    Digraph,
    components,
    cyclicity_of_component,
    digraph_of,
    frobenius_form,
    gcd_all,
    graph_power,
    lcm_all,
    nontrivial_components,
)
from tropicore.utils.instances import random_strongly_connected_graph
from tropicore.utils.oracle import boolean_threshold


def cycle(n):
    return Digraph(n, frozenset((k, (k + 1) % n) for k in range(n)))


def test_digraph_follows_nonzero_entries(example2, tol):
    g = digraph_of(example2, tol)
    assert (0, 1) in g.edges and (1, 0) in g.edges
    assert (0, 2) not in g.edges
    assert (2, 0) in g.edges
    assert g.has_loop(2)
    assert not g.has_loop(0)


def test_frobenius_form_example1(example1, tol):
    fnf = frobenius_form(example1, tol)
    assert fnf.classes == ((0,), (1, 2, 3, 4))
    assert fnf.trivial == (False, False)
    assert fnf.reduced_edges == frozenset({(1, 0)})
    assert fnf.access[1, 0] and not fnf.access[0, 1]
    assert fnf.accessing(0) == [0, 1]
    assert fnf.perm == (0, 1, 2, 3, 4)


def test_frobenius_form_example2(example2, tol):
    fnf = frobenius_form(example2, tol)
    assert fnf.classes == ((0, 1), (2, 3))
    assert fnf.nodes_accessing([0]) == (0, 1, 2, 3)
    assert fnf.nodes_accessing([1]) == (2, 3)


def test_permuted_matrix_is_block_lower_triangular(rng, tol):
    a = Matrix(np.where(rng.random((7, 7)) < 0.25, 1.0, 0.0))
    fnf = frobenius_form(a, tol)
    permuted = a.entries[np.ix_(fnf.perm, fnf.perm)]
    sizes = [len(c) for c in fnf.classes]
    offsets = np.cumsum([0] + sizes)
    for mu in range(len(sizes)):
        for nu in range(mu + 1, len(sizes)):
            block = permuted[offsets[mu]:offsets[mu + 1], offsets[nu]:offsets[nu + 1]]
            assert not block.any()


def test_trivial_class_without_loop(nilpotent, tol):
    fnf = frobenius_form(nilpotent, tol)
    assert len(fnf.classes) == 3
    assert all(fnf.trivial)
    assert nontrivial_components(digraph_of(nilpotent, tol)) == []


def test_cyclicity_of_critical_cycle(example1, tol):
    g = digraph_of(Matrix(np.where(example1.entries >= 1.0, 1.0, 0.0)), tol)
    structure = cyclicity_of_component(g, (1, 2, 3, 4))
    assert structure.sigma == 4
    assert structure.cyclic_classes == ((1,), (4,), (3,), (2,))
    # every edge leads from one cyclic class to the previous one
    for i, j in g.edges:
        assert structure.class_index(j) == (structure.class_index(i) - 1) % 4


def test_cyclicity_single_node_and_errors():
    g = Digraph(2, frozenset({(0, 0), (0, 1)}))
    assert cyclicity_of_component(g, (0,)).sigma == 1
    with pytest.raises(NotStronglyConnectedError):
        cyclicity_of_component(g, (0, 1))


@pytest.mark.parametrize("n,expected", [(1, 1), (3, 3), (6, 6)])
def test_cyclicity_of_cycles(n, expected):
    g = cycle(n) if n > 1 else Digraph(1, frozenset({(0, 0)}))
    assert cyclicity_of_component(g, range(n)).sigma == expected


@pytest.mark.parametrize("seed", range(30))
def test_powers_of_strongly_connected_graphs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 11))
    g = random_strongly_connected_graph(rng, n, density=float(rng.choice([0.0, 0.05, 0.2])))
    structure = cyclicity_of_component(g, range(n))
    sigma = structure.sigma
    classes = [set(c) for c in structure.cyclic_classes]

    pieces_of = {}
    for k in range(1, 13):
        powered = graph_power(g, k)
        pieces = nontrivial_components(powered)
        d = math.gcd(k, sigma)
        assert len(pieces) == d
        assert sorted(i for piece in pieces for i in piece) == list(range(n))
        for piece in pieces:
            inside = [c for c in classes if c <= set(piece)]
            assert len(inside) == sigma // d
            assert set().union(*inside) == set(piece)
        home = {i: index for index, piece in enumerate(pieces) for i in piece}
        assert all(home[i] == home[j] for i, j in powered.edges)
        pieces_of[k] = [frozenset(piece) for piece in pieces]

    for k in pieces_of:
        for l in pieces_of:
            refines = all(any(small <= big for big in pieces_of[k]) for small in pieces_of[l])
            assert refines == (math.gcd(l, sigma) % math.gcd(k, sigma) == 0), (k, l)

    found = boolean_threshold(g)
    assert found.period == sigma
    assert found.threshold <= (n - 1) ** 2 + 1


@pytest.mark.parametrize("k,l", [(2, 4), (4, 2), (3, 6), (1, 5), (2, 3), (6, 2)])
def test_power_pattern_containment_follows_gcd(k, l):
    g = cycle(6)
    inner = {frozenset(c) for c in components(graph_power(g, k))}
    outer = {frozenset(c) for c in components(graph_power(g, l))}
    refines = all(any(piece <= big for big in inner) for piece in outer)
    assert refines == (math.gcd(l, 6) % math.gcd(k, 6) == 0)


def test_lcm_and_gcd_helpers():
    assert lcm_all([]) == 1
    assert lcm_all([2, 3, 4]) == 12
    assert gcd_all([4, 6]) == 2
    assert gcd_all([]) == 0
