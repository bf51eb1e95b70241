"""
Seeded random instances for property checks and the verification harness.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Matrix, Semiring
from .graphs import Digraph

logger = logging.getLogger(__name__)

LOW = 0.1
HIGH = 10.0


def _log_uniform(rng: np.random.Generator, size, low: float = LOW, high: float = HIGH) -> np.ndarray:
    return np.exp(rng.uniform(np.log(low), np.log(high), size=size))


def random_matrix(
    rng: np.random.Generator,
    n: int,
    density: float = 0.5,
    semiring: Semiring = Semiring.MAX_TIMES,
) -> Matrix:
    """Entries drawn from {0} and log-uniform [0.1, 10]"""
    mask = rng.random((n, n)) < density
    return Matrix(np.where(mask, _log_uniform(rng, (n, n)), 0.0), semiring)


def random_grid_matrix(
    rng: np.random.Generator,
    n: int,
    values: Sequence[float] = (0.0, 0.25, 0.5, 1.0),
    semiring: Semiring = Semiring.MAX_TIMES,
) -> Matrix:
    return Matrix(rng.choice(np.asarray(values, dtype=float), size=(n, n)), semiring)


def _cyclic_block(rng: np.random.Generator, size: int, sigma: int, density: float) -> np.ndarray:
    """Irreducible block of the given cyclicity; size must be a multiple of sigma"""
    block = np.zeros((size, size))
    level = [(-k) % sigma for k in range(size)]
    for k in range(size):
        block[k, (k + 1) % size] = 1.0
    if size > sigma:
        block[sigma - 1, 0] = 1.0
    for i in range(size):
        for j in range(size):
            if level[j] == (level[i] - 1) % sigma and rng.random() < density:
                block[i, j] = 1.0
    return block * _log_uniform(rng, (size, size))


def _split(rng: np.random.Generator, n: int, parts: int) -> List[int]:
    """Random composition of n into parts positive sizes"""
    if parts == 1:
        return [n]
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=parts - 1, replace=False))
    return [hi - lo for lo, hi in zip([0] + cuts, cuts + [n])]


def random_structured_matrix(
    rng: np.random.Generator,
    n_classes: Optional[int] = None,
    max_sigma: int = 3,
    density: float = 0.3,
    semiring: Semiring = Semiring.MAX_TIMES,
    n: Optional[int] = None,
) -> Tuple[Matrix, List[int]]:
    """
    Block-lower-triangular matrix with prescribed class cyclicities, returned
    with the cyclicities in block order. Nodes are shuffled afterwards.

    Without n, block sizes are one or two multiples of each drawn cyclicity.
    With n, the blocks split n exactly and each cyclicity is a divisor of its
    block size no larger than max_sigma.
    """
    if n is None:
        n_classes = n_classes or int(rng.integers(1, 4))
        sigmas = [int(rng.integers(1, max_sigma + 1)) for _ in range(n_classes)]
        sizes = [s * int(rng.integers(1, 3)) for s in sigmas]
    else:
        n_classes = min(n_classes or int(rng.integers(1, min(3, n) + 1)), n)
        sizes = _split(rng, n, n_classes)
        sigmas = [
            int(rng.choice([d for d in range(1, min(size, max_sigma) + 1) if size % d == 0]))
            for size in sizes
        ]
    n = sum(sizes)
    entries = np.zeros((n, n))
    offsets = np.cumsum([0] + sizes)
    for c, (size, sigma) in enumerate(zip(sizes, sigmas)):
        lo, hi = offsets[c], offsets[c + 1]
        entries[lo:hi, lo:hi] = _cyclic_block(rng, size, sigma, density)
        if c:
            mask = rng.random((size, lo)) < density
            entries[lo:hi, :lo] = np.where(mask, _log_uniform(rng, (size, lo)), 0.0)
    perm = rng.permutation(n)
    return Matrix(entries[np.ix_(perm, perm)], semiring), sigmas


def random_strongly_connected_graph(
    rng: np.random.Generator, n: int, density: float = 0.3
) -> Digraph:
    order = rng.permutation(n)
    edges = {(int(order[k]), int(order[(k + 1) % n])) for k in range(n)} if n > 1 else set()
    for i in range(n):
        for j in range(n):
            if rng.random() < density:
                edges.add((i, j))
    if n == 1:
        edges.add((0, 0))
    return Digraph(n, frozenset(edges))


def random_positive_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return _log_uniform(rng, n)
