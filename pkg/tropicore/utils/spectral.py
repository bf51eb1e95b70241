"""
Spectral Module

Max-algebraic spectral machinery for nonnegative matrices.

Key Features:
- Maximum cycle geometric mean (Karp, per component, log domain)
- Kleene star by Floyd-Warshall relaxation
- Strict visualization scaling with post-hoc verification
- Critical graph with cyclicities of its components
- Classical Perron roots of irreducible blocks
- Spectral classes and spectrum in both algebras, and the A_rho reduction
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    DEFAULT_TOLERANCE,
    Matrix,
    Semiring,
    Tolerance,
    booleanize,
)
from .errors import (
    DivergentKleeneStarError,
    NoCriticalGraphError,
    PreconditionError,
    RhoNotInSpectrumError,
    VisualizationError,
)
from .graphs import (
    CyclicStructure,
    Digraph,
    FrobeniusForm,
    components,
    cyclicity_of_component,
    digraph_of,
    frobenius_form,
    lcm_all,
    nontrivial_components,
)

logger = logging.getLogger(__name__)

PERRON_STOP = 1e-12
PERRON_MAX_ITER = 100_000


def _karp_log(weights: np.ndarray) -> float:
    """Largest mean cycle weight of a strongly connected log-weight matrix"""
    m = weights.shape[0]
    table = np.full((m + 1, m), -np.inf)
    table[0, 0] = 0.0
    for k in range(1, m + 1):
        table[k] = (table[k - 1][:, None] + weights).max(axis=0)

    best = -np.inf
    for v in range(m):
        if not np.isfinite(table[m, v]):
            continue
        ratios = [
            (table[m, v] - table[k, v]) / (m - k)
            for k in range(m)
            if np.isfinite(table[k, v])
        ]
        best = max(best, min(ratios))
    return best


def max_cycle_mean(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """lambda(A): maximum cycle geometric mean, 0 when the graph is acyclic"""
    entries = a.entries
    with np.errstate(divide="ignore"):
        logs = np.where(entries > tol.abs_eps, np.log(np.maximum(entries, tol.abs_eps)), -np.inf)
    best = -np.inf
    for nodes in nontrivial_components(digraph_of(a, tol)):
        idx = np.array(nodes)
        best = max(best, _karp_log(logs[np.ix_(idx, idx)]))
    return 0.0 if best == -np.inf else float(np.exp(best))


def kleene_star(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Matrix:
    """A* = I + A + ... + A^(n-1) in max-times arithmetic"""
    lam = max_cycle_mean(a, tol)
    if lam > 1.0 + tol.rel_eps:
        raise DivergentKleeneStarError(detail={"lambda": lam})
    star = np.array(a.entries, dtype=float)
    for k in range(a.n):
        star = np.maximum(star, star[:, k:k + 1] * star[k:k + 1, :])
    star = np.maximum(star, np.eye(a.n))
    return Matrix(star, Semiring.MAX_TIMES)


def visualize_strict(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, Matrix]:
    """
    Diagonal scaling X with B = X^-1 A X sub-unitized and b_ij = 1 exactly on
    critical edges. Requires lambda(A) = 1.
    """
    lam = max_cycle_mean(a, tol)
    if abs(lam - 1.0) > 1e3 * tol.rel_eps:
        raise PreconditionError(f"strict visualization needs lambda(A) = 1, got {lam}")

    try:
        _verify_visualization(a.entries, tol)
    except VisualizationError:
        pass
    else:
        logger.debug("matrix already strictly visualized; identity scaling")
        return np.ones(a.n), a

    n = a.n
    top = float(a.entries.max())
    # lifting zeros to eps keeps lambda and the critical cycles unchanged
    eps = 0.5 * min(1.0, max(top, 1.0) ** (-(n - 1)))
    lifted = Matrix(np.maximum(a.entries, eps), Semiring.MAX_TIMES)
    star = kleene_star(lifted, tol).entries
    log_x = np.log(star).mean(axis=1)
    x = np.exp(log_x - log_x.max())

    b = a.entries * x[None, :] / x[:, None]
    _verify_visualization(b, tol)
    return x, Matrix(b, a.semiring)


def _verify_visualization(b: np.ndarray, tol: Tolerance) -> None:
    limit = 1.0 + 1e3 * tol.rel_eps
    over = np.argwhere(b > limit)
    if over.size:
        i, j = (int(v) for v in over[0])
        raise VisualizationError(f"entry ({i + 1}, {j + 1}) exceeds 1 after scaling", (i, j))

    ones = np.clip(b, 0.0, 1.0)
    pattern = digraph_of(booleanize(Matrix(ones), tol))
    home = {}
    for index, nodes in enumerate(components(pattern)):
        for node in nodes:
            home[node] = index
    for i, j in sorted(pattern.edges):
        if home[i] != home[j]:
            raise VisualizationError(
                f"unit edge ({i + 1}, {j + 1}) does not lie on a unit cycle", (i, j)
            )


@dataclass(frozen=True)
class CriticalGraph:
    """Nodes and edges on cycles attaining lambda(A), split into components"""

    lam: float
    nodes: Tuple[int, ...]
    edges: frozenset
    components: Tuple[CyclicStructure, ...]
    scaling: np.ndarray
    visualized: Matrix

    @property
    def sigma(self) -> int:
        return lcm_all(c.sigma for c in self.components)

    def digraph(self, n: int) -> Digraph:
        return Digraph(n, self.edges)


def critical_graph(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> CriticalGraph:
    lam = max_cycle_mean(a, tol)
    if lam <= 0.0:
        raise NoCriticalGraphError()
    x, b = visualize_strict(a.with_semiring(Semiring.MAX_TIMES).scaled(1.0 / lam), tol)
    ones = Matrix(np.clip(b.entries, 0.0, 1.0))
    pattern = digraph_of(booleanize(ones, tol))

    comps = nontrivial_components(pattern)
    edges = frozenset(
        (i, j) for nodes in comps for i, j in pattern.edges if i in nodes and j in nodes
    )
    structures = tuple(cyclicity_of_component(pattern, nodes) for nodes in comps)
    crit_nodes = tuple(sorted(i for nodes in comps for i in nodes))
    logger.debug("critical graph: lambda=%.12g nodes=%s", lam, crit_nodes)
    return CriticalGraph(lam, crit_nodes, edges, structures, x, b)


def critical_indices(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[int, ...]:
    if max_cycle_mean(a, tol) <= 0.0:
        return ()
    return critical_graph(a, tol).nodes


def perron_root(
    block: np.ndarray,
    stop: float = PERRON_STOP,
    max_iter: int = PERRON_MAX_ITER,
) -> Tuple[float, np.ndarray]:
    """
    Classical Perron root and normalized Perron vector of an irreducible block.

    Iterates on the shifted block B + c*I, c = lambda(B), which is primitive,
    and stops once the Collatz-Wielandt bracket closes.
    """
    block = np.asarray(block, dtype=float)
    m = block.shape[0]
    if m == 1:
        return float(block[0, 0]), np.ones(1)

    shift = max_cycle_mean(Matrix(block))
    shifted = block + shift * np.eye(m)
    x = np.ones(m)
    lo = hi = 0.0
    for step in range(1, max_iter + 1):
        y = shifted @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        x = y / y.max()
        if hi - lo <= stop * hi:
            break
    else:
        logger.warning("Perron iteration hit %d steps, bracket gap %.3g", max_iter, hi - lo)
    logger.debug("perron root after %d steps: %.15g", step, 0.5 * (lo + hi) - shift)
    return 0.5 * (lo + hi) - shift, x


@dataclass(frozen=True)
class SpectralClassInfo:
    class_id: int
    nodes: Tuple[int, ...]
    trivial: bool
    rho_max: float
    rho_plus: float
    is_spectral_max: bool
    is_spectral_plus: bool

    def rho(self, sr: Semiring) -> float:
        return self.rho_plus if sr is Semiring.PLUS_TIMES else self.rho_max

    def is_spectral(self, sr: Semiring) -> bool:
        return self.is_spectral_plus if sr is Semiring.PLUS_TIMES else self.is_spectral_max


def _roots_equal(x: float, y: float, tol: Tolerance) -> bool:
    return bool(tol.close(x, y))


def spectral_classes(
    a: Matrix,
    sr: Optional[Semiring] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    fnf: Optional[FrobeniusForm] = None,
) -> List[SpectralClassInfo]:
    """
    Per-class Perron roots and spectral flags. Max-algebra roots are always
    filled in; classical Perron roots only when sr is PLUS_TIMES or None, and
    are reported as 0 otherwise.
    """
    fnf = fnf or frobenius_form(a, tol)
    with_plus = sr is not Semiring.MAX_TIMES
    roots_max, roots_plus = [], []
    for members, trivial in zip(fnf.classes, fnf.trivial):
        if trivial:
            roots_max.append(0.0)
            roots_plus.append(0.0)
            continue
        idx = np.array(members)
        block = a.entries[np.ix_(idx, idx)]
        roots_max.append(max_cycle_mean(Matrix(block), tol))
        roots_plus.append(perron_root(block)[0] if with_plus else 0.0)

    infos = []
    for nu, members in enumerate(fnf.classes):
        above = [mu for mu in fnf.accessing(nu) if mu != nu]
        spectral_max = roots_max[nu] > 0 and all(
            roots_max[mu] <= roots_max[nu] or _roots_equal(roots_max[mu], roots_max[nu], tol)
            for mu in above
        )
        spectral_plus = roots_plus[nu] > 0 and all(
            roots_plus[mu] < roots_plus[nu] and not _roots_equal(roots_plus[mu], roots_plus[nu], tol)
            for mu in above
        )
        infos.append(SpectralClassInfo(
            class_id=nu,
            nodes=members,
            trivial=fnf.trivial[nu],
            rho_max=roots_max[nu],
            rho_plus=roots_plus[nu],
            is_spectral_max=spectral_max,
            is_spectral_plus=spectral_plus,
        ))
    return infos


def spectrum(
    a: Matrix,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    infos: Optional[Sequence[SpectralClassInfo]] = None,
) -> Tuple[float, ...]:
    """Distinct nonzero Perron roots of spectral classes, largest first"""
    infos = infos if infos is not None else spectral_classes(a, sr, tol)
    values: List[float] = []
    for info in sorted(infos, key=lambda c: -c.rho(sr)):
        if not info.is_spectral(sr):
            continue
        rho = info.rho(sr)
        if not any(_roots_equal(rho, seen, tol) for seen in values):
            values.append(rho)
    return tuple(values)


def nearest_eigenvalue(values: Sequence[float], rho: float, gate: float) -> Optional[float]:
    """Member of values within relative distance gate of rho, if any"""
    if not values:
        return None
    best = min(values, key=lambda v: abs(v - rho))
    return best if abs(best - rho) <= gate * max(abs(best), abs(rho)) else None


def spectral_index_set(
    a: Matrix, rho: float, sr: Semiring, tol: Tolerance = DEFAULT_TOLERANCE
) -> Tuple[int, ...]:
    """Nodes of the (A, rho)-spectral classes"""
    infos = spectral_classes(a, sr, tol)
    nodes = [
        i for info in infos
        if info.is_spectral(sr) and _roots_equal(info.rho(sr), rho, tol)
        for i in info.nodes
    ]
    return tuple(sorted(nodes))


@dataclass(frozen=True)
class RhoReduction:
    rho: float
    m_rho: Tuple[int, ...]
    a_rho: Matrix
    spectral_ids: Tuple[int, ...]
    fnf: FrobeniusForm
    infos: Tuple[SpectralClassInfo, ...]


def rho_reduction(
    a: Matrix,
    rho: float,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RhoReduction:
    """
    Restrict A to the indices accessing an (A, rho)-spectral class and divide
    by rho; the result keeps full size with zeros outside that index set.
    """
    fnf = frobenius_form(a, tol)
    infos = spectral_classes(a, sr, tol, fnf=fnf)
    matched = [
        info for info in infos
        if info.is_spectral(sr) and _match(info.rho(sr), rho, tol)
    ]
    if not matched:
        raise RhoNotInSpectrumError(
            f"{rho:.12g} is not in the spectrum", detail={"rho": rho}
        )
    exact = matched[0].rho(sr)
    ids = tuple(info.class_id for info in matched)
    m_rho = fnf.nodes_accessing(ids)
    reduced = np.zeros_like(a.entries)
    idx = np.array(m_rho)
    reduced[np.ix_(idx, idx)] = a.entries[np.ix_(idx, idx)] / exact
    return RhoReduction(exact, m_rho, Matrix(reduced, sr), ids, fnf, tuple(infos))


def _match(x: float, y: float, tol: Tolerance) -> bool:
    return abs(x - y) <= tol.match_eps * max(abs(x), abs(y))
