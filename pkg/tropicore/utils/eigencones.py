"""
Eigencone Module

Frobenius-Victory generators of eigencones in both algebras, eigencones of
matrix powers with ancestor provenance, eigencone periods and the sum of
eigencones of a power.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .algebra import (
    DEFAULT_TOLERANCE,
    Matrix,
    Semiring,
    Tolerance,
    mat_power,
    normalize,
    proportional,
)
from .errors import ProvenanceError
from .graphs import CyclicStructure, cyclicity_of_component, digraph_of, frobenius_form, lcm_all
from .spectral import (
    critical_graph,
    kleene_star,
    perron_root,
    rho_reduction,
    spectral_classes,
    spectrum,
)

logger = logging.getLogger(__name__)

DIRECT_SOLVE_LIMIT = 64
NEUMANN_STOP = 1e-14
NEUMANN_MAX_ITER = 100_000


@dataclass(frozen=True)
class Provenance:
    """
    Where a generator comes from.

    ancestor indexes a spectral class of A (nonnegative algebra) or a critical
    component of A_rho (max algebra); derived_nodes is the class or component of
    the power it was built on, cyclic_index the first cyclic class of the
    ancestor contained in derived_nodes.
    """

    rho: float
    ancestor: int
    ancestor_nodes: Tuple[int, ...]
    ancestor_sigma: int
    derived_nodes: Tuple[int, ...]
    cyclic_index: int


@dataclass(frozen=True)
class Eigencone:
    rho: float
    k: int
    semiring: Semiring
    generators: Tuple[np.ndarray, ...]
    provenance: Tuple[Provenance, ...]

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class PeriodReport:
    sigma_rho: Tuple[Tuple[float, int], ...]
    sigma_lambda: int

    def sigma_of(self, rho: float) -> int:
        return min(self.sigma_rho, key=lambda pair: abs(pair[0] - rho))[1]


@dataclass(frozen=True)
class SumEigencone:
    """Eigencones of A^k over the whole spectrum; no cones means the zero cone"""

    k: int
    semiring: Semiring
    cones: Tuple[Eigencone, ...]

    @property
    def generators(self) -> List[np.ndarray]:
        return [g for cone in self.cones for g in cone.generators]

    @property
    def provenance(self) -> List[Provenance]:
        return [p for cone in self.cones for p in cone.provenance]

    @property
    def is_zero(self) -> bool:
        return not self.generators


def _solve_shifted(block: np.ndarray, rhs: np.ndarray, direct_limit: int) -> np.ndarray:
    """Solve (I - block) x = rhs for a block of spectral radius below 1"""
    m = block.shape[0]
    if m <= direct_limit:
        return np.linalg.solve(np.eye(m) - block, rhs)
    x = rhs.copy()
    term = rhs.copy()
    for _ in range(NEUMANN_MAX_ITER):
        term = block @ term
        x += term
        if term.max() <= NEUMANN_STOP * max(x.max(), 1.0):
            break
    else:
        logger.warning("Neumann series stopped at the iteration cap")
    return x


def _plus_generator(
    a: np.ndarray,
    classes: Sequence[Tuple[int, ...]],
    access: np.ndarray,
    mu: int,
    direct_limit: int,
) -> np.ndarray:
    n = a.shape[0]
    x = np.zeros(n)
    own = np.array(classes[mu])
    x[own] = perron_root(a[np.ix_(own, own)])[1]
    # classes accessing mu carry larger FNF indices; lower ones are filled first
    for kappa in range(mu + 1, len(classes)):
        if not access[kappa, mu]:
            continue
        idx = np.array(classes[kappa])
        rhs = a[idx, :] @ x
        x[idx] = np.maximum(_solve_shifted(a[np.ix_(idx, idx)], rhs, direct_limit), 0.0)
    return x


def fv_generators_plus(
    a: Matrix,
    tol: Tolerance = DEFAULT_TOLERANCE,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> Eigencone:
    """One generator per spectral class of Perron root 1"""
    a = a.with_semiring(Semiring.PLUS_TIMES)
    fnf = frobenius_form(a, tol)
    infos = spectral_classes(a, Semiring.PLUS_TIMES, tol, fnf=fnf)
    graph = digraph_of(a, tol)
    gens, prov = [], []
    for info in infos:
        if not info.is_spectral_plus or abs(info.rho_plus - 1.0) > tol.match_eps:
            continue
        x = _plus_generator(a.entries, fnf.classes, fnf.access, info.class_id, direct_limit)
        gens.append(normalize(x, tol))
        sigma = cyclicity_of_component(graph, info.nodes).sigma
        prov.append(Provenance(1.0, info.class_id, info.nodes, sigma, info.nodes, 0))
    return Eigencone(1.0, 1, Semiring.PLUS_TIMES, tuple(gens), tuple(prov))


def fv_generators_max(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Eigencone:
    """One Kleene star column per critical component"""
    a = a.with_semiring(Semiring.MAX_TIMES)
    crit = critical_graph(a, tol)
    star = kleene_star(a.scaled(1.0 / crit.lam), tol).entries
    gens, prov = [], []
    for index, component in enumerate(crit.components):
        column = normalize(star[:, component.nodes[0]], tol)
        if any(proportional(column, g, tol.match_eps, tol.abs_eps) for g in gens):
            continue
        gens.append(column)
        prov.append(Provenance(1.0, index, component.nodes, component.sigma, component.nodes, 0))
    return Eigencone(1.0, 1, Semiring.MAX_TIMES, tuple(gens), tuple(prov))


def _first_cyclic_class(structure: CyclicStructure, nodes: Sequence[int]) -> int:
    inside = set(nodes)
    for t, members in enumerate(structure.cyclic_classes):
        if set(members) <= inside:
            return t
    return 0


def _ancestors_plus(a: Matrix, reduction, tol: Tolerance) -> Dict[int, Tuple[Tuple[int, ...], CyclicStructure]]:
    graph = digraph_of(a, tol)
    return {
        class_id: (reduction.fnf.classes[class_id],
                   cyclicity_of_component(graph, reduction.fnf.classes[class_id]))
        for class_id in reduction.spectral_ids
    }


def _ancestors_max(reduction, tol: Tolerance) -> Dict[int, Tuple[Tuple[int, ...], CyclicStructure]]:
    crit = critical_graph(reduction.a_rho, tol)
    return {index: (c.nodes, c) for index, c in enumerate(crit.components)}


def eigencone_of_power(
    a: Matrix,
    rho: float,
    k: int,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> Eigencone:
    """Generators of V(A^k, rho^k) built on the k-th power of the rho reduction"""
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    a = a.with_semiring(sr)
    reduction = rho_reduction(a, rho, sr, tol)
    powered = mat_power(reduction.a_rho, k)
    if sr is Semiring.PLUS_TIMES:
        base = fv_generators_plus(powered, tol, direct_limit)
        ancestors = _ancestors_plus(a, reduction, tol)
    else:
        base = fv_generators_max(powered, tol)
        ancestors = _ancestors_max(reduction, tol)

    provenance = []
    for derived in base.provenance:
        ancestor = next(
            (key for key, (nodes, _) in ancestors.items()
             if set(derived.derived_nodes) <= set(nodes)),
            None,
        )
        if ancestor is None:
            raise ProvenanceError(
                f"derived nodes {[i + 1 for i in derived.derived_nodes]} lie in no ancestor class",
                detail={"derived_nodes": list(derived.derived_nodes), "k": k},
            )
        nodes, structure = ancestors[ancestor]
        provenance.append(Provenance(
            rho=reduction.rho,
            ancestor=ancestor,
            ancestor_nodes=nodes,
            ancestor_sigma=structure.sigma,
            derived_nodes=derived.derived_nodes,
            cyclic_index=_first_cyclic_class(structure, derived.derived_nodes),
        ))

    order = sorted(range(len(provenance)), key=lambda i: (provenance[i].ancestor, provenance[i].cyclic_index))
    logger.debug("V(A^%d, %.6g^%d): %d generators", k, reduction.rho, k, len(order))
    return Eigencone(
        rho=reduction.rho,
        k=k,
        semiring=sr,
        generators=tuple(base.generators[i] for i in order),
        provenance=tuple(provenance[i] for i in order),
    )


def periods(a: Matrix, sr: Semiring, tol: Tolerance = DEFAULT_TOLERANCE) -> PeriodReport:
    """Period of each eigencone sequence and their lcm"""
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    a = a.with_semiring(sr)
    pairs = []
    for rho in spectrum(a, sr, tol):
        reduction = rho_reduction(a, rho, sr, tol)
        if sr is Semiring.PLUS_TIMES:
            graph = digraph_of(a, tol)
            sigma = lcm_all(
                cyclicity_of_component(graph, reduction.fnf.classes[c]).sigma
                for c in reduction.spectral_ids
            )
        else:
            sigma = critical_graph(reduction.a_rho, tol).sigma
        pairs.append((reduction.rho, sigma))
    return PeriodReport(tuple(pairs), lcm_all(s for _, s in pairs))


def sum_eigencone(
    a: Matrix,
    k: int,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> SumEigencone:
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    cones = tuple(
        eigencone_of_power(a, rho, k, sr, tol, direct_limit)
        for rho in spectrum(a.with_semiring(sr), sr, tol)
    )
    return SumEigencone(k, sr, cones)
