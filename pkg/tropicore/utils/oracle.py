"""
Oracle Module

Brute-force validators for the fast analysis paths on small instances.

Key Features:
- Core by iterated column spans (max algebra) or by candidate rays checked
  against every span and a seeded probe set (nonnegative algebra)
- Empirical Boolean and critical periodicity thresholds
- Best-path oracle for Kleene stars
- verify_bundle: every module invariant on one matrix, collected in a report
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel
from scipy.optimize import nnls

from .algebra import (
    DEFAULT_TOLERANCE,
    Matrix,
    Semiring,
    Tolerance,
    booleanize,
    cone_contains,
    extremal_filter,
    is_inside,
    mat_mul,
    mat_power,
    mat_vec,
    normalize,
    proportional,
    same_cone,
)
from .core import CoreDescription, compute_core, default_horizon, normalized_powers
from .eigencones import eigencone_of_power, periods, sum_eigencone
from .errors import TropicoreError
from .graphs import (
    Digraph,
    components,
    cyclicity_of_component,
    digraph_of,
    graph_power,
    to_networkx,
)
from .instances import random_matrix, random_positive_vector
from .periodicity import PeriodResult, detect_period
from .spectral import (
    critical_graph,
    critical_indices,
    kleene_star,
    max_cycle_mean,
    rho_reduction,
    spectral_index_set,
    spectrum,
    visualize_strict,
)

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = Tolerance(rel_eps=1e-6, abs_eps=1e-9, match_eps=1e-6)
PROBE_COUNT = 200
LATTICE_MAX = 12


class OracleCheck(BaseModel):
    name: str
    instance: str
    passed: bool
    witness: Optional[Dict[str, Any]] = None
    note: str = ""


class OracleReport(BaseModel):
    algebra: str
    horizon: int
    seed: Optional[int] = None
    checks: List[OracleCheck] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[OracleCheck]:
        return [check for check in self.checks if not check.passed]


@dataclass(frozen=True)
class BruteCore:
    rays: Tuple[np.ndarray, ...]
    converged: bool
    horizon: int
    violations: Tuple[str, ...] = ()


def _columns(frame: np.ndarray) -> List[np.ndarray]:
    return [frame[:, i] for i in range(frame.shape[1]) if frame[:, i].any()]


def _cone_distance(gens: Sequence[np.ndarray], z: np.ndarray) -> float:
    if not gens:
        return float(np.linalg.norm(z))
    _, residual = nnls(np.column_stack(gens), z, maxiter=50 * (len(gens) + len(z)))
    return float(residual)


def brute_core(
    a: Matrix,
    sr: Semiring,
    horizon: Optional[int] = None,
    tol: Tolerance = ORACLE_TOLERANCE,
    probes: int = PROBE_COUNT,
    seed: int = 0,
) -> BruteCore:
    """
    Core from the powers of A without the eigencone formula.

    Max algebra: extremals of span(A^horizon), converged when the span no
    longer moves over the last sigma_Lambda powers. Nonnegative algebra: the
    eigencone rays of A^sigma_Lambda must lie in every span(A^t), and every
    probe outside them must either leave span(A^horizon) or sit within the
    residual distance of that span from the candidates.
    """
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    a = a.with_semiring(sr)
    n = a.n
    try:
        sigma = periods(a, sr).sigma_lambda
    except TropicoreError as exc:
        logger.warning("period of %s unavailable: %s", instance, exc.message)
        sigma = 1
    horizon = horizon or default_horizon(n, sigma)
    horizon = max(horizon, sigma + 1)
    frames, _ = normalized_powers(a.entries, np.eye(n), horizon, sr)

    if sr is Semiring.MAX_TIMES:
        last = _columns(frames[-1])
        rays = extremal_filter(last, sr, tol)
        earlier = _columns(frames[-1 - sigma])
        converged = same_cone(earlier, last, sr, tol)
        if not converged:
            logger.debug("max spans still moving at horizon %d", horizon)
        return BruteCore(tuple(rays), converged, horizon)

    candidates = sum_eigencone(a, sigma, sr).generators
    violations = []
    for t, frame in enumerate(frames, start=1):
        span = _columns(frame)
        for index, g in enumerate(candidates):
            if not is_inside(span, g, sr, tol):
                violations.append(f"candidate {index + 1} outside span(A^{t})")

    last = [normalize(c, tol) for c in _columns(frames[-1])]
    residue = max((_cone_distance(candidates, c) for c in last), default=0.0)
    rng = np.random.default_rng(seed)
    for p in range(probes):
        z = rng.random(n)
        if is_inside(candidates, z, sr, tol) or not is_inside(last, z, sr, tol):
            continue
        z = normalize(z, tol)
        if _cone_distance(candidates, z) > n * residue + tol.rel_eps * n:
            violations.append(f"probe {p + 1} survives every span but is outside the candidates")
    return BruteCore(tuple(candidates), not violations, horizon, tuple(violations))


def boolean_threshold(g: Digraph) -> PeriodResult:
    """Threshold and period of the sequence of Boolean powers of g"""
    n = g.n
    window = 2 * (n - 1) ** 2 + 2 + 2 * n
    powers = [graph_power(g, k).edges for k in range(1, window + 1)]
    return detect_period(powers)


@dataclass(frozen=True)
class CriticalThresholds:
    """T_c(A) over critical rows and columns and T(crit(A))"""

    critical: int
    graph: int
    period: int


def critical_thresholds(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> CriticalThresholds:
    crit = critical_graph(a, tol)
    n = a.n
    horizon = 2 * n * n + 2 * crit.sigma + 2
    scaled = a.with_semiring(Semiring.MAX_TIMES).scaled(1.0 / crit.lam)
    powers = [scaled.entries]
    for _ in range(horizon - 1):
        powers.append(mat_mul(powers[-1], scaled.entries, Semiring.MAX_TIMES))

    threshold, period = 1, 1
    for i in crit.nodes:
        for seq in ([p[i, :] for p in powers], [p[:, i] for p in powers]):
            found = detect_period(seq, equal=tol.equal)
            threshold = max(threshold, found.threshold)
            period = math.lcm(period, found.period)
    graph = boolean_threshold(crit.digraph(n)).threshold
    return CriticalThresholds(threshold, graph, period)


def path_oracle_star(a: Matrix) -> np.ndarray:
    """Best simple-path weights; matches A* when lambda(A) <= 1"""
    graph = to_networkx(digraph_of(a))
    star = np.eye(a.n)
    for i in range(a.n):
        for j in range(a.n):
            if i == j:
                continue
            for path in nx.all_simple_paths(graph, i, j):
                weight = float(np.prod([a.entries[u, v] for u, v in zip(path, path[1:])]))
                star[i, j] = max(star[i, j], weight)
    return star


def random_subunitized(rng: np.random.Generator, n: int) -> Matrix:
    """Strictly visualized random matrix with lambda = 1, or a scaled copy if acyclic"""
    a = random_matrix(rng, n)
    lam = max_cycle_mean(a)
    if lam <= 0:
        top = float(a.entries.max()) or 1.0
        return a.scaled(1.0 / top)
    _, b = visualize_strict(a.scaled(1.0 / lam))
    return Matrix(np.minimum(b.entries, 1.0))


@dataclass
class _Context:
    a: Matrix
    sr: Semiring
    tol: Tolerance
    check_tol: Tolerance
    horizon: Optional[int]
    probes: int
    seed: int
    cache: Dict[Any, Any] = field(default_factory=dict)

    def memo(self, key, compute: Callable[[], Any]):
        if key not in self.cache:
            self.cache[key] = compute()
        return self.cache[key]

    @property
    def lam(self) -> float:
        return self.memo("lam", lambda: max_cycle_mean(self.a, self.tol))

    @property
    def core(self) -> CoreDescription:
        return self.memo("core", lambda: compute_core(self.a, self.sr, self.tol))

    def sum_cone(self, k: int):
        return self.memo(("sum", k), lambda: sum_eigencone(self.a, k, self.sr, self.tol))

    def power(self, k: int) -> Matrix:
        return self.memo(("power", k), lambda: mat_power(self.a, k))

    def witness(self, detail: str, vectors: Sequence[np.ndarray] = ()) -> Dict[str, Any]:
        return {
            "matrix": self.a.tolist(),
            "vectors": [np.asarray(v, dtype=float).tolist() for v in vectors],
            "detail": detail,
        }


Outcome = Optional[Dict[str, Any]]


def _check_tolerance_self_test(ctx: _Context) -> Outcome:
    if is_inside([np.array([1.0, 0.0])], np.array([0.0, 1.0]), ctx.sr, ctx.tol):
        return ctx.witness("unit vector accepted into the span of another unit vector",
                           [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    return None


def _check_power_additivity(ctx: _Context) -> Outcome:
    for k in (1, 2, 3):
        for l in (1, 2, 3):
            joined = ctx.power(k + l).entries
            split = mat_mul(ctx.power(k).entries, ctx.power(l).entries, ctx.sr)
            if not ctx.check_tol.equal(joined, split):
                return ctx.witness(f"A^{k + l} differs from A^{k} A^{l}")
    return None


def _visualized(ctx: _Context) -> Matrix:
    def build():
        _, b = visualize_strict(ctx.a.with_semiring(Semiring.MAX_TIMES).scaled(1.0 / ctx.lam), ctx.tol)
        return Matrix(np.minimum(b.entries, 1.0))

    return ctx.memo("visualized", build)


def _check_booleanize_powers(ctx: _Context) -> Outcome:
    if ctx.lam <= 0:
        return None
    b = _visualized(ctx)
    pattern = booleanize(b, ctx.tol)
    for k in range(1, 9):
        left = booleanize(Matrix(np.minimum(mat_power(b, k).entries, 1.0)), ctx.tol).entries
        right = mat_power(pattern, k).entries
        if not np.array_equal(left, right):
            return ctx.witness(f"booleanization does not commute with the power {k}")
    return None


def _check_kleene_star(ctx: _Context) -> Outcome:
    if ctx.lam <= 0:
        scaled = ctx.a.with_semiring(Semiring.MAX_TIMES)
    else:
        scaled = ctx.a.with_semiring(Semiring.MAX_TIMES).scaled(1.0 / ctx.lam)
    star = kleene_star(scaled, ctx.tol).entries
    if not ctx.check_tol.equal(mat_mul(star, star, Semiring.MAX_TIMES), star):
        return ctx.witness("Kleene star is not idempotent")
    if np.any(np.diag(star) < 1.0 - ctx.check_tol.rel_eps):
        return ctx.witness("Kleene star is not above the identity")
    if ctx.a.n <= 5 and not ctx.check_tol.equal(path_oracle_star(scaled), star):
        return ctx.witness("Kleene star disagrees with best simple paths")
    return None


def _check_critical_powers(ctx: _Context) -> Outcome:
    if ctx.lam <= 0:
        return None
    b = _visualized(ctx)
    crit = critical_graph(b, ctx.tol)
    for k in range(1, 9):
        powered = mat_power(b, k)
        expected = graph_power(crit.digraph(b.n), k).edges
        derived = critical_graph(powered, ctx.tol)
        if derived.edges != expected:
            return ctx.witness(f"crit(A^{k}) differs from crit(A)^{k}")
        ones = digraph_of(booleanize(Matrix(np.minimum(powered.entries, 1.0)), ctx.tol)).edges
        if ones != derived.edges:
            return ctx.witness(f"power {k} is not strictly visualized")
    return None


def _check_scaling_invariance(ctx: _Context) -> Outcome:
    rng = np.random.default_rng(ctx.seed + 17)
    x = random_positive_vector(rng, ctx.a.n)
    scaled = Matrix(ctx.a.entries * x[None, :] / x[:, None], ctx.sr)
    for sr in (Semiring.MAX_TIMES, Semiring.PLUS_TIMES):
        before = spectrum(ctx.a.with_semiring(sr), sr, ctx.tol)
        after = spectrum(scaled.with_semiring(sr), sr, ctx.tol)
        if len(before) != len(after) or not ctx.check_tol.equal(before, after):
            return ctx.witness(f"diagonal scaling changed the {sr.value} spectrum", [x])
    if ctx.lam > 0:
        left = critical_graph(ctx.a, ctx.tol)
        right = critical_graph(scaled, ctx.tol)
        if left.nodes != right.nodes or left.edges != right.edges:
            return ctx.witness("diagonal scaling changed the critical graph", [x])
    return None


def _check_critical_indices_of_powers(ctx: _Context) -> Outcome:
    if ctx.lam <= 0:
        return None
    base = critical_indices(ctx.a.with_semiring(Semiring.MAX_TIMES), ctx.tol)
    for k in range(2, 5):
        powered = mat_power(ctx.a.with_semiring(Semiring.MAX_TIMES), k)
        if critical_indices(powered, ctx.tol) != base:
            return ctx.witness(f"critical indices of A^{k} differ from those of A")
    return None


def _check_spectrum_of_powers(ctx: _Context) -> Outcome:
    values = spectrum(ctx.a, ctx.sr, ctx.tol)
    for k in range(2, 9):
        powered = ctx.power(k)
        found = spectrum(powered, ctx.sr, ctx.tol)
        expected = tuple(rho ** k for rho in values)
        if len(found) != len(expected) or not ctx.check_tol.equal(found, expected):
            return ctx.witness(f"spectrum of A^{k} is not the k-th power of the spectrum")
        for rho in values:
            if spectral_index_set(powered, rho ** k, ctx.sr, ctx.tol) != \
                    spectral_index_set(ctx.a, rho, ctx.sr, ctx.tol):
                return ctx.witness(f"spectral index set of rho={rho:.6g} moved at power {k}")
    return None


def _check_boolean_layer(ctx: _Context) -> Outcome:
    g = digraph_of(ctx.a, ctx.tol)
    for nodes in components(g):
        if g.is_trivial(nodes):
            continue
        sub = g.restricted(nodes)
        structure = cyclicity_of_component(g, nodes)
        sigma = structure.sigma
        for k in range(1, 13):
            powered = graph_power(sub, k)
            pieces = [c for c in components(powered)
                      if set(c) <= set(nodes) and not powered.is_trivial(c)]
            if len(pieces) != math.gcd(k, sigma):
                return ctx.witness(f"power {k} of a class with cyclicity {sigma} "
                                   f"has {len(pieces)} components")
            for piece in pieces:
                covered = {t for t, members in enumerate(structure.cyclic_classes)
                           if set(members) & set(piece)}
                union = set().union(*(structure.cyclic_classes[t] for t in covered))
                if union != set(piece):
                    return ctx.witness(f"component of power {k} is not a union of cyclic classes")
        size = len(nodes)
        found = boolean_threshold(sub)
        if found.threshold > (size - 1) ** 2 + 1 or found.period != sigma:
            return ctx.witness(f"Boolean powers: threshold {found.threshold}, period {found.period}")
    return None


def _check_critical_thresholds(ctx: _Context) -> Outcome:
    if ctx.lam <= 0:
        return None
    found = critical_thresholds(ctx.a, ctx.tol)
    n = ctx.a.n
    if found.critical > n * n:
        return ctx.witness(f"critical threshold {found.critical} exceeds n^2")
    if found.critical < found.graph:
        return ctx.witness(f"critical threshold {found.critical} below graph threshold {found.graph}")
    return None


def _check_eigen_equation(ctx: _Context) -> Outcome:
    report = periods(ctx.a, ctx.sr, ctx.tol)
    for rho, sigma in report.sigma_rho:
        for k in range(1, sigma + 2):
            cone = eigencone_of_power(ctx.a, rho, k, ctx.sr, ctx.tol)
            for g in cone.generators:
                image = ctx.power(k).entries
                lhs = mat_mul(image, g, ctx.sr)
                if not ctx.check_tol.equal(lhs, (rho ** k) * g):
                    return ctx.witness(f"generator of V(A^{k}, rho^{k}) fails the eigen-equation",
                                       [g, lhs])
    return None


def _check_eigencone_periodicity(ctx: _Context) -> Outcome:
    report = periods(ctx.a, ctx.sr, ctx.tol)
    for rho, sigma in report.sigma_rho:
        cones = [eigencone_of_power(ctx.a, rho, k, ctx.sr, ctx.tol).generators
                 for k in range(1, 2 * sigma + 1)]

        def equal(x, y):
            return same_cone(x, y, ctx.sr, ctx.check_tol)

        for k in range(sigma):
            if not equal(cones[k], cones[k + sigma]):
                return ctx.witness(f"V(A^{k + 1}) and V(A^{k + 1 + sigma}) differ at rho={rho:.6g}")
            if not cone_contains(cones[sigma - 1], cones[k], ctx.sr, ctx.check_tol):
                return ctx.witness(f"V(A^{k + 1}) not inside V(A^{sigma}) at rho={rho:.6g}")
        if detect_period(cones, equal=equal).period != sigma:
            return ctx.witness(f"eigencone sequence at rho={rho:.6g} has a period other than {sigma}")
    return None


def _check_lattice(ctx: _Context) -> Outcome:
    sigma = ctx.core.sigma_lambda
    if ctx.core.is_zero:
        return None
    for k in range(1, LATTICE_MAX + 1):
        for l in range(1, LATTICE_MAX + 1):
            inside = cone_contains(ctx.sum_cone(l).generators, ctx.sum_cone(k).generators,
                                   ctx.sr, ctx.check_tol)
            divides = math.gcd(l, sigma) % math.gcd(k, sigma) == 0
            if inside != divides:
                return ctx.witness(f"V(A^{k}) inside V(A^{l}) is {inside}, gcd divisibility is {divides}")
    return None


def _check_core_oracle(ctx: _Context) -> Outcome:
    brute = brute_core(ctx.a, ctx.sr, ctx.horizon, ctx.check_tol, ctx.probes, ctx.seed)
    core = list(ctx.core.extremals)
    if ctx.sr is Semiring.PLUS_TIMES:
        if not brute.converged:
            return ctx.witness("; ".join(brute.violations[:5]), core)
        return None
    if brute.converged:
        if not same_cone(list(brute.rays), core, ctx.sr, ctx.check_tol):
            return ctx.witness("iterated spans disagree with the core", list(brute.rays) + core)
        return None
    frames, _ = normalized_powers(ctx.a.entries, np.eye(ctx.a.n), brute.horizon, ctx.sr)
    if not cone_contains(_columns(frames[-1]), core, ctx.sr, ctx.check_tol):
        return ctx.witness("core is not inside the span at the horizon", core)
    return None


def _check_core_in_spans(ctx: _Context) -> Outcome:
    frames, _ = normalized_powers(ctx.a.entries, np.eye(ctx.a.n), 2 * ctx.a.n, ctx.sr)
    previous = None
    for t, frame in enumerate(frames, start=1):
        span = _columns(frame)
        for g in ctx.core.extremals:
            if not is_inside(span, g, ctx.sr, ctx.check_tol):
                return ctx.witness(f"core extremal outside span(A^{t})", [g])
        if previous is not None and not cone_contains(previous, span, ctx.sr, ctx.check_tol):
            return ctx.witness(f"span(A^{t}) is not inside span(A^{t - 1})")
        previous = span
    return None


def _check_core_cardinality(ctx: _Context) -> Outcome:
    if ctx.core.census > ctx.a.n:
        return ctx.witness(f"core has {ctx.core.census} extremals for n={ctx.a.n}")
    return None


def _check_orbits(ctx: _Context) -> Outcome:
    core = ctx.core
    if sorted(core.successors) != list(range(core.census)):
        return ctx.witness("successor map is not a permutation")
    for orbit in core.orbits:
        if len(orbit) != orbit.sigma:
            return ctx.witness(f"orbit of length {len(orbit)} for cyclicity {orbit.sigma}")
        powered = ctx.power(orbit.sigma)
        for index in orbit.members:
            g = core.extremals[index]
            image = normalize(mat_vec(powered, g), ctx.check_tol)
            if not proportional(image, g, ctx.check_tol.match_eps, ctx.check_tol.abs_eps):
                return ctx.witness("A^sigma does not fix an extremal ray", [g])
    return None


def _expected_census(ctx: _Context) -> int:
    a = ctx.a
    g = digraph_of(a, ctx.tol)
    total = 0
    for rho in spectrum(a, ctx.sr, ctx.tol):
        reduction = rho_reduction(a, rho, ctx.sr, ctx.tol)
        if ctx.sr is Semiring.PLUS_TIMES:
            total += sum(cyclicity_of_component(g, reduction.fnf.classes[c]).sigma
                         for c in reduction.spectral_ids)
        else:
            total += sum(c.sigma for c in critical_graph(reduction.a_rho, ctx.tol).components)
    return total


def _check_census(ctx: _Context) -> Outcome:
    expected = _expected_census(ctx)
    if ctx.core.census != expected:
        return ctx.witness(f"census {ctx.core.census}, sum of cyclicities {expected}")
    return None


CHECKS: Tuple[Tuple[str, Callable[[_Context], Outcome]], ...] = (
    ("tolerance_self_test", _check_tolerance_self_test),
    ("power_additivity", _check_power_additivity),
    ("booleanize_powers", _check_booleanize_powers),
    ("kleene_star", _check_kleene_star),
    ("critical_powers", _check_critical_powers),
    ("scaling_invariance", _check_scaling_invariance),
    ("critical_indices_of_powers", _check_critical_indices_of_powers),
    ("spectrum_of_powers", _check_spectrum_of_powers),
    ("boolean_layer", _check_boolean_layer),
    ("critical_thresholds", _check_critical_thresholds),
    ("eigen_equation", _check_eigen_equation),
    ("eigencone_periodicity", _check_eigencone_periodicity),
    ("lattice", _check_lattice),
    ("core_oracle", _check_core_oracle),
    ("core_in_spans", _check_core_in_spans),
    ("core_cardinality", _check_core_cardinality),
    ("orbits", _check_orbits),
    ("census", _check_census),
)


def verify_bundle(
    a: Matrix,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    check_tol: Tolerance = ORACLE_TOLERANCE,
    horizon: Optional[int] = None,
    probes: int = PROBE_COUNT,
    seed: int = 0,
    instance: str = "",
    only: Optional[Sequence[str]] = None,
) -> OracleReport:
    """Run every invariant check on A; failures become report entries"""
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    a = a.with_semiring(sr)
    instance = instance or f"n={a.n}"
    ctx = _Context(a, sr, tol, check_tol, horizon, probes, seed)
    sigma = periods(a, sr).sigma_lambda
    report = OracleReport(
        algebra=sr.value,
        horizon=max(horizon or default_horizon(a.n, sigma), sigma + 1),
        seed=seed,
    )
    for name, check in CHECKS:
        if only is not None and name not in only:
            continue
        try:
            witness = check(ctx)
        except Exception as exc:
            detail = getattr(exc, "message", str(exc))
            witness = ctx.witness(f"{type(exc).__name__}: {detail}")
        passed = witness is None
        if not passed:
            logger.warning("check %s failed on %s: %s", name, instance, witness["detail"])
        report.checks.append(OracleCheck(name=name, instance=instance, passed=passed, witness=witness))
    return report
