"""
Core Module

The core of a nonnegative matrix (intersection of the column spans of all its
powers) in max algebra and in nonnegative linear algebra.

Key Features:
- Core as the sum of eigencones of A^sigma_Lambda
- Extremal rays grouped into orbits under the action of A
- Action of A on core vectors
- Periodicity class of max-algebraic powers with a finite stabilization probe
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    DEFAULT_TOLERANCE,
    Matrix,
    Semiring,
    Tolerance,
    is_inside,
    mat_mul,
    mat_vec,
    max_projection,
    normalize,
    proportional,
    same_cone,
)
from .eigencones import DIRECT_SOLVE_LIMIT, Provenance, periods, sum_eigencone
from .errors import (
    CoreMembershipError,
    OrbitClosureError,
    PeriodUndeterminedError,
    UnsupportedAlgebraError,
)
from .graphs import frobenius_form
from .periodicity import PeriodResult, detect_period
from .spectral import max_cycle_mean, spectral_classes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Orbit:
    """Extremal indices in the order A visits them"""

    rho: float
    ancestor: int
    sigma: int
    members: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CoreDescription:
    semiring: Semiring
    sigma_lambda: int
    extremals: Tuple[np.ndarray, ...]
    provenance: Tuple[Provenance, ...]
    orbits: Tuple[Orbit, ...]
    successors: Tuple[int, ...]

    @property
    def census(self) -> int:
        return len(self.extremals)

    @property
    def is_zero(self) -> bool:
        return not self.extremals


def _successor_map(a: Matrix, extremals: Sequence[np.ndarray], tol: Tolerance) -> List[int]:
    successors = []
    for index, g in enumerate(extremals):
        image = normalize(mat_vec(a, g), tol)
        match = next(
            (j for j, h in enumerate(extremals)
             if image.any() and proportional(image, h, tol.match_eps, tol.abs_eps)),
            None,
        )
        if match is None:
            raise OrbitClosureError(
                f"image of extremal {index + 1} is not proportional to any extremal",
                detail={"extremal": g.tolist(), "image": image.tolist()},
            )
        successors.append(match)
    if len(set(successors)) != len(successors):
        raise OrbitClosureError("action of A on extremal rays is not a permutation",
                                detail={"successors": successors})
    return successors


def _orbits(successors: Sequence[int], provenance: Sequence[Provenance]) -> Tuple[Orbit, ...]:
    seen = set()
    orbits = []
    for start in range(len(successors)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = successors[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = successors[nxt]
        origin = provenance[start]
        orbits.append(Orbit(origin.rho, origin.ancestor, origin.ancestor_sigma, tuple(cycle)))
    return tuple(orbits)


def compute_core(
    a: Matrix,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> CoreDescription:
    """Core of A as the sum of eigencones of A^sigma_Lambda, with extremal orbits"""
    sr = Semiring.PLUS_TIMES if sr is Semiring.PLUS_TIMES else Semiring.MAX_TIMES
    a = a.with_semiring(sr)
    report = periods(a, sr, tol)
    if not report.sigma_rho:
        logger.debug("empty spectrum; core is the zero cone")
        return CoreDescription(sr, 1, (), (), (), ())

    cone = sum_eigencone(a, report.sigma_lambda, sr, tol, direct_limit)
    extremals = tuple(cone.generators)
    provenance = tuple(cone.provenance)
    successors = _successor_map(a, extremals, tol)
    orbits = _orbits(successors, provenance)
    logger.debug("core: sigma_Lambda=%d census=%d orbits=%s",
                 report.sigma_lambda, len(extremals), [len(o) for o in orbits])
    return CoreDescription(sr, report.sigma_lambda, extremals, provenance, orbits, tuple(successors))


def act(a: Matrix, core: CoreDescription, v, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """A applied to a core vector"""
    v = np.asarray(v, dtype=float)
    if not is_inside(list(core.extremals), v, core.semiring, tol):
        raise CoreMembershipError("vector is not in the core", detail={"vector": v.tolist()})
    return mat_vec(a.with_semiring(core.semiring), v)


class PeriodicityClass(str, Enum):
    IRREDUCIBLE = "Irreducible"
    ULTIMATELY_PERIODIC = "UltimatelyPeriodic"
    ORBIT_PERIODIC_CANDIDATE = "OrbitPeriodic-candidate"
    COLUMN_PERIODIC = "ColumnPeriodic"
    GENERAL = "General"


@dataclass(frozen=True)
class ColumnPeriod:
    threshold: int
    period: int
    growth: float


@dataclass(frozen=True)
class PeriodicityReport:
    kind: PeriodicityClass
    horizon: int
    columns: Tuple[Optional[ColumnPeriod], ...]
    stabilization_step: Optional[int]
    core_gap: float
    undetermined: bool
    probes: Tuple[Optional[ColumnPeriod], ...] = field(default=())


def default_horizon(n: int, sigma: int = 1) -> int:
    return max(4 * n * n + 8, 2 * sigma * (n * n + 1))


def normalized_powers(
    a: np.ndarray,
    start: np.ndarray,
    horizon: int,
    sr: Semiring = Semiring.MAX_TIMES,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """Normalized columns of A^t start for t = 1..horizon with their log scales"""
    state = start.copy()
    logscale = np.zeros(start.shape[1])
    frames, scales = [], []
    for _ in range(horizon):
        state = mat_mul(a, state, sr)
        top = state.max(axis=0)
        positive = top > 0
        state[:, positive] /= top[positive]
        logscale[positive] += np.log(top[positive])
        frames.append(state.copy())
        scales.append(logscale.copy())
    return frames, np.array(scales)


def _column_period(
    frames: Sequence[np.ndarray],
    scales: np.ndarray,
    column: int,
    tol: Tolerance,
) -> Optional[ColumnPeriod]:
    sequence = [frame[:, column] for frame in frames]
    try:
        found: PeriodResult = detect_period(sequence, equal=tol.equal)
    except PeriodUndeterminedError:
        return None
    if not sequence[-1].any():
        return ColumnPeriod(found.threshold, found.period, 0.0)
    p = found.period
    steps = scales[found.threshold - 1 + p:, column] - scales[found.threshold - 1:-p, column]
    if steps.size and steps.max() - steps.min() > tol.match_eps * max(1.0, abs(steps).max()):
        return None
    return ColumnPeriod(found.threshold, p, float(math.exp(steps.mean() / p)))


def span_stabilization(
    a: Matrix,
    core: CoreDescription,
    horizon: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Optional[int]:
    """First t at most horizon with span(A^t) equal to the core, if any"""
    strict = tol.strict()
    frames, _ = normalized_powers(a.entries, np.eye(a.n), horizon)
    extremals = list(core.extremals)
    for t, frame in enumerate(frames, start=1):
        columns = [frame[:, i] for i in range(a.n) if frame[:, i].any()]
        if same_cone(columns, extremals, Semiring.MAX_TIMES, strict):
            return t
    return None


def _core_gap(frame: np.ndarray, extremals: Sequence[np.ndarray], tol: Tolerance) -> float:
    gap = 0.0
    for i in range(frame.shape[1]):
        z = normalize(frame[:, i], tol)
        if not z.any():
            continue
        gap = max(gap, float(np.abs(z - max_projection(extremals, z, tol)).max()))
    return gap


def classify_periodicity(
    a: Matrix,
    tol: Tolerance = DEFAULT_TOLERANCE,
    horizon: Optional[int] = None,
    probes: Optional[Sequence[np.ndarray]] = None,
    core: Optional[CoreDescription] = None,
) -> PeriodicityReport:
    """Most specific periodicity class of the max-algebraic powers of A"""
    if a.semiring is Semiring.PLUS_TIMES:
        raise UnsupportedAlgebraError("periodicity classes are defined for max algebra only")
    a = a.with_semiring(Semiring.MAX_TIMES)
    core = core or compute_core(a, Semiring.MAX_TIMES, tol)
    horizon = horizon or default_horizon(a.n, core.sigma_lambda)
    strict = tol.strict()

    frames, scales = normalized_powers(a.entries, np.eye(a.n), horizon)
    columns = tuple(_column_period(frames, scales, i, strict) for i in range(a.n))
    column_periodic = all(c is not None for c in columns)

    probe_results: Tuple[Optional[ColumnPeriod], ...] = ()
    if probes:
        start = np.column_stack([np.asarray(p, dtype=float) for p in probes])
        probe_frames, probe_scales = normalized_powers(a.entries, start, horizon)
        probe_results = tuple(
            _column_period(probe_frames, probe_scales, j, strict) for j in range(start.shape[1])
        )

    stabilization = span_stabilization(a, core, horizon, tol)
    gap = 0.0 if stabilization else _core_gap(frames[-1], core.extremals, tol)

    fnf = frobenius_form(a, tol)
    lam = max_cycle_mean(a, tol)
    roots = [info.rho_max for info in spectral_classes(a, Semiring.MAX_TIMES, tol, fnf=fnf)
             if not info.trivial]
    if len(fnf.classes) == 1:
        kind = PeriodicityClass.IRREDUCIBLE
    elif all(abs(r - lam) <= tol.match_eps * lam for r in roots):
        kind = PeriodicityClass.ULTIMATELY_PERIODIC
    elif column_periodic and probe_results and all(r is not None for r in probe_results):
        kind = PeriodicityClass.ORBIT_PERIODIC_CANDIDATE
    elif column_periodic:
        kind = PeriodicityClass.COLUMN_PERIODIC
    else:
        kind = PeriodicityClass.GENERAL

    logger.debug("periodicity: %s, stabilized at %s, gap %.3g", kind.value, stabilization, gap)
    return PeriodicityReport(
        kind=kind,
        horizon=horizon,
        columns=columns,
        stabilization_step=stabilization,
        core_gap=gap,
        undetermined=not column_periodic,
        probes=probe_results,
    )
