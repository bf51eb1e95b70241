"""
Report Module

Pydantic schemas for matrix input files and analysis reports, and the
builder that runs an analysis and fills a report. Node and extremal indices
in reports are 1-based; vector entries carry 12 significant digits.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from .algebra import DEFAULT_TOLERANCE, Matrix, Semiring, Tolerance
from .core import classify_periodicity, compute_core
from .eigencones import DIRECT_SOLVE_LIMIT, Eigencone, eigencone_of_power, periods
from .errors import InvalidMatrixError, RhoNotInSpectrumError
from .oracle import OracleCheck, verify_bundle
from .spectral import critical_graph, max_cycle_mean, nearest_eigenvalue, spectral_classes, spectrum

logger = logging.getLogger(__name__)

REPORT_CHECKS = ("eigen_equation", "orbits", "census")


def sig(x: float) -> float:
    return float(f"{float(x):.12g}")


def sig_vector(v) -> List[float]:
    return [sig(x) for x in np.asarray(v, dtype=float)]


def one_based(nodes: Sequence[int]) -> List[int]:
    return [int(i) + 1 for i in nodes]


class MatrixFile(BaseModel):
    """Square matrix of finite nonnegative entries, row-major"""

    n: int
    entries: List[List[float]]
    name: Optional[str] = None
    description: Optional[str] = None

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixFile":
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must form a {self.n}x{self.n} array")
        values = np.asarray(self.entries, dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("entries must be finite and nonnegative")
        return self

    def to_matrix(self, semiring: Semiring = Semiring.MAX_TIMES) -> Matrix:
        return Matrix(np.asarray(self.entries, dtype=float), semiring)


def read_matrix(path: Path, semiring: Semiring = Semiring.MAX_TIMES) -> Matrix:
    """Parse a JSON matrix file or a CSV file of n rows of n values"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidMatrixError(f"cannot read {path}: {exc.strerror or exc}")
    if path.suffix.lower() == ".csv":
        rows = [line for line in text.splitlines() if line.strip()]
        try:
            entries = [[float(cell) for cell in row.split(",")] for row in rows]
        except ValueError as exc:
            raise InvalidMatrixError(f"{path.name}: {exc}")
        payload = {"n": len(entries), "entries": entries}
        try:
            return MatrixFile.model_validate(payload).to_matrix(semiring)
        except ValidationError as exc:
            raise InvalidMatrixError(f"{path.name}: {exc.errors()[0]['msg']}")
    try:
        return MatrixFile.model_validate_json(text).to_matrix(semiring)
    except ValidationError as exc:
        raise InvalidMatrixError(f"{path.name}: {exc.errors()[0]['msg']}")


class ClassEntry(BaseModel):
    id: int
    nodes: List[int]
    trivial: bool
    rho: float
    spectral: bool


class CriticalComponentEntry(BaseModel):
    nodes: List[int]
    sigma: int
    cyclic_classes: List[List[int]]


class CriticalGraphEntry(BaseModel):
    lam: float
    nodes: List[int]
    edges: List[List[int]]
    components: List[CriticalComponentEntry]


class PeriodEntry(BaseModel):
    rho: float
    sigma: int


class PeriodsEntry(BaseModel):
    sigma_rho: List[PeriodEntry]
    sigma_lambda: int


class GeneratorEntry(BaseModel):
    vector: List[float]
    ancestor: int
    ancestor_nodes: List[int]
    ancestor_sigma: int
    derived_nodes: List[int]
    cyclic_index: int


class EigenconeEntry(BaseModel):
    rho: float
    k: int
    generators: List[GeneratorEntry]


class OrbitEntry(BaseModel):
    rho: float
    ancestor: int
    sigma: int
    members: List[int]


class ColumnPeriodEntry(BaseModel):
    column: int
    threshold: Optional[int] = None
    period: Optional[int] = None
    growth: Optional[float] = None


class PeriodicityEntry(BaseModel):
    kind: str
    horizon: int
    stabilization_step: Optional[int] = None
    core_gap: float
    undetermined: bool
    columns: List[ColumnPeriodEntry]


class CoreEntry(BaseModel):
    sigma_lambda: int
    zero: bool
    extremals: List[List[float]]
    orbits: List[OrbitEntry]
    census: int
    periodicity: Optional[PeriodicityEntry] = None


class Report(BaseModel):
    algebra: str
    n: int
    spectrum: List[float]
    classes: List[ClassEntry]
    critical_graph: Optional[CriticalGraphEntry] = None
    periods: PeriodsEntry
    eigencones: List[EigenconeEntry]
    core: CoreEntry
    checks: List[OracleCheck]


class PairedReport(BaseModel):
    max: Report
    nonneg: Report


def _eigencone_entry(cone: Eigencone) -> EigenconeEntry:
    return EigenconeEntry(
        rho=sig(cone.rho),
        k=cone.k,
        generators=[
            GeneratorEntry(
                vector=sig_vector(g),
                ancestor=p.ancestor + 1,
                ancestor_nodes=one_based(p.ancestor_nodes),
                ancestor_sigma=p.ancestor_sigma,
                derived_nodes=one_based(p.derived_nodes),
                cyclic_index=p.cyclic_index,
            )
            for g, p in zip(cone.generators, cone.provenance)
        ],
    )


def _critical_entry(a: Matrix, tol: Tolerance) -> Optional[CriticalGraphEntry]:
    if max_cycle_mean(a, tol) <= 0:
        return None
    crit = critical_graph(a, tol)
    return CriticalGraphEntry(
        lam=sig(crit.lam),
        nodes=one_based(crit.nodes),
        edges=[one_based(e) for e in sorted(crit.edges)],
        components=[
            CriticalComponentEntry(
                nodes=one_based(c.nodes),
                sigma=c.sigma,
                cyclic_classes=[one_based(members) for members in c.cyclic_classes],
            )
            for c in crit.components
        ],
    )


def resolve_rho(values: Sequence[float], rho: float, gate: float) -> float:
    """Spectrum member matching a user-supplied eigenvalue printed to few digits"""
    found = nearest_eigenvalue(values, rho, gate)
    if found is None:
        raise RhoNotInSpectrumError(
            f"rho={rho:g} is not in the spectrum {[sig(v) for v in values]}",
            detail={"rho": rho},
        )
    return found


def build_report(
    a: Matrix,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
    power: int = 1,
    rho: Optional[float] = None,
    horizon: Optional[int] = None,
    gate: float = 1e-3,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> Report:
    """Full analysis of A in one algebra"""
    a = a.with_semiring(sr)
    infos = spectral_classes(a, sr, tol)
    values = spectrum(a, sr, tol, infos=infos)
    chosen = [resolve_rho(values, rho, gate)] if rho is not None else list(values)
    logger.debug("analysing n=%d in %s algebra, spectrum=%s", a.n, sr.value, values)

    period_report = periods(a, sr, tol)
    cones = [eigencone_of_power(a, r, power, sr, tol, direct_limit) for r in chosen]
    core = compute_core(a, sr, tol, direct_limit)

    periodicity = None
    if sr is Semiring.MAX_TIMES:
        found = classify_periodicity(a, tol, horizon=horizon, core=core)
        periodicity = PeriodicityEntry(
            kind=found.kind.value,
            horizon=found.horizon,
            stabilization_step=found.stabilization_step,
            core_gap=sig(found.core_gap),
            undetermined=found.undetermined,
            columns=[
                ColumnPeriodEntry(column=i + 1)
                if c is None
                else ColumnPeriodEntry(column=i + 1, threshold=c.threshold,
                                       period=c.period, growth=sig(c.growth))
                for i, c in enumerate(found.columns)
            ],
        )

    checks = verify_bundle(a, sr, tol=tol, only=REPORT_CHECKS, instance="input").checks
    return Report(
        algebra=sr.value,
        n=a.n,
        spectrum=[sig(v) for v in values],
        classes=[
            ClassEntry(id=info.class_id + 1, nodes=one_based(info.nodes), trivial=info.trivial,
                       rho=sig(info.rho(sr)), spectral=info.is_spectral(sr))
            for info in infos
        ],
        critical_graph=_critical_entry(a, tol) if sr is Semiring.MAX_TIMES else None,
        periods=PeriodsEntry(
            sigma_rho=[PeriodEntry(rho=sig(r), sigma=s) for r, s in period_report.sigma_rho],
            sigma_lambda=period_report.sigma_lambda,
        ),
        eigencones=[_eigencone_entry(c) for c in cones],
        core=CoreEntry(
            sigma_lambda=core.sigma_lambda,
            zero=core.is_zero,
            extremals=[sig_vector(g) for g in core.extremals],
            orbits=[
                OrbitEntry(rho=sig(o.rho), ancestor=o.ancestor + 1, sigma=o.sigma,
                           members=one_based(o.members))
                for o in core.orbits
            ],
            census=core.census,
            periodicity=periodicity,
        ),
        checks=checks,
    )
