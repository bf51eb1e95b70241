"""
Semiring Algebra Module

Dense matrix and vector arithmetic shared by every other part of the engine.
Works over three semirings: max-times, ordinary nonnegative (plus-times) and
Boolean.

Key Features:
- Validated immutable Matrix type tagged with its semiring
- Products and powers by repeated squaring
- Cone membership (residuation in max algebra, NNLS in nonnegative algebra)
- Extremal filtering of generating sets
- Booleanization of sub-unitized matrices and vectors
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from .errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    NotSubUnitizedError,
    PreconditionError,
    SpectralBlowUpError,
)

logger = logging.getLogger(__name__)

Vector = np.ndarray


class Semiring(str, Enum):
    """Active algebra of a matrix"""

    MAX_TIMES = "max"
    PLUS_TIMES = "nonneg"
    BOOLEAN = "boolean"

    @property
    def is_idempotent(self) -> bool:
        return self is not Semiring.PLUS_TIMES


class Membership(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Tolerance:
    """
    Floating comparison policy.

    x equals y iff |x - y| <= abs_eps + rel_eps * max(|x|, |y|).
    match_eps gates proportionality of numerically derived vectors.
    """

    rel_eps: float = 1e-9
    abs_eps: float = 1e-12
    match_eps: float = 1e-6

    def __post_init__(self):
        if not self.rel_eps > 0:
            raise PreconditionError(f"rel_eps must be positive, got {self.rel_eps}")
        if self.abs_eps < 0:
            raise PreconditionError(f"abs_eps must be nonnegative, got {self.abs_eps}")
        if not self.match_eps > 0:
            raise PreconditionError(f"match_eps must be positive, got {self.match_eps}")

    def close(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        scale = np.maximum(np.abs(x), np.abs(y))
        return np.abs(x - y) <= self.abs_eps + self.rel_eps * scale

    def equal(self, x, y) -> bool:
        return bool(np.all(self.close(x, y)))

    def strict(self) -> "Tolerance":
        """Same relative policy with no absolute floor"""
        return Tolerance(rel_eps=self.rel_eps, abs_eps=0.0, match_eps=self.match_eps)


DEFAULT_TOLERANCE = Tolerance()


def _as_array(entries) -> np.ndarray:
    try:
        array = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrixError(f"entries are not numeric: {exc}")
    return array


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense nonnegative square matrix tagged with its semiring"""

    entries: np.ndarray
    semiring: Semiring = Semiring.MAX_TIMES

    def __post_init__(self):
        array = _as_array(self.entries)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise InvalidMatrixError(f"matrix must be square, got shape {array.shape}")
        if array.shape[0] < 1:
            raise InvalidMatrixError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(array)):
            raise InvalidMatrixError("matrix entries must be finite")
        if np.any(array < 0):
            raise InvalidMatrixError("matrix entries must be nonnegative")
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)
        object.__setattr__(self, "semiring", Semiring(self.semiring))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def with_semiring(self, semiring: Semiring) -> "Matrix":
        return Matrix(self.entries, Semiring(semiring))

    def scaled(self, factor: float) -> "Matrix":
        return Matrix(self.entries * factor, self.semiring)

    def tolist(self) -> List[List[float]]:
        return self.entries.tolist()


def mat_mul(x: np.ndarray, y: np.ndarray, sr: Semiring) -> np.ndarray:
    """Product of two dense arrays in the given semiring"""
    if x.shape[-1] != y.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {x.shape} by {y.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        if sr is Semiring.PLUS_TIMES:
            return x @ y
        if y.ndim == 1:
            product = (x * y[None, :]).max(axis=1)
        else:
            product = (x[:, :, None] * y[None, :, :]).max(axis=1)
    if sr is Semiring.BOOLEAN:
        return (product > 0).astype(float)
    return product


def mat_vec(a: Matrix, v: Vector) -> Vector:
    v = np.asarray(v, dtype=float)
    if v.shape != (a.n,):
        raise DimensionMismatchError(f"vector of length {v.shape} does not fit n={a.n}")
    return mat_mul(a.entries, v, a.semiring)


def multiply(a: Matrix, b: Matrix) -> Matrix:
    if a.semiring is not b.semiring:
        raise PreconditionError("operands live in different semirings")
    return Matrix(_checked(mat_mul(a.entries, b.entries, a.semiring)), a.semiring)


def _checked(array: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(array)):
        raise SpectralBlowUpError()
    return array


def mat_power(a: Matrix, k: int) -> Matrix:
    """A^k in the matrix's semiring, by repeated squaring"""
    if k < 1:
        raise PreconditionError(f"power must be a positive integer, got {k}")
    result: Optional[np.ndarray] = None
    base = a.entries
    while k:
        if k & 1:
            result = base if result is None else _checked(mat_mul(result, base, a.semiring))
        k >>= 1
        if k:
            base = _checked(mat_mul(base, base, a.semiring))
    return Matrix(result, a.semiring)


def identity(n: int, semiring: Semiring = Semiring.MAX_TIMES) -> Matrix:
    return Matrix(np.eye(n), semiring)


def support(v: Vector, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[int, ...]:
    v = np.asarray(v, dtype=float)
    return tuple(int(i) for i in np.flatnonzero(v > tol.abs_eps))


def normalize(v: Vector, tol: Tolerance = DEFAULT_TOLERANCE) -> Vector:
    """Scale to max entry 1 and clear entries at or below the absolute floor"""
    v = np.asarray(v, dtype=float)
    top = float(v.max()) if v.size else 0.0
    if top <= tol.abs_eps:
        return np.zeros_like(v)
    scaled = v / top
    scaled[scaled <= tol.abs_eps] = 0.0
    return scaled


def proportional(u: Vector, v: Vector, eps: float, abs_eps: float = 0.0) -> bool:
    """True when u = c * v for some c > 0, judged by ratio spread on the common support"""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    su = u > abs_eps
    sv = v > abs_eps
    if not np.array_equal(su, sv):
        return False
    if not su.any():
        return True
    ratios = u[su] / v[su]
    return bool(ratios.max() <= ratios.min() * (1.0 + eps))


def _check_dimensions(gens: Sequence[Vector], z: Vector) -> int:
    n = len(z)
    for g in gens:
        if len(g) != n:
            raise DimensionMismatchError(
                f"generator of length {len(g)} does not match vector of length {n}"
            )
    return n


def max_projection(gens: Sequence[Vector], z: Vector, tol: Tolerance = DEFAULT_TOLERANCE) -> Vector:
    """Greatest max-combination of gens not exceeding z"""
    best = np.zeros_like(z)
    for g in gens:
        mask = g > tol.abs_eps
        if not mask.any():
            continue
        alpha = float(np.min(z[mask] / g[mask]))
        best = np.maximum(best, alpha * g)
    return best


def membership(
    gens: Sequence[Vector],
    z: Vector,
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Membership:
    """Decide whether z lies in the cone spanned by gens"""
    z = np.asarray(z, dtype=float)
    gens = [np.asarray(g, dtype=float) for g in gens]
    _check_dimensions(gens, z)

    if sr.is_idempotent:
        best = max_projection(gens, z, tol)
        return Membership.INSIDE if tol.equal(best, z) else Membership.OUTSIDE

    z_norm = float(np.abs(z).max()) if z.size else 0.0
    if not gens:
        return Membership.INSIDE if z_norm <= tol.abs_eps else Membership.OUTSIDE
    basis = np.column_stack(gens)
    try:
        coefficients, _ = nnls(basis, z, maxiter=50 * max(basis.shape))
    except RuntimeError as exc:
        logger.warning("nnls did not converge (%s); treating vector as outside", exc)
        return Membership.OUTSIDE
    residual = float(np.abs(basis @ coefficients - z).max())
    inside = residual <= tol.rel_eps * (1.0 + z_norm) + tol.abs_eps
    return Membership.INSIDE if inside else Membership.OUTSIDE


def is_inside(gens: Sequence[Vector], z: Vector, sr: Semiring, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return membership(gens, z, sr, tol) is Membership.INSIDE


def cone_contains(
    outer: Sequence[Vector],
    inner: Iterable[Vector],
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """span(inner) is a subset of span(outer)"""
    return all(is_inside(outer, z, sr, tol) for z in inner)


def same_cone(
    first: Sequence[Vector],
    second: Sequence[Vector],
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    return cone_contains(first, second, sr, tol) and cone_contains(second, first, sr, tol)


def extremal_filter(
    gens: Sequence[Vector],
    sr: Semiring,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> List[Vector]:
    """Normalized generators that are not in the span of the remaining ones"""
    unique: List[Vector] = []
    for g in gens:
        g = normalize(g, tol)
        if not g.any():
            continue
        if any(tol.equal(g, kept) for kept in unique):
            continue
        unique.append(g)

    extremals = []
    for index, g in enumerate(unique):
        others = unique[:index] + unique[index + 1:]
        if not is_inside(others, g, sr, tol):
            extremals.append(g)
    return extremals


def booleanize(a: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> Matrix:
    """Boolean pattern of the entries equal to 1 in a sub-unitized matrix"""
    return Matrix(booleanize_vector(a.entries, tol), Semiring.BOOLEAN)


def booleanize_vector(values: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.size and float(values.max()) > 1.0 + tol.rel_eps:
        raise NotSubUnitizedError(detail={"max_entry": float(values.max())})
    return (values >= 1.0 - tol.rel_eps).astype(float)
