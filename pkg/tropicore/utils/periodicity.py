"""
Ultimate periodicity of finite sequences.

Used for Boolean graph powers, rows and columns of max-algebraic powers and
eigencone generator sets.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import PeriodUndeterminedError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeriodResult:
    """Sequence repeats with the given period from the 1-based position threshold on"""

    threshold: int
    period: int


def _default_equal(x: Any, y: Any) -> bool:
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return bool(np.array_equal(x, y))
    return x == y


def detect_period(
    seq: Sequence[Any],
    equal: Optional[Callable[[Any, Any], bool]] = None,
) -> PeriodResult:
    """
    Least period p, then least threshold T, with seq[k + p] = seq[k] for every
    k >= T inside the window. At least two full periods must follow T.
    """
    equal = equal or _default_equal
    length = len(seq)
    for p in range(1, length // 2 + 1):
        last_mismatch = -1
        for i in range(length - p - 1, -1, -1):
            if not equal(seq[i], seq[i + p]):
                last_mismatch = i
                break
        threshold = last_mismatch + 2
        if length - (threshold - 1) >= 2 * p:
            logger.debug("period %d from position %d in a window of %d", p, threshold, length)
            return PeriodResult(threshold, p)
    raise PeriodUndeterminedError(detail={"window": length})
