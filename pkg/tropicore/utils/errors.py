"""
Error types raised by the analysis engine.

Every error carries the exit code the command-line front end reports for it,
so the CLI can map failures without inspecting messages.
"""

from typing import Any, Dict, Optional, Tuple


class TropicoreError(Exception):
    """Base class for all library errors"""

    exit_code = 7

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class InvalidMatrixError(TropicoreError):
    """Matrix input is not a finite nonnegative square array"""

    exit_code = 3


class DimensionMismatchError(TropicoreError):
    exit_code = 3


class SpectralBlowUpError(TropicoreError):
    exit_code = 6

    def __init__(self, message: str = "spectral blow-up; rescale input", **kwargs):
        super().__init__(message, **kwargs)


class NotSubUnitizedError(TropicoreError):
    def __init__(
        self,
        message: str = "matrix not sub-unitized; apply visualization scaling first",
        **kwargs,
    ):
        super().__init__(message, **kwargs)


class NotStronglyConnectedError(TropicoreError):
    pass


class NoCriticalGraphError(TropicoreError):
    def __init__(self, message: str = "no critical graph (nilpotent pattern)", **kwargs):
        super().__init__(message, **kwargs)


class DivergentKleeneStarError(TropicoreError):
    exit_code = 5

    def __init__(self, message: str = "Kleene star diverges; pass A/λ(A)", **kwargs):
        super().__init__(message, **kwargs)


class VisualizationError(TropicoreError):
    """Strict visualization failed its post-hoc verification"""

    def __init__(self, message: str, edge: Tuple[int, int]):
        super().__init__(message, detail={"edge": list(edge)})
        self.edge = edge


class RhoNotInSpectrumError(TropicoreError):
    exit_code = 4


class PreconditionError(TropicoreError):
    pass


class OrbitClosureError(TropicoreError):
    """An extremal's image matched no extremal; indicates a tolerance breach"""


class CoreMembershipError(TropicoreError):
    pass


class UnsupportedAlgebraError(TropicoreError):
    pass


class PeriodUndeterminedError(TropicoreError):
    def __init__(self, message: str = "undetermined", **kwargs):
        super().__init__(message, **kwargs)


class ProvenanceError(TropicoreError):
    """A class of A^k lies inside no class of A; indicates a tolerance breach"""
