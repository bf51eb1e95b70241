"""
Settings Module

Numerical defaults and the library of shipped matrices.

Key Features:
- Defaults loaded from config/defaults.json into a validated Settings model
- TROPICORE_TOL environment override for the relative tolerance
- Cached loading of every JSON matrix under matrices/
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError

from .algebra import Matrix, Semiring, Tolerance
from .errors import InvalidMatrixError
from .report import MatrixFile

logger = logging.getLogger(__name__)

PACKAGE_DIR = Path(__file__).resolve().parent.parent
DEFAULTS_PATH = PACKAGE_DIR / "config" / "defaults.json"
MATRICES_DIR = PACKAGE_DIR / "matrices"
TOL_ENV = "TROPICORE_TOL"


class ToleranceSettings(BaseModel):
    rel_eps: float = Field(1e-9, gt=0)
    abs_eps: float = Field(1e-12, ge=0)
    match_eps: float = Field(1e-6, gt=0)

    def build(self) -> Tolerance:
        return Tolerance(rel_eps=self.rel_eps, abs_eps=self.abs_eps, match_eps=self.match_eps)


class Settings(BaseModel):
    tolerance: ToleranceSettings = ToleranceSettings()
    oracle_tolerance: ToleranceSettings = ToleranceSettings(rel_eps=1e-6, abs_eps=1e-9)
    golden_gate: float = Field(1e-3, gt=0)
    direct_solve_limit: int = Field(64, ge=1)
    probes: int = Field(200, ge=0)
    seed: int = 1

    def with_rel_eps(self, rel_eps: float) -> "Settings":
        tolerance = ToleranceSettings(**{**self.tolerance.model_dump(), "rel_eps": rel_eps})
        return self.model_copy(update={"tolerance": tolerance})


def load_settings(path: Optional[Path] = None) -> Settings:
    """Read the defaults file, then apply the environment override"""
    path = Path(path) if path else DEFAULTS_PATH
    try:
        settings = Settings.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        logger.warning("settings file %s not found; using built-in defaults", path)
        settings = Settings()

    override = os.environ.get(TOL_ENV)
    if override:
        try:
            settings = settings.with_rel_eps(float(override))
        except (ValueError, ValidationError):
            logger.warning("ignoring %s=%r: not a positive number", TOL_ENV, override)
    return settings


class MatrixLibrary:
    """Shipped matrices by name, loaded once and cached"""

    def __init__(self, matrices_dir: Optional[Path] = None):
        self.matrices_dir = Path(matrices_dir) if matrices_dir else MATRICES_DIR
        self.cache: Dict[str, MatrixFile] = {}
        self._load_all()

    def _load_all(self):
        for path in sorted(self.matrices_dir.glob("*.json")):
            try:
                self.cache[path.stem] = MatrixFile.model_validate_json(path.read_text(encoding="utf-8"))
            except (ValidationError, json.JSONDecodeError, OSError) as exc:
                logger.warning("skipping matrix file %s: %s", path.name, exc)

    def names(self) -> List[str]:
        return sorted(self.cache)

    def get_matrix(self, name: str, semiring: Semiring = Semiring.MAX_TIMES) -> Matrix:
        try:
            return self.cache[name].to_matrix(semiring)
        except KeyError:
            raise InvalidMatrixError(f"unknown matrix {name!r}; shipped: {', '.join(self.names())}")

    def reload(self):
        self.cache.clear()
        self._load_all()
