import sys
from pathlib import Path

import numpy as np
import pytest


ROOT_DIR = Path(__file__).resolve().parent
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from tropicore.utils.algebra import DEFAULT_TOLERANCE, Semiring  # noqa: E402
from tropicore.utils.settings import MatrixLibrary  # noqa: E402


@pytest.fixture(scope="session")
def library():
    """Shipped golden matrices."""
    return MatrixLibrary()


@pytest.fixture
def example1(library):
    return library.get_matrix("example1", Semiring.MAX_TIMES)


@pytest.fixture
def example2(library):
    return library.get_matrix("example2", Semiring.MAX_TIMES)


@pytest.fixture
def example2_plus(library):
    return library.get_matrix("example2", Semiring.PLUS_TIMES)


@pytest.fixture
def nilpotent(library):
    return library.get_matrix("nilpotent", Semiring.MAX_TIMES)


@pytest.fixture
def tol():
    return DEFAULT_TOLERANCE


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
