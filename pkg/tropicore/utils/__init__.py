# Utils package
from .algebra import DEFAULT_TOLERANCE, Matrix, Semiring, Tolerance
from .settings import MatrixLibrary, load_settings
