"""morphoprint: grow layered 2D colonies into printable 3D forms and evolve them."""

from .colony import AblationFlags, Colony, grow, init_colony
from .fitness import FitnessParams, FitnessReport, evaluate
from .genome import Genome, SearchBox, DEFAULT_SEARCH_BOX
from .history import FormHistory
from .params import SimParams

__version__ = "0.1.0"

__all__ = [
    "AblationFlags",
    "Colony",
    "DEFAULT_SEARCH_BOX",
    "FitnessParams",
    "FitnessReport",
    "FormHistory",
    "Genome",
    "SearchBox",
    "SimParams",
    "evaluate",
    "grow",
    "init_colony",
    "__version__",
]
