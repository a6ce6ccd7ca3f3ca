"""Pure-jump strict local martingales: measures, Riccati flows, simulation.

The package studies S = exp(X) - 1 for a self-exciting affine jump
process X.  Submodules: measure (jump measures and their moments),
riccati (the scalar Riccati flow and the strict/true classification),
simulate (event-driven exact path simulation), montecarlo (verification
experiments), cli (command-line front end).
"""

from . import errors, measure, montecarlo, riccati, simulate
from .measure import LevyMeasureSpec, reference_spec, spec_from_json, spec_to_json
from .riccati import classify, martingale_defect, minimal_solution, solve
from .simulate import EngineConfig, Path, simulate_explosive_path, simulate_path

__version__ = "0.1.0"

__all__ = [
    "errors",
    "measure",
    "riccati",
    "simulate",
    "montecarlo",
    "LevyMeasureSpec",
    "reference_spec",
    "spec_from_json",
    "spec_to_json",
    "classify",
    "solve",
    "minimal_solution",
    "martingale_defect",
    "EngineConfig",
    "Path",
    "simulate_path",
    "simulate_explosive_path",
    "__version__",
]
