"""Independent time-domain check of the perturbative solvers."""
from .core import (
    HarmonicExtract,
    OdeState,
    OracleControls,
    Trajectory,
    extract_harmonics,
    integrate,
    run_oracle,
)
from .compare import arbitrate, compare_point, equivalence_grid

__all__ = [
    "HarmonicExtract", "OdeState", "OracleControls", "Trajectory",
    "extract_harmonics", "integrate", "run_oracle",
    "arbitrate", "compare_point", "equivalence_grid",
]
