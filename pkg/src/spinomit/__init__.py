"""Second-order sidebands of a spinning optomechanical resonator with an OPA."""

__version__ = "0.1.0"

from .errors import (
    AboveThreshold, BlowUp, ConfigError, InvalidParams, MultipleRoots, NoConvergence, NonPeriodic,
    PhaseWrap, SingularSystem, SpinOmitError, StepUnderflow, UndefinedEfficiency, UnknownPreset,
)
from .model import (
    CONSTANTS, DerivedParams, Markovian, NonMarkovian, PhysParams, PumpMode, derive, paper_default,
    sagnac_shift,
)
from .observables import (
    Efficiencies, GroupDelay, OutputSpectrum, efficiencies, group_delay, omit_linewidth, output_spectrum,
)
from .sidebands import SidebandSolution, solve_sidebands, susceptibilities
from .steadystate import Regime, SteadyState, solve_steady
from .sweep import Axis, SweepSpec, run_sweep
from .presets import figure_preset
