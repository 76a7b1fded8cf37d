"""Discrete Painleve equations as symplectic maps generated by discrete
Hamiltonians, with the complex dilogarithm and a verification harness."""

from .errors import (ChartSingular, ConstraintViolated, InapplicableCheck, LogSingular, PainleveError,
                     SamplingExhausted, SingularDenominator, StencilCrossesSingularity, UnsupportedFamily,
                     ZeroArgument, ZeroCoordinate)
from .hamiltonians import WValue, eval_W, grad_W, map_from_W
from .maps import StepResult, step
from .model import EquationSpec, Family, ParameterSet, PhasePoint, SurfaceType, make_spec
from .orbit import OrbitRecord, iterate
from .specialfn import FdConfig, fd_derivative, li2
from .verify import VerificationReport, run_check, sample_regular_points

__version__ = "0.1.0"

__all__ = [
    "ChartSingular", "ConstraintViolated", "InapplicableCheck", "LogSingular", "PainleveError",
    "SamplingExhausted", "SingularDenominator", "StencilCrossesSingularity", "UnsupportedFamily",
    "ZeroArgument", "ZeroCoordinate",
    "EquationSpec", "Family", "FdConfig", "OrbitRecord", "ParameterSet", "PhasePoint", "StepResult",
    "SurfaceType", "VerificationReport", "WValue", "eval_W", "fd_derivative", "grad_W", "iterate",
    "li2", "make_spec", "map_from_W", "run_check", "sample_regular_points", "step",
]
