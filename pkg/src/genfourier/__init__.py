"""Numerical toolkit for the one-dimensional (k, 2/n)-generalized Fourier transform."""

from .atoms import Atom, AtomSum, gaussian
from .errors import (
    CapacityError,
    ConvergenceError,
    DataError,
    DivergenceError,
    DomainError,
    GenFourierError,
    PlanError,
)
from .kernel import kernel_matrix
from .measure import GridFunction, QuadratureGrid, build_grid, integrate, lp_norm
from .params import Params
from .transform import TransformPlan, default_plan, forward, inverse, make_plan

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "AtomSum",
    "gaussian",
    "Params",
    "kernel_matrix",
    "QuadratureGrid",
    "GridFunction",
    "build_grid",
    "integrate",
    "lp_norm",
    "TransformPlan",
    "make_plan",
    "default_plan",
    "forward",
    "inverse",
    "GenFourierError",
    "DomainError",
    "PlanError",
    "ConvergenceError",
    "DivergenceError",
    "DataError",
    "CapacityError",
]
