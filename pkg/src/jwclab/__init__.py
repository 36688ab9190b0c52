"""Numerical checks of boundary behaviour of holomorphic generators on the unit ball of C^n."""

from .ball_geometry import DimensionError, DomainError, InvalidParameters, KoranyiRegion
from .curves import Curve, classify
from .flow import FlowError, FlowTrajectory, integrate
from .generators import AdmissibleParams13, Generator, builtin, example_1_2, example_1_3
from .limits import LimitEstimate

__version__ = "0.1.0"

__all__ = [
    "AdmissibleParams13",
    "Curve",
    "DimensionError",
    "DomainError",
    "FlowError",
    "FlowTrajectory",
    "Generator",
    "InvalidParameters",
    "KoranyiRegion",
    "LimitEstimate",
    "builtin",
    "classify",
    "example_1_2",
    "example_1_3",
    "integrate",
]
