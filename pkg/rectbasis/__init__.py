"""Rotated-rectangle differentiation bases: constructions of counterexamples and
numerical verification of their inequalities"""

from rectbasis import angles, construct, geom, maximal, orlicz
from rectbasis.config_parser import ConfigParser
from rectbasis.errors import (
    CapacityError,
    ConfigError,
    InvalidFamilyError,
    InvalidInputError,
    InvalidSpecError,
    UnboundedConjugateError,
    UnsupportedInputError,
)
from rectbasis.report_writer import ReportWriter

__all__ = [
    "geom",
    "angles",
    "construct",
    "orlicz",
    "maximal",
    "ConfigParser",
    "ReportWriter",
    "InvalidInputError",
    "InvalidFamilyError",
    "CapacityError",
    "InvalidSpecError",
    "UnboundedConjugateError",
    "UnsupportedInputError",
    "ConfigError",
]
