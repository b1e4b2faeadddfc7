"""Classical business area module.

This module handles co-prime selection, modular exponentiation and the
post-processing that turns argument-register readouts into factors.
"""

from .exceptions import (
    ClassicalException,
    InvalidModulusError,
    NonCompiledInstanceError,
    NotCoprimeError,
)
from .model import ClassifiedOutcome, FactorResult, MeasurementOutcome, ShorInstance

__all__ = [
    "ShorInstance",
    "MeasurementOutcome",
    "FactorResult",
    "ClassifiedOutcome",
    "ClassicalException",
    "InvalidModulusError",
    "NotCoprimeError",
    "NonCompiledInstanceError",
]
