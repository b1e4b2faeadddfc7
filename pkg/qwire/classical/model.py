"""Pydantic models for Shor instances, measurements and factoring results.

This module defines the records exchanged by the classical pre- and
post-processing steps.
"""

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from qwire.enums import OutcomeStatus


class ShorInstance(BaseModel):
    """One factoring problem.

    Attributes:
        modulus: N, the integer to factor.
        co_prime: C, the base of the modular exponentiation.
        argument_width: n, bits of the argument register.
        function_width: m, bits of the function register.
    """

    modulus: int = Field(..., ge=2)
    co_prime: int
    argument_width: int = Field(..., ge=1)
    function_width: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_co_prime(self) -> "ShorInstance":
        if not 1 < self.co_prime < self.modulus or math.gcd(self.co_prime, self.modulus) != 1:
            raise ValueError(f"{self.co_prime} is not co-prime with {self.modulus}")
        return self

    @classmethod
    def standard(cls, modulus: int, co_prime: int) -> "ShorInstance":
        """Instance with the textbook widths n = 2 ceil(log2 N), m = ceil(log2 N)."""
        width = math.ceil(math.log2(modulus))
        return cls(modulus=modulus, co_prime=co_prime, argument_width=2 * width, function_width=width)


class MeasurementOutcome(BaseModel):
    """One readout of the argument register.

    Both bit lists are least significant first. The compiled circuit omits the
    inverse QFT, whose output order is reversed, so x0 ends up as the most
    significant bit of z.

    Attributes:
        raw_bits: Bits as measured, x0 first.
        reported_bits: raw_bits reversed.
    """

    raw_bits: tuple[int, ...]
    reported_bits: tuple[int, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_reversal(self) -> "MeasurementOutcome":
        if any(b not in (0, 1) for b in self.raw_bits):
            raise ValueError(f"bits must be 0 or 1, got {self.raw_bits}")
        if self.reported_bits != tuple(reversed(self.raw_bits)):
            raise ValueError("reported_bits must be the reversal of raw_bits")
        return self

    @classmethod
    def from_raw(cls, raw_bits: tuple[int, ...]) -> "MeasurementOutcome":
        """Build an outcome from bits listed x0 first."""
        return cls(raw_bits=tuple(raw_bits), reported_bits=tuple(reversed(raw_bits)))

    @computed_field
    @property
    def z(self) -> int:
        """Integer value of the reported bits."""
        return sum(bit << i for i, bit in enumerate(self.reported_bits))

    @computed_field
    @property
    def label(self) -> str:
        """Reported bitstring, most significant bit first."""
        return format(self.z, f"0{len(self.raw_bits)}b")


class FactorResult(BaseModel):
    """Classical post-processing result for one order candidate.

    Attributes:
        status: Success, failure or trivial factors.
        order: Order r, when one could be extracted.
        factors: Non-trivial factors sorted ascending, on success only.
    """

    status: OutcomeStatus
    order: Optional[int] = None
    factors: Optional[tuple[int, int]] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_factors(self) -> "FactorResult":
        if (self.status is OutcomeStatus.SUCCESS) != (self.factors is not None):
            raise ValueError("factors are present exactly on success")
        return self


class ClassifiedOutcome(BaseModel):
    """One row of an outcome classification table.

    Attributes:
        outcome: The argument-register readout.
        result: What post-processing makes of it.
    """

    outcome: MeasurementOutcome
    result: FactorResult

    model_config = ConfigDict(frozen=True)
