"""Classical pre- and post-processing of Shor's algorithm.

This module contains the integer arithmetic around the quantum subroutine:
co-prime selection, modular exponentiation, order extraction from a
measurement and Euclid post-processing.
"""

import logging
import math
from typing import Mapping, Sequence

import pandas as pd

from qwire.enums import OutcomeStatus

from .exceptions import InvalidModulusError, NonCompiledInstanceError, NotCoprimeError
from .model import ClassifiedOutcome, FactorResult, MeasurementOutcome, ShorInstance

logger = logging.getLogger(__name__)

COMPILED_MODULUS = 15
# Argument qubits the compiled networks actually superpose; the others stay |0>.
ACTIVE_ARGUMENTS: dict[int, tuple[str, ...]] = {11: ("x0",), 2: ("x1", "x0")}
FUNCTION_WIDTHS: dict[int, int] = {11: 4, 2: 2}
TABLE1_EXPONENTS = (0, 1, 2, 4)


def mod_exp(co_prime: int, exponent: int, modulus: int) -> int:
    """C**x mod N by repeated squaring.

    Args:
        co_prime: Base C.
        exponent: Exponent x, non-negative.
        modulus: N, at least 2.

    Returns:
        C**x mod N.

    Raises:
        InvalidModulusError: If N < 2.
        ValueError: If x is negative.
    """
    if modulus < 2:
        raise InvalidModulusError(modulus)
    if exponent < 0:
        raise ValueError(f"exponent must be non-negative, got {exponent}")
    result, base = 1, co_prime % modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result % modulus


def coprimes(modulus: int) -> list[int]:
    """All 1 < C < N with gcd(C, N) = 1, ascending."""
    if modulus < 2:
        raise InvalidModulusError(modulus)
    return [c for c in range(2, modulus) if math.gcd(c, modulus) == 1]


def make_instance(modulus: int, co_prime: int) -> ShorInstance:
    """Standard-width instance after checking the base.

    Raises:
        InvalidModulusError: If N < 2.
        NotCoprimeError: If C is not a valid base for N.
    """
    if modulus < 2:
        raise InvalidModulusError(modulus)
    if co_prime not in coprimes(modulus):
        raise NotCoprimeError(modulus, co_prime)
    return ShorInstance.standard(modulus, co_prime)


def compiled_instance(co_prime: int) -> ShorInstance:
    """One of the two compiled N=15 instances, with their reduced widths.

    Raises:
        NonCompiledInstanceError: For any co-prime other than 11 or 2.
    """
    if co_prime not in FUNCTION_WIDTHS:
        raise NonCompiledInstanceError(COMPILED_MODULUS, co_prime)
    return ShorInstance(
        modulus=COMPILED_MODULUS,
        co_prime=co_prime,
        argument_width=2,
        function_width=FUNCTION_WIDTHS[co_prime],
    )


def order_from_measurement(z: int, width: int) -> int | None:
    """Order candidate from a measured z = a 2**n / r.

    Args:
        z: Reported measurement value, 0 <= z < 2**n.
        width: n, argument-register width.

    Returns:
        r = 2**n / gcd(z, 2**n), or None when z = 0.
    """
    size = 2**width
    if not 0 <= z < size:
        raise ValueError(f"z={z} outside [0, {size})")
    if z == 0:
        return None
    return size // math.gcd(z, size)


def factors_from_order(co_prime: int, order: int, modulus: int) -> FactorResult:
    """Euclid post-processing of an order candidate.

    Args:
        co_prime: Base C.
        order: Order candidate r >= 1.
        modulus: N.

    Returns:
        Failure for odd r, trivial when either gcd of C**(r/2) -+ 1 with N
        is 1 or N, success otherwise with the two gcds as sorted factors.
        For even N both gcds can carry a factor 2; the second factor is then
        N divided by the first.
    """
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    if order % 2:
        return FactorResult(status=OutcomeStatus.FAILURE, order=order)
    half = mod_exp(co_prime, order // 2, modulus)
    minus = math.gcd(half - 1, modulus)
    plus = math.gcd(half + 1, modulus)
    if minus in (1, modulus) or plus in (1, modulus):
        return FactorResult(status=OutcomeStatus.TRIVIAL, order=order)
    if minus * plus != modulus:
        plus = modulus // minus
    factors = tuple(sorted((minus, plus)))
    return FactorResult(status=OutcomeStatus.SUCCESS, order=order, factors=factors)


def classify_outcome(instance: ShorInstance, outcome: MeasurementOutcome) -> FactorResult:
    """Post-process one argument-register readout."""
    order = order_from_measurement(outcome.z, instance.argument_width)
    if order is None:
        return FactorResult(status=OutcomeStatus.FAILURE)
    return factors_from_order(instance.co_prime, order, instance.modulus)


def reachable_outcomes(instance: ShorInstance) -> list[MeasurementOutcome]:
    """Readouts the compiled network can produce, ordered by reported label."""
    active = ACTIVE_ARGUMENTS.get(instance.co_prime)
    if instance.modulus != COMPILED_MODULUS or active is None:
        raise NonCompiledInstanceError(instance.modulus, instance.co_prime)
    outcomes = []
    for value in range(2**instance.argument_width):
        raw = tuple((value >> i) & 1 for i in range(instance.argument_width))
        if any(bit and f"x{i}" not in active for i, bit in enumerate(raw)):
            continue
        outcomes.append(MeasurementOutcome.from_raw(raw))
    return sorted(outcomes, key=lambda o: o.label)


def classify_outcomes(instance: ShorInstance) -> list[ClassifiedOutcome]:
    """Classification table of every reachable readout of a compiled instance.

    Raises:
        NonCompiledInstanceError: If the instance is not C=11 or C=2 with N=15.
    """
    table = [
        ClassifiedOutcome(outcome=outcome, result=classify_outcome(instance, outcome))
        for outcome in reachable_outcomes(instance)
    ]
    logger.debug("Classified %d outcomes for C=%d", len(table), instance.co_prime)
    return table


def argument_outcomes(
    probabilities: Mapping[str, float], labels: Sequence[str], width: int = 2
) -> dict[str, float]:
    """Turn logical probabilities of measured argument qubits into reported outcomes.

    Args:
        probabilities: Bitstring probabilities over ``labels``, first label
            most significant.
        labels: Argument-qubit names such as ("x1", "x0"). Qubits of the
            width-bit register absent from ``labels`` read 0.
        width: Argument-register width n.

    Returns:
        Probabilities keyed by reported label, sorted by label.
    """
    reported: dict[str, float] = {}
    for bits, probability in probabilities.items():
        values = dict(zip(labels, (int(b) for b in bits)))
        raw = tuple(values.get(f"x{i}", 0) for i in range(width))
        label = MeasurementOutcome.from_raw(raw).label
        reported[label] = reported.get(label, 0.0) + probability
    return dict(sorted(reported.items()))


def table1(modulus: int = COMPILED_MODULUS, exponents: Sequence[int] = TABLE1_EXPONENTS) -> pd.DataFrame:
    """C**x mod N for every co-prime C (columns) and exponent x (rows)."""
    frame = pd.DataFrame(
        [[mod_exp(c, x, modulus) for c in coprimes(modulus)] for x in exponents],
        index=pd.Index(list(exponents), name="x"),
        columns=pd.Index(coprimes(modulus), name="C"),
    )
    return frame
