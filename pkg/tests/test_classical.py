import math

import pytest
from pydantic import ValidationError

from qwire.classical import (
    FactorResult,
    InvalidModulusError,
    MeasurementOutcome,
    NonCompiledInstanceError,
    NotCoprimeError,
    ShorInstance,
)
from qwire.classical.service import (
    argument_outcomes,
    classify_outcomes,
    compiled_instance,
    coprimes,
    factors_from_order,
    make_instance,
    mod_exp,
    order_from_measurement,
    reachable_outcomes,
    table1,
)
from qwire.enums import OutcomeStatus


@pytest.mark.parametrize("base,exponent,modulus", [(2, 4, 15), (7, 2, 15), (13, 11, 15), (3, 0, 7), (5, 117, 221)])
def test_mod_exp_matches_pow(base, exponent, modulus):
    assert mod_exp(base, exponent, modulus) == pow(base, exponent, modulus)


def test_coprimes_of_15():
    assert coprimes(15) == [2, 4, 7, 8, 11, 13, 14]


def test_table1_values():
    frame = table1()
    assert list(frame.index) == [0, 1, 2, 4]
    expected = {
        2: [1, 2, 4, 1],
        4: [1, 4, 1, 1],
        7: [1, 7, 4, 1],
        8: [1, 8, 4, 1],
        11: [1, 11, 1, 1],
        13: [1, 13, 4, 1],
        14: [1, 14, 1, 1],
    }
    for co_prime, column in expected.items():
        assert list(frame[co_prime]) == column


class TestInstances:
    def test_standard_widths(self):
        instance = make_instance(15, 7)
        assert instance.function_width == 4
        assert instance.argument_width >= 4

    def test_not_coprime(self):
        with pytest.raises(NotCoprimeError):
            make_instance(15, 5)

    def test_invalid_modulus(self):
        with pytest.raises(InvalidModulusError):
            make_instance(1, 1)

    def test_model_rejects_shared_factor(self):
        with pytest.raises(ValidationError):
            ShorInstance(modulus=15, co_prime=6, argument_width=2, function_width=2)

    def test_compiled_instances(self):
        assert compiled_instance(11).function_width == 4
        assert compiled_instance(2).function_width == 2
        with pytest.raises(NonCompiledInstanceError):
            compiled_instance(7)


class TestPostProcessing:
    def test_zero_measurement_has_no_order(self):
        assert order_from_measurement(0, 2) is None

    @pytest.mark.parametrize("z,order", [(1, 4), (2, 2), (3, 4)])
    def test_order_from_measurement(self, z, order):
        assert order_from_measurement(z, 2) == order

    def test_measurement_out_of_range(self):
        with pytest.raises(ValueError):
            order_from_measurement(4, 2)

    def test_success(self):
        result = factors_from_order(11, 2, 15)
        assert result.status is OutcomeStatus.SUCCESS
        assert result.factors == (3, 5)

    @pytest.mark.parametrize("co_prime,modulus,factors", [(11, 15, (3, 5)), (13, 21, (3, 7)), (6, 35, (5, 7))])
    def test_factors_are_the_two_gcds(self, co_prime, modulus, factors):
        half = pow(co_prime, 1, modulus)
        assert tuple(sorted((math.gcd(half - 1, modulus), math.gcd(half + 1, modulus)))) == factors
        assert factors_from_order(co_prime, 2, modulus).factors == factors

    def test_even_modulus_with_shared_factor_two(self):
        # gcd(6, 24) * gcd(8, 24) = 48
        assert factors_from_order(7, 2, 24).factors == (4, 6)

    def test_trivial(self):
        assert factors_from_order(2, 2, 15).status is OutcomeStatus.TRIVIAL

    def test_odd_order_fails(self):
        result = factors_from_order(2, 3, 15)
        assert result.status is OutcomeStatus.FAILURE
        assert result.factors is None

    def test_factors_only_on_success(self):
        with pytest.raises(ValidationError):
            FactorResult(status=OutcomeStatus.TRIVIAL, order=4, factors=(3, 5))
        with pytest.raises(ValidationError):
            FactorResult(status=OutcomeStatus.SUCCESS, order=4)

    def test_brute_force_orders(self):
        for modulus in range(3, 51):
            for co_prime in coprimes(modulus):
                order = next(r for r in range(1, modulus + 1) if mod_exp(co_prime, r, modulus) == 1)
                result = factors_from_order(co_prime, order, modulus)
                half = pow(co_prime, order // 2, modulus)
                passes = order % 2 == 0 and math.gcd(half - 1, modulus) not in (1, modulus) and math.gcd(
                    half + 1, modulus
                ) not in (1, modulus)
                assert (result.status is OutcomeStatus.SUCCESS) == passes
                if passes:
                    low, high = result.factors
                    assert low * high == modulus


class TestOutcomes:
    def test_bit_reversal(self):
        outcome = MeasurementOutcome.from_raw((1, 0))
        assert outcome.reported_bits == (0, 1)
        assert outcome.z == 2
        assert outcome.label == "10"

    def test_inconsistent_reversal_rejected(self):
        with pytest.raises(ValidationError):
            MeasurementOutcome(raw_bits=(1, 0), reported_bits=(1, 0))

    def test_reachable_outcomes_c11(self):
        assert [o.label for o in reachable_outcomes(compiled_instance(11))] == ["00", "10"]

    def test_classification_c11(self):
        rows = classify_outcomes(compiled_instance(11))
        assert [row.result.status for row in rows] == [OutcomeStatus.FAILURE, OutcomeStatus.SUCCESS]
        assert rows[1].result.order == 2
        assert rows[1].result.factors == (3, 5)

    def test_classification_c2(self):
        rows = classify_outcomes(compiled_instance(2))
        assert [row.outcome.label for row in rows] == ["00", "01", "10", "11"]
        assert [row.result.status for row in rows] == [
            OutcomeStatus.FAILURE,
            OutcomeStatus.SUCCESS,
            OutcomeStatus.TRIVIAL,
            OutcomeStatus.SUCCESS,
        ]
        assert [row.result.order for row in rows] == [None, 4, 2, 4]

    def test_argument_outcomes_pad_missing_qubit(self):
        reported = argument_outcomes({"0": 0.5, "1": 0.5}, ("x0",))
        assert reported == {"00": 0.5, "10": 0.5}

    def test_argument_outcomes_reverse_two_qubits(self):
        reported = argument_outcomes({"00": 0.1, "01": 0.2, "10": 0.3, "11": 0.4}, ("x1", "x0"))
        # x0 = 1, x1 = 0 reads z = 2
        assert reported == {"00": 0.1, "01": 0.3, "10": 0.2, "11": 0.4}
