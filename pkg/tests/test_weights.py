from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from urnlab import weights
from urnlab.weights import (
    UrnSpec,
    WeightRangeError,
    check_distinct,
    custom,
    from_cli,
    from_json,
    linear,
    power,
    reciprocal,
    shifted_square,
    square,
    triangular,
    two_color,
)

ALL_FAMILIES = [
    linear(1),
    linear(Fraction(3, 2)),
    power(2, 3),
    square(),
    triangular(),
    shifted_square(),
]


class TestEval:
    def test_linear(self):
        assert linear(2).eval(3) == 6

    def test_square(self):
        assert square().eval(4) == 16

    def test_index_zero_is_zero_for_every_family(self):
        for seq in ALL_FAMILIES + [custom([1, 4, 9]), reciprocal(square())]:
            assert seq.eval(0) == 0

    def test_triangular(self):
        assert triangular().eval(4) == 10

    def test_shifted_square(self):
        assert shifted_square().eval(3) == Fraction(25, 4)

    def test_power(self):
        assert power(Fraction(1, 2), 3).eval(2) == 4

    def test_custom_range_guard(self):
        seq = custom([1, 4, 9])
        assert seq.eval(3) == 9
        with pytest.raises(WeightRangeError):
            seq.eval(4)

    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            linear(0)
        with pytest.raises(ValueError):
            custom([1, 0, 2])
        with pytest.raises(ValueError):
            power(1, 0)


class TestReciprocal:
    def test_linear_one(self):
        rec = reciprocal(linear(1))
        assert [rec.eval(j) for j in (1, 2, 3)] == [1, Fraction(1, 2), Fraction(1, 3)]

    def test_square_value(self):
        assert reciprocal(square()).eval(3) == Fraction(1, 9)

    def test_involution(self):
        for seq in ALL_FAMILIES:
            back = reciprocal(reciprocal(seq))
            assert all(back.eval(j) == seq.eval(j) for j in range(1, 101))

    @given(st.integers(min_value=1, max_value=500))
    def test_reciprocal_inverts_pointwise(self, j):
        seq = triangular()
        assert reciprocal(seq).eval(j) * seq.eval(j) == 1


class TestDistinct:
    def test_linear_distinct(self):
        assert check_distinct(linear(1), 10)

    def test_custom_repeat(self):
        assert not check_distinct(custom([1, 1, 2]), 3)

    def test_shifted_square_distinct(self):
        assert check_distinct(shifted_square(), 20)

    def test_builtin_families_strictly_increasing(self):
        for seq in ALL_FAMILIES:
            prev = seq.eval(1)
            for j in range(2, 10001):
                cur = seq.eval(j)
                assert cur > prev
                prev = cur

    def test_upper_validation(self):
        with pytest.raises(ValueError):
            check_distinct(square(), 0)


class TestSerialization:
    def test_json_round_trip(self):
        for seq in ALL_FAMILIES + [custom([1, 4, 9]), reciprocal(triangular())]:
            back = from_json(seq.to_json())
            upper = 3 if seq.family == "custom" else 30
            assert all(back.eval(j) == seq.eval(j) for j in range(0, upper + 1))

    def test_documented_forms(self):
        assert from_json({"family": "power", "c": "1", "r": "2"}).eval(3) == 9
        assert from_json({"family": "custom", "values": ["1", "4", "9"]}).eval(2) == 4

    def test_cli_descriptors(self):
        assert from_cli("linear:2").eval(2) == 4
        assert from_cli("linear").eval(5) == 5
        assert from_cli("square").eval(3) == 9
        assert from_cli("power:1:3").eval(2) == 8
        assert from_cli("custom:1,4,9").eval(1) == 1
        assert from_cli("shifted-square").eval(1) == Fraction(1, 4)
        with pytest.raises(ValueError):
            from_cli("nope")


class TestUrnSpec:
    def test_two_color(self):
        spec = two_color("I", linear(1), square(), 3, 2)
        assert spec.model == weights.MODEL_SAMPLING
        assert spec.is_two_color
        assert (spec.n, spec.m) == (3, 2)

    def test_model_aliases(self):
        assert two_color("II", linear(1), linear(1), 1, 1).model == weights.MODEL_OKCORRAL
        assert UrnSpec("okcorral", (linear(1), linear(1)), (1, 1)).model == weights.MODEL_OKCORRAL
        with pytest.raises(ValueError):
            two_color("III", linear(1), linear(1), 1, 1)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            two_color("I", linear(1), linear(1), -1, 2)
        with pytest.raises(ValueError):
            UrnSpec("I", (linear(1),), (2,))

    def test_multi(self):
        spec = UrnSpec("I", (linear(1), square(), triangular()), (2, 2, 2))
        assert spec.r == 3
        assert not spec.is_two_color
        assert spec.B is spec.sequences[-1]
