import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from treetop.weights import INFINITY, Weight, parse_weight


def test_construction_forms():
    assert Weight(3) == Weight("3") == Weight("3/1") == Weight(Fraction(3))
    assert Weight(2, 3) == Weight("2/3")
    assert parse_weight("inf").is_infinite
    with pytest.raises(ValueError):
        Weight(-1)
    with pytest.raises(TypeError):
        Weight(1.5)


def test_arithmetic_basics():
    half = Weight(1, 2)
    assert half + half == 1
    assert half * 4 == 2
    assert Weight(3) / 2 == Weight(3, 2)
    assert Weight(2) ** 10 == 1024
    assert Weight(2) ** -2 == Weight(1, 4)


def test_infinity_rules():
    assert (INFINITY + 5).is_infinite
    assert (INFINITY * Weight(1, 7)).is_infinite
    assert Weight(3) / INFINITY == 0
    assert INFINITY > Weight(10) ** 100
    assert float(INFINITY) == math.inf
    assert str(INFINITY) == "inf"
    with pytest.raises(ValueError):
        Weight(0) * INFINITY
    with pytest.raises(ValueError):
        INFINITY / INFINITY
    assert INFINITY ** 0 == 1
    assert INFINITY ** -3 == 0


def test_ordering_and_hash():
    values = [Weight(1, 3), Weight(1, 2), Weight(2), INFINITY]
    assert sorted(values[::-1]) == values
    assert len({Weight(2, 4), Weight(1, 2)}) == 1
    assert max(values).is_infinite


def test_float_rendering_overflow():
    big = Weight(2) ** 5000
    assert float(big) == math.inf
    tiny = Weight(1, 2) ** 5000
    assert float(tiny) == 0.0


def test_string_roundtrip():
    w = Weight(22, 7)
    assert Weight(str(w)) == w


@settings(max_examples=200, derandomize=True)
@given(a=st.integers(0, 10**6), b=st.integers(1, 10**6),
       c=st.integers(0, 10**6), d=st.integers(1, 10**6))
def test_field_laws(a, b, c, d):
    x, y = Weight(a, b), Weight(c, d)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) * 2 == x * 2 + y * 2
    if c:
        assert x / y * y == x
