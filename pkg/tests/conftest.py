import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fractions import Fraction

from treetop.systems import FreeBoundary, LeastDeletion, Odometer, Shift


@pytest.fixture
def rng():
    return random.Random(0xC0C1C1E)


@pytest.fixture
def shift2():
    return Shift(2)


@pytest.fixture
def shift3():
    return Shift(3)


@pytest.fixture
def ld23():
    return LeastDeletion(Fraction(2, 3))


@pytest.fixture
def ld13():
    return LeastDeletion(Fraction(1, 3))


@pytest.fixture
def od13():
    return Odometer(Fraction(1, 3))


@pytest.fixture
def fb2():
    return FreeBoundary(2)


def random_binary_point(rng, system, max_prefix=8, max_period=6):
    """Random canonical binary point valid for the given system."""
    while True:
        prefix = "".join(rng.choice("01") for _ in range(rng.randrange(max_prefix + 1)))
        period = "".join(rng.choice("01") for _ in range(rng.randrange(2, max_period + 1)))
        if "0" not in period or "1" not in period:
            continue
        return system.point(prefix, period)


def random_shift_point(rng, system, period_len=24, prefix_len=6):
    """Random canonical point with a long primitive period (wrap-safe for
    cocycle alignment)."""
    alphabet = system.alphabet
    while True:
        prefix = "".join(rng.choice(alphabet) for _ in range(rng.randrange(prefix_len)))
        period = "".join(rng.choice(alphabet) for _ in range(period_len))
        try:
            p = system.point(prefix, period)
        except Exception:
            continue
        if len(p.period) == period_len:
            return p


def random_boundary_point(rng, system, period_len=24, prefix_len=5):
    """Random canonical reduced point with a long primitive period."""
    alphabet = system.alphabet
    from treetop.systems import inverse_letter

    def extend(word, length):
        while len(word) < length:
            choices = [s for s in alphabet if not word or s != inverse_letter(word[-1])]
            word += rng.choice(choices)
        return word

    while True:
        period = extend("", period_len)
        if period[0] == inverse_letter(period[-1]):
            continue
        prefix = ""
        for _ in range(rng.randrange(prefix_len)):
            # prepend letters, never cancelling against the current first symbol
            first = prefix[0] if prefix else period[0]
            prefix = rng.choice(
                [s for s in alphabet if s != inverse_letter(first)]) + prefix
        try:
            p = system.point(prefix, period)
        except Exception:
            continue
        if len(p.period) == period_len:
            return p
