import math
from fractions import Fraction

import pytest

from treetop.errors import DomainError, StepBudgetError
from treetop.measures import (
    Bernoulli,
    HittingMeasure,
    UniformProduct,
    cylinder_mass,
    measure_from_json,
    random_walk_boundary_sample,
    sample_point,
    walk_distance_sample,
)
from treetop.systems import is_reduced
from treetop.weights import Weight


def test_cylinder_bernoulli():
    m = Bernoulli(Fraction(2, 3))
    assert cylinder_mass(m, "10") == Weight(2, 9)
    assert cylinder_mass(m, "") == 1
    assert cylinder_mass(m, "111") == Weight(8, 27)


def test_cylinder_uniform():
    m = UniformProduct(3)
    assert cylinder_mass(m, "012") == Weight(1, 27)


def test_cylinder_hitting_uniform():
    m = HittingMeasure.make(2)
    assert cylinder_mass(m, "a") == Weight(1, 4)
    assert cylinder_mass(m, "ab") == Weight(1, 12)
    with pytest.raises(DomainError):
        cylinder_mass(m, "aA")


def test_hitting_length_one_sums_to_one():
    m = HittingMeasure.make(2, {"a": Fraction(3, 8), "A": Fraction(3, 8),
                                "b": Fraction(1, 8), "B": Fraction(1, 8)})
    total = Weight(0)
    for s in m.alphabet:
        total = total + cylinder_mass(m, s)
    assert total == 1


def test_hitting_extension_additivity():
    # sum of reduced one-letter extensions recovers the cylinder mass
    m = HittingMeasure.make(2, {"a": Fraction(3, 8), "A": Fraction(3, 8),
                                "b": Fraction(1, 8), "B": Fraction(1, 8)})
    for w in ("a", "ab", "Ba", "bab"):
        total = Weight(0)
        for s in m.alphabet:
            if is_reduced(w + s):
                total = total + cylinder_mass(m, w + s)
        assert total == cylinder_mass(m, w)


def test_sampling_deterministic_and_memoized():
    m = Bernoulli(Fraction(2, 3))
    a, b = sample_point(m, 99), sample_point(m, 99)
    assert [a.coord(i) for i in range(64)] == [b.coord(i) for i in range(64)]
    c = sample_point(m, 99)
    far = c.coord(100)
    assert c.coord(5) == a.coord(5)
    assert far == a.coord(100)


def test_sampling_frequency_bernoulli():
    m = Bernoulli(Fraction(2, 3))
    n = 100_000
    ones = sum(1 for i in range(n) if sample_point(m, f"freq/{i}").coord(0) == "1")
    p = 2 / 3
    se = math.sqrt(p * (1 - p) / n)
    assert abs(ones / n - p) <= 3 * se


def test_hitting_sampler_follows_transition_law():
    m = HittingMeasure.make(2)
    n = 20_000
    count_a = 0
    count_ab = 0
    for i in range(n):
        x = sample_point(m, f"hit/{i}")
        if x.coord(0) == "a":
            count_a += 1
            if x.coord(1) == "b":
                count_ab += 1
    se = math.sqrt(0.25 * 0.75 / n)
    assert abs(count_a / n - 0.25) <= 3 * se
    # conditional law P(a,b) = 1/3
    se2 = math.sqrt((1 / 3) * (2 / 3) / max(count_a, 1))
    assert abs(count_ab / count_a - 1 / 3) <= 3 * se2


def test_walk_outputs_reduced_and_deterministic():
    for i in range(100):
        s = random_walk_boundary_sample(2, None, f"w/{i}", window=16)
        assert is_reduced(s.prefix)
        assert len(s.prefix) == 2
    a = random_walk_boundary_sample(2, None, "same", window=16)
    b = random_walk_boundary_sample(2, None, "same", window=16)
    assert a == b


def test_walk_first_letter_frequency():
    n = 2000
    counts = {}
    for i in range(n):
        s = random_walk_boundary_sample(2, None, f"wf/{i}", window=24, prefix_len=1)
        counts[s.prefix] = counts.get(s.prefix, 0) + 1
    se = math.sqrt(0.25 * 0.75 / n)
    for letter in "aAbB":
        assert abs(counts.get(letter, 0) / n - 0.25) <= 4 * se, counts


def test_walk_budget_error():
    with pytest.raises(StepBudgetError) as info:
        random_walk_boundary_sample(2, None, "b", window=50, step_budget=40)
    assert info.value.steps == 40


def test_walk_speed_consistent_across_batches():
    # drift of the uniform rank-2 walk is 1/2 per step; two disjoint seed
    # batches must land in the same band around it
    steps = 400
    def batch(tag):
        total = sum(walk_distance_sample(2, None, f"{tag}/{i}", steps)
                    for i in range(100))
        return total / (100 * steps)
    s1, s2 = batch("batchA"), batch("batchB")
    for s in (s1, s2):
        assert 0.42 <= s <= 0.58
    assert abs(s1 - s2) < 0.05


def test_measure_json_roundtrip():
    for m in (Bernoulli(Fraction(1, 3)), UniformProduct(4), HittingMeasure.make(3)):
        assert measure_from_json(m.to_json()).to_json() == m.to_json()
