import random

import pytest
from hypothesis import given, settings, strategies as st

from treetop.errors import DomainError
from treetop.measures import Bernoulli, sample_point
from treetop.points import (
    DropView,
    OverlayView,
    PrependView,
    SymbolicPoint,
    coords_differ_before,
    make_point,
    primitive_root,
)

BIN = ("0", "1")

words = st.text(alphabet="01", min_size=0, max_size=12)
periods = st.text(alphabet="01", min_size=1, max_size=8)


def raw_coord(prefix, period, i):
    return prefix[i] if i < len(prefix) else period[(i - len(prefix)) % len(period)]


def test_primitive_root():
    assert primitive_root("1010") == "10"
    assert primitive_root("110110") == "110"
    assert primitive_root("10") == "10"
    assert primitive_root("0") == "0"


def test_spec_canonical_examples():
    p = make_point(BIN, "10", "1010")
    assert (p.prefix, p.period) == ("", "10")
    q = make_point(BIN, "1", "10")
    assert (q.prefix, q.period) == ("1", "10")


def test_make_point_validation():
    with pytest.raises(DomainError):
        make_point(BIN, "0", "")
    with pytest.raises(DomainError):
        make_point(BIN, "2", "01")


@settings(max_examples=500, derandomize=True)
@given(p1=words, q1=periods, p2=words, q2=periods)
def test_canonical_equality_is_sequence_equality(p1, q1, p2, q2):
    # equality of canonical forms must match coordinatewise equality over a
    # window that determines both sequences
    a = make_point(BIN, p1, q1)
    b = make_point(BIN, p2, q2)
    window = 4 * (len(p1) + len(q1) + len(p2) + len(q2) + 1)
    same = all(raw_coord(p1, q1, i) == raw_coord(p2, q2, i) for i in range(window))
    assert (a == b) == same


@settings(max_examples=300, derandomize=True)
@given(p=words, q=periods)
def test_canonical_preserves_coordinates(p, q):
    pt = make_point(BIN, p, q)
    for i in range(3 * (len(p) + len(q))):
        assert pt.coord(i) == raw_coord(p, q, i)


@settings(max_examples=200, derandomize=True)
@given(p=words, q=periods, a=st.integers(0, 20))
def test_shift_left_semantics(p, q, a):
    pt = make_point(BIN, p, q)
    shifted = pt.shift_left(a)
    for i in range(2 * (len(p) + len(q)) + 4):
        assert shifted.coord(i) == pt.coord(i + a)


@settings(max_examples=200, derandomize=True)
@given(p=words, q=periods, w=words)
def test_prepend_semantics(p, q, w):
    pt = make_point(BIN, p, q)
    ext = pt.prepend(w)
    for i in range(len(w)):
        assert ext.coord(i) == w[i]
    for i in range(2 * (len(p) + len(q)) + 2):
        assert ext.coord(len(w) + i) == pt.coord(i)


def test_with_overrides_keeps_phase():
    pt = make_point(BIN, "110", "01")
    changed = pt.with_overrides({5: "1"})
    expect = ["1", "1", "0", "0", "1", "1"] + [pt.coord(i) for i in range(6, 12)]
    assert [changed.coord(i) for i in range(12)] == expect


def test_ordering_total_and_consistent():
    a = make_point(BIN, "", "01")
    b = make_point(BIN, "", "10")
    assert (a < b) != (b < a)
    assert a.compare(a) == 0
    rng = random.Random(5)
    pts = [make_point(BIN, "".join(rng.choice("01") for _ in range(4)), "10")
           for _ in range(20)]
    s = sorted(pts)
    for x, y in zip(s, s[1:]):
        assert x.compare(y) <= 0


def test_views_compose():
    base = make_point(BIN, "0110", "10")
    v = DropView(DropView(base, 1), 2)
    assert v.n == 3 and v.base is base
    assert v.coord(0) == base.coord(3)
    w = PrependView(PrependView(base, "1"), "00")
    assert w.word == "001"
    o = OverlayView(OverlayView(base, {1: "0"}), {2: "1"})
    assert o.overrides == {1: "0", 2: "1"}
    assert o.coord(1) == "0" and o.coord(2) == "1" and o.coord(0) == base.coord(0)


def test_lazy_point_contract():
    from fractions import Fraction
    measure = Bernoulli(Fraction(2, 3))
    a = sample_point(measure, 123)
    b = sample_point(measure, 123)
    late = a.coord(100)
    early = a.coord(5)
    # querying out of order does not disturb earlier coordinates
    assert early == b.coord(5)
    assert late == b.coord(100)
    assert [a.coord(i) for i in range(50)] == [b.coord(i) for i in range(50)]
    c = sample_point(measure, 124)
    assert coords_differ_before(a, c, 200)


def test_leading_run_rejects_constant():
    pt = make_point(BIN, "", "1")
    with pytest.raises(DomainError):
        pt.leading_run("1")
