"""Measures on the sequence spaces: exact cylinder masses and seeded sampling.

Three measure families are supported: the p-coin product measure on binary
sequences, the uniform product on k symbols, and the hitting measure on the
rank-d boundary induced by symmetric letter weights m.  Cylinder masses are
exact rationals; samplers are deterministic per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, StepBudgetError, UnknownSystemError
from .points import LazyPoint
from .systems import (
    FreeBoundary,
    LeastDeletion,
    Odometer,
    Shift,
    System,
    digits_alphabet,
    free_group_alphabet,
    inverse_letter,
    is_reduced,
)
from .weights import Weight


@dataclass(frozen=True)
class Bernoulli:
    """i.i.d. coin flips on {0,1} with P(1) = p."""

    p: Fraction

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise DomainError("p must be strictly between 0 and 1")

    alphabet = ("0", "1")

    def to_json(self):
        return {"type": "bernoulli", "p": f"{self.p.numerator}/{self.p.denominator}"}


@dataclass(frozen=True)
class UniformProduct:
    """i.i.d. uniform symbols from {0,...,k-1}."""

    k: int

    @property
    def alphabet(self):
        return digits_alphabet(self.k)

    def to_json(self):
        return {"type": "uniform", "k": self.k}


@dataclass(frozen=True)
class HittingMeasure:
    """Exit law of the m-random walk on the rank-d free group boundary."""

    d: int
    weights: tuple  # sorted (letter, Fraction) pairs

    @classmethod
    def make(cls, d: int, m: dict[str, Fraction] | None = None):
        system = FreeBoundary(d, m)  # reuse its validation
        return cls(d, tuple(sorted(system.m.items())))

    @property
    def m(self) -> dict[str, Fraction]:
        return dict(self.weights)

    @property
    def alphabet(self):
        return free_group_alphabet(self.d)

    def transition(self, a: str, b: str) -> Fraction:
        """One-step law P(a, b) = m(b) / m(everything but a^-1), zero on a^-1."""
        if b == inverse_letter(a):
            return Fraction(0)
        m = self.m
        return m[b] / (1 - m[inverse_letter(a)])

    def to_json(self):
        return {"type": "hitting", "d": self.d,
                "m": {s: f"{v.numerator}/{v.denominator}" for s, v in self.weights}}


MeasureSpec = Bernoulli | UniformProduct | HittingMeasure


def default_measure(system: System) -> MeasureSpec:
    if isinstance(system, Shift):
        return UniformProduct(system.k)
    if isinstance(system, (LeastDeletion, Odometer)):
        return Bernoulli(system.p)
    if isinstance(system, FreeBoundary):
        return HittingMeasure(system.d, tuple(sorted(system.m.items())))
    raise UnknownSystemError(f"no default measure for {system.kind!r}")


# ---------------------------------------------------------------------------
# Exact cylinder masses
# ---------------------------------------------------------------------------


def cylinder_mass(measure: MeasureSpec, word: str) -> Weight:
    """Exact mass of the cylinder of sequences beginning with `word`."""
    if isinstance(measure, Bernoulli):
        ones = word.count("1")
        zeros = len(word) - ones
        return Weight(measure.p ** ones * (1 - measure.p) ** zeros)
    if isinstance(measure, UniformProduct):
        return Weight(1, measure.k) ** len(word)
    if isinstance(measure, HittingMeasure):
        if not word:
            return Weight(1)
        if not is_reduced(word):
            raise DomainError(f"word {word!r} is not reduced")
        m = measure.m
        total = m[word[0]]
        for a, b in zip(word, word[1:]):
            total *= measure.transition(a, b)
        return Weight(total)
    raise TypeError(f"unknown measure {measure!r}")


# ---------------------------------------------------------------------------
# Seeded sampling
# ---------------------------------------------------------------------------


def _draw(rng: random.Random, weights: list[tuple[str, Fraction]]) -> str:
    """Draw a symbol from exact rational weights using one integer draw."""
    den = 1
    for _, w in weights:
        den = den * w.denominator // _gcd(den, w.denominator)
    u = rng.randrange(den)
    acc = 0
    for sym, w in weights:
        acc += w.numerator * (den // w.denominator)
        if u < acc:
            return sym
    raise AssertionError("weights did not sum to 1")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def make_filler(measure: MeasureSpec):
    """Coordinate filler for LazyPoint: draws per the conditional law."""
    if isinstance(measure, Bernoulli):
        num, den = measure.p.numerator, measure.p.denominator

        def fill(rng, coords):
            return "1" if rng.randrange(den) < num else "0"
        return fill
    if isinstance(measure, UniformProduct):
        k = measure.k

        def fill(rng, coords):
            return str(rng.randrange(k))
        return fill
    if isinstance(measure, HittingMeasure):
        m = measure.m
        first = sorted(m.items())

        def fill(rng, coords):
            if not coords:
                return _draw(rng, first)
            prev = coords[-1]
            bad = inverse_letter(prev)
            cond = [(s, measure.transition(prev, s)) for s, _ in first if s != bad]
            return _draw(rng, cond)
        return fill
    raise TypeError(f"unknown measure {measure!r}")


def sample_point(measure: MeasureSpec, seed) -> LazyPoint:
    """Deterministic lazy sample of the measure; same seed, same stream."""
    return LazyPoint(make_filler(measure), seed)


# ---------------------------------------------------------------------------
# Boundary sampling by random walk
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkSample:
    """Outcome of one stabilized random walk toward the boundary."""

    prefix: str
    steps: int
    window: int
    final_length: int


def random_walk_boundary_sample(d: int, m: dict[str, Fraction] | None, seed,
                                window: int = 24, prefix_len: int = 2,
                                step_budget: int = 100_000) -> WalkSample:
    """Simulate the m-walk on the rank-d free group, tracking the reduced word.

    Returns once the first `prefix_len` letters have been unchanged for
    `window` consecutive steps.  The window trades bias for cost: the pilot
    calibration (see README) measures how often an emitted prefix would still
    flip, and the default window keeps that rate far below the statistical
    noise of 1e4-walk experiments.
    """
    measure = HittingMeasure.make(d, m)
    letters = sorted(measure.m.items())
    rng = random.Random(seed)
    word: list[str] = []
    last_touch: list[int] = []

    for t in range(1, step_budget + 1):
        s = _draw(rng, letters)
        if word and word[-1] == inverse_letter(s):
            word.pop()
            # position len(word) just became unstable again
        else:
            word.append(s)
            if len(last_touch) < len(word):
                last_touch.append(t)
            else:
                last_touch[len(word) - 1] = t
        if len(word) >= prefix_len and all(
                last_touch[i] <= t - window for i in range(prefix_len)):
            return WalkSample(prefix="".join(word[:prefix_len]), steps=t,
                              window=window, final_length=len(word))
    raise StepBudgetError(
        f"prefix of length {prefix_len} did not stabilize within {step_budget} steps",
        steps=step_budget)


def walk_distance_sample(d: int, m: dict[str, Fraction] | None, seed,
                         steps: int) -> int:
    """Reduced-word length after a fixed number of walk steps (speed probe)."""
    measure = HittingMeasure.make(d, m)
    letters = sorted(measure.m.items())
    rng = random.Random(seed)
    word: list[str] = []
    for _ in range(steps):
        s = _draw(rng, letters)
        if word and word[-1] == inverse_letter(s):
            word.pop()
        else:
            word.append(s)
    return len(word)


def measure_from_json(doc: dict) -> MeasureSpec:
    kind = doc.get("type")
    if kind == "bernoulli":
        return Bernoulli(Fraction(doc["p"]))
    if kind == "uniform":
        return UniformProduct(int(doc["k"]))
    if kind == "hitting":
        m = doc.get("m", "uniform")
        if m == "uniform":
            return HittingMeasure.make(int(doc["d"]))
        return HittingMeasure.make(int(doc["d"]), {s: Fraction(v) for s, v in m.items()})
    raise UnknownSystemError(f"unknown measure type {kind!r}", path="measure.type")
