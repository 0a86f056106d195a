"""Points of symbolic sequence spaces.

Two kinds of point live here and never mix inside one exact computation:

* `SymbolicPoint` is an eventually periodic infinite sequence held in
  canonical form (minimal prefix, primitive period).  Equality of values is
  equality of the infinite sequences they denote.  All closed-form cocycle
  work runs on these.

* `LazyPoint` is a seeded random coordinate stream for Monte Carlo work.
  A coordinate, once drawn, is frozen; repeated queries agree.

Cheap read-only views (`DropView`, `PrependView`, `OverlayView`) let the
dynamical systems act on lazy points without copying the stream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import lcm

from .errors import DomainError


def primitive_root(word: str) -> str:
    """Smallest word whose repetition gives `word`.

    Uses the classic doubling trick: the least positive index where `word`
    occurs in word+word is the least cyclic period, and it divides len(word)
    whenever it is proper (Fine and Wilf).
    """
    if not word:
        raise ValueError("empty word has no primitive root")
    i = (word + word).find(word, 1)
    return word[:i] if i < len(word) else word


def canonical_parts(prefix: str, period: str) -> tuple[str, str]:
    """Reduce (prefix, period) to the canonical representation.

    The period is replaced by its primitive root, then trailing prefix
    symbols that match the tail of the rotated period are absorbed into the
    period.  The result is the unique pair with minimal prefix length and
    primitive period describing the same infinite sequence.
    """
    period = primitive_root(period)
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    return prefix, period


@dataclass(frozen=True)
class SymbolicPoint:
    """An eventually periodic sequence over a finite ordered alphabet.

    Instances are always canonical; build them through `make_point`.
    """

    alphabet: tuple[str, ...]
    prefix: str
    period: str

    def coord(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    __getitem__ = coord

    def head(self, n: int) -> str:
        """The first n symbols as a word."""
        return "".join(self.coord(i) for i in range(n))

    @property
    def rep_length(self) -> int:
        return len(self.prefix) + len(self.period)

    def shift_left(self, a: int) -> "SymbolicPoint":
        """Drop the first a coordinates."""
        if a <= 0:
            return self
        if a <= len(self.prefix):
            return make_point(self.alphabet, self.prefix[a:], self.period)
        r = (a - len(self.prefix)) % len(self.period)
        return make_point(self.alphabet, "", self.period[r:] + self.period[:r])

    def prepend(self, word: str) -> "SymbolicPoint":
        return make_point(self.alphabet, word + self.prefix, self.period)

    def with_overrides(self, overrides: dict[int, str]) -> "SymbolicPoint":
        """Replace finitely many coordinates."""
        if not overrides:
            return self
        n = max(max(overrides) + 1, len(self.prefix))
        head = list(self.head(n))
        for i, sym in overrides.items():
            head[i] = sym
        # rotate the period to the phase that continues the sequence at n
        r = (n - len(self.prefix)) % len(self.period)
        period = self.period[r:] + self.period[:r]
        return make_point(self.alphabet, "".join(head), period)

    def first_index(self, symbol: str) -> int | None:
        """Least coordinate equal to `symbol`, or None if it never occurs."""
        for i in range(len(self.prefix)):
            if self.prefix[i] == symbol:
                return i
        j = self.period.find(symbol)
        if j < 0:
            return None
        return len(self.prefix) + j

    def leading_run(self, symbol: str) -> int:
        """Length of the maximal initial block of `symbol` (finite by domain checks)."""
        n = 0
        bound = self.rep_length + len(self.period)
        while n < bound and self.coord(n) == symbol:
            n += 1
        if n >= bound:
            raise DomainError(f"constant tail of {symbol!r}")
        return n

    def compare(self, other: "SymbolicPoint") -> int:
        """Lexicographic comparison by alphabet order; 0 iff equal sequences."""
        if self.alphabet != other.alphabet:
            raise ValueError("points over different alphabets are not comparable")
        if self == other:
            return 0
        rank = {s: i for i, s in enumerate(self.alphabet)}
        bound = (max(len(self.prefix), len(other.prefix))
                 + lcm(len(self.period), len(other.period)))
        for i in range(bound):
            a, b = self.coord(i), other.coord(i)
            if a != b:
                return -1 if rank[a] < rank[b] else 1
        raise AssertionError("distinct canonical points must differ within the bound")

    def __lt__(self, other):
        return self.compare(other) < 0

    def __str__(self):
        return f"{self.prefix}({self.period})*"

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "period": self.period}


def make_point(alphabet, prefix: str, period: str) -> SymbolicPoint:
    """Canonical `SymbolicPoint` from raw prefix and period words."""
    alphabet = tuple(alphabet)
    if not period:
        raise DomainError("period must be nonempty")
    symbols = set(alphabet)
    for w in (prefix, period):
        for s in w:
            if s not in symbols:
                raise DomainError(f"symbol {s!r} not in alphabet {alphabet}")
    prefix, period = canonical_parts(prefix, period)
    return SymbolicPoint(alphabet, prefix, period)


def point_from_json(alphabet, doc: dict) -> SymbolicPoint:
    return make_point(alphabet, doc.get("prefix", ""), doc["period"])


# ---------------------------------------------------------------------------
# Lazy sampled points and coordinate views
# ---------------------------------------------------------------------------


class LazyPoint:
    """A deterministic seeded coordinate stream.

    `filler(rng, coords)` produces the next symbol given all earlier ones,
    so measures with one-step memory (hitting measures) draw correctly.
    """

    def __init__(self, filler, seed):
        self.seed = seed
        self._filler = filler
        self._rng = random.Random(seed)
        self._coords: list[str] = []

    def coord(self, i: int) -> str:
        coords = self._coords
        while len(coords) <= i:
            coords.append(self._filler(self._rng, coords))
        return coords[i]

    __getitem__ = coord

    def __repr__(self):
        return f"LazyPoint(seed={self.seed!r}, drawn={len(self._coords)})"


class DropView:
    """The base point with its first `n` coordinates dropped."""

    __slots__ = ("base", "n")

    def __init__(self, base, n: int):
        if isinstance(base, DropView):
            n += base.n
            base = base.base
        self.base = base
        self.n = n

    def coord(self, i: int) -> str:
        return self.base.coord(i + self.n)

    __getitem__ = coord


class PrependView:
    """The base point with a finite word glued in front."""

    __slots__ = ("base", "word")

    def __init__(self, base, word: str):
        if isinstance(base, PrependView):
            word = word + base.word
            base = base.base
        self.base = base
        self.word = word

    def coord(self, i: int) -> str:
        if i < len(self.word):
            return self.word[i]
        return self.base.coord(i - len(self.word))

    __getitem__ = coord


class OverlayView:
    """The base point with finitely many coordinates replaced."""

    __slots__ = ("base", "overrides")

    def __init__(self, base, overrides: dict[int, str]):
        if isinstance(base, OverlayView):
            merged = dict(base.overrides)
            merged.update(overrides)
            overrides = merged
            base = base.base
        self.base = base
        self.overrides = overrides

    def coord(self, i: int) -> str:
        got = self.overrides.get(i)
        return got if got is not None else self.base.coord(i)

    __getitem__ = coord


def scan_first(point, symbol: str, cap: int = 1_000_000) -> int:
    """First coordinate of `point` equal to `symbol`; works on any point kind."""
    if isinstance(point, SymbolicPoint):
        idx = point.first_index(symbol)
        if idx is None:
            raise DomainError(f"symbol {symbol!r} never occurs")
        return idx
    for i in range(cap):
        if point.coord(i) == symbol:
            return i
    raise DomainError(f"no {symbol!r} among the first {cap} coordinates")


def scan_leading_run(point, symbol: str, cap: int = 1_000_000) -> int:
    """Length of the initial block of `symbol`; works on any point kind."""
    if isinstance(point, SymbolicPoint):
        return point.leading_run(symbol)
    for i in range(cap):
        if point.coord(i) != symbol:
            return i
    raise DomainError(f"first {cap} coordinates are all {symbol!r}")


def coords_differ_before(p, q, bound: int) -> bool:
    """True if the two points disagree at some coordinate below `bound`."""
    return any(p.coord(i) != q.coord(i) for i in range(bound))
