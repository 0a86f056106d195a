"""The four generator systems and exact cocycle arithmetic on their orbits.

Each system packages a forward map, a preimage enumerator, the one-step
weight ratio rho^x(f(x)), a default measure, and optional analytic oracles
(closed-form back-orbit masses, per-level weight bounds).  Maps accept both
exact `SymbolicPoint`s (returning canonical exact points) and lazy sampled
points (returning cheap coordinate views).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import DomainError, NotRelatedError, RecurrenceBudgetError, UnknownSystemError
from .points import (
    DropView,
    OverlayView,
    PrependView,
    SymbolicPoint,
    make_point,
    scan_first,
    scan_leading_run,
)
from .weights import INFINITY, Weight

BINARY = ("0", "1")


def digits_alphabet(k: int) -> tuple[str, ...]:
    if not 2 <= k <= 10:
        raise DomainError("shift alphabet size must be between 2 and 10")
    return tuple(str(i) for i in range(k))


def free_group_alphabet(d: int) -> tuple[str, ...]:
    """Letters a,A,b,B,... with uppercase denoting inverses."""
    if not 2 <= d <= 26:
        raise DomainError("free rank must be between 2 and 26")
    letters = []
    for i in range(d):
        c = chr(ord("a") + i)
        letters.append(c)
        letters.append(c.upper())
    return tuple(letters)


def inverse_letter(s: str) -> str:
    return s.swapcase()


def is_reduced(word: str) -> bool:
    return all(word[i + 1] != inverse_letter(word[i]) for i in range(len(word) - 1))


class System:
    """Common surface of the generator systems."""

    kind: str
    alphabet: tuple[str, ...]

    # -- domain -------------------------------------------------------------

    def validate(self, x: SymbolicPoint) -> None:
        raise NotImplementedError

    def point(self, prefix: str, period: str) -> SymbolicPoint:
        p = make_point(self.alphabet, prefix, period)
        self.validate(p)
        return p

    # -- dynamics -----------------------------------------------------------

    def forward(self, x):
        raise NotImplementedError

    def preimages(self, x) -> list:
        raise NotImplementedError

    def step_weight(self, x) -> Weight:
        """The value rho^x(f(x))."""
        raise NotImplementedError

    def preimage_mass(self, x) -> Weight:
        """The value rho^x(f^{-1}(x)) = sum over preimages y of 1/step_weight(y)."""
        total = Weight(0)
        for y in self.preimages(x):
            total = total + Weight(1) / self.step_weight(y)
        return total

    def back_siblings(self, x) -> list:
        """Preimages of f(x) other than x itself, identified structurally so
        the enumeration also works on lazy coordinate views."""
        fx = self.forward(x)
        return [y for y in self.preimages(fx) if y != x]

    # -- optional analytic oracles (None when the system offers nothing) ----

    def back_level_mass_constant(self) -> Weight | None:
        """Exact mass of every preimage level, when it is a constant."""
        return None

    def back_level_weight_exact(self, n: int) -> Weight | None:
        """Exact weight of every single level-n back vertex, when constant."""
        return None

    def back_level_sup_bound(self, n: int) -> Weight | None:
        """Upper bound for the weight of any level-n back vertex."""
        return None

    def back_orbit_certificate(self, x) -> tuple | None:
        """("infinite", reason) or ("total", Weight, reason), or None."""
        return None

    def forward_side_infinite(self) -> tuple[bool, str]:
        """Whether every half-space containing the forward ray has infinite mass."""
        return (False, "no certificate")

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.kind} system>"


# ---------------------------------------------------------------------------


class Shift(System):
    """One-sided full shift on k symbols, uniform product measure.

    Weight bookkeeping: one forward step multiplies the weight by k, so a
    level-n back vertex weighs exactly k^-n and every preimage level has
    total mass 1.
    """

    kind = "shift"

    def __init__(self, k: int):
        self.k = k
        self.alphabet = digits_alphabet(k)

    def validate(self, x):
        if x.alphabet != self.alphabet:
            raise DomainError(f"point alphabet {x.alphabet} does not match shift({self.k})")
        if len(x.period) == 1:
            raise DomainError("eventually constant sequence: the forward orbit "
                              "reaches a fixed point of the shift")

    def forward(self, x):
        if isinstance(x, SymbolicPoint):
            return x.shift_left(1)
        return DropView(x, 1)

    def preimages(self, x):
        if isinstance(x, SymbolicPoint):
            return [x.prepend(s) for s in self.alphabet]
        return [PrependView(x, s) for s in self.alphabet]

    def step_weight(self, x):
        return Weight(self.k)

    def back_siblings(self, x):
        fx = self.forward(x)
        s0 = x.coord(0)
        if isinstance(x, SymbolicPoint):
            return [fx.prepend(s) for s in self.alphabet if s != s0]
        return [PrependView(fx, s) for s in self.alphabet if s != s0]

    def back_level_mass_constant(self):
        return Weight(1)

    def back_level_weight_exact(self, n):
        return Weight(1, self.k) ** n

    def back_level_sup_bound(self, n):
        return self.back_level_weight_exact(n)

    def back_orbit_certificate(self, x):
        return ("infinite", "every preimage level has total mass exactly 1")

    def forward_side_infinite(self):
        return (True, "forward weights grow geometrically with ratio k")

    def to_json(self):
        return {"type": "shift", "k": self.k}


class LeastDeletion(System):
    """The map flipping the first 1 of a binary sequence to 0.

    Under the p-coin measure one step divides the weight by lambda = p/(1-p).
    Preimages raise one of the zeros in front of the first 1, so the whole
    backward orbit of x is the finite set indexed by subsets of those zeros,
    with total mass (1+lambda)^m for first-one position m.
    """

    kind = "least_deletion"

    def __init__(self, p):
        p = Fraction(p)
        if not 0 < p < 1:
            raise DomainError("p must be strictly between 0 and 1")
        self.p = p
        self.lam = p / (1 - p)
        self.alphabet = BINARY

    def validate(self, x):
        if x.alphabet != self.alphabet:
            raise DomainError("least deletion acts on binary sequences")
        if "0" not in x.period or "1" not in x.period:
            raise DomainError("domain requires infinitely many 0s and 1s "
                              f"(period {x.period!r} is one-sided)")

    def first_one(self, x) -> int:
        return scan_first(x, "1")

    def forward(self, x):
        m = self.first_one(x)
        if isinstance(x, SymbolicPoint):
            return x.with_overrides({m: "0"})
        return OverlayView(x, {m: "0"})

    def preimages(self, x):
        m = self.first_one(x)
        if isinstance(x, SymbolicPoint):
            return [x.with_overrides({i: "1"}) for i in range(m)]
        return [OverlayView(x, {i: "1"}) for i in range(m)]

    def step_weight(self, x):
        return Weight(1) / Weight(self.lam)

    def back_siblings(self, x):
        j = self.first_one(x)
        fx = self.forward(x)
        m = self.first_one(fx)
        if isinstance(x, SymbolicPoint):
            return [fx.with_overrides({i: "1"}) for i in range(m) if i != j]
        return [OverlayView(fx, {i: "1"}) for i in range(m) if i != j]

    def back_orbit_total(self, x) -> Weight:
        """Closed form (1+lambda)^m; the tests validate it against enumeration."""
        return Weight(1 + self.lam) ** self.first_one(x)

    def back_orbit_certificate(self, x):
        return ("total", self.back_orbit_total(x),
                "binomial closed form over the zeros before the first 1")

    def forward_side_infinite(self):
        return (True, "back-orbit masses along the forward ray grow like ((1+lambda)/lambda)^n")

    def to_json(self):
        return {"type": "least_deletion", "p": f"{self.p.numerator}/{self.p.denominator}"}


class Odometer(System):
    """Binary adding machine: 1^n 0 tail -> 0^n 1 tail.

    A bijection on its domain; one step multiplies the weight by
    lambda^(1-n) where n is the length of the leading block of 1s.
    """

    kind = "odometer"

    def __init__(self, p):
        p = Fraction(p)
        if not 0 < p < 1:
            raise DomainError("p must be strictly between 0 and 1")
        self.p = p
        self.lam = p / (1 - p)
        self.alphabet = BINARY

    def validate(self, x):
        if x.alphabet != self.alphabet:
            raise DomainError("odometer acts on binary sequences")
        if "0" not in x.period or "1" not in x.period:
            raise DomainError("domain requires infinitely many 0s and 1s "
                              f"(period {x.period!r} is one-sided)")

    def forward(self, x):
        n = scan_leading_run(x, "1")
        flips = {i: "0" for i in range(n)}
        flips[n] = "1"
        if isinstance(x, SymbolicPoint):
            return x.with_overrides(flips)
        return OverlayView(x, flips)

    def preimages(self, x):
        n = scan_leading_run(x, "0")
        flips = {i: "1" for i in range(n)}
        flips[n] = "0"
        if isinstance(x, SymbolicPoint):
            return [x.with_overrides(flips)]
        return [OverlayView(x, flips)]

    def step_weight(self, x):
        n = scan_leading_run(x, "1")
        return Weight(self.lam) ** (1 - n)

    def back_siblings(self, x):
        # the odometer is a bijection: f(x) has no preimage other than x
        return []

    def add(self, x: SymbolicPoint, j: int) -> SymbolicPoint:
        """Exact forward jump f^j, computed by binary addition (least bit first)."""
        if j < 0:
            raise ValueError("jump must be nonnegative")
        carry = j
        i = 0
        overrides = {}
        while carry:
            bit = int(x.coord(i)) + (carry & 1)
            carry >>= 1
            if bit >= 2:
                carry += 1
                bit -= 2
            overrides[i] = str(bit)
            i += 1
        return x.with_overrides(overrides)

    def back_orbit_certificate(self, x):
        return ("infinite",
                "the backward line passes all residues mod 2^t, so weights are unbounded")

    def forward_side_infinite(self):
        return (True, "carry states give unbounded weights along the forward line")

    def to_json(self):
        return {"type": "odometer", "p": f"{self.p.numerator}/{self.p.denominator}"}


class FreeBoundary(System):
    """One-sided shift on infinite reduced words, with a hitting measure.

    The step weight at x depends only on the first letter:
    rho^x(f(x)) = m(S except inverse(x0)) / m(x0).
    """

    kind = "free_boundary"

    def __init__(self, d: int, m: dict[str, Fraction] | None = None):
        self.d = d
        self.alphabet = free_group_alphabet(d)
        if m is None:
            m = {s: Fraction(1, 2 * d) for s in self.alphabet}
        m = {s: Fraction(v) for s, v in m.items()}
        if set(m) != set(self.alphabet):
            raise DomainError("m must weight exactly the generators and inverses")
        if any(v <= 0 for v in m.values()):
            raise DomainError("m must be strictly positive")
        if sum(m.values()) != 1:
            raise DomainError("m must sum to 1")
        for s in self.alphabet:
            if m[s] != m[inverse_letter(s)]:
                raise DomainError("m must be symmetric: m(s) = m(s^-1)")
        self.m = m

    @property
    def is_uniform(self):
        return len(set(self.m.values())) == 1

    def complement_mass(self, s: str) -> Fraction:
        """m(S^+- minus the inverse of s)."""
        return 1 - self.m[inverse_letter(s)]

    @property
    def alpha(self) -> Fraction:
        """Largest one-step backward weight ratio; always < 1."""
        return max(self.m[s] / self.complement_mass(s) for s in self.alphabet)

    def validate(self, x):
        if x.alphabet != self.alphabet:
            raise DomainError(f"point alphabet does not match rank-{self.d} boundary")
        seam = x.prefix + x.period + x.period[:1]
        if not is_reduced(seam):
            raise DomainError(f"word {x.prefix!r}+({x.period!r})* is not reduced")
        if len(x.period) == 1:
            raise DomainError("eventually constant word: the forward orbit "
                              "reaches a fixed point of the boundary shift")

    def forward(self, x):
        if isinstance(x, SymbolicPoint):
            return x.shift_left(1)
        return DropView(x, 1)

    def preimages(self, x):
        bad = inverse_letter(x.coord(0))
        letters = [s for s in self.alphabet if s != bad]
        if isinstance(x, SymbolicPoint):
            return [x.prepend(s) for s in letters]
        return [PrependView(x, s) for s in letters]

    def step_weight(self, x):
        s = x.coord(0)
        return Weight(self.complement_mass(s)) / Weight(self.m[s])

    def back_siblings(self, x):
        fx = self.forward(x)
        s0 = x.coord(0)
        bad = inverse_letter(x.coord(1))
        letters = [s for s in self.alphabet if s != s0 and s != bad]
        if isinstance(x, SymbolicPoint):
            return [fx.prepend(s) for s in letters]
        return [PrependView(fx, s) for s in letters]

    def back_level_mass_constant(self):
        if self.is_uniform:
            return Weight(1)
        return None

    def back_level_sup_bound(self, n):
        # product of n one-step ratios, each at most alpha
        return Weight(self.alpha) ** n

    def back_orbit_certificate(self, x):
        if self.is_uniform:
            return ("infinite", "every preimage level has total mass exactly 1")
        return None

    def forward_side_infinite(self):
        return (True, "forward weights grow at least geometrically (ratio 1/alpha)")

    def to_json(self):
        return {"type": "free_boundary", "d": self.d,
                "m": {s: f"{v.numerator}/{v.denominator}" for s, v in self.m.items()}}


# ---------------------------------------------------------------------------
# Pair cocycle rho^x(y) on exact points
# ---------------------------------------------------------------------------

TAIL_EQUIVALENCE_KINDS = ("least_deletion", "odometer")
SHIFT_KINDS = ("shift", "free_boundary")


def _flip_exponent(x: SymbolicPoint, y: SymbolicPoint) -> int:
    """k0 - k1 for rho^x(y) = lambda^(k0-k1) on tail-equal binary points."""
    bound = max(len(x.prefix), len(y.prefix))
    if x.shift_left(bound) != y.shift_left(bound):
        raise NotRelatedError("points do not agree from any coordinate on")
    k0 = k1 = 0
    for i in range(bound):
        a, b = x.coord(i), y.coord(i)
        if a == "0" and b == "1":
            k0 += 1
        elif a == "1" and b == "0":
            k1 += 1
    return k0 - k1


def _forward_weight(system, x: SymbolicPoint, steps: int) -> Weight:
    w = Weight(1)
    z = x
    for _ in range(steps):
        w = w * system.step_weight(z)
        z = system.forward(z)
    return w


def _shift_alignment(x: SymbolicPoint, y: SymbolicPoint) -> tuple[int, int]:
    """Minimal drop counts (a, b) aligning the two shift orbits.

    All alignments of two eventually periodic sequences differ by multiples
    of the common primitive period length P; we return the representative
    with the drop difference a-b of least absolute value.  A tie (P even,
    difference exactly P/2 both ways) is broken by the order of the points,
    which keeps rho^x(y) * rho^y(x) = 1.
    """
    if len(x.period) != len(y.period):
        raise NotRelatedError("tails have different primitive period lengths")
    bx = len(x.prefix) + len(x.period)
    by = len(y.prefix) + len(y.period)
    seen = {}
    z = x
    for i in range(bx):
        seen.setdefault(z, i)
        z = z.shift_left(1)
    match = None
    z = y
    for j in range(by):
        if z in seen:
            match = (seen[z], j)
            break
        z = z.shift_left(1)
    if match is None:
        raise NotRelatedError("shift orbits never meet within the exact horizon")
    period = len(x.period)
    r = (match[0] - match[1]) % period
    if r > period - r:
        r -= period
    elif r == period - r and r != 0:
        # exact tie: choose the positive difference from the lesser point
        if x.compare(y) > 0:
            r -= period
    a, b = max(r, 0), max(-r, 0)
    horizon = 8 * (x.rep_length + y.rep_length)
    while x.shift_left(a) != y.shift_left(b):
        a += 1
        b += 1
        if a > horizon:
            raise NotRelatedError("no alignment found within the declared horizon")
    return a, b


def cocycle(system: System, x: SymbolicPoint, y: SymbolicPoint) -> Weight:
    """Exact rho^x(y) for two related points of one system.

    For the binary tail-equivalence systems this is lambda^(k0-k1) read off
    coordinatewise; for the shift systems it is the ratio of forward step
    products to the minimal orbit alignment.  Raises NotRelatedError when no
    relation is found within the exact horizon.
    """
    if not isinstance(x, SymbolicPoint) or not isinstance(y, SymbolicPoint):
        raise TypeError("pair cocycle is defined on exact points only")
    system.validate(x)
    system.validate(y)
    if system.kind in TAIL_EQUIVALENCE_KINDS:
        return Weight(system.lam) ** _flip_exponent(x, y)
    if system.kind in SHIFT_KINDS:
        a, b = _shift_alignment(x, y)
        return _forward_weight(system, x, a) / _forward_weight(system, y, b)
    raise UnknownSystemError(f"no cocycle rule for system kind {system.kind!r}")


def cocycle_by_meeting(system: System, x: SymbolicPoint, y: SymbolicPoint,
                       horizon: int | None = None) -> Weight:
    """Independent route to rho^x(y): walk both forward orbits, collect the
    meetings, and take the step-product ratio at the meeting with the least
    drop difference (ties resolved by point order, as in `cocycle`).  A
    different mechanism from the canonical-form alignment, used as an oracle
    against it."""
    if horizon is None:
        horizon = 2 * (x.rep_length + y.rep_length) + 8
    seen_x = {}
    z = x
    for i in range(horizon):
        if z not in seen_x:
            seen_x[z] = i
        z = system.forward(z)
    best = None  # (|d|, i, j)
    z = y
    for j in range(horizon):
        i = seen_x.get(z)
        if i is not None:
            d = i - j
            if best is None or abs(d) < abs(best[1] - best[2]):
                best = (abs(d), i, j)
            elif abs(d) == abs(best[1] - best[2]) and d != best[1] - best[2]:
                # tie between +|d| and -|d|: the lesser point looks forward
                keep_positive = x.compare(y) <= 0
                if (d > 0) == keep_positive:
                    best = (abs(d), i, j)
        z = system.forward(z)
    if best is None:
        raise NotRelatedError(f"orbits did not meet within {horizon} forward steps")
    _, a, b = best
    return _forward_weight(system, x, a) / _forward_weight(system, y, b)


def related(system: System, x: SymbolicPoint, y: SymbolicPoint) -> bool:
    try:
        cocycle(system, x, y)
        return True
    except NotRelatedError:
        return False


# ---------------------------------------------------------------------------
# Next-return and retraction maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinatePredicate:
    """Membership test for a set depending on at most the first `depends_on`
    coordinates."""

    fn: Callable
    depends_on: int
    label: str = ""

    def __call__(self, point) -> bool:
        return bool(self.fn(point))


def next_return(system: System, predicate: CoordinatePredicate, x,
                mode: str = "next-return", budget: int = 10_000):
    """First forward iterate of x inside the predicate set.

    mode "retraction" allows zero steps; mode "next-return" requires at
    least one.  Raises RecurrenceBudgetError when the budget runs out,
    reporting how many iterates were examined.
    """
    if mode not in ("next-return", "retraction"):
        raise ValueError(f"unknown mode {mode!r}")
    z = x
    start = 0 if mode == "retraction" else 1
    if start == 1:
        z = system.forward(z)
    examined = 0
    while examined <= budget:
        if predicate(z):
            return z
        z = system.forward(z)
        examined += 1
    raise RecurrenceBudgetError(
        f"no return to {predicate.label or 'the target set'} within {budget} steps",
        examined=examined)


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------


def system_from_json(doc: dict) -> System:
    if not isinstance(doc, dict) or "type" not in doc:
        raise UnknownSystemError("system descriptor must be an object with a 'type'",
                                 path="system.type")
    kind = doc["type"]
    known = {"shift", "least_deletion", "odometer", "free_boundary"}
    if kind not in known:
        raise UnknownSystemError(f"unknown system type {kind!r} (known: {sorted(known)})",
                                 path="system.type")
    try:
        if kind == "shift":
            return Shift(int(doc["k"]))
        if kind == "least_deletion":
            return LeastDeletion(Fraction(doc["p"]))
        if kind == "odometer":
            return Odometer(Fraction(doc["p"]))
        m = doc.get("m", "uniform")
        if m == "uniform":
            return FreeBoundary(int(doc["d"]))
        return FreeBoundary(int(doc["d"]), {s: Fraction(v) for s, v in m.items()})
    except KeyError as e:
        raise UnknownSystemError(f"system descriptor missing field {e}", path="system") from e
