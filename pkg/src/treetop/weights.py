"""Exact nonnegative rational arithmetic, extended with +infinity.

Every cocycle value and mass in this package is a `Weight`: an arbitrary
precision nonnegative rational, or the distinguished value +inf.  Nothing is
rounded until a caller explicitly asks for a float rendering.
"""

from __future__ import annotations

import math
from fractions import Fraction


class Weight:
    """A nonnegative rational or +infinity.

    Supports +, *, /, integer powers and total ordering.  Mixed arithmetic
    with ints, Fractions and "num/den" strings coerces the other operand.
    Products with an infinite factor require the finite factor to be nonzero
    (0 * inf has no meaning here and raises).
    """

    __slots__ = ("_v",)

    def __init__(self, value=0, den=None):
        if den is not None:
            v = Fraction(value, den)
        elif isinstance(value, Weight):
            v = value._v
        elif isinstance(value, str):
            s = value.strip()
            if s in ("inf", "+inf", "infinity"):
                v = None
            elif "/" in s:
                num, d = s.split("/", 1)
                v = Fraction(int(num), int(d))
            else:
                v = Fraction(s)
        elif isinstance(value, Fraction):
            v = value
        elif isinstance(value, int):
            v = Fraction(value)
        else:
            raise TypeError(f"cannot build a Weight from {type(value).__name__}")
        if v is not None and v < 0:
            raise ValueError(f"weights are nonnegative, got {v}")
        self._v = v

    @classmethod
    def infinity(cls):
        w = cls.__new__(cls)
        w._v = None
        return w

    # -- predicates ---------------------------------------------------------

    @property
    def is_infinite(self):
        return self._v is None

    @property
    def is_zero(self):
        return self._v == 0

    @property
    def fraction(self) -> Fraction:
        if self._v is None:
            raise ValueError("infinite weight has no finite value")
        return self._v

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Weight):
            return other
        if isinstance(other, (int, str, Fraction)):
            return Weight(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self._v is None or o._v is None:
            return INFINITY
        return Weight(self._v + o._v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o._v is None:
            raise ValueError("cannot subtract an infinite weight")
        if self._v is None:
            return INFINITY
        if self._v < o._v:
            raise ValueError("weights are nonnegative: difference would be negative")
        return Weight(self._v - o._v)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self._v is None or o._v is None:
            if self._v == 0 or o._v == 0:
                raise ValueError("0 * infinity is undefined")
            return INFINITY
        return Weight(self._v * o._v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o._v is None:
            if self._v is None:
                raise ValueError("infinity / infinity is undefined")
            return Weight(0)
        if o._v == 0:
            raise ZeroDivisionError("division by zero weight")
        if self._v is None:
            return INFINITY
        return Weight(self._v / o._v)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if self._v is None:
            if n > 0:
                return INFINITY
            return Weight(1) if n == 0 else Weight(0)
        if self._v == 0 and n < 0:
            raise ZeroDivisionError("0 ** negative")
        return Weight(self._v ** n)

    # -- ordering -----------------------------------------------------------

    def _cmp(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return None
        if self._v is None:
            return 0 if o._v is None else 1
        if o._v is None:
            return -1
        return (self._v > o._v) - (self._v < o._v)

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash(self._v) if self._v is not None else hash(math.inf)

    # -- rendering ----------------------------------------------------------

    def __float__(self):
        if self._v is None:
            return math.inf
        try:
            return float(self._v)
        except OverflowError:
            return math.inf

    def __str__(self):
        if self._v is None:
            return "inf"
        return f"{self._v.numerator}/{self._v.denominator}"

    def __repr__(self):
        return f"Weight({str(self)!r})"


INFINITY = Weight.infinity()


def parse_weight(text: str) -> Weight:
    """Parse "num/den", a bare integer string, or "inf"."""
    return Weight(text)
