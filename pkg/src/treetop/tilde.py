"""Oscillation-forcing expansion of a base system.

The expanded space carries the base points plus tagged copies (x, n) of the
points whose first n coordinates form the distinguished block (all 1s for
the adding machine, all 0s for least deletion).  One forward step from a
base point enters the deepest tag it qualifies for, tags count down to 0,
and tag 0 hands over to the base map.  The tagged copy at level n carries
the exact density 2^-n * min over the 2^n front-coordinate variants of the
cocycle, which forces the weight of the walk down to at most 2^-n on every
visit to level n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .points import SymbolicPoint
from .systems import LeastDeletion, Odometer, System
from .weights import Weight


@dataclass(frozen=True)
class TaggedPoint:
    """A point of the expanded space: a base point, optionally tagged with
    the copy level it currently sits in (None means the base copy)."""

    point: SymbolicPoint
    level: int | None = None

    @property
    def in_base(self):
        return self.level is None

    def __str__(self):
        return str(self.point) if self.in_base else f"({self.point}, {self.level})"


@dataclass(frozen=True)
class TruncationMark:
    """Returned instead of a point when exploration would need a tag level
    beyond the expansion bound; a marker, not an error."""

    point: SymbolicPoint
    needed_level: int


class TildeSystem(System):
    """Expansion of LeastDeletion or Odometer by tagged transversal copies."""

    kind = "tilde"

    def __init__(self, base: System, n_max: int):
        if not isinstance(base, (LeastDeletion, Odometer)):
            raise DomainError("expansion supports the least-deletion and odometer bases")
        if n_max < 1:
            raise DomainError("n_max must be at least 1")
        self.base = base
        self.n_max = n_max
        self.alphabet = base.alphabet
        self.block_symbol = "1" if isinstance(base, Odometer) else "0"
        self.lam = base.lam

    # -- transversal structure ------------------------------------------------

    def level_of(self, x: SymbolicPoint) -> int:
        """The n with x in X_n minus X_{n+1}: the length of the leading block."""
        return x.leading_run(self.block_symbol)

    def in_level_set(self, x: SymbolicPoint, n: int) -> bool:
        return self.level_of(x) >= n

    def retract_to_level(self, x: SymbolicPoint, n: int) -> SymbolicPoint:
        """Least forward base iterate landing in X_n.

        For both bases this is exactly the point with its first n coordinates
        replaced by the distinguished block (the tests cross-check against
        direct iteration of the base map).
        """
        return x.with_overrides({i: self.block_symbol for i in range(n)})

    def density(self, x: SymbolicPoint, n: int) -> Weight:
        """Exact mass density of the level-n copy at x in X_n:
        2^-n times the least cocycle value over the 2^n front variants.

        The variants flip front coordinates independently, so the minimum is
        the product of the per-coordinate minima min(1, lambda^{+-1}).
        """
        if not self.in_level_set(x, n):
            raise DomainError(f"point does not begin with {n} copies of {self.block_symbol!r}")
        lam = Weight(self.lam)
        lam_inv = Weight(1) / lam
        acc = Weight(1, 2) ** n
        one = Weight(1)
        for i in range(n):
            factor = lam if x.coord(i) == "0" else lam_inv
            if factor < one:
                acc = acc * factor
        return acc

    def density_enumerated(self, x: SymbolicPoint, n: int) -> Weight:
        """Brute-force density: minimize the pair cocycle over all 2^n front
        variants explicitly.  Oracle for `density`."""
        from .systems import cocycle
        if not self.in_level_set(x, n):
            raise DomainError("point outside the level set")
        best = None
        for mask in range(2 ** n):
            overrides = {i: ("1" if (mask >> i) & 1 else "0") for i in range(n)}
            y = x.with_overrides(overrides)
            value = cocycle(self.base, x, y)
            if best is None or value < best:
                best = value
        return Weight(1, 2) ** n * best

    # -- dynamics -------------------------------------------------------------

    def validate(self, tp):
        point = tp.point if isinstance(tp, TaggedPoint) else tp
        self.base.validate(point)
        if isinstance(tp, TaggedPoint) and tp.level is not None:
            if not 0 <= tp.level <= self.n_max:
                raise DomainError(f"tag level {tp.level} outside 0..{self.n_max}")
            if not self.in_level_set(point, tp.level):
                raise DomainError("tagged point is not in its level set")

    def forward(self, tp: TaggedPoint):
        if tp.in_base:
            n = self.level_of(tp.point)
            if n > self.n_max:
                return TruncationMark(tp.point, n)
            return TaggedPoint(tp.point, n)
        if tp.level > 0:
            return TaggedPoint(tp.point, tp.level - 1)
        return TaggedPoint(self.base.forward(tp.point), None)

    def preimages(self, tp: TaggedPoint):
        if tp.in_base:
            return [TaggedPoint(y, 0) for y in self.base.preimages(tp.point)]
        out = []
        if self.level_of(tp.point) == tp.level:
            out.append(TaggedPoint(tp.point, None))
        if tp.level + 1 <= self.n_max and self.in_level_set(tp.point, tp.level + 1):
            out.append(TaggedPoint(tp.point, tp.level + 1))
        return out

    def step_weight(self, tp: TaggedPoint) -> Weight:
        if tp.in_base:
            n = self.level_of(tp.point)
            if n > self.n_max:
                raise DomainError(f"level {n} exceeds the expansion bound {self.n_max}")
            return self.density(tp.point, n)
        if tp.level > 0:
            return (self.density(tp.point, tp.level - 1)
                    / self.density(tp.point, tp.level))
        return self.base.step_weight(tp.point) / self.density(tp.point, 0)

    def cocycle(self, a: TaggedPoint, b: TaggedPoint) -> Weight:
        """rho on the expanded space: base cocycle times the density ratio."""
        from .systems import cocycle as base_cocycle
        da = Weight(1) if a.in_base else self.density(a.point, a.level)
        db = Weight(1) if b.in_base else self.density(b.point, b.level)
        return base_cocycle(self.base, a.point, b.point) * db / da

    # -- the headline inequality ----------------------------------------------

    def visit_weight(self, x: SymbolicPoint, n: int) -> Weight:
        """rho^x of the first tagged point the walk from x meets after
        retracting to X_n: exactly the quantity bounded by 2^-n."""
        r = self.retract_to_level(x, n)
        tagged = self.forward(TaggedPoint(r, None))
        if isinstance(tagged, TruncationMark):
            raise DomainError(
                f"retraction reaches level {tagged.needed_level} > n_max={self.n_max}; "
                "raise n_max")
        return self.cocycle(TaggedPoint(x, None), tagged)

    def to_json(self):
        return {"type": "tilde", "base": self.base.to_json(), "n_max": self.n_max}
