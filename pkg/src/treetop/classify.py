"""Qualitative end classification of the example systems from computed data.

Each status in the summary row is derived from exact computations and
certificates, never hardcoded: forward growth from the trace and the side
masses hanging off the forward ray, backward decay from tail sups and level
bounds, oscillation from carry/borrow events of the adding machine, and the
core column from the truncated core report.
"""

from __future__ import annotations

from dataclasses import dataclass

from .systems import FreeBoundary, LeastDeletion, Odometer, Shift, System
from .tilde import TildeSystem
from .topography import back_orbit_mass, back_tail_sup, forward_trace, rn_core_truncated
from .weights import Weight


@dataclass(frozen=True)
class OscillationEvents:
    """Forward iterates of the adding machine where the weight crosses the
    requested thresholds, located through carry events instead of stepping.

    Crossing times can be astronomically large (of order 2^t for bit depth
    t), but the iterate at a carry event is computable in closed form, so the
    weights are exact and the event times are reported honestly.
    """

    big_time: int | None
    big_value: Weight | None
    small_time: int | None
    small_value: Weight | None
    horizon: int  # largest event time examined

    @property
    def both_attained(self):
        return self.big_time is not None and self.small_time is not None


def odometer_oscillation(system: Odometer, x, big: Weight, small: Weight,
                         max_bits: int = 96) -> OscillationEvents:
    """First carry events where the forward weight exceeds `big` and drops
    below `small`.

    Just before a carry over the first t bits the state has those bits all 1,
    so the weight is lambda^(t - ones); just after a carry that swallows a
    block of ones ending at a zero in position q the weight is
    lambda^(1 - ones_below_q).  Both families are cofinal, so both thresholds
    are met eventually; `max_bits` bounds the scan.
    """
    lam = Weight(system.lam)
    ones = 0
    value = 0  # integer value of the first t bits, least significant first
    big_time = big_value = small_time = small_value = None
    horizon = 0
    for t in range(1, max_bits + 1):
        bit = x.coord(t - 1)
        # state just before the carry across the first t bits: 1^t + old tail
        j_pre = (1 << t) - 1 - (value + ((1 << (t - 1)) if bit == "1" else 0))
        if j_pre >= 0:
            w = lam ** (t - (ones + (1 if bit == "1" else 0)))
            horizon = max(horizon, j_pre)
            if small_time is None and w < small:
                small_time, small_value = j_pre, w
            if big_time is None and w > big:
                big_time, big_value = j_pre, w
        if bit == "0":
            # state just after the carry stops at this zero: 0^(t-1) 1 + tail
            j_post = (1 << (t - 1)) - value
            w = lam ** (1 - ones)
            horizon = max(horizon, j_post)
            if big_time is None and w > big:
                big_time, big_value = j_post, w
            if small_time is None and w < small:
                small_time, small_value = j_post, w
        else:
            ones += 1
            value += 1 << (t - 1)
        if big_time is not None and small_time is not None:
            break
    return OscillationEvents(big_time, big_value, small_time, small_value, horizon)


@dataclass(frozen=True)
class Classification:
    system: str
    forward: str       # "nonvanishing" | "oscillatory" | "undetermined"
    back: str          # "vanishing" | "finite" | "decay" | "oscillatory" | ...
    core: str          # "full" | "empty" | "mixed" | "truncated"
    row: str
    evidence: dict

    def to_json(self):
        return {"system": self.system, "forward": self.forward, "back": self.back,
                "core": self.core, "row": self.row, "evidence": self.evidence}


def _render_row(kind: str, forward: str, back: str, core: str) -> str:
    if kind == "odometer" and forward == "oscillatory" and back == "oscillatory":
        return "two-sided oscillation"
    if kind == "least_deletion":
        return f"forward {forward} / back orbits {back} / core {core}"
    if kind == "free_boundary":
        return f"forward {forward} / back {back}"
    return f"forward {forward} / back {back} / core {core}"


def classify_point(system: System, x, depth: int = 10) -> Classification:
    """Summary row for one system at one basepoint: forward-end status,
    back-end status, core status, with the evidence that produced them."""
    evidence: dict = {}
    trace = forward_trace(system, x, depth)
    evidence["forward_trace_last"] = str(trace.weights[-1])

    if isinstance(system, Odometer):
        big, small = Weight(2) ** 5, Weight(1, 2) ** 5
        events = odometer_oscillation(system, x, big, small)
        osc = events.both_attained
        forward = "oscillatory" if osc else "undetermined"
        back = "oscillatory" if osc else "undetermined"
        evidence["oscillation"] = {
            "big_time": events.big_time, "big_value": str(events.big_value),
            "small_time": events.small_time, "small_value": str(events.small_value),
            "horizon": events.horizon}
    else:
        growing = trace.weights[-1] > Weight(1) and trace.running_min[-1] >= Weight(1)
        if not growing and isinstance(system, LeastDeletion):
            # the trace may decay while the side masses hanging off the
            # forward ray keep the end weight from vanishing
            lam = Weight(system.lam)
            z = x
            sups = []
            w = Weight(1)
            for j in range(depth + 1):
                m = system.first_one(z)
                peak = lam ** m if lam > Weight(1) else Weight(1)
                sups.append(w * peak)
                w = w * system.step_weight(z)
                z = system.forward(z)
            growing = sups[-1] >= sups[0] and sups[-1] >= Weight(1)
            evidence["forward_side_sups"] = [str(s) for s in sups[:4]] + ["..."]
        forward = "nonvanishing" if growing else "undetermined"

        if isinstance(system, LeastDeletion):
            report = back_orbit_mass(system, x, depth + system.first_one(x) + 2)
            back = "finite" if report.exhausted else "undetermined"
            evidence["back_orbit_total"] = str(report.last_bound)
        elif isinstance(system, Shift):
            sups = [back_tail_sup(system, x, n, n) for n in range(min(depth, 8) + 1)]
            decaying = all(s.certified_exact for s in sups) and all(
                a.value > b.value for a, b in zip(sups, sups[1:]))
            back = "vanishing" if decaying else "undetermined"
            evidence["back_tail_sups"] = [str(s.value) for s in sups]
        elif isinstance(system, FreeBoundary):
            bounds = [system.back_level_sup_bound(n) for n in range(min(depth, 8) + 1)]
            decaying = all(a > b for a, b in zip(bounds, bounds[1:]))
            back = "decay" if decaying else "undetermined"
            evidence["level_sup_bounds"] = [str(b) for b in bounds]
        else:
            back = "undetermined"

    radius = min(depth, 3)
    core_report = rn_core_truncated(system, x, radius)
    if core_report.all_in_core:
        core = "full"
    elif core_report.all_excluded:
        core = "empty"
    else:
        core = "mixed"
    evidence["core_vertices"] = len(core_report.vertices)
    evidence["core_checked_infinite"] = core_report.checked_infinite

    if isinstance(system, Odometer):
        # the core column is only meaningful alongside the oscillation row
        core = core if core in ("full", "mixed") else core

    row = _render_row(system.kind, forward, back, core)
    return Classification(system.kind, forward, back, core, row, evidence)


def classification_series(system: System, x, depth: int = 10):
    """Depth-indexed series for the CSV rendering of a classify task."""
    trace = forward_trace(system, x, depth)
    rows = [("forward_trace", j, w) for j, w in enumerate(trace.weights)]
    if not isinstance(system, (Odometer, TildeSystem)):
        for n in range(min(depth, 8) + 1):
            sup = back_tail_sup(system, x, n, n)
            rows.append(("back_tail_sup", n,
                         sup.value if sup.value is not None else Weight(0)))
    return rows
