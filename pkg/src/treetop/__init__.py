"""treetop: exact cocycle topography on trees.

Exact weight arithmetic on the orbit trees of four symbolic dynamical
systems, end-classification estimators, Monte Carlo checks of the
mass-transport identity, and finite-tree combinatorics with brute-force
oracles.
"""

__version__ = "0.1.0"

from .weights import INFINITY, Weight, parse_weight
from .points import LazyPoint, SymbolicPoint, make_point, point_from_json
from .systems import (
    CoordinatePredicate,
    FreeBoundary,
    LeastDeletion,
    Odometer,
    Shift,
    System,
    cocycle,
    next_return,
    system_from_json,
)
from .measures import (
    Bernoulli,
    HittingMeasure,
    UniformProduct,
    cylinder_mass,
    default_measure,
    random_walk_boundary_sample,
    sample_point,
)
from .tilde import TaggedPoint, TildeSystem
from .topography import (
    Ball,
    MassReport,
    back_orbit_mass,
    back_sphere_mass,
    back_tail_sup,
    explore_ball,
    forward_trace,
    half_space_mass,
    probe_end,
    rn_core_truncated,
    sigma_backward,
)
from .transport import (
    MTPEstimate,
    TransportKernel,
    backward_balance_check,
    estimate_mtp,
    verify_inverse_mass_sum,
    verify_preimage_unit,
)
from .classify import classify_point
from .plans import ExperimentPlan, parse_plan, run_plan, serialize_plan

__all__ = [name for name in dir() if not name.startswith("_")]
