"""Proximity and integrality-gap bounds for integer programs over quadric sets."""

from .bounds import BoundKind, BoundReport, TwoSphereInstance, all_bounds
from .errors import ProxGapError
from .lattice import CoveringRadius, MixedLattice, closest_lattice_point, covering_radius
from .oracle import Halfspace, IntegerBox, IpSolution, IpStatus, proximity_exact, solve_ip_exact
from .quadric import (Ellipsoid, QuadricClass, QuadricKind, QuadricSet, SocrSet, classify, qr_to_er, socr_to_er,
                      socr_to_qr)
from .relax import RelaxationResult, RelaxStatus, normalize_objective, solve_relaxation

__version__ = "0.1.0"

__all__ = [
    "BoundKind", "BoundReport", "TwoSphereInstance", "all_bounds", "ProxGapError", "CoveringRadius",
    "MixedLattice", "closest_lattice_point", "covering_radius", "Halfspace", "IntegerBox", "IpSolution",
    "IpStatus", "proximity_exact", "solve_ip_exact", "Ellipsoid", "QuadricClass", "QuadricKind", "QuadricSet",
    "SocrSet", "classify", "qr_to_er", "socr_to_er", "socr_to_qr", "RelaxationResult", "RelaxStatus",
    "normalize_objective", "solve_relaxation",
]
