"""Homology of real zero sets of homogeneous polynomial systems.

The pipeline covers the zero set on the unit sphere by equal balls around
grid points, builds the Cech nerve of that cover, and reads Betti numbers and
torsion off the Smith normal forms of its boundary maps.
"""
from .covering import CoveringResult, Profile, run_covering, thin_to_net
from .errors import (BudgetExceeded, InvalidInputError, InvalidSystemError, InvariantViolation,
                     NewtonDiverged, NewtonUndefined, RealHomError)
from .homology import HomologyResult, homology_from_complex, smith_normal_form
from .nerve import NerveComplex, build_nerve, build_projective_nerve, min_enclosing_ball
from .pointestimates import kappa_at, mu_norm, point_estimates, refine_zero
from .polysys import PolynomialSystem, load_system, parse_system, sample_kostlan
from .randharness import empirical_tail, theoretical_tail_bound

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "CoveringResult", "HomologyResult", "InvalidInputError",
    "InvalidSystemError", "InvariantViolation", "NerveComplex", "NewtonDiverged",
    "NewtonUndefined", "PolynomialSystem", "Profile", "RealHomError", "build_nerve",
    "build_projective_nerve", "empirical_tail", "homology_from_complex", "kappa_at",
    "load_system", "min_enclosing_ball", "mu_norm", "parse_system", "point_estimates",
    "refine_zero", "run_covering", "sample_kostlan", "smith_normal_form", "theoretical_tail_bound",
    "thin_to_net",
]
