"""Exact bookkeeping for Gromov-Witten invariants under a standard flop and a
small extremal transition of 3-folds."""

from importlib import resources

from .chow import RingElement, RingError, RingPresentation, normal_form, parse_element
from .degeneration import (AdmissibleGraph, AdmissibleTriple, CohomologyBasis,
                           DegenerationGeometry, RelativeGWTable, canonical_key,
                           enumerate_blowup_triples, enumerate_conifold_triples,
                           enumerate_triples, eq_count, evaluate_degeneration,
                           vdim_additivity_check)
from .lattice import CurveClass, CurveClassLattice, LatticeError, LatticeMap, minimal_lift
from .models import flop_geometry, local_model, transition_geometry
from .novikov import (NovikovElement, analytic_continue, isomorphic, series_equal,
                      substitute, truncate)
from .transform import (FlopGeometry, GWTable, InsertionClass, InsertionRegistry,
                        TransitionGeometry, flop_transform, three_point_function,
                        transition_threepoint_check, transition_transform,
                        transition_transform_fiber_sum, wallcrossing_check)

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled example file (geometry or table)."""
    return resources.files(__package__) / "data" / name


__all__ = [
    "AdmissibleGraph", "AdmissibleTriple", "CohomologyBasis", "CurveClass",
    "CurveClassLattice", "DegenerationGeometry", "FlopGeometry", "GWTable",
    "InsertionClass", "InsertionRegistry", "LatticeError", "LatticeMap", "NovikovElement",
    "RelativeGWTable", "RingElement", "RingError", "RingPresentation", "TransitionGeometry",
    "analytic_continue", "canonical_key", "data_path", "enumerate_blowup_triples",
    "enumerate_conifold_triples", "enumerate_triples", "eq_count", "evaluate_degeneration",
    "flop_geometry", "flop_transform", "isomorphic", "local_model", "minimal_lift",
    "normal_form", "parse_element", "series_equal", "substitute", "three_point_function",
    "transition_geometry", "transition_threepoint_check", "transition_transform",
    "transition_transform_fiber_sum", "truncate", "vdim_additivity_check",
    "wallcrossing_check",
]
