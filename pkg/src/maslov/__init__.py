"""Indices of loops of Lagrangian subspaces of (R^2n, omega).

Two independent Maslov engines (squared-determinant winding and
crossing-signature sums), the Hormander index by its path definition and
its closed signature formula, symplectic reduction, and the exact Z4
machinery of holonomy and chart-transition factors.
"""

__version__ = "0.1.0"

from .symplectic_core import (
    SymplecticSpace,
    LagrangianFrame,
    IsotropicSubspace,
    SymQuadForm,
    omega_matrix,
    complex_structure,
    intersection_dim,
    same_subspace,
    signature,
    signature_split,
    graph_form,
    graph_frame,
    graph_coords,
    det_squared_phase,
    j_frame,
    rotate_frame,
    reduce,
    set_rank_tolerance,
)
from .index import (
    LagrangianPath,
    CrossingEvent,
    winding_index,
    phase_steps,
    detect_crossings,
    crossing_events,
    crossing_index,
    close_in_transversal_chart,
    bracket_index,
    hormander_index,
    interpolating_path,
    relative_index,
    concatenate_paths,
    refine_path,
    constant_loop,
)
from .bundle import (
    Holonomy,
    holonomy_value,
    check_equivariance,
    PhaseChart,
    TestFunction,
    chart_lagrangian,
    q_psi,
    check_signature_relation,
    transition_exponent,
    transition_factor,
)
from . import errors

__all__ = [
    "__version__",
    "SymplecticSpace", "LagrangianFrame", "IsotropicSubspace", "SymQuadForm",
    "omega_matrix", "complex_structure", "intersection_dim", "same_subspace",
    "signature", "signature_split", "graph_form", "graph_frame",
    "graph_coords", "det_squared_phase", "j_frame", "rotate_frame", "reduce",
    "set_rank_tolerance",
    "LagrangianPath", "CrossingEvent", "winding_index", "phase_steps",
    "detect_crossings", "crossing_events", "crossing_index",
    "close_in_transversal_chart", "bracket_index", "hormander_index",
    "interpolating_path", "relative_index", "concatenate_paths",
    "refine_path", "constant_loop",
    "Holonomy", "holonomy_value", "check_equivariance", "PhaseChart",
    "TestFunction", "chart_lagrangian", "q_psi", "check_signature_relation",
    "transition_exponent", "transition_factor",
    "errors",
]
