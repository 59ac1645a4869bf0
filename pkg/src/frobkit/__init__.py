"""frobkit: exact flat pencils and generalized Frobenius structures on
orbit spaces of classical affine Weyl groups, with Landau-Ginzburg
residue numerics as an independent oracle."""

from .polyring import (
    GradedLaurentPoly,
    PolyMatrix,
    CoordinateMap,
    VariableTable,
    euler_integrate,
    invert_triangular_map,
    matrix_adjugate_inverse,
    reduce_symmetric,
)
from .rootsystems import RootSystemData, build_root_system, degree_vector
from .invariants import (
    AffineSample,
    bd_reduction_check,
    eval_generators_numeric,
    metric_pencil_a,
    metric_pencil_c,
    christoffel_c,
)
from .pencil import PencilSpec, shift_to_pencil_c, split_pencil, tau_change_c
from .flatcoords import FlatChart, flat_coords_a, flat_coords_c, pushforward_metric
from .frobenius import (
    FrobeniusData,
    derive_a,
    derive_c,
    potential_from_intersection,
    structure_constants,
    verify_axioms,
)
from .lg import LGModel, lg_flat_coords, lg_isomorphism_check, lg_metrics, lg_symmetry_check

__version__ = "0.1.0"

__all__ = [
    "GradedLaurentPoly", "PolyMatrix", "CoordinateMap", "VariableTable",
    "euler_integrate", "invert_triangular_map", "matrix_adjugate_inverse",
    "reduce_symmetric",
    "RootSystemData", "build_root_system", "degree_vector",
    "AffineSample", "bd_reduction_check", "eval_generators_numeric",
    "metric_pencil_a", "metric_pencil_c", "christoffel_c",
    "PencilSpec", "shift_to_pencil_c", "split_pencil", "tau_change_c",
    "FlatChart", "flat_coords_a", "flat_coords_c", "pushforward_metric",
    "FrobeniusData", "derive_a", "derive_c", "potential_from_intersection",
    "structure_constants", "verify_axioms",
    "LGModel", "lg_flat_coords", "lg_isomorphism_check", "lg_metrics",
    "lg_symmetry_check",
]
