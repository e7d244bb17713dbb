"""Curvature invariants and sharp delta-Casorati inequalities for slant
submanifolds of quaternionic space forms, evaluated pointwise."""

__version__ = "0.1.0"

from .ambient import (
    AmbientPoint,
    QuaternionicStructure,
    SlantSearchError,
    ambient_curvature,
    find_slant_plane,
    measure_slant_angle,
    standard_structure,
)
from .casorati_delta import (
    DeltaReport,
    ExtremizeConfig,
    HyperplaneExtremum,
    check_scaling_relations,
    delta_casorati,
    extremize_hyperplane,
    hyperplane_extrema,
    oracle_extremum,
)
from .invariants import (
    Hyperplane,
    InvariantReport,
    casorati,
    casorati_of_hyperplane,
    invariant_report,
    mean_curvature_sq,
    scalar_curvature,
    scalar_curvature_of_subspace,
    scalar_from_identity,
    sectional_curvature,
)
from .slant_model import (
    AdaptedFrameOps,
    SecondFundamentalForm,
    SlantInstance,
    build_adapted_frame,
    make_instance,
    pp_sum,
    random_instance,
    shape_operators,
)
from .verifier import (
    ProofCheckReport,
    VerificationReport,
    build_equality_case,
    check_inequality,
    classify_quasi_umbilical,
    equality_instance,
    evaluate_p,
    hessian_spectrum,
    solve_critical_system,
)
