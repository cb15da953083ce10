"""Projection and reflection methods for a closed convex cone and an affine
subspace: method of alternating projections, Douglas-Rachford, and a
three-parameter relaxed family, with rate oracles and hypothesis checkers.
"""

from .conditions import (
    CONDITION_IDS,
    ConditionReport,
    check_all,
    check_codim_one,
    check_Q_maps_S,
    check_QAminusS_signed,
    check_range_cap_cone,
    check_transversality_equivalence,
    verify_certificate,
)
from .iterate import (
    DR,
    MAP,
    AlgorithmParams,
    IterationTrace,
    StepRecord,
    affine_witness,
    dr_affine_membership_residual,
    fitted_rate,
    recession_diagnostic,
    relaxed_expansion,
    run,
    split_step,
    step_dr,
    step_map,
    step_relaxed,
    write_trace_csv,
    write_trace_jsonl,
)
from .lattice import join, meet, modulus, neg_part, pos_part
from .sets import (
    AffineSubspace,
    ConvexSet,
    LatticeCone,
    PolarCone,
    ProjectionError,
    SimplicialCone,
    Span,
    lift_halfspace,
    line,
    nnls,
    project,
    project_affine,
    project_polar,
    project_simplicial,
    projector_Q,
    reflect,
)

__version__ = "0.1.0"
