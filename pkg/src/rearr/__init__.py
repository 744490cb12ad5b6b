"""Exact decreasing rearrangements, majorization and Orlicz-space tools."""

from .core import (
    INF,
    DecreasingTailFunction,
    Domain,
    PartialIntegral,
    PiecewiseAffineFunction,
    PowerTail,
    StepFunction,
    dominates_everywhere,
    integrate,
    partial_integral,
)
from .criteria import (
    DvpCertificate,
    FunctionFamily,
    Geometric,
    L1Norm,
    LuxemburgNorm,
    MarcinkiewiczNorm,
    ScalerResult,
    SummableSequence,
    chong_majorant,
    chong_majorant_infinite,
    construct_n_function,
    convex_transfer_check,
    dvp_certificate,
    equi_abs_continuity_report,
    fixture_families,
    summable_scaler,
    tail_decay_check,
    uniform_integrability_report,
)
from .envelope import ConcaveMajorant, derivative_step, least_concave_majorant, marcinkiewicz_norm
from .errors import (
    ConditionViolatedError,
    DivergenceError,
    DocumentError,
    DomainError,
    PreconditionError,
    RearrError,
    UnsupportedCompositionError,
)
from .orlicz import (
    NFunctionFlags,
    NormEnclosure,
    OrliczFunction,
    evaluate_G,
    fundamental_function,
    is_n_function,
    luxemburg_norm,
    modular,
    young_conjugate,
    young_inequality_check,
)
from .rearrangement import (
    RearrangementResult,
    decreasing_rearrangement,
    distribution_function,
    majorizes,
    orbit_contains,
    submajorizes,
)

__version__ = "0.1.0"
