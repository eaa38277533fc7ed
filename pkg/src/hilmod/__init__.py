"""Numerical invariants of reproducing-kernel Hilbert modules.

Kernels and eigenvectors, curvature of the associated Hermitian bundles,
weighted-shift restrictions, quotient dimensions and characteristic
functions of finite contractions.
"""
from .errors import (
    ArityError,
    DomainError,
    FrameDegeneracyError,
    HilmodError,
    InconclusiveFitError,
    InvariantUndefinedError,
    MethodError,
    NotAContractionError,
    PrecisionError,
    TruncationError,
    UnsupportedPredicateError,
)
from .geometry import (
    CurvatureReport,
    Frame,
    LatticeVerdict,
    ReducingCurvatures,
    branch_power_frame,
    bundle_curvature,
    constant_frame,
    derived_reducing_curvature,
    grammian,
    line_curvature,
    metric_h,
    power_frame,
    printed_reducing_curvature,
    reducing_curvatures,
)
from .kernels import (
    Family,
    Geometry,
    KernelSpec,
    eigenvector_residual,
    gram_matrix,
    kernel_eval,
    kernel_series,
    moment,
    multiplier_matrix,
    shift_matrix,
)
from .localization import (
    HilbertSamuelFit,
    TruncatedModule,
    TruncationDependentWarning,
    fit_hilbert_samuel,
    hilbert_samuel,
    polynomial_module,
    quotient_dim,
    vanishing_submodule,
)
from .metric import RadialMetric
from .model import (
    FiniteContraction,
    Multiplier,
    RatioVerdict,
    char_function,
    defect_operators,
    localize_multiplier,
    nilpotent_jordan,
    quasi_similarity_ratio,
)
from .shifts import (
    RationalWeightRule,
    SimilarityVerdict,
    Verdict,
    WeightedShift,
    bergman_power_rule,
    drury_arveson_slice_shift,
    restriction_kernel,
    restriction_shift,
    similarity_intertwiner,
    slice_shift,
    unitarily_equivalent,
)

__version__ = "0.1.0"
