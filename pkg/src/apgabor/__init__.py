"""Gabor analysis of almost periodic functions, exact on trigonometric polynomials."""

__version__ = "0.1.0"

from .apcore import (
    APSequence,
    ResidueDecomposition,
    TrigPolynomial,
    ap_inner,
    ap_norm,
    convolve,
    modulate,
    residue_decompose,
    seq_inner,
    seq_norm,
    seq_time_average,
    stepanov_norm,
    time_average_inner,
    translate,
)
from .errors import (
    ArgumentError,
    CaseViolation,
    InvariantViolation,
    PrecisionError,
    UnsupportedWindowError,
)
from .frames import (
    FiberMatrix,
    FrameBounds,
    SpectrumSet,
    fiber_matrix,
    finite_modulation_failure,
    frame_bounds,
    frame_sandwich_check,
    hermitian_extremal_eigs,
    schur_bessel_bound,
    subspace_frame_bounds,
)
from .gabor import (
    AnalysisFamily,
    GaborSystem,
    adjoint_residual,
    analysis_family,
    analysis_norm_via_h,
    analysis_sequence,
    bessel_total,
    gabor_synthesis,
    h_lambda,
    periodization_oracle,
    synthesis,
)
from .sampling import generate_random_polynomial, generate_random_sequence
from .windows import (
    Window,
    bessel_condition_sup,
    gaussian,
    parse_window,
    periodized_spectral_sum,
    rectangle,
    triangle,
    wiener_norm,
)
