"""Optimal constrained quantizers for uniform measures on plane curves."""

from .asymptotics import (
    AsymptoticsReport,
    CoefficientEstimate,
    ErrorSequence,
    build_report,
    estimate_coefficient,
    estimate_dimension,
    estimate_v_infinity,
)
from .closed_form import (
    FAMILY_IDS,
    SegmentLineFamily,
    ThresholdReport,
    UnsupportedClosedForm,
    chord_small_codebook,
    circle_on_circle_codebook,
    clamped_line_codebook,
    diameter_codebook,
    family_setup,
    one_sided_line_codebook,
    segment_line_codebook,
    threshold_N,
)
from .distortion import (
    Codebook,
    DistortionReport,
    Partition,
    build_partition,
    distortion,
    squared_distance,
)
from .geometry import (
    CircleArc,
    Curve,
    Segment,
    UniformMeasure,
    arc_length,
    curve_from_json,
    curve_to_json,
    measure_of_interval,
    param_range,
    point_at,
)
from .solver import (
    SolveResult,
    SolverConfig,
    objective_gradient,
    solve,
    solve_sequence,
    stationarity_check,
)

__all__ = [
    "AsymptoticsReport",
    "CircleArc",
    "Codebook",
    "CoefficientEstimate",
    "Curve",
    "DistortionReport",
    "ErrorSequence",
    "FAMILY_IDS",
    "Partition",
    "Segment",
    "SegmentLineFamily",
    "SolveResult",
    "SolverConfig",
    "ThresholdReport",
    "UniformMeasure",
    "UnsupportedClosedForm",
    "arc_length",
    "build_partition",
    "build_report",
    "chord_small_codebook",
    "circle_on_circle_codebook",
    "clamped_line_codebook",
    "curve_from_json",
    "curve_to_json",
    "diameter_codebook",
    "distortion",
    "estimate_coefficient",
    "estimate_dimension",
    "estimate_v_infinity",
    "family_setup",
    "measure_of_interval",
    "objective_gradient",
    "one_sided_line_codebook",
    "param_range",
    "point_at",
    "segment_line_codebook",
    "solve",
    "solve_sequence",
    "squared_distance",
    "stationarity_check",
    "threshold_N",
]

__version__ = "0.1.0"
