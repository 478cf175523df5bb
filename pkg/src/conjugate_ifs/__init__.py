"""Solutions of conjugate equations between iterated function systems."""

from .errors import (
    BudgetExceeded,
    ConjugateError,
    DegenerateFit,
    DepthExceeded,
    DomainError,
    EmptyCloud,
    IncompatibleSystem,
    MissingBoundary,
    NoConvergence,
    NonFinite,
)
from .ifs_core import (
    Box,
    IFSystem,
    Interval,
    MapSpec,
    PointCloud,
    Triangle,
    affine,
    apply_word,
    attractor_points,
    custom,
    fixed_point,
    moebius,
    piecewise_linear,
    word_image_interval,
)
from .conjugate import (
    CompatibilityReport,
    ConjugateSystem,
    code_point,
    evaluate,
    evaluate_grid,
    evaluate_many,
    evaluate_word,
    validate,
)

__version__ = "0.1.0"
