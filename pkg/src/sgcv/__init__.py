"""Leave-one-out polynomial order selection for Savitzky-Golay smoothing."""

from .design import DesignSpec, NestedBasis, build_design_matrix, build_nested_basis, projection_matrix
from .filters import (
    DegenerateLeverageError,
    PredictorFilter,
    SingularSystemError,
    SmootherBank,
    make_predictor_direct,
    make_predictor_from_smoother,
    make_smoother,
    make_smoother_bank,
)
from .selection import (
    BaselineScores,
    SelectionResult,
    conventional_cv,
    score_bic,
    select_order,
    select_order_cv,
    smooth_series,
    smooth_with_selected_order,
)
from .signals import NoiseModel, draw_noise, sample_cubic, sample_kinematic

__version__ = "0.1.0"
