"""Points over Q, Q_p and R, local evaluation images and working-set verdicts."""

from .padic import (
    Budget,
    ImageResult,
    Insoluble,
    PadicPointApprox,
    Soluble,
    approximation_near,
    eval_image_at_p,
    newton_lift,
    padic_solubility,
)
from .points import BudgetExceeded, PrivateShape, ProjPoint, private_shape, search_rational_points
from .real import NoRealPoints, RealAnalysis, RealPoint, definite_member, evaluate_real, real_analysis
from .verdicts import (
    AdelicUnknown,
    GroupSummary,
    HasAdelicPoint,
    NoAt,
    Undetermined,
    WorkingSetOptions,
    WorkingSetReport,
    adelic_point_check,
    working_set,
)

__all__ = [
    "AdelicUnknown",
    "Budget",
    "BudgetExceeded",
    "GroupSummary",
    "HasAdelicPoint",
    "ImageResult",
    "Insoluble",
    "NoAt",
    "NoRealPoints",
    "PadicPointApprox",
    "PrivateShape",
    "ProjPoint",
    "RealAnalysis",
    "RealPoint",
    "Soluble",
    "Undetermined",
    "WorkingSetOptions",
    "WorkingSetReport",
    "adelic_point_check",
    "approximation_near",
    "definite_member",
    "eval_image_at_p",
    "evaluate_real",
    "newton_lift",
    "padic_solubility",
    "private_shape",
    "real_analysis",
    "search_rational_points",
    "working_set",
]
