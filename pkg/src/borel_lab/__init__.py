"""Exceptional sets of Borel-type growth lemmas and their measure bounds."""

__version__ = "0.1.0"

from .expr import (  # noqa: E402
    EvaluationError,
    ExprError,
    ExprSyntaxError,
    FreeVariableError,
    GrowthExpr,
    MonotoneReport,
    UnknownIdentifierError,
    evaluate,
    parse_growth,
    validate_monotone,
)
from .specfun import (  # noqa: E402
    DomainError,
    Enclosure,
    gamma_series,
    hurwitz_zeta,
    riemann_zeta,
    tower_constant_Se,
    zeta_gap_quadrature,
)
from .lemma import (  # noqa: E402
    CoarseGridWarning,
    IntervalSet,
    Variant,
    VariantSpec,
    build_cover,
    measure_bound,
    scan_violations,
)
from .bounds import bound_report, crossover_threshold, ordering_report  # noqa: E402
from .tabulated import TabulatedGrowth  # noqa: E402

__all__ = [
    "__version__",
    "EvaluationError",
    "ExprError",
    "ExprSyntaxError",
    "FreeVariableError",
    "GrowthExpr",
    "MonotoneReport",
    "UnknownIdentifierError",
    "evaluate",
    "parse_growth",
    "validate_monotone",
    "DomainError",
    "Enclosure",
    "gamma_series",
    "hurwitz_zeta",
    "riemann_zeta",
    "tower_constant_Se",
    "zeta_gap_quadrature",
    "CoarseGridWarning",
    "IntervalSet",
    "Variant",
    "VariantSpec",
    "build_cover",
    "measure_bound",
    "scan_violations",
    "bound_report",
    "crossover_threshold",
    "ordering_report",
    "TabulatedGrowth",
]
