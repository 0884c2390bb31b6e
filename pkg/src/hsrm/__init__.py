"""h-index reliability toolkit: area shares around h and segmented-regression sRM values."""

from .cohort import DEFAULT_BINS, HBin, SyntheticSpec, build_table, fit_cohort, generate_cohort, summarize
from .indicators import (
    ClassificationConfig,
    IndicatorSet,
    PerformanceType,
    ScientistProfile,
    classify,
    compute_areas,
    compute_h,
    hirsch_core,
)
from .srm import (
    CumulativeSeries,
    FitConfig,
    SrmFit,
    SrmParams,
    assess,
    build_series,
    check_applicability,
    evaluate_model,
    fit,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BINS",
    "ClassificationConfig",
    "CumulativeSeries",
    "FitConfig",
    "HBin",
    "IndicatorSet",
    "PerformanceType",
    "ScientistProfile",
    "SrmFit",
    "SrmParams",
    "SyntheticSpec",
    "assess",
    "build_series",
    "build_table",
    "check_applicability",
    "classify",
    "compute_areas",
    "compute_h",
    "evaluate_model",
    "fit",
    "fit_cohort",
    "generate_cohort",
    "hirsch_core",
    "summarize",
]
