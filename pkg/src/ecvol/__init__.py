"""Volatility models under elliptically contoured innovation laws.

Fits Arch/Garch/Tgarch/Egarch recursions by maximum likelihood using either
the product-of-marginals (independent sample) likelihood or the joint
(dependent sample) elliptical likelihood, and compares nested fits with the
per-observation BIC* and Kass-Raftery evidence grades.
"""

__version__ = "0.1.0"

from ecvol.elliptical import (
    Bessel,
    EllipticalLaw,
    Kotz,
    PearsonII,
    PearsonVII,
    expected_abs_standardized,
    log_density,
    log_norm_const,
)
from ecvol.errors import (
    ComparisonError,
    DomainError,
    EcvolError,
    EstimationError,
    FilterError,
    InputError,
    InvalidParameterError,
    LikelihoodError,
    QuadratureError,
)
from ecvol.estimate import FitConfig, FitResult, ModelSpec, fit, profile_shape
from ecvol.likelihood import loglik_dependent, loglik_independent
from ecvol.meanvol import MeanSpec, VolPath, VolSpec, filter_variance, residuals
from ecvol.select import (
    ComparisonReport,
    Evidence,
    EvidenceGrade,
    bic_star,
    caic,
    compare_nested,
    evidence_grade,
    is_nested,
)
from ecvol.ingest import load_csv, log_returns, write_series_csv
from ecvol.report import FitReport, read_report
from ecvol.series import PriceSeries, ReturnSeries
from ecvol.simulate import SimSpec, simulate

__all__ = [
    "Bessel",
    "ComparisonError",
    "ComparisonReport",
    "DomainError",
    "EcvolError",
    "EllipticalLaw",
    "EstimationError",
    "Evidence",
    "EvidenceGrade",
    "FilterError",
    "FitConfig",
    "FitReport",
    "FitResult",
    "InputError",
    "InvalidParameterError",
    "Kotz",
    "LikelihoodError",
    "MeanSpec",
    "ModelSpec",
    "PearsonII",
    "PearsonVII",
    "PriceSeries",
    "QuadratureError",
    "ReturnSeries",
    "SimSpec",
    "VolPath",
    "VolSpec",
    "bic_star",
    "caic",
    "compare_nested",
    "evidence_grade",
    "expected_abs_standardized",
    "filter_variance",
    "fit",
    "is_nested",
    "load_csv",
    "log_density",
    "log_norm_const",
    "log_returns",
    "loglik_dependent",
    "loglik_independent",
    "profile_shape",
    "read_report",
    "residuals",
    "simulate",
    "write_series_csv",
]
