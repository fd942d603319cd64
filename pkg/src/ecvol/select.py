"""Information criteria, evidence grades and nested-model comparison."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ecvol.errors import ComparisonError, InvalidParameterError

__all__ = [
    "ComparisonReport",
    "ComparisonRow",
    "Evidence",
    "EvidenceGrade",
    "bic_star",
    "caic",
    "compare_nested",
    "evidence_grade",
    "is_nested",
]

_LOG24 = math.log(24.0)


def _check(n, n_p):
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"sample size must be a positive integer, got {n!r}")
    if int(n_p) != n_p or n_p < 1:
        raise InvalidParameterError(f"parameter count must be a positive integer, got {n_p!r}")


def bic_star(M: float, n: int, n_p: int) -> float:
    """Per-observation modified BIC: ``[-2M + n_p (log(n+2) - log 24)] / n``."""
    _check(n, n_p)
    return (-2.0 * M + n_p * (math.log(n + 2) - _LOG24)) / n


def caic(M: float, n: int, n_p: int) -> float:
    """Per-observation consistent AIC: ``[-2M + n_p (log n + 1)] / n``."""
    _check(n, n_p)
    return (-2.0 * M + n_p * (math.log(n) + 1.0)) / n


class Evidence(enum.IntEnum):
    WEAK = 0
    POSITIVE = 1
    STRONG = 2
    VERY_STRONG = 3

    @property
    def label(self) -> str:
        return {0: "Weak", 1: "Positive", 2: "Strong", 3: "Very strong"}[int(self)]


# lower edges of the half-open bands [0,2), [2,6), [6,10), [10,inf)
_BANDS = ((10.0, Evidence.VERY_STRONG), (6.0, Evidence.STRONG), (2.0, Evidence.POSITIVE))


@dataclass(frozen=True)
class EvidenceGrade:
    grade: Evidence
    magnitude: float
    direction: int

    def to_dict(self) -> dict:
        return {"grade": self.grade.label, "magnitude": self.magnitude, "direction": self.direction}


def evidence_grade(diff: float) -> EvidenceGrade:
    if not math.isfinite(diff):
        raise InvalidParameterError(f"cannot grade a nonfinite difference {diff!r}")
    mag = abs(diff)
    grade = Evidence.WEAK
    for edge, g in _BANDS:
        if mag >= edge:
            grade = g
            break
    direction = (diff > 0) - (diff < 0)
    return EvidenceGrade(grade, mag, direction)


def _law_nested(small, big) -> bool:
    if small.law.name != big.law.name:
        return False
    if small.law.name == "kotz":
        if big.estimate_shape:
            return (small.law.r, small.law.s) == (big.law.r, big.law.s)
        return not small.estimate_shape and small.law == big.law
    return small.law == big.law


def is_nested(small, big) -> bool:
    """Default nesting rule between two ModelSpecs.

    Same likelihood kind and law family, mean orders ``k_small <= k_big`` and
    either the same volatility family with component-wise smaller orders or
    Arch(p) inside Garch(p', q) with ``p <= p'``.
    """
    if small.likelihood != big.likelihood or not _law_nested(small, big):
        return False
    if small.mean.intercept and not big.mean.intercept:
        return False
    if small.mean.k > big.mean.k:
        return False
    a, b = small.vol, big.vol
    if a.family == b.family:
        return a.p <= b.p and a.q <= b.q
    return a.family == "arch" and b.family == "garch" and a.p <= b.p


@dataclass(frozen=True)
class ComparisonRow:
    model_id: str
    loglik: float
    n_p: int
    bic_star: float
    caic: float
    nested: bool
    bic_star_diff: float | None = None
    caic_diff: float | None = None
    grade: EvidenceGrade | None = None

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "loglik": self.loglik,
            "n_p": self.n_p,
            "bic_star": self.bic_star,
            "caic": self.caic,
            "nested": self.nested,
            "bic_star_diff": self.bic_star_diff,
            "caic_diff": self.caic_diff,
            "grade": None if self.grade is None else self.grade.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonRow":
        g = d.get("grade")
        grade = None
        if g is not None:
            label = {e.label: e for e in Evidence}[g["grade"]]
            grade = EvidenceGrade(label, g["magnitude"], g["direction"])
        return cls(
            model_id=d["model_id"],
            loglik=d["loglik"],
            n_p=d["n_p"],
            bic_star=d["bic_star"],
            caic=d["caic"],
            nested=d["nested"],
            bic_star_diff=d["bic_star_diff"],
            caic_diff=d["caic_diff"],
            grade=grade,
        )


@dataclass(frozen=True)
class ComparisonReport:
    baseline: str
    n: int
    rows: tuple[ComparisonRow, ...]

    def row(self, model_id: str) -> ComparisonRow:
        for r in self.rows:
            if r.model_id == model_id:
                return r
        raise KeyError(model_id)

    def to_dict(self) -> dict:
        return {"baseline": self.baseline, "n": self.n, "rows": [r.to_dict() for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonReport":
        return cls(d["baseline"], d["n"], tuple(ComparisonRow.from_dict(r) for r in d["rows"]))


def compare_nested(results, baseline: str, nesting: dict | None = None) -> ComparisonReport:
    """Criterion differences of every fit against ``baseline``.

    ``results`` are objects with ``model_id``, ``loglik``, ``n``, ``n_p``,
    ``bic_star``, ``caic`` and ``spec`` (FitResult or a loaded report).
    ``nesting`` maps model ids to an explicit nested flag; ids absent from it
    fall back to :func:`is_nested` on the specs. Differences are
    ``baseline - model``, so positive values favour the model. Nested rows get
    a BIC* difference and grade; the others a CAIC difference and no grade.
    """
    results = list(results)
    nesting = dict(nesting or {})
    by_id = {}
    for r in results:
        if r.model_id in by_id:
            raise ComparisonError(f"duplicate model id {r.model_id!r}")
        by_id[r.model_id] = r
    if baseline not in by_id:
        raise ComparisonError(f"baseline {baseline!r} is not among the results")
    unknown = set(nesting) - set(by_id)
    if unknown:
        raise ComparisonError(f"nesting flags given for unknown models: {sorted(unknown)}")
    base = by_id[baseline]
    sizes = {r.n for r in results}
    if len(sizes) != 1:
        raise ComparisonError(f"results were fitted on different sample sizes {sorted(sizes)}")

    rows = []
    for r in results:
        if r.model_id == baseline:
            nested = True
        elif r.model_id in nesting:
            nested = bool(nesting[r.model_id])
        else:
            nested = is_nested(base.spec, r.spec)
        if nested:
            d = base.bic_star - r.bic_star
            row = ComparisonRow(r.model_id, r.loglik, r.n_p, r.bic_star, r.caic, True, bic_star_diff=d, grade=evidence_grade(d))
        else:
            d = base.caic - r.caic
            row = ComparisonRow(r.model_id, r.loglik, r.n_p, r.bic_star, r.caic, False, caic_diff=d)
        rows.append(row)
    rows.sort(key=lambda row: (row.bic_star, row.model_id))
    return ComparisonReport(baseline, sizes.pop(), tuple(rows))
