"""Versioned JSON reports for fits and comparisons.

Floats are written with 17 significant digits so a report read back gives
bit-identical numbers; NaN and infinities use the ``NaN``/``Infinity``
tokens that Python's json module accepts. Output is byte-deterministic.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ecvol import __version__
from ecvol.errors import InputError
from ecvol.estimate import FitResult, ModelSpec
from ecvol.select import ComparisonReport, bic_star, caic

__all__ = [
    "SCHEMA_VERSION",
    "FitReport",
    "digest_file",
    "dumps",
    "read_comparison",
    "read_report",
    "write_json",
]

SCHEMA_VERSION = 1
TOOL = "ecvol"


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    Path(path).write_text(dumps(data), encoding="utf-8")


def digest_file(path) -> dict:
    data = Path(path).read_bytes()
    return {"name": Path(path).name, "sha256": hashlib.sha256(data).hexdigest()}


@dataclass(frozen=True)
class FitReport:
    """Persisted form of a fit, optionally carrying a comparison."""

    model: dict
    estimates: dict
    loglik: float
    n: int
    n_p: int
    bic_star: float
    caic: float
    flags: dict
    diagnostics: dict = field(default_factory=dict)
    input: dict | None = None
    comparison: dict | None = None
    schema_version: int = SCHEMA_VERSION
    tool: str = TOOL
    version: str = __version__

    @classmethod
    def from_result(cls, result: FitResult, input_info: dict | None = None) -> "FitReport":
        return cls(
            model=result.spec.to_dict() | {"id": result.model_id},
            estimates=dict(result.params),
            loglik=float(result.loglik),
            n=int(result.n),
            n_p=int(result.n_p),
            bic_star=float(result.bic_star),
            caic=float(result.caic),
            flags={
                "converged": bool(result.converged),
                "nonstandard_eabs": bool(result.nonstandard_eabs),
                "stationary": bool(result.stationary),
                "persistence": float(result.persistence),
            },
            diagnostics={
                "grad_norm": float(result.grad_norm),
                "start_index": int(result.start_index),
                "starts": [s.to_dict() for s in result.starts],
            },
            input=input_info,
        )

    @property
    def model_id(self) -> str:
        return self.model["id"]

    @property
    def spec(self) -> ModelSpec:
        return ModelSpec.from_dict({k: v for k, v in self.model.items() if k != "id"})

    def recomputed_criteria(self) -> tuple[float, float]:
        return bic_star(self.loglik, self.n, self.n_p), caic(self.loglik, self.n, self.n_p)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool": self.tool,
            "version": self.version,
            "input": self.input,
            "model": self.model,
            "estimates": self.estimates,
            "loglik": self.loglik,
            "n": self.n,
            "n_p": self.n_p,
            "bic_star": self.bic_star,
            "caic": self.caic,
            "flags": self.flags,
            "diagnostics": self.diagnostics,
            "comparison": self.comparison,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise InputError(f"unsupported report schema version {d.get('schema_version')!r}")
        try:
            return cls(
                model=d["model"],
                estimates=d["estimates"],
                loglik=float(d["loglik"]),
                n=int(d["n"]),
                n_p=int(d["n_p"]),
                bic_star=float(d["bic_star"]),
                caic=float(d["caic"]),
                flags=d["flags"],
                diagnostics=d.get("diagnostics", {}),
                input=d.get("input"),
                comparison=d.get("comparison"),
                schema_version=d["schema_version"],
                tool=d.get("tool", TOOL),
                version=d.get("version", __version__),
            )
        except KeyError as exc:
            raise InputError(f"report is missing field {exc.args[0]!r}") from exc

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "FitReport":
        return cls.from_dict(json.loads(text))


def _load(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def read_report(path) -> FitReport:
    return FitReport.from_dict(_load(path))


def read_comparison(path) -> ComparisonReport:
    d = _load(path)
    return ComparisonReport.from_dict(d.get("comparison", d))
