"""Structured pass/fail records shared by every check and CLI command."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "undecided", "skipped")


def jsonable(value):
    """Convert numpy scalars, complex numbers and tuples into JSON-ready data."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if value is None or isinstance(value, str):
        return value
    return str(value)


@dataclass(frozen=True)
class Detail:
    description: str
    at: object = None
    observed: object = None
    expected: object = None
    ok: bool = True

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "at": jsonable(self.at),
            "observed": jsonable(self.observed),
            "expected": jsonable(self.expected),
            "ok": bool(self.ok),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Detail:
        return cls(d["description"], d.get("at"), d.get("observed"), d.get("expected"), d.get("ok", True))


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    status: str
    max_error: float
    tolerance: float
    details: tuple = ()
    anchor: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skipped")

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "status": self.status,
            "max_error": _encode_float(self.max_error),
            "tolerance": _encode_float(self.tolerance),
            "anchor": self.anchor,
            "details": [d.to_dict() for d in self.details],
        }

    @classmethod
    def from_dict(cls, d: dict) -> VerificationReport:
        return cls(
            d["check_name"],
            d["status"],
            _decode_float(d["max_error"]),
            _decode_float(d["tolerance"]),
            tuple(Detail.from_dict(x) for x in d.get("details", [])),
            d.get("anchor", ""),
        )

    def summary_line(self) -> str:
        return f"{self.status.upper():9s} {self.check_name:40s} max_error={self.max_error:.3g} tol={self.tolerance:.3g}"


def _encode_float(v: float):
    # strict JSON has no infinities; keep them as strings so round trips are lossless
    if math.isfinite(v):
        return float(v)
    return str(v)


def _decode_float(v) -> float:
    return float(v)


class ReportBuilder:
    """Accumulates measured errors and boolean expectations into a report."""

    def __init__(self, check_name: str, tolerance: float, anchor: str = ""):
        self.check_name = check_name
        self.tolerance = tolerance
        self.anchor = anchor
        self.details: list[Detail] = []
        self.max_error = 0.0
        self.failed = False
        self.undecided = False

    def measure(self, description: str, error: float, at=None, observed=None, expected=None, tol: float | None = None) -> bool:
        """Record a numeric error; it fails when above ``tol`` (default: the report tolerance)."""
        tol = self.tolerance if tol is None else tol
        error = float(error)
        ok = math.isfinite(error) and error <= tol
        self.max_error = max(self.max_error, error) if math.isfinite(error) else math.inf
        self.failed |= not ok
        self.details.append(Detail(description, at, observed if observed is not None else error, expected, ok))
        return ok

    def expect(self, description: str, condition: bool, at=None, observed=None, expected=None) -> bool:
        ok = bool(condition)
        self.failed |= not ok
        self.details.append(Detail(description, at, observed, expected, ok))
        return ok

    def note(self, description: str, at=None, observed=None, expected=None) -> None:
        """Informational entry that never affects the status."""
        self.details.append(Detail(description, at, observed, expected, True))

    def crash(self, exc: BaseException) -> None:
        self.failed = True
        self.max_error = math.inf
        self.details.append(Detail(f"check raised {type(exc).__name__}: {exc}", ok=False))

    def build(self) -> VerificationReport:
        status = "fail" if self.failed else "undecided" if self.undecided else "pass"
        return VerificationReport(self.check_name, status, self.max_error, self.tolerance, tuple(self.details), self.anchor)


def skipped(check_name: str, why: str, anchor: str = "") -> VerificationReport:
    return VerificationReport(check_name, "skipped", 0.0, 0.0, (Detail(why),), anchor)
