# engine/report.py
# -----------------------------------------------------------------------------
# Purpose:
#   Identity reports: the outcome of a coefficientwise LHS-vs-RHS comparison.
#   A report is plain data and serializes to one JSON object per line, with
#   coefficients as decimal strings so arbitrarily large integers survive.
# -----------------------------------------------------------------------------

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from engine.qseries import QSeries, Window, first_mismatch

Params = dict[str, int | str]


@dataclass(frozen=True)
class Mismatch:
    z_exp: int
    q_exp: int
    lhs: int
    rhs: int
    label: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "z_exp": self.z_exp,
            "q_exp": self.q_exp,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Mismatch:
        return cls(int(d["z_exp"]), int(d["q_exp"]), int(d["lhs"]), int(d["rhs"]), d.get("label"))


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    params: Params
    order: int
    z_window: Window | None
    match: bool
    first_mismatch: Mismatch | None = None
    elapsed_ms: int = 0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.match != (self.first_mismatch is None):
            raise ValueError(f"{self.identity_id}: match={self.match} disagrees with first_mismatch")

    def without_timing(self) -> IdentityReport:
        return replace(self, elapsed_ms=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "params": dict(self.params),
            "order": self.order,
            "z_window": list(self.z_window) if self.z_window is not None else None,
            "match": self.match,
            "first_mismatch": self.first_mismatch.to_dict() if self.first_mismatch else None,
            "elapsed_ms": self.elapsed_ms,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> IdentityReport:
        window = d.get("z_window")
        mm = d.get("first_mismatch")
        return cls(
            identity_id=d["identity_id"],
            params=dict(d.get("params") or {}),
            order=int(d["order"]),
            z_window=(int(window[0]), int(window[1])) if window is not None else None,
            match=bool(d["match"]),
            first_mismatch=Mismatch.from_dict(mm) if mm else None,
            elapsed_ms=int(d.get("elapsed_ms", 0)),
            notes=tuple(d.get("notes") or ()),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, line: str) -> IdentityReport:
        return cls.from_dict(json.loads(line))


def _elapsed_ms(started: float | None) -> int:
    return 0 if started is None else int((time.perf_counter() - started) * 1000)


def compare_series(
    identity_id: str,
    params: Params,
    lhs: QSeries,
    rhs: QSeries,
    z_window: Window | None = None,
    started: float | None = None,
    label: str | None = None,
) -> IdentityReport:
    """Report on lhs == rhs up to min(order) inside z_window."""
    found = first_mismatch(lhs, rhs, z_window)
    mismatch = Mismatch(*found, label=label) if found else None
    return IdentityReport(
        identity_id=identity_id,
        params=params,
        order=min(lhs.order, rhs.order),
        z_window=z_window,
        match=mismatch is None,
        first_mismatch=mismatch,
        elapsed_ms=_elapsed_ms(started),
    )


def combine(
    identity_id: str,
    params: Params,
    parts: list[IdentityReport],
    started: float | None = None,
    order: int | None = None,
) -> IdentityReport:
    """One report for several comparisons; the first failing part wins."""
    failed = next((p for p in parts if not p.match), None)
    if order is None:
        order = min((p.order for p in parts), default=0)
    window = parts[0].z_window if parts else None
    notes = tuple(n for p in parts for n in p.notes)
    return IdentityReport(
        identity_id=identity_id,
        params=params,
        order=order,
        z_window=window,
        match=failed is None,
        first_mismatch=failed.first_mismatch if failed else None,
        elapsed_ms=_elapsed_ms(started),
        notes=notes,
    )


def series_rows(coeffs: Mapping[tuple[int, int], int]) -> list[list[int | str]]:
    """[[zExp, qExp, "coeff"], ...] sorted by (qExp, zExp)."""
    return [[z, q, str(c)] for (z, q), c in sorted(coeffs.items(), key=lambda kv: (kv[0][1], kv[0][0])) if c]
