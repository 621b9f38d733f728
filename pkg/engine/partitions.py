# engine/partitions.py
# -----------------------------------------------------------------------------
# Purpose:
#   Integer partitions and their classification by shifted Durfee rectangles.
#
#   For fixed (l, n, m) every partition either lacks the n x m rectangle
#   (only possible when n, m >= 1) or has a maximal k with the
#   (k+n) x ((l+1)k+m) rectangle inside it. Between that rectangle and the
#   next one, (k+n+1) x ((l+1)(k+1)+m), sit l enveloping rectangles
#   (k+n+1) x ((l+1)k+m+i), i = 1..l; the largest one contained is the class
#   index i (0 when none is).
#
#   Rectangles are rows x cols and "lambda contains a x b" means lambda_a >= b.
# -----------------------------------------------------------------------------

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import pandas as pd

from engine.errors import CapExceeded, InvalidPartition
from engine.qseries import INF, Perturbation, QSeries, Term, family_sum, inv_pochhammer, q_term_sum
from engine.report import IdentityReport, Mismatch, combine, compare_series

DEFAULT_CAP = 45


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise InvalidPartition(f"parts must be positive, got {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise InvalidPartition(f"parts must be weakly decreasing, got {parts}")

    @classmethod
    def parse(cls, text: str) -> Partition:
        """'4,3,1' -> (4, 3, 1); an empty string is the empty partition."""
        text = text.strip()
        if not text:
            return cls()
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise InvalidPartition(f"cannot parse parts {text!r}") from exc
        return cls(parts)

    def n(self) -> int:
        return sum(self.parts)

    def part(self, row: int) -> int:
        """lambda_row (1-based), 0 past the last part."""
        return self.parts[row - 1] if 1 <= row <= len(self.parts) else 0

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@lru_cache(maxsize=None)
def _partitions(total: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if total == 0:
        return ((),)
    out: list[tuple[int, ...]] = []
    for first in range(min(total, largest), 0, -1):
        out.extend((first,) + rest for rest in _partitions(total - first, first))
    return tuple(out)


def enumerate_partitions(total: int, cap: int = DEFAULT_CAP) -> list[Partition]:
    """All partitions of total, largest first part first."""
    if total < 0:
        raise ValueError(f"N must be >= 0, got {total}")
    if total > cap:
        raise CapExceeded(f"partition enumeration capped at N={cap}, got N={total}")
    return list(_partition_objects(total))


@lru_cache(maxsize=None)
def _partition_objects(total: int) -> tuple[Partition, ...]:
    return tuple(Partition(p) for p in _partitions(total, total))


def contains_rect(p: Partition, rows: int, cols: int) -> bool:
    if rows == 0 or cols == 0:
        return True
    return p.part(rows) >= cols


class Kind(str, Enum):
    NORECT = "norect"
    RECT = "rect"


@dataclass(frozen=True)
class DurfeeClass:
    l: int
    n: int
    m: int
    kind: Kind
    k: int | None = None
    i: int | None = None

    def durfee_rect(self) -> tuple[int, int] | None:
        if self.kind is Kind.NORECT or self.k is None:
            return None
        return self.k + self.n, (self.l + 1) * self.k + self.m

    def enveloping_rects(self) -> list[tuple[int, int]]:
        rect = self.durfee_rect()
        if rect is None:
            return []
        rows, cols = rect
        return [(rows + 1, cols + j) for j in range(1, self.l + 1)]

    def label(self) -> str:
        if self.kind is Kind.NORECT:
            return "norect"
        return f"rect k={self.k} i={self.i}"

    def __str__(self) -> str:
        if self.kind is Kind.NORECT:
            return "NoRect"
        return f"Rect k={self.k} i={self.i}"


def _check_shifts(l: int, n: int, m: int) -> None:
    if l < 0 or n < 0 or m < 0:
        raise ValueError(f"l, n, m must be >= 0, got l={l}, n={n}, m={m}")


def durfee_classify(p: Partition, l: int, n: int, m: int) -> DurfeeClass:
    _check_shifts(l, n, m)
    if n >= 1 and m >= 1 and not contains_rect(p, n, m):
        return DurfeeClass(l, n, m, Kind.NORECT)
    k = 0
    while contains_rect(p, k + 1 + n, (l + 1) * (k + 1) + m):
        k += 1
    width = (l + 1) * k + m
    i = 0
    for j in range(1, l + 1):
        if contains_rect(p, k + n + 1, width + j):
            i = j
        else:
            break
    return DurfeeClass(l, n, m, Kind.RECT, k, i)


def containment_facts(p: Partition, cls: DurfeeClass) -> list[tuple[str, bool]]:
    """
    The containment statements that pin a class down, as (text, holds): the
    Durfee rectangle, the next one, the enveloping rectangles 1..i and, when
    i < l, enveloping rectangle i+1.
    """
    if cls.kind is Kind.NORECT:
        return [(f"contains {cls.n}x{cls.m}", contains_rect(p, cls.n, cls.m))]
    assert cls.k is not None and cls.i is not None
    rows, cols = cls.k + cls.n, (cls.l + 1) * cls.k + cls.m
    shapes = [(rows, cols), (rows + 1, (cls.l + 1) * (cls.k + 1) + cls.m)]
    shapes += [(rows + 1, cols + j) for j in range(1, min(cls.i + 1, cls.l) + 1)]
    return [(f"contains {r}x{c}", contains_rect(p, r, c)) for r, c in shapes]


# -----------------------------------------------------------------------------
# Generating functions
# -----------------------------------------------------------------------------
def _class_term(l: int, n: int, m: int, k: int, i: int) -> Term:
    width = (l + 1) * k + m
    if i == 0:
        return Term((k + n) * width, (k + n, width))
    return Term((k + n + 1) * (width + i), (k + n, width + i))


def class_genfun(l: int, n: int, m: int, k: int, i: int, order: int) -> QSeries:
    _check_shifts(l, n, m)
    if not 0 <= i <= l or k < 0:
        raise ValueError(f"need k >= 0 and 0 <= i <= {l}, got k={k}, i={i}")
    return q_term_sum([_class_term(l, n, m, k, i)], order)


def _norect_terms(n: int, m: int) -> list[Term]:
    if n < 1 or m < 1:
        return []
    return [Term(n * j, (n - 1, j)) for j in range(m)]


def norect_genfun(l: int, n: int, m: int, order: int) -> QSeries:
    _check_shifts(l, n, m)
    return q_term_sum(_norect_terms(n, m), order)


def _k_range(l: int, n: int, m: int, order: int) -> range:
    k = 0
    while (k + n) * ((l + 1) * k + m) <= order:
        k += 1
    return range(k)


def durfee_families(l: int, n: int, m: int, order: int) -> list[list[Term]]:
    """[norect, class i=0 over k, class i=1 over k, ..., class i=l over k]."""
    _check_shifts(l, n, m)
    ks = _k_range(l, n, m, order)
    families = [_norect_terms(n, m)]
    for i in range(l + 1):
        families.append([_class_term(l, n, m, k, i) for k in ks])
    return families


def durfee_rhs(l: int, n: int, m: int, order: int, perturb: Perturbation | None = None) -> QSeries:
    return family_sum(durfee_families(l, n, m, order), order, perturb=perturb)


# -----------------------------------------------------------------------------
# Census
# -----------------------------------------------------------------------------
def durfee_census(l: int, n: int, m: int, max_n: int, cap: int = DEFAULT_CAP) -> pd.DataFrame:
    """
    Classify every partition of every N <= max_n.

    Returns one row per (N, kind, k, i) with its count; norect rows carry
    k = i = -1.
    """
    _check_shifts(l, n, m)
    rows = []
    for total in range(max_n + 1):
        for p in enumerate_partitions(total, cap):
            cls = durfee_classify(p, l, n, m)
            k = -1 if cls.k is None else cls.k
            i = -1 if cls.i is None else cls.i
            rows.append({"N": total, "kind": cls.kind.value, "k": k, "i": i})
    df = pd.DataFrame(rows, columns=["N", "kind", "k", "i"])
    return (
        df.groupby(["N", "kind", "k", "i"], as_index=False)
        .size()
        .rename(columns={"size": "count"})
        .sort_values(["N", "kind", "k", "i"])
        .reset_index(drop=True)
    )


def _census_mismatch(l: int, n: int, m: int, max_n: int, cap: int) -> Mismatch | None:
    census = durfee_census(l, n, m, max_n, cap)
    counted = {
        (int(total), kind, int(k), int(i)): int(c)
        for total, kind, k, i, c in zip(census["N"], census["kind"], census["k"], census["i"], census["count"])
    }

    expected: dict[tuple[int, str, int, int], int] = {}
    norect = norect_genfun(l, n, m, max_n).q_coefficients()
    for total, c in enumerate(norect):
        if c:
            expected[(total, Kind.NORECT.value, -1, -1)] = c
    for k in _k_range(l, n, m, max_n):
        for i in range(l + 1):
            coeffs = class_genfun(l, n, m, k, i, max_n).q_coefficients()
            for total, c in enumerate(coeffs):
                if c:
                    expected[(total, Kind.RECT.value, k, i)] = c

    for key in sorted(set(counted) | set(expected)):
        got, want = counted.get(key, 0), expected.get(key, 0)
        if got != want:
            total, kind, k, i = key
            label = "norect" if kind == Kind.NORECT.value else f"rect k={k} i={i}"
            return Mismatch(0, total, got, want, label=f"census {label}")

    partitions = inv_pochhammer(INF, max_n).q_coefficients()
    per_n = census.groupby("N")["count"].sum()
    for total in range(max_n + 1):
        got = int(per_n.get(total, 0))
        if got != partitions[total]:
            return Mismatch(0, total, got, partitions[total], label="census total")
    return None


def durfee_identity_check(
    l: int,
    n: int,
    m: int,
    order: int,
    census_cap: int = 28,
    perturb: Perturbation | None = None,
) -> IdentityReport:
    """1/(q)_inf against the class sum, plus the partition census up to q^{min(order, census_cap)}."""
    started = time.perf_counter()
    params = {"l": l, "n": n, "m": m}
    series = compare_series("durfee", params, inv_pochhammer(INF, order), durfee_rhs(l, n, m, order, perturb))
    mismatch = _census_mismatch(l, n, m, min(order, census_cap), DEFAULT_CAP) if census_cap >= 0 else None
    census = IdentityReport("durfee", params, order, None, mismatch is None, mismatch)
    return combine("durfee", params, [series, census], started, order=order)


# -----------------------------------------------------------------------------
# Lines m = (l+1) n + m'
# -----------------------------------------------------------------------------
def normalize_on_line(n: int, m: int, l: int) -> tuple[int, int]:
    """Walk (n, m) -> (n-1, m-l-1) while n >= 1 and m > l."""
    _check_shifts(l, n, m)
    while n >= 1 and m > l:
        n, m = n - 1, m - (l + 1)
    return n, m


def support_identity_sides(n1: int, m1: int, order: int) -> tuple[QSeries, QSeries]:
    """
    [n1, m1 >= 1] sum_{j<m1} q^{n1 j}/((q)_{n1-1}(q)_j) + q^{n1 m1}/((q)_{n1}(q)_{m1})
    against sum_{j=0}^{m1} q^{(n1+1)j}/((q)_{n1}(q)_j).
    """
    lhs = _norect_terms(n1, m1) + [Term(n1 * m1, (n1, m1))]
    rhs = [Term((n1 + 1) * j, (n1, j)) for j in range(m1 + 1)]
    return q_term_sum(lhs, order), q_term_sum(rhs, order)


def line_equivalence_check(l: int, n1: int, m1: int, order: int, perturb: Perturbation | None = None) -> IdentityReport:
    """
    The support identity at (n1, m1) and the Durfee right sides at (n1, m1) and
    (n1+1, m1+l+1); perturb applies to the families of the latter.
    """
    started = time.perf_counter()
    params = {"l": l, "n1": n1, "m1": m1}
    lhs, rhs = support_identity_sides(n1, m1, order)
    direct = compare_series("line-equivalence", params, lhs, rhs, label="support identity")
    shifted = compare_series(
        "line-equivalence",
        params,
        durfee_rhs(l, n1, m1, order),
        durfee_rhs(l, n1 + 1, m1 + l + 1, order, perturb),
        label="neighbouring instances",
    )
    return combine("line-equivalence", params, [direct, shifted], started, order=order)
