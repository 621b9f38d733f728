# engine/voachar.py
# -----------------------------------------------------------------------------
# Purpose:
#   Characters of the lattice modules V_(i),sqrt(N) and the tau map from
#   infinite configurations to semi-infinite monomial indices.
#
#     ch V_(i),sqrt(N) = q^{i^2/(2N) - i/2} * sum_m (z q^i)^m q^{N m(m-1)/2} / (q)_inf
#
#   The sum is the infinite configuration character of type (theta, l) =
#   (i, N-1); the rational prefactor is kept apart as an exact Fraction.
# -----------------------------------------------------------------------------

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from engine.errors import BadModuleIndex
from engine.fibinfinite import InfFibConfig, char_closed, enumerate_upto
from engine.qseries import Perturbation, QSeries, Window
from engine.report import IdentityReport, Mismatch


@dataclass(frozen=True)
class ShiftedSeries:
    q_offset: Fraction
    body: QSeries
    modulus: int = 1

    def __post_init__(self) -> None:
        if (2 * self.modulus) % self.q_offset.denominator:
            raise ValueError(f"offset {self.q_offset} has a denominator not dividing 2N={2 * self.modulus}")

    def __str__(self) -> str:
        return f"q^({self.q_offset}) * [{self.body}]"


def _check_module(i: int, big_n: int) -> None:
    if big_n < 1:
        raise BadModuleIndex(f"N must be >= 1, got {big_n}")
    if not 0 <= i < big_n:
        raise BadModuleIndex(f"module index i must lie in [0, {big_n - 1}], got {i}")


def q_offset(i: int, big_n: int) -> Fraction:
    _check_module(i, big_n)
    return Fraction(i * i, 2 * big_n) - Fraction(i, 2)


def voa_char(i: int, big_n: int, order: int, z_window: Window | None = None) -> ShiftedSeries:
    _check_module(i, big_n)
    return ShiftedSeries(q_offset(i, big_n), char_closed(i, big_n - 1, order, z_window), big_n)


# -----------------------------------------------------------------------------
# Semi-infinite monomial indices
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class MonomialIndices:
    """i_1 < i_2 < ...: a finite head followed by tail_start, tail_start + step, ..."""

    head: tuple[int, ...]
    tail_start: int
    step: int

    def take(self, count: int) -> list[int]:
        out = list(self.head[:count])
        j = 0
        while len(out) < count:
            out.append(self.tail_start + j * self.step)
            j += 1
        return out

    def violations(self, big_n: int, residue: int) -> list[str]:
        """Which of the four basis conditions fail (empty when all hold)."""
        found = []
        seq = self.take(len(self.head) + 2)
        gaps = [b - a for a, b in zip(seq, seq[1:])]
        if any(g <= 0 for g in gaps):
            found.append("increasing")
        if any(g < big_n for g in gaps):
            found.append("gap")
        if self.tail_start % big_n != residue % big_n:
            found.append("residue")
        if self.step != big_n:
            found.append("tail step")
        return found


def tau(a: InfFibConfig) -> MonomialIndices:
    """Negated support read in increasing order, cut where the vacuum tail resumes."""
    step = a.l + 1
    cut = a.floor() - step
    particles = sorted(a.support(cut), reverse=True)
    head = tuple(-x for x in particles)
    below = particles[-1] - step if particles else a.theta - step
    return MonomialIndices(head, -below, step)


@dataclass(frozen=True)
class AuditReport:
    i: int
    big_n: int
    order: int
    configs_checked: int
    q_offset: Fraction
    residue: int
    literal_residue_ok: bool
    violations: tuple[str, ...] = field(default=())
    first_count_mismatch: Mismatch | None = None
    injective: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations and self.first_count_mismatch is None and self.injective


def basis_audit(i: int, big_n: int, order: int, perturb: Perturbation | None = None) -> AuditReport:
    """
    Map every configuration of type (i, N-1) with energy <= order through tau,
    check the four basis conditions on each image and compare the
    (charge, energy) census with the body of voa_char.

    perturb=(0, delta) adds delta to every census energy.
    """
    _check_module(i, big_n)
    delta = 0
    if perturb is not None:
        if perturb[0] != 0:
            raise ValueError(f"voa-audit has one family (the tau census), got family {perturb[0]}")
        delta = perturb[1]
    theta, l = i, big_n - 1
    residue = (-i) % big_n
    configs = enumerate_upto(theta, l, order)

    violations: list[str] = []
    seen: set[tuple[tuple[int, ...], int]] = set()
    counts: dict[tuple[int, int], int] = {}
    for a in configs:
        image = tau(a)
        conds = image.violations(big_n, residue)
        if conds:
            violations.append(f"{sorted(a.added)}/{sorted(a.removed)}: {', '.join(conds)}")
        seen.add((image.head, image.tail_start))
        key = (a.charge, a.energy + delta)
        counts[key] = counts.get(key, 0) + 1

    body = voa_char(i, big_n, order).body
    mismatch = None
    keys = {(z, q) for z, q in counts} | {(z, q) for z, q in body.coeffs}
    for z, q in sorted(keys, key=lambda k: (k[1], k[0])):
        got, want = counts.get((z, q), 0), body.coeffs.get((z, q), 0)
        if got != want:
            mismatch = Mismatch(z, q, got, want, label="tau census")
            break

    return AuditReport(
        i=i,
        big_n=big_n,
        order=order,
        configs_checked=len(configs),
        q_offset=q_offset(i, big_n),
        residue=residue,
        literal_residue_ok=residue == i % big_n,
        violations=tuple(violations),
        first_count_mismatch=mismatch,
        injective=len(seen) == len(configs),
    )


def audit_report(i: int, big_n: int, order: int, perturb: Perturbation | None = None) -> IdentityReport:
    """basis_audit folded into an IdentityReport."""
    started = time.perf_counter()
    audit = basis_audit(i, big_n, order, perturb)
    mismatch = audit.first_count_mismatch
    if mismatch is None and (audit.violations or not audit.injective):
        mismatch = Mismatch(0, 0, len(audit.violations), 0, label="basis conditions")
    notes = [f"q_offset={audit.q_offset}", f"tail_residue={audit.residue}"]
    if not audit.literal_residue_ok:
        notes.append(f"tail residue is -i mod N = {audit.residue}, not i mod N = {i % big_n}")
    return IdentityReport(
        identity_id="voa-audit",
        params={"i": i, "N": big_n},
        order=order,
        z_window=None,
        match=mismatch is None,
        first_mismatch=mismatch,
        elapsed_ms=int((time.perf_counter() - started) * 1000),
        notes=tuple(notes),
    )
