# engine/fibinfinite.py
# -----------------------------------------------------------------------------
# Purpose:
#   Infinite Fibonacci configurations of type (theta, l): 0/1 colorings of Z
#   with any two particles more than l apart, empty far right, and equal to
#   the vacuum Vac_(theta,l) (particles at theta - (l+1)k, k > 0) far left.
#
# What this module provides:
#   - InfFibConfig: a configuration stored as its finite deviation from the
#     vacuum (added / removed positions).
#   - enumerate_upto / char_brute: every configuration of energy <= D.
#   - char_closed: the bilateral sum  sum_m (z q^theta)^m q^{(l+1)m(m-1)/2} / (q)_inf.
#   - char_stabilized: the truncated-denominator sums that converge to it.
#   - left_char / right_char: characters of the two halves of the split at 0,
#     plus the finite q -> 1/q route for the left halves.
#   - split_identity_check: the (l+1)-summand factorization of the character.
#
# Notes:
#   - Energy <= D forces every particle to sit at position <= D, and every
#     deviation to sit above -M with M = (l+1)(D+2) + theta + l + 1. The
#     enumeration runs on [-M - margin, D] and the tests compare two margins.
# -----------------------------------------------------------------------------

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from engine.errors import BadTheta, InvalidConfiguration, StabilizationError, WindowUnderflow
from engine.fibfinite import char_recurrence
from engine.qseries import (
    INF,
    LaurentPoly,
    Perturbation,
    QSeries,
    Term,
    Window,
    convex_range,
    family_sum,
    first_mismatch,
    p_infinity,
    q_term_sum,
    series_from_poly,
)
from engine.report import IdentityReport, combine, compare_series


def check_theta(theta: int, l: int) -> None:
    if l < 0:
        raise BadTheta(f"l must be >= 0, got {l}")
    if not 0 <= theta <= l:
        raise BadTheta(f"theta must lie in [0, {l}], got {theta}")


def is_vacuum_site(theta: int, l: int, x: int) -> bool:
    return x <= theta - (l + 1) and (theta - x) % (l + 1) == 0


@dataclass(frozen=True)
class EnergyCharge:
    charge: int
    energy: int


@dataclass(frozen=True)
class InfFibConfig:
    theta: int
    l: int
    added: frozenset[int] = field(default_factory=frozenset)
    removed: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        check_theta(self.theta, self.l)
        object.__setattr__(self, "added", frozenset(self.added))
        object.__setattr__(self, "removed", frozenset(self.removed))
        bad_added = sorted(x for x in self.added if is_vacuum_site(self.theta, self.l, x))
        if bad_added:
            raise InvalidConfiguration(f"added positions {bad_added} are already vacuum particles")
        bad_removed = sorted(x for x in self.removed if not is_vacuum_site(self.theta, self.l, x))
        if bad_removed:
            raise InvalidConfiguration(f"removed positions {bad_removed} are not vacuum particles")
        particles = self.support(self.floor() - (self.l + 1))
        for left, right in zip(particles, particles[1:]):
            if right - left <= self.l:
                raise InvalidConfiguration(f"particles at {left} and {right} closer than l+1={self.l + 1}")

    def floor(self) -> int:
        """Lowest position where this configuration may differ from the vacuum."""
        return min(self.added | self.removed | {self.theta - (self.l + 1)})

    def occupied(self, x: int) -> bool:
        if x in self.added:
            return True
        return is_vacuum_site(self.theta, self.l, x) and x not in self.removed

    def support(self, lowest: int) -> list[int]:
        """Particle positions >= lowest, ascending."""
        top = max(self.added | {self.theta - (self.l + 1)})
        return [x for x in range(lowest, top + 1) if self.occupied(x)]

    @property
    def charge(self) -> int:
        return len(self.added) - len(self.removed)

    @property
    def energy(self) -> int:
        return sum(self.added) - sum(self.removed)

    def energy_charge(self) -> EnergyCharge:
        return EnergyCharge(self.charge, self.energy)

    def is_vacuum(self) -> bool:
        return not self.added and not self.removed


def vacuum(theta: int, l: int) -> InfFibConfig:
    return InfFibConfig(theta, l)


def vacuum_positions(theta: int, l: int, count: int) -> list[int]:
    """The highest `count` vacuum particles, descending."""
    check_theta(theta, l)
    return [theta - (l + 1) * k for k in range(1, count + 1)]


def window_depth(theta: int, l: int, order: int) -> int:
    return (l + 1) * (order + 2) + theta + l + 1


# -----------------------------------------------------------------------------
# Enumeration: DFS over positions [-M, D] with an exact minimum-completion bound
# -----------------------------------------------------------------------------
Visitor = Callable[[list[int], list[int], int], None]


def _walk(theta: int, l: int, order: int, margin: int, visit: Visitor) -> None:
    check_theta(theta, l)
    if order < 0:
        raise ValueError(f"energy bound must be >= 0, got {order}")
    step = l + 1
    low = -(window_depth(theta, l, order) + margin)
    size = order - low + 1
    vac = [1 if is_vacuum_site(theta, l, low + j) else 0 for j in range(size)]
    below = theta - step * ((theta - low) // step + 1)
    start_gap = min(low - below, step)

    # best[j][g]: least energy change collectible from position low+j onward,
    # with g = min(distance to last particle, l+1)
    best = [[0] * (step + 1) for _ in range(size + 1)]
    for j in range(size - 1, -1, -1):
        x, v = low + j, vac[j]
        for g in range(1, step + 1):
            cost = -v * x + best[j + 1][min(g + 1, step)]
            if g >= step:
                cost = min(cost, (1 - v) * x + best[j + 1][1])
            best[j][g] = cost

    added: list[int] = []
    removed: list[int] = []

    def dfs(j: int, g: int, energy: int) -> None:
        if j == size:
            visit(added, removed, energy)
            return
        x, v = low + j, vac[j]
        g0, e0 = min(g + 1, step), energy - v * x
        if e0 + best[j + 1][g0] <= order:
            if v:
                removed.append(x)
            dfs(j + 1, g0, e0)
            if v:
                removed.pop()
        if g >= step:
            e1 = energy + (1 - v) * x
            if e1 + best[j + 1][1] <= order:
                if not v:
                    added.append(x)
                dfs(j + 1, 1, e1)
                if not v:
                    added.pop()

    dfs(0, start_gap, 0)


def enumerate_upto(theta: int, l: int, order: int, margin: int = 0) -> list[InfFibConfig]:
    """Every configuration of type (theta, l) with energy <= order, each once."""
    out: list[InfFibConfig] = []
    _walk(theta, l, order, margin, lambda a, r, _: out.append(InfFibConfig(theta, l, frozenset(a), frozenset(r))))
    return out


def energy_charge_counts(theta: int, l: int, order: int, margin: int = 0) -> dict[tuple[int, int], int]:
    """(charge, energy) -> number of configurations, for energy <= order."""
    counts: dict[tuple[int, int], int] = {}

    def tally(a: list[int], r: list[int], energy: int) -> None:
        key = (len(a) - len(r), energy)
        counts[key] = counts.get(key, 0) + 1

    _walk(theta, l, order, margin, tally)
    return counts


def char_brute(theta: int, l: int, order: int, z_window: Window | None = None, margin: int = 0) -> QSeries:
    counts = energy_charge_counts(theta, l, order, margin)
    if z_window is not None:
        outside = sorted(z for z, _ in counts if not z_window[0] <= z <= z_window[1])
        if outside:
            raise WindowUnderflow(f"charges {outside} fall outside z-window {z_window}")
    return QSeries(counts, order, z_window)


# -----------------------------------------------------------------------------
# Closed forms
# -----------------------------------------------------------------------------
def _bilateral_exponent(theta: int, l: int) -> Callable[[int], int]:
    return lambda m: theta * m + (l + 1) * m * (m - 1) // 2


def char_closed(theta: int, l: int, order: int, z_window: Window | None = None) -> QSeries:
    """sum_{m in Z} (z q^theta)^m q^{(l+1)m(m-1)/2} / (q)_inf."""
    check_theta(theta, l)
    exponent = _bilateral_exponent(theta, l)
    indices = list(convex_range(exponent, order, 0, 1)) + list(convex_range(exponent, order, -1, -1))
    return q_term_sum((Term(exponent(m), (INF,), m) for m in indices), order, z_window)


def char_stabilized(theta: int, l: int, k: int, order: int, z_window: Window | None = None) -> QSeries:
    """sum_{m >= 1-k} (z q^theta)^m q^{(l+1)m(m-1)/2} / (q)_{m+k-1}; agrees with char_closed below q^k."""
    check_theta(theta, l)
    if k < 1:
        raise ValueError(f"stabilization depth must be >= 1, got {k}")
    exponent = _bilateral_exponent(theta, l)
    indices = convex_range(exponent, order, 1 - k, 1)
    return q_term_sum((Term(exponent(m), (m + k - 1,), m) for m in indices), order, z_window)


def right_char(theta: int, l: int, slot: int | None, order: int) -> QSeries:
    """P^l_inf(z q^c, q) with c = l for the empty slot and c = i + l + 1 for slot i."""
    check_theta(theta, l)
    if slot is not None and not 0 <= slot < l:
        raise ValueError(f"slot must be None or in [0, {l - 1}], got {slot}")
    shift = l if slot is None else slot + l + 1
    return p_infinity(l, order, shift)


def _check_k(l: int, k: int) -> None:
    if not 1 <= k <= l + 1:
        raise ValueError(f"k must lie in [1, {l + 1}], got {k}")


def left_char(theta: int, l: int, k: int, order: int, perturb: Perturbation | None = None) -> QSeries:
    """
    sum_{m >= 0} z^{-m} q^{-theta m + (l+1)m(m+1)/2} / (q)_{(m+1)(l+1) - theta - k}.

    When theta + k > l + 1 the m = 0 denominator index is negative and the term
    vanishes, so the sum effectively starts at m = 1. The sum is a single
    summand family for perturb.
    """
    check_theta(theta, l)
    _check_k(l, k)

    def exponent(m: int) -> int:
        return -theta * m + (l + 1) * m * (m + 1) // 2

    terms = [Term(exponent(m), ((m + 1) * (l + 1) - theta - k,), -m) for m in convex_range(exponent, order)]
    return family_sum([terms], order, perturb=perturb)


def _left_finite(theta: int, l: int, k: int, b: int, order: int) -> QSeries:
    n = (l + 1) * b - theta - k + 1
    chi = char_recurrence(n, l).subst(1, -k, q_invert=True)
    weight = LaurentPoly.monomial(-b, (l + 1) * b * (b + 1) // 2 - theta * b)
    return series_from_poly(chi * weight, order)


def left_char_limit(theta: int, l: int, k: int, order: int, b: int | None = None) -> QSeries:
    """
    Left character through finite polynomials:
    z^{-b} q^{(l+1)b(b+1)/2 - theta b} chi^l_n(z q^{-k}, 1/q), n = (l+1)b - theta - k + 1.

    Evaluated at b and b+1; both must agree up to q^order.
    """
    check_theta(theta, l)
    _check_k(l, k)
    b = max(order + 1, 2) if b is None else b
    if b < 2:
        raise ValueError(f"b must be >= 2, got {b}")
    first = _left_finite(theta, l, k, b, order)
    second = _left_finite(theta, l, k, b + 1, order)
    diff = first_mismatch(first, second)
    if diff is not None:
        raise StabilizationError(f"left part ({theta},{l},{k}) not stable at b={b}: {diff}")
    return first


def split_sum(theta: int, l: int, order: int, perturb: Perturbation | None = None) -> QSeries:
    """
    L_empty R_empty + sum_{i<l} z q^i L_i R_i, with L_i the k = l+1-i left part.

    The l+1 products are the summand families: perturb=(j, delta) multiplies
    product j (0 the empty slot, i+1 slot i) by q^delta.
    """
    check_theta(theta, l)
    shifts = [0] * (l + 1)
    if perturb is not None:
        index, delta = perturb
        if not 0 <= index <= l:
            raise ValueError(f"perturbed family {index} out of range [0, {l}]")
        shifts[index] = delta
    total = (left_char(theta, l, 1, order) * right_char(theta, l, None, order)).shift(0, shifts[0]).truncate(order)
    for i in range(l):
        term = left_char(theta, l, l + 1 - i, order) * right_char(theta, l, i, order)
        total = total + term.shift(1, i + shifts[i + 1]).truncate(order)
    return total


def split_identity_check(
    theta: int,
    l: int,
    order: int,
    z_window: Window | None = None,
    brute_order: int | None = None,
    perturb: Perturbation | None = None,
) -> IdentityReport:
    """
    Compare the split decomposition with char_closed up to q^order and, when
    brute_order is given, with brute enumeration up to q^{min(order, brute_order)}.
    """
    started = time.perf_counter()
    params = {"theta": theta, "l": l}
    closed = char_closed(theta, l, order)
    decomposition = split_sum(theta, l, order, perturb)
    parts = [compare_series("split", params, decomposition, closed, z_window, label="decomposition")]
    if brute_order is not None:
        low = min(order, brute_order)
        brute = char_brute(theta, l, low)
        parts.append(compare_series("split", params, closed.truncate(low), brute, z_window, label="brute"))
    return combine("split", params, parts, started, order=order)
