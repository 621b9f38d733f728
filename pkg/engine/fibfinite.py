# engine/fibfinite.py
# -----------------------------------------------------------------------------
# Finite Fibonacci-l configurations: 0/1 words a_0..a_{n-1} where any two 1's
# are more than l apart. Their character
#
#     chi_n^l(z, q) = sum_a z^{sum a_i} q^{sum i a_i}
#
# is computed three independent ways (brute force, recurrence, closed form).
# -----------------------------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from engine.errors import CapExceeded, InvalidConfiguration
from engine.qseries import LaurentPoly, Perturbation, QSeries, first_mismatch, p_infinity, qbinom, series_from_poly

DEFAULT_CAP = 32


@dataclass(frozen=True)
class FibConfig:
    l: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.l < 0:
            raise InvalidConfiguration(f"l must be >= 0, got {self.l}")
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidConfiguration(f"bits must be 0/1, got {self.bits}")
        ones = [i for i, b in enumerate(self.bits) if b]
        for left, right in zip(ones, ones[1:]):
            if right - left <= self.l:
                raise InvalidConfiguration(f"particles at {left} and {right} closer than l+1={self.l + 1}")

    @classmethod
    def from_string(cls, word: str, l: int) -> FibConfig:
        return cls(l, tuple(int(ch) for ch in word))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def charge(self) -> int:
        return sum(self.bits)

    @property
    def energy(self) -> int:
        return sum(i for i, b in enumerate(self.bits) if b)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class CharTriple:
    brute: LaurentPoly
    recur: LaurentPoly
    closed: LaurentPoly

    @property
    def agree(self) -> bool:
        return self.brute == self.recur == self.closed


def _check_args(n: int, l: int, cap: int) -> None:
    if n < 0 or l < 0:
        raise ValueError(f"n and l must be >= 0, got n={n}, l={l}")
    if n > cap:
        raise CapExceeded(f"exhaustive enumeration capped at n={cap}, got n={n}")


def _walk(n: int, l: int, visit: Callable[[list[int]], None]) -> None:
    """Backtrack over Fib_n^l in lexicographic order; visit sees the 0/1 list."""
    bits = [0] * n

    def step(pos: int, free_from: int) -> None:
        if pos == n:
            visit(bits)
            return
        step(pos + 1, free_from)
        if pos >= free_from:
            bits[pos] = 1
            step(pos + 1, pos + l + 1)
            bits[pos] = 0

    step(0, 0)


def enumerate_configs(n: int, l: int, cap: int = DEFAULT_CAP) -> list[FibConfig]:
    """Every element of Fib_n^l exactly once, lexicographic in the bit word."""
    _check_args(n, l, cap)
    out: list[FibConfig] = []
    _walk(n, l, lambda bits: out.append(FibConfig(l, tuple(bits))))
    return out


def char_brute(n: int, l: int, cap: int = DEFAULT_CAP) -> LaurentPoly:
    _check_args(n, l, cap)
    counts: dict[tuple[int, int], int] = {}

    def tally(bits: list[int]) -> None:
        key = (sum(bits), sum(i for i, b in enumerate(bits) if b))
        counts[key] = counts.get(key, 0) + 1

    _walk(n, l, tally)
    return LaurentPoly(counts)


_RECURRENCE: dict[int, list[LaurentPoly]] = {}


def _seed(m: int) -> LaurentPoly:
    # at most one particle fits on m <= l sites
    terms = {(0, 0): 1}
    terms.update({(1, j): 1 for j in range(m)})
    return LaurentPoly(terms)


def char_recurrence(n: int, l: int) -> LaurentPoly:
    """chi_{n+1} = chi_n + z q^n chi_{n-l}, seeded with chi_0..chi_l."""
    if n < 0 or l < 0:
        raise ValueError(f"n and l must be >= 0, got n={n}, l={l}")
    table = _RECURRENCE.setdefault(l, [])
    if not table:
        table.extend(_seed(m) for m in range(l + 1))
    while len(table) <= n:
        k = len(table) - 1
        table.append(table[k] + LaurentPoly.monomial(1, k) * table[k - l])
    return table[n]


def p_finite(big_n: int, l: int) -> LaurentPoly:
    """P^l_N(z, q) = sum_m z^m q^{(l+1)m(m-1)/2} [N - lm, m]_q."""
    total = LaurentPoly.zero()
    for m in range(big_n // (l + 1) + 1):
        total = total + LaurentPoly.monomial(m, (l + 1) * m * (m - 1) // 2) * qbinom(big_n - l * m, m)
    return total


def char_closed(n: int, l: int) -> LaurentPoly:
    """chi_n^l = P^l_{n+l}."""
    if n < 0 or l < 0:
        raise ValueError(f"n and l must be >= 0, got n={n}, l={l}")
    return p_finite(n + l, l)


def char_triple(n: int, l: int, cap: int = DEFAULT_CAP) -> CharTriple:
    return CharTriple(char_brute(n, l, cap), char_recurrence(n, l), char_closed(n, l))


def charfib1_sides(big_n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """chi^1_{N-1}(zq, q) against sum_m z^m q^{m^2} [N-m, m]_q."""
    if big_n < 1:
        raise ValueError(f"N must be >= 1, got {big_n}")
    lhs = char_recurrence(big_n - 1, 1).subst(1, 1)
    rhs = LaurentPoly.zero()
    for m in range(big_n // 2 + 1):
        rhs = rhs + LaurentPoly.monomial(m, m * m) * qbinom(big_n - m, m)
    return lhs, rhs


def p_limit_sides(l: int, order: int, perturb: Perturbation | None = None) -> tuple[QSeries, QSeries]:
    """P^l_M truncated at order for a large enough M, and P^l_inf (perturb applies to the latter)."""
    big_m = (l + 1) * (order + 1) + order + 1
    finite = LaurentPoly.zero()
    m = 0
    while (l + 1) * m * (m - 1) // 2 <= order:
        finite = finite + LaurentPoly.monomial(m, (l + 1) * m * (m - 1) // 2) * qbinom(big_m - l * m, m)
        m += 1
    return series_from_poly(finite, order), p_infinity(l, order, perturb=perturb)


def p_limit_mismatch(l: int, order: int) -> tuple[int, int, int, int] | None:
    finite, limit = p_limit_sides(l, order)
    return first_mismatch(finite, limit)
