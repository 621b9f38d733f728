# services/identities.py
# -----------------------------------------------------------------------------
# Purpose:
#   The identity catalog. Every named character / partition identity is data:
#   an id, a parameter schema and either two series builders (lhs, rhs) or a
#   composite check. run_check() evaluates one entry; run_suite() evaluates the
#   configured grid in a fixed order and never aborts on a failing entry.
#
# Conventions:
#   - z^s slice identities are compared in "1/(q)_inf form": the bilateral
#     character is sliced at z^s and divided by its leading monomial.
#   - 1/(q)_n = 0 for n < 0, so one formula covers every s.
#   - Right-hand sides are lists of summand families; perturb=(family, delta)
#     shifts every exponent of one family (fault injection).
# -----------------------------------------------------------------------------

from __future__ import annotations

import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping, NamedTuple, Sequence

import pandas as pd

from engine.errors import FibcfgError
from engine.fibfinite import char_recurrence, char_triple, charfib1_sides, p_limit_sides
from engine.fibinfinite import char_closed, check_theta, left_char, left_char_limit, split_identity_check
from engine.partitions import durfee_families, durfee_identity_check, durfee_rhs, line_equivalence_check, normalize_on_line
from engine.qseries import (
    LaurentPoly,
    Perturbation,
    QSeries,
    Term,
    Window,
    coeff_of_z,
    convex_range,
    family_sum,
    p_infinity,
    q_product,
    qbinom_invert_check,
    qbinomial_theorem_sides,
    series_mul,
)
from engine.report import IdentityReport, Mismatch, Params, combine, compare_series
from engine.voachar import audit_report

Families = list[list[Term]]


def _int(params: Mapping[str, Any], name: str) -> int:
    return int(params[name])


def _sum_terms(exponent: Callable[[int], int], order: int, start: int = 0) -> list[int]:
    return list(convex_range(exponent, order, start))


# -----------------------------------------------------------------------------
# Jacobi triple product
# -----------------------------------------------------------------------------
def _jacobi_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return char_closed(0, 0, order, window)


def _binomial_factor(z_exp: int, q_exp: int, order: int) -> QSeries:
    return QSeries({(0, 0): 1, (z_exp, q_exp): 1}, order)


def _jacobi_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    """prod_{j>=0} (1 + z q^j) prod_{j>=1} (1 + q^j / z), truncated."""
    shifts = [0, 0]
    if perturb is not None:
        index, delta = perturb
        if index not in (0, 1):
            raise ValueError(f"perturbed family {index} out of range [0, 1]")
        shifts[index] = delta
    product = QSeries.one(order)
    for j in range(0, order + 1):
        product = series_mul(product, _binomial_factor(1, j + shifts[0], order))
    for j in range(1, order + 1):
        product = series_mul(product, _binomial_factor(-1, j + shifts[1], order))
    return product.restrict(window) if window is not None else product


# -----------------------------------------------------------------------------
# Bivariate sum-of-products right-hand sides
# -----------------------------------------------------------------------------
class _Side(NamedTuple):
    z_exp: int
    q_exp: int
    denominator: int | float


def _side(
    z_of: Callable[[int], int], q_of: Callable[[int], int], den_of: Callable[[int], int], order: int
) -> list[_Side]:
    return [_Side(z_of(n), q_of(n), den_of(n)) for n in convex_range(q_of, order)]


def _product_family(left: Sequence[_Side], right: Sequence[_Side], order: int, z_pre: int = 0, q_pre: int = 0) -> list[Term]:
    out = []
    for a in left:
        for b in right:
            q_exp = q_pre + a.q_exp + b.q_exp
            if q_exp <= order:
                out.append(Term(q_exp, (a.denominator, b.denominator), z_pre + a.z_exp + b.z_exp))
    return out


def l1_explicit_families(theta: int, order: int) -> Families:
    """The two products of the printed l = 1 factorizations, for theta = 1 or 0."""
    if theta == 1:
        return [
            _product_family(
                _side(lambda n: n, lambda n: n * n, lambda n: n, order),
                _side(lambda k: -k, lambda k: k * k, lambda k: 2 * k, order),
                order,
            ),
            _product_family(
                _side(lambda n: n, lambda n: n * (n + 1), lambda n: n, order),
                _side(lambda k: -k, lambda k: (k + 1) ** 2, lambda k: 2 * k + 1, order),
                order,
            ),
        ]
    if theta == 0:
        return [
            _product_family(
                _side(lambda n: n + 1, lambda n: n * (n + 1), lambda n: n, order),
                _side(lambda k: -k, lambda k: k * (k + 1), lambda k: 2 * k, order),
                order,
            ),
            _product_family(
                _side(lambda n: n, lambda n: n * n, lambda n: n, order),
                _side(lambda k: -k, lambda k: k * (k + 1), lambda k: 2 * k + 1, order),
                order,
            ),
        ]
    raise ValueError(f"l1-explicit needs theta in {{0, 1}}, got {theta}")


def _bilateral_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return char_closed(_int(params, "theta"), _int(params, "l"), order, window)


def _l1_explicit_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return family_sum(l1_explicit_families(_int(params, "theta"), order), order, window, perturb)


def final_theta_zero_families(l: int, order: int, literal_z_power: bool = False) -> Families:
    """
    sum_{i=0}^{l} z^{e_i} q^{i-1+[i=0]} P^l_inf(z q^{l+i}) sum_k z^{-k} q^{(l+1)k(k+1)/2} / (q)_{(l+1)(k+[i=0])+i-1}

    e_i is 1 for i >= 1 (one particle sits in the middle block); literal_z_power
    uses e_i = i instead.
    """
    families = []
    for i in range(l + 1):
        delta = 1 if i == 0 else 0
        z_pre = i if literal_z_power else min(i, 1)
        right = _side(lambda n, i=i: n, lambda n, i=i: (l + i) * n + (l + 1) * n * (n - 1) // 2, lambda n: n, order)
        left = _side(
            lambda k: -k,
            lambda k: (l + 1) * k * (k + 1) // 2,
            lambda k, i=i, delta=delta: (l + 1) * (k + delta) + i - 1,
            order,
        )
        families.append(_product_family(right, left, order, z_pre, i - 1 + delta))
    return families


def _final_theta_zero_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return char_closed(0, _int(params, "l"), order, window)


def _final_theta_zero_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    literal = bool(int(params.get("literal", 0)))
    return family_sum(final_theta_zero_families(_int(params, "l"), order, literal), order, window, perturb)


# -----------------------------------------------------------------------------
# z^s slices
# -----------------------------------------------------------------------------
def slice_shift(theta: int, l: int, s: int) -> int:
    """Exponent of the leading monomial of the z^s slice of the bilateral sum."""
    return theta * s + (l + 1) * s * (s - 1) // 2


def normalized_slice(theta: int, l: int, s: int, order: int) -> QSeries:
    """[z^s] of the bilateral character divided by q^{theta s + (l+1)s(s-1)/2}."""
    check_theta(theta, l)
    shift = slice_shift(theta, l, s)
    full = char_closed(theta, l, order + shift, (s, s))
    return coeff_of_z(full, s).shift(0, -shift)


def _fam(exponent: Callable[[int], int], dens: Callable[[int], tuple[int, ...]], order: int, start: int = 0, coeff: int = 1) -> list[Term]:
    return [Term(exponent(k), dens(k), 0, coeff) for k in _sum_terms(exponent, order, start)]


def generic_slice_families(theta: int, l: int, s: int, order: int) -> Families:
    """
    [z^s] of L_empty R_empty + sum_{j<l} z q^j L_j R_j, normalized.

    Slot (z^e q^f, right shift c, left index k): the empty slot is (1, l, 1),
    slot j is (z q^j, j+l+1, l+1-j). A left index m pairs with n = m + s - e.
    """
    check_theta(theta, l)
    base = slice_shift(theta, l, s)
    slots = [(0, 0, l, 1)] + [(1, j, j + l + 1, l + 1 - j) for j in range(l)]
    families = []
    for e, f, c, k in slots:

        def exponent(m: int, e: int = e, f: int = f, c: int = c) -> int:
            n = m + s - e
            return f + c * n + (l + 1) * n * (n - 1) // 2 - theta * m + (l + 1) * m * (m + 1) // 2 - base

        def dens(m: int, e: int = e, k: int = k) -> tuple[int, ...]:
            return (m + s - e, (m + 1) * (l + 1) - theta - k)

        families.append(_fam(exponent, dens, order, max(0, e - s)))
    return families


def _theta1_pos(s: int, order: int, combined: bool) -> Families:
    start = max(0, -s)
    if not combined:
        return [
            _fam(lambda k: 2 * k * (k + s), lambda k: (k + s, 2 * k), order, start),
            _fam(lambda k: (2 * k + 1) * (k + s + 1), lambda k: (k + s, 2 * k + 1), order, start),
        ]

    def dens(k: int) -> tuple[int, ...]:
        return (k + s, 2 * k + 1)

    return [
        _fam(lambda k: 2 * k * (k + s), dens, order, start),
        _fam(lambda k: 2 * k * (k + s) + 3 * k + s + 1, dens, order, start),
        _fam(lambda k: 2 * k * (k + s) + 2 * k + 1, dens, order, start, coeff=-1),
    ]


def _theta1_neg(t: int, order: int, combined: bool) -> Families:
    start = max(0, -t)
    if not combined:
        return [
            _fam(lambda n: 2 * n * (n + t), lambda n: (n, 2 * (n + t)), order, start),
            _fam(lambda n: (2 * (n + t) + 1) * (n + 1), lambda n: (n, 2 * (n + t) + 1), order, start),
        ]

    def dens(n: int) -> tuple[int, ...]:
        return (n, 2 * (n + t) + 1)

    return [
        _fam(lambda n: 2 * n * (n + t), dens, order, start),
        _fam(lambda n: 2 * n * (n + t) + 2 * (n + t) + 1, dens, order, start, coeff=-1),
        _fam(lambda n: 2 * n * (n + t) + 2 * (n + t) + n + 1, dens, order, start),
    ]


def _theta0_pos(s: int, order: int, combined: bool, head: bool = True) -> Families:
    start = max(0, -s)
    heads = [[Term(0, (s - 1,))]] if head else []
    if not combined:
        return heads + [
            _fam(lambda k: (2 * k + 1) * (k + s), lambda k: (2 * k + 1, k + s), order, start),
            _fam(lambda k: (2 * k + 2) * (k + s + 1), lambda k: (2 * k + 2, k + s), order, start),
        ]

    def dens(k: int) -> tuple[int, ...]:
        return (k + s, 2 * k + 2)

    return heads + [
        _fam(lambda k: (2 * k + 1) * (k + s), dens, order, start),
        _fam(lambda k: (2 * k + 1) * (k + s) + 2 * k + 2, dens, order, start, coeff=-1),
        _fam(lambda k: (2 * k + 1) * (k + s) + 3 * k + s + 2, dens, order, start),
    ]


def _theta0_neg(t: int, order: int, combined: bool) -> Families:
    start = max(0, -t)
    if not combined:
        return [
            _fam(lambda n: 2 * (n + 1) * (n + t + 1), lambda n: (n, 2 * (n + t + 1)), order, start),
            _fam(lambda n: (2 * (n + t) + 1) * n, lambda n: (n, 2 * (n + t) + 1), order, start),
        ]

    def dens(n: int) -> tuple[int, ...]:
        return (n, 2 * (n + t + 1))

    return [
        _fam(lambda n: 2 * n * (n + t) + n, dens, order, start),
        _fam(lambda n: 2 * n * (n + t) + n + 2 * (n + t + 1) + n, dens, order, start),
        _fam(lambda n: 2 * n * (n + t) + n + 2 * (n + t + 1), dens, order, start, coeff=-1),
    ]


def theta_zero_dissection_families(l: int, s: int, order: int, unified: bool = False) -> Families:
    """theta = 0 slices: one (k+s) x ((l+1)k+l) family plus one per i < l."""
    if unified:
        families = []
        for i in range(l + 1):
            delta = 1 if i == l else 0
            families.append(
                _fam(
                    lambda k, i=i: (k + s) * ((l + 1) * k + i),
                    lambda k, i=i, delta=delta: (k + s - 1 + delta, (l + 1) * k + i),
                    order,
                    max(0, 1 - delta - s),
                )
            )
        return families
    families = [_fam(lambda k: (k + s) * ((l + 1) * k + l), lambda k: (k + s, (l + 1) * k + l), order, max(0, -s))]
    for i in range(l):
        families.append(
            _fam(
                lambda k, i=i: (k + s) * ((l + 1) * k + i),
                lambda k, i=i: (k + s - 1, (l + 1) * k + i),
                order,
                max(0, 1 - s),
            )
        )
    return families


def envelope_families(l: int, s: int, order: int) -> Families:
    """theta = 0 slices as one Durfee rectangle family plus one per enveloping rectangle, s in {0, 1}."""
    if s == 0:
        families = [_fam(lambda k: k * ((l + 1) * k + l), lambda k: (k, (l + 1) * k + l), order)]
        for j in range(1, l + 1):
            families.append(
                _fam(lambda k, j=j: (k + 1) * ((l + 1) * k + l + j), lambda k, j=j: (k, (l + 1) * k + l + j), order)
            )
        return families
    if s == 1:
        families = [_fam(lambda k: (k + 1) * ((l + 1) * k + l), lambda k: (k + 1, (l + 1) * k + l), order)]
        for j in range(l):
            families.append(_fam(lambda k, j=j: (k + 1) * ((l + 1) * k + j), lambda k, j=j: (k, (l + 1) * k + j), order))
        return families
    raise ValueError(f"theta0-envelopes form needs s in {{0, 1}}, got {s}")


def durfee_l0_families(s: int, order: int) -> Families:
    """sum_{m - k = s} q^{mk} / ((q)_m (q)_k)."""
    return [_fam(lambda k: (k + s) * k, lambda k: (k + s, k), order, max(0, -s))]


# form -> (theta, l) it belongs to (None: any), builder(theta, l, s, order)
SLICE_FORMS: dict[str, tuple[tuple[int, int] | None, Callable[[int, int, int, int], Families]]] = {
    "generic": (None, lambda th, l, s, d: generic_slice_families(th, l, s, d)),
    "l1-theta1-pos": ((1, 1), lambda th, l, s, d: _theta1_pos(s, d, False)),
    "l1-theta1-pos-combined": ((1, 1), lambda th, l, s, d: _theta1_pos(s, d, True)),
    "l1-theta1-neg": ((1, 1), lambda th, l, s, d: _theta1_neg(-s, d, False)),
    "l1-theta1-neg-combined": ((1, 1), lambda th, l, s, d: _theta1_neg(-s, d, True)),
    "l1-theta0-pos": ((0, 1), lambda th, l, s, d: _theta0_pos(s, d, False)),
    "l1-theta0-pos-combined": ((0, 1), lambda th, l, s, d: _theta0_pos(s, d, True)),
    "l1-theta0-pos-combined-printed": ((0, 1), lambda th, l, s, d: _theta0_pos(s, d, True, head=False)),
    "l1-theta0-neg": ((0, 1), lambda th, l, s, d: _theta0_neg(-s, d, False)),
    "l1-theta0-neg-combined": ((0, 1), lambda th, l, s, d: _theta0_neg(-s, d, True)),
    "theta0-dissection": (None, lambda th, l, s, d: theta_zero_dissection_families(l, s, d)),
    "theta0-dissection-unified": (None, lambda th, l, s, d: theta_zero_dissection_families(l, s, d, unified=True)),
    "theta0-envelopes": (None, lambda th, l, s, d: envelope_families(l, s, d)),
}
THETA_ZERO_FORMS = {"theta0-dissection", "theta0-dissection-unified", "theta0-envelopes"}


def slice_families(theta: int, l: int, s: int, order: int, form: str = "generic") -> Families:
    if form not in SLICE_FORMS:
        raise ValueError(f"unknown slice form {form!r}; expected one of {sorted(SLICE_FORMS)}")
    check_theta(theta, l)
    owner, build = SLICE_FORMS[form]
    if owner is not None and owner != (theta, l):
        raise ValueError(f"form {form!r} belongs to (theta, l) = {owner}, got ({theta}, {l})")
    if form in THETA_ZERO_FORMS and theta != 0:
        raise ValueError(f"form {form!r} needs theta = 0, got {theta}")
    return build(theta, l, s, order)


def _slice_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return normalized_slice(_int(params, "theta"), _int(params, "l"), _int(params, "s"), order)


def _slice_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    form = str(params.get("form", "generic"))
    families = slice_families(_int(params, "theta"), _int(params, "l"), _int(params, "s"), order, form)
    return family_sum(families, order, perturb=perturb)


def _durfee_l0_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return normalized_slice(0, 0, _int(params, "s"), order)


def _durfee_l0_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return family_sum(durfee_l0_families(_int(params, "s"), order), order, perturb=perturb)


# -----------------------------------------------------------------------------
# Correspondence between slices and Durfee instances
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class CorrespondenceEntry:
    theta: int
    l: int
    s: int
    n: int
    m: int
    l_plus_one: int


def correspondence(theta: int, l: int, s: int) -> CorrespondenceEntry:
    check_theta(theta, l)
    if s <= 0:
        return CorrespondenceEntry(theta, l, s, 0, l - s - l * s - theta, l + 1)
    return CorrespondenceEntry(theta, l, s, s, l - theta, l + 1)


def _live_terms(families: Families, order: int) -> Counter[tuple[int, tuple[int | float, ...], int]]:
    return Counter(
        (t.q_exp, tuple(sorted(t.denominators)), t.coeff)
        for fam in families
        for t in fam
        if t.q_exp <= order and all(d >= 0 for d in t.denominators)
    )


def _term_mismatch(families: Families, mapped: Families, order: int) -> Mismatch | None:
    """First (q_exp, denominators) term whose multiplicity differs between the two family lists."""
    left, right = _live_terms(families, order), _live_terms(mapped, order)
    differing = [key for key in set(left) | set(right) if left[key] != right[key]]
    if not differing:
        return None
    key = min(differing)
    q_exp, dens, coeff = key
    label = f"term {coeff} q^{q_exp} / {'*'.join(f'(q)_{d}' for d in dens)}"
    return Mismatch(0, q_exp, left[key], right[key], label=label)


def check_correspondence(theta: int, l: int, s: int, order: int, perturb: Perturbation | None = None) -> IdentityReport:
    """
    The z^s slice of type (theta, l) against its Durfee instance (n, m, l+1).

    Fails unless the slice families and the mapped Durfee families agree term
    for term; the series comparisons catch perturbations of the slice side.
    """
    started = time.perf_counter()
    params: Params = {"theta": theta, "l": l, "s": s}
    entry = correspondence(theta, l, s)
    line = normalize_on_line(entry.n, entry.m, l)
    families = generic_slice_families(theta, l, s, order)
    slice_rhs = family_sum(families, order, perturb=perturb)
    mapped = durfee_families(l, entry.n, entry.m, order)
    termwise = _term_mismatch(families, mapped, order)
    parts = [
        compare_series("correspondence", params, slice_rhs, family_sum(mapped, order), label="mapped instance"),
        compare_series("correspondence", params, slice_rhs, durfee_rhs(l, *line, order), label="line representative"),
        IdentityReport("correspondence", params, order, None, termwise is None, termwise),
    ]
    notes = [
        f"maps to (n, m, l+1) = ({entry.n}, {entry.m}, {entry.l_plus_one})",
        f"line representative {line}",
        "term-for-term" if termwise is None else "terms differ",
    ]
    return replace(combine("correspondence", params, parts, started, order=order), notes=tuple(notes))


# -----------------------------------------------------------------------------
# Small exact checks
# -----------------------------------------------------------------------------
def _poly_mismatch(a: LaurentPoly, b: LaurentPoly, label: str) -> Mismatch | None:
    keys = [k for k in set(a.terms) | set(b.terms) if a.coeff(*k) != b.coeff(*k)]
    if not keys:
        return None
    z, q = min(keys, key=lambda k: (k[1], k[0]))
    return Mismatch(z, q, a.coeff(z, q), b.coeff(z, q), label=label)


def check_finite_chars(
    n_max: int = 18, l_max: int = 4, fib_max: int = 30, perturb: Perturbation | None = None
) -> IdentityReport:
    """
    Triple agreement, Fibonacci counts, the q-binomial theorem, the z -> zq form
    and q -> 1/q inversion. perturb=(0, delta) multiplies every closed form by
    q^delta, (1, delta) every recurrence result.
    """
    started = time.perf_counter()
    params: Params = {"n_max": n_max, "l_max": l_max, "fib_max": fib_max}
    found: Mismatch | None = None
    factors = [LaurentPoly.monomial(0, 0), LaurentPoly.monomial(0, 0)]
    if perturb is not None:
        index, delta = perturb
        if index not in (0, 1):
            raise ValueError(f"finite has families 0 (closed form) and 1 (recurrence), got {index}")
        factors[index] = LaurentPoly.monomial(0, delta)

    def first(candidate: Mismatch | None) -> None:
        nonlocal found
        if found is None and candidate is not None:
            found = candidate

    for l in range(l_max + 1):
        for n in range(n_max + 1):
            triple = char_triple(n, l)
            first(_poly_mismatch(triple.brute, triple.recur * factors[1], f"recurrence n={n} l={l}"))
            first(_poly_mismatch(triple.brute, triple.closed * factors[0], f"closed form n={n} l={l}"))

    fib = [0, 1]
    while len(fib) < fib_max + 3:
        fib.append(fib[-1] + fib[-2])
    for n in range(fib_max + 1):
        value = char_recurrence(n, 1).specialize()
        if value != fib[n + 2]:
            first(Mismatch(0, 0, value, fib[n + 2], label=f"fibonacci n={n}"))

    for big_n in range(13):
        first(_poly_mismatch(*qbinomial_theorem_sides(big_n), f"q-binomial theorem N={big_n}"))
    for big_n in range(1, 15):
        first(_poly_mismatch(*charfib1_sides(big_n), f"chi(zq, q) N={big_n}"))
    for a in range(13):
        for b in range(a + 1):
            first(_poly_mismatch(*qbinom_invert_check(a, b), f"inversion a={a} b={b}"))

    return IdentityReport("finite", params, 0, None, found is None, found, int((time.perf_counter() - started) * 1000))


# -----------------------------------------------------------------------------
# Remaining series identities
# -----------------------------------------------------------------------------
def _p_limit_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return p_limit_sides(_int(params, "l"), order)[0]


def _p_limit_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return p_limit_sides(_int(params, "l"), order, perturb)[1]


ROGERS_RAMANUJAN_RESIDUES = {1: (1, 4), 2: (2, 3)}


def _rogers_ramanujan_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    variant = _int(params, "variant")
    if variant not in ROGERS_RAMANUJAN_RESIDUES:
        raise ValueError(f"rogers-ramanujan variant must be 1 or 2, got {variant}")
    return p_infinity(1, order, z_shift=variant).specialize_z()


def product_exponents(residues: Sequence[int], order: int, perturb: Perturbation | None = None) -> list[int]:
    """Exponents a <= order with a mod 5 in residues; family j is the class residues[j]."""
    shifts = dict.fromkeys(residues, 0)
    if perturb is not None:
        index, delta = perturb
        if not 0 <= index < len(residues):
            raise ValueError(f"perturbed family {index} out of range [0, {len(residues) - 1}]")
        shifts[residues[index]] = delta
    return [a + shifts[a % 5] for a in range(1, order + 1) if a % 5 in shifts]


def _rogers_ramanujan_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    residues = ROGERS_RAMANUJAN_RESIDUES[_int(params, "variant")]
    return q_product(product_exponents(residues, order, perturb), order)


def _left_limit_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return left_char_limit(_int(params, "theta"), _int(params, "l"), _int(params, "k"), order)


def _left_limit_rhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return left_char(_int(params, "theta"), _int(params, "l"), _int(params, "k"), order, perturb)


def _l1_explicit_lhs(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> QSeries:
    return char_closed(_int(params, "theta"), 1, order, window)


# -----------------------------------------------------------------------------
# Composite checks
# -----------------------------------------------------------------------------
def _split(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    theta, l = _int(params, "theta"), _int(params, "l")
    report = split_identity_check(theta, l, order, window, _int(params, "brute_order"), perturb)
    return replace(report, params=params)


def _durfee(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    l, n, m = _int(params, "l"), _int(params, "n"), _int(params, "m")
    report = durfee_identity_check(l, n, m, order, _int(params, "census_cap"), perturb)
    return replace(report, params=params)


def _line_equivalence(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    return line_equivalence_check(_int(params, "l"), _int(params, "n1"), _int(params, "m1"), order, perturb)


def _correspondence(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    return check_correspondence(_int(params, "theta"), _int(params, "l"), _int(params, "s"), order, perturb)


def _finite(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    return check_finite_chars(_int(params, "n_max"), _int(params, "l_max"), _int(params, "fib_max"), perturb)


def _voa_audit(params: Params, order: int, window: Window | None, perturb: Perturbation | None) -> IdentityReport:
    return audit_report(_int(params, "i"), _int(params, "N"), order, perturb)


# -----------------------------------------------------------------------------
# Catalog
# -----------------------------------------------------------------------------
Builder = Callable[[Params, int, Window | None, Perturbation | None], QSeries]
Composite = Callable[[Params, int, Window | None, Perturbation | None], IdentityReport]

DEFAULT_Z_RANGE = 5


class ParamSpec(NamedTuple):
    name: str
    default: int | str | None = None


@dataclass(frozen=True)
class IdentitySpec:
    identity_id: str
    description: str
    params: tuple[ParamSpec, ...] = ()
    lhs: Builder | None = None
    rhs: Builder | None = None
    composite: Composite | None = None
    bivariate: bool = False

    def resolve(self, given: Mapping[str, Any]) -> Params:
        """Schema order, defaults filled in; unknown or missing names raise ValueError."""
        known = {p.name for p in self.params}
        extra = sorted(set(given) - known)
        if extra:
            raise ValueError(f"{self.identity_id} takes no parameter(s) {extra}")
        out: Params = {}
        for p in self.params:
            value = given.get(p.name, p.default)
            if value is None:
                raise ValueError(f"{self.identity_id} needs parameter {p.name!r}")
            out[p.name] = value if isinstance(p.default, str) else int(value)
        return out


def _spec(identity_id: str, description: str, *params: ParamSpec, **kw: Any) -> IdentitySpec:
    return IdentitySpec(identity_id, description, tuple(params), **kw)


CATALOG: dict[str, IdentitySpec] = {
    s.identity_id: s
    for s in (
        _spec("jacobi", "bilateral (0,0) sum against the Jacobi triple product", lhs=_jacobi_lhs, rhs=_jacobi_rhs, bivariate=True),
        _spec(
            "l1-explicit",
            "l = 1 bilateral sum as two products of unilateral sums",
            ParamSpec("theta"),
            lhs=_l1_explicit_lhs,
            rhs=_l1_explicit_rhs,
            bivariate=True,
        ),
        _spec(
            "zslice",
            "normalized z^s slice against a sum-side form",
            ParamSpec("theta"),
            ParamSpec("l"),
            ParamSpec("s"),
            ParamSpec("form", "generic"),
            lhs=_slice_lhs,
            rhs=_slice_rhs,
        ),
        _spec("durfee-l0", "1/(q)_inf as a sum over m - k = s", ParamSpec("s"), lhs=_durfee_l0_lhs, rhs=_durfee_l0_rhs),
        _spec(
            "final-theta-zero",
            "theta = 0 bilateral sum as l + 1 products",
            ParamSpec("l"),
            ParamSpec("literal", 0),
            lhs=_final_theta_zero_lhs,
            rhs=_final_theta_zero_rhs,
            bivariate=True,
        ),
        _spec(
            "left-limit",
            "left part against the limit of finite characters",
            ParamSpec("theta"),
            ParamSpec("l"),
            ParamSpec("k"),
            lhs=_left_limit_lhs,
            rhs=_left_limit_rhs,
        ),
        _spec("p-limit", "P^l_M stabilizes to P^l_inf", ParamSpec("l"), lhs=_p_limit_lhs, rhs=_p_limit_rhs),
        _spec(
            "rogers-ramanujan",
            "P^1_inf at z = q or q^2 against the mod 5 products",
            ParamSpec("variant"),
            lhs=_rogers_ramanujan_lhs,
            rhs=_rogers_ramanujan_rhs,
        ),
        _spec(
            "split",
            "left/right decomposition against the closed form and enumeration",
            ParamSpec("theta"),
            ParamSpec("l"),
            ParamSpec("brute_order", 12),
            composite=_split,
            bivariate=True,
        ),
        _spec(
            "durfee",
            "Durfee rectangle dissection of 1/(q)_inf with partition census",
            ParamSpec("l"),
            ParamSpec("n"),
            ParamSpec("m"),
            ParamSpec("census_cap", 28),
            composite=_durfee,
        ),
        _spec(
            "line-equivalence",
            "support identity and (n, m) ~ (n+1, m+l+1)",
            ParamSpec("l"),
            ParamSpec("n1"),
            ParamSpec("m1"),
            composite=_line_equivalence,
        ),
        _spec(
            "correspondence",
            "z^s slice of type (theta, l) against its Durfee instance",
            ParamSpec("theta"),
            ParamSpec("l"),
            ParamSpec("s"),
            composite=_correspondence,
        ),
        _spec(
            "finite",
            "finite characters: enumeration, recurrence, closed form",
            ParamSpec("n_max", 18),
            ParamSpec("l_max", 4),
            ParamSpec("fib_max", 30),
            composite=_finite,
        ),
        _spec("voa-audit", "tau images and counts for V_(i),sqrt(N)", ParamSpec("i"), ParamSpec("N"), composite=_voa_audit),
    )
}


def catalog_ids() -> list[str]:
    return list(CATALOG)


def run_check(
    identity_id: str,
    params: Mapping[str, Any] | None = None,
    order: int = 30,
    z_window: Window | None = None,
    perturb: Perturbation | None = None,
) -> IdentityReport:
    """Evaluate one catalog entry up to q^order."""
    if identity_id not in CATALOG:
        raise ValueError(f"unknown identity {identity_id!r}; expected one of {catalog_ids()}")
    spec = CATALOG[identity_id]
    resolved = spec.resolve(params or {})
    if spec.bivariate and z_window is None:
        z_window = (-DEFAULT_Z_RANGE, DEFAULT_Z_RANGE)
    if not spec.bivariate:
        z_window = None
    if z_window is not None and z_window[0] > z_window[1]:
        raise ValueError(f"empty z window {z_window}")
    if spec.composite is not None:
        return spec.composite(resolved, order, z_window, perturb)
    assert spec.lhs is not None and spec.rhs is not None
    started = time.perf_counter()
    lhs = spec.lhs(resolved, order, z_window, None)
    rhs = spec.rhs(resolved, order, z_window, perturb)
    return compare_series(identity_id, resolved, lhs, rhs, z_window, started)


# Named entry points
def check_jacobi(order: int, z_window: Window | None = None) -> IdentityReport:
    return run_check("jacobi", {}, order, z_window)


def check_l1_explicit(theta: int, order: int, z_window: Window | None = None) -> IdentityReport:
    return run_check("l1-explicit", {"theta": theta}, order, z_window)


def check_zslice_family(
    theta: int, l: int, s: int, order: int, form: str = "generic", perturb: Perturbation | None = None
) -> IdentityReport:
    return run_check("zslice", {"theta": theta, "l": l, "s": s, "form": form}, order, perturb=perturb)


def check_durfee_l0_slice(s: int, order: int) -> IdentityReport:
    return run_check("durfee-l0", {"s": s}, order)


def check_final_theta_zero(
    l: int, order: int, z_window: Window | None = None, literal_z_power: bool = False
) -> IdentityReport:
    return run_check("final-theta-zero", {"l": l, "literal": int(literal_z_power)}, order, z_window)


def check_split(theta: int, l: int, order: int, z_window: Window | None = None, brute_order: int = 12) -> IdentityReport:
    return run_check("split", {"theta": theta, "l": l, "brute_order": brute_order}, order, z_window)


def check_left_limit(theta: int, l: int, k: int, order: int) -> IdentityReport:
    return run_check("left-limit", {"theta": theta, "l": l, "k": k}, order)


def check_p_limit(l: int, order: int) -> IdentityReport:
    return run_check("p-limit", {"l": l}, order)


def check_rogers_ramanujan(variant: int, order: int) -> IdentityReport:
    return run_check("rogers-ramanujan", {"variant": variant}, order)


def check_durfee(l: int, n: int, m: int, order: int, census_cap: int = 28, perturb: Perturbation | None = None) -> IdentityReport:
    return run_check("durfee", {"l": l, "n": n, "m": m, "census_cap": census_cap}, order, perturb=perturb)


def check_voa_audit(i: int, big_n: int, order: int) -> IdentityReport:
    return run_check("voa-audit", {"i": i, "N": big_n}, order)


# -----------------------------------------------------------------------------
# Suite
# -----------------------------------------------------------------------------
DEFAULT_CHECKS = (
    "finite",
    "jacobi",
    "durfee-l0",
    "l1-explicit",
    "zslice",
    "final-theta-zero",
    "split",
    "left-limit",
    "durfee",
    "correspondence",
    "line-equivalence",
    "p-limit",
    "rogers-ramanujan",
    "voa-audit",
)

PRINTED_L1_FORMS = (
    ("l1-theta1-pos", 1, 0),
    ("l1-theta1-pos-combined", 1, 0),
    ("l1-theta1-neg", 1, 0),
    ("l1-theta1-neg-combined", 1, 0),
    ("l1-theta0-pos", 0, 1),
    ("l1-theta0-pos-combined", 0, 1),
    ("l1-theta0-neg", 0, 0),
    ("l1-theta0-neg-combined", 0, 0),
)


@dataclass(frozen=True)
class SuiteConfig:
    order: int = 30
    z_range: int = DEFAULT_Z_RANGE
    checks: tuple[str, ...] = DEFAULT_CHECKS
    l_max: int = 3
    s_range: int = 3
    n_max: int = 3
    m_max: int = 3
    line_max: int = 4
    slice_range: int = 5
    census_cap: int = 28
    brute_order: int = 12
    left_limit_order: int = 15
    left_limit_l_max: int = 2
    voa_order: int = 12
    voa_modules: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))
    workers: int = 1
    perturb: Mapping[str, Any] | None = None

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> SuiteConfig:
        """Build from the merged config dict (sections series, enumeration, suite)."""
        series = cfg.get("series", {}) or {}
        enumeration = cfg.get("enumeration", {}) or {}
        suite = dict(cfg.get("suite", {}) or {})
        unknown = sorted(set(suite) - set(cls.__dataclass_fields__) - {"order", "z_range"})
        if unknown:
            raise ValueError(f"unknown suite keys {unknown}")
        kw: dict[str, Any] = {
            "order": int(series.get("order", cls.order)),
            "z_range": int(series.get("z_range", cls.z_range)),
            "census_cap": int(enumeration.get("census_cap", cls.census_cap)),
            "brute_order": int(enumeration.get("brute_order", cls.brute_order)),
        }
        for name, value in suite.items():
            if name == "checks":
                kw[name] = tuple(str(c) for c in value or ())
            elif name == "voa_modules":
                kw[name] = tuple((int(i), int(n)) for i, n in value)
            elif name == "perturb":
                kw[name] = dict(value) if value else None
            else:
                kw[name] = int(value)
        return cls(**kw)


class Job(NamedTuple):
    identity_id: str
    params: dict[str, Any]
    order: int
    z_window: Window | None = None
    perturb: Perturbation | None = None


def _pairs(l_max: int) -> list[tuple[int, int]]:
    return [(theta, l) for l in range(l_max + 1) for theta in range(l + 1)]


def suite_jobs(cfg: SuiteConfig) -> list[Job]:
    """The configured grid, in check order then parameter order."""
    d, window = cfg.order, (-cfg.z_range, cfg.z_range)
    s_values = range(-cfg.s_range, cfg.s_range + 1)
    jobs: list[Job] = []
    for check in cfg.checks:
        if check not in CATALOG:
            raise ValueError(f"unknown check {check!r} in suite config")
        if check == "finite":
            jobs.append(Job(check, {}, d))
        elif check == "jacobi":
            jobs.append(Job(check, {}, d, window))
        elif check == "durfee-l0":
            jobs += [Job(check, {"s": s}, d) for s in range(-cfg.slice_range, cfg.slice_range + 1)]
        elif check == "l1-explicit":
            jobs += [Job(check, {"theta": theta}, d, window) for theta in (1, 0)]
        elif check == "zslice":
            for form, theta, low in PRINTED_L1_FORMS:
                sign = -1 if "neg" in form else 1
                for t in range(low, cfg.s_range + 1):
                    jobs.append(Job(check, {"theta": theta, "l": 1, "s": sign * t, "form": form}, d))
            for form in ("theta0-dissection", "theta0-dissection-unified"):
                jobs += [Job(check, {"theta": 0, "l": l, "s": s, "form": form}, d) for l in range(1, cfg.l_max + 1) for s in s_values]
            jobs += [
                Job(check, {"theta": 0, "l": l, "s": s, "form": "theta0-envelopes"}, d) for l in range(2, cfg.l_max + 1) for s in (0, 1)
            ]
            jobs += [Job(check, {"theta": th, "l": l, "s": s, "form": "generic"}, d) for th, l in _pairs(cfg.l_max) for s in s_values]
        elif check == "final-theta-zero":
            jobs += [Job(check, {"l": l}, d, window) for l in range(cfg.l_max + 1)]
        elif check == "split":
            jobs += [Job(check, {"theta": th, "l": l, "brute_order": cfg.brute_order}, d, window) for th, l in _pairs(cfg.l_max)]
        elif check == "left-limit":
            jobs += [
                Job(check, {"theta": th, "l": l, "k": k}, cfg.left_limit_order)
                for th, l in _pairs(cfg.left_limit_l_max)
                for k in range(1, l + 2)
            ]
        elif check == "durfee":
            jobs += [
                Job(check, {"l": l, "n": n, "m": m, "census_cap": cfg.census_cap}, d)
                for l in range(cfg.l_max + 1)
                for n in range(cfg.n_max + 1)
                for m in range(cfg.m_max + 1)
            ]
        elif check == "correspondence":
            jobs += [Job(check, {"theta": th, "l": l, "s": s}, d) for th, l in _pairs(cfg.l_max) for s in s_values]
        elif check == "line-equivalence":
            jobs += [
                Job(check, {"l": l, "n1": n1, "m1": m1}, d)
                for l in range(cfg.l_max + 1)
                for n1 in range(cfg.line_max + 1)
                for m1 in range(cfg.line_max + 1)
            ]
        elif check == "p-limit":
            jobs += [Job(check, {"l": l}, d) for l in range(cfg.l_max + 1)]
        elif check == "rogers-ramanujan":
            jobs += [Job(check, {"variant": v}, d) for v in (1, 2)]
        elif check == "voa-audit":
            jobs += [Job(check, {"i": i, "N": n}, cfg.voa_order) for i, n in cfg.voa_modules]
    return _apply_perturb(jobs, cfg.perturb)


def _apply_perturb(jobs: list[Job], perturb: Mapping[str, Any] | None) -> list[Job]:
    """Attach the configured perturbation to the first job of the named identity."""
    if not perturb:
        return jobs
    target = str(perturb["identity"])
    for index, job in enumerate(jobs):
        if job.identity_id == target:
            jobs[index] = job._replace(perturb=(int(perturb.get("family", 0)), int(perturb.get("delta", 1))))
            return jobs
    raise ValueError(f"perturbation targets {target!r}, which the suite does not run")


def _error_report(job: Job, exc: Exception) -> IdentityReport:
    return IdentityReport(
        identity_id=job.identity_id,
        params=dict(job.params),
        order=job.order,
        z_window=job.z_window,
        match=False,
        first_mismatch=Mismatch(0, 0, 0, 0, label=f"error: {exc}"),
    )


def run_job(job: Job) -> IdentityReport:
    try:
        return run_check(job.identity_id, job.params, job.order, job.z_window, job.perturb)
    except (FibcfgError, ValueError) as exc:
        return _error_report(job, exc)


def run_suite(cfg: SuiteConfig) -> list[IdentityReport]:
    """Every configured check, in suite order; failures become reports."""
    jobs = suite_jobs(cfg)
    if not jobs:
        return []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(run_job, jobs))
    else:
        reports = [run_job(job) for job in jobs]
    failed = sum(not r.match for r in reports)
    print(f"[identities] ran {len(reports)} checks, {failed} mismatches", file=sys.stderr)
    return reports


def summary_frame(reports: Sequence[IdentityReport]) -> pd.DataFrame:
    """One row per report."""
    rows = pd.DataFrame(
        [
            {
                "identity_id": r.identity_id,
                "params": ",".join(f"{k}={v}" for k, v in r.params.items()),
                "order": r.order,
                "match": r.match,
                "mismatch_q": r.first_mismatch.q_exp if r.first_mismatch else None,
                "elapsed_ms": r.elapsed_ms,
            }
            for r in reports
        ],
        columns=["identity_id", "params", "order", "match", "mismatch_q", "elapsed_ms"],
    )
    return rows


def totals_frame(reports: Sequence[IdentityReport]) -> pd.DataFrame:
    rows = summary_frame(reports)
    if rows.empty:
        return pd.DataFrame(columns=["identity_id", "checks", "passed", "failed"])
    grouped = rows.groupby("identity_id", sort=False)["match"].agg(checks="size", passed="sum").reset_index()
    grouped["passed"] = grouped["passed"].astype(int)
    grouped["failed"] = grouped["checks"] - grouped["passed"]
    return grouped
