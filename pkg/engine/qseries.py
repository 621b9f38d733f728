# engine/qseries.py
# -----------------------------------------------------------------------------
# Purpose:
#   Exact arithmetic for Laurent polynomials in (z, q) and for truncated
#   bivariate power series in Z[z, 1/z][[q]], plus the standard q-objects every
#   other module consumes: (q)_n, 1/(q)_n, 1/(q)_inf and Gaussian binomials.
#
# Representation:
#   - LaurentPoly: immutable sparse map (zExp, qExp) -> int, no stored zeros.
#   - QSeries: sparse map restricted to q-degree <= order and to a z-window.
#     A series is "complete" when every nonzero coefficient up to `order` lies
#     inside its window (all builders produce complete series). An incomplete
#     series only knows coefficients inside its window; reading outside raises.
#   - Univariate series use the window (0, 0).
#
# Coefficients are Python ints (arbitrary precision), so nothing overflows.
# -----------------------------------------------------------------------------

from __future__ import annotations

import math
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from engine.errors import NegativeQExponent, TruncationError, WindowUnderflow

Monomial = tuple[int, int]
Window = tuple[int, int]

# Stand-in index for (q)_inf in inv_pochhammer / Term denominators.
INF = math.inf


# -----------------------------------------------------------------------------
# Text form: z-grouped, q ascending inside each group ("1 + z(1+q+q^2) + z^2 q^2")
# -----------------------------------------------------------------------------
def _q_monomial(coeff: int, q_exp: int) -> str:
    if q_exp == 0:
        return str(coeff)
    base = "q" if q_exp == 1 else f"q^{q_exp}"
    if coeff == 1:
        return base
    if coeff == -1:
        return "-" + base
    return f"{coeff}{base}"


def format_q_poly(items: Iterable[tuple[int, int]]) -> str:
    """Render [(qExp, coeff), ...] (already sorted) as '1+q+2q^2'."""
    out = ""
    for q_exp, coeff in items:
        token = _q_monomial(coeff, q_exp)
        if not out:
            out = token
        elif token.startswith("-"):
            out += token
        else:
            out += "+" + token
    return out or "0"


def _z_group(z_exp: int, items: list[tuple[int, int]]) -> str:
    zpart = "" if z_exp == 0 else ("z" if z_exp == 1 else f"z^{z_exp}")
    if not zpart:
        return format_q_poly(items)
    if len(items) > 1:
        return f"{zpart}({format_q_poly(items)})"
    q_exp, coeff = items[0]
    cpart = "" if coeff == 1 else ("-" if coeff == -1 else str(coeff))
    if q_exp == 0:
        return f"{cpart}{zpart}"
    qpart = "q" if q_exp == 1 else f"q^{q_exp}"
    return f"{cpart}{zpart} {qpart}"


def format_terms(terms: Mapping[Monomial, int]) -> str:
    """Canonical text form of a sparse (z, q) map."""
    if not terms:
        return "0"
    groups: dict[int, list[tuple[int, int]]] = {}
    for (z_exp, q_exp), coeff in sorted(terms.items()):
        groups.setdefault(z_exp, []).append((q_exp, coeff))
    out = ""
    for z_exp in sorted(groups):
        token = _z_group(z_exp, groups[z_exp])
        if not out:
            out = token
        elif token.startswith("-"):
            out += " - " + token[1:]
        else:
            out += " + " + token
    return out


# -----------------------------------------------------------------------------
# LaurentPoly
# -----------------------------------------------------------------------------
class LaurentPoly:
    """Exact finitely supported polynomial in z^{+-1}, q^{+-1} with integer coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None) -> None:
        clean = {(int(z), int(q)): int(c) for (z, q), c in (terms or {}).items() if c}
        self._terms: Mapping[Monomial, int] = MappingProxyType(clean)

    @classmethod
    def monomial(cls, z_exp: int = 0, q_exp: int = 0, coeff: int = 1) -> LaurentPoly:
        return cls({(z_exp, q_exp): coeff})

    @classmethod
    def one(cls) -> LaurentPoly:
        return cls({(0, 0): 1})

    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls()

    @classmethod
    def from_q_dense(cls, coeffs: Sequence[int], z_exp: int = 0) -> LaurentPoly:
        return cls({(z_exp, q): c for q, c in enumerate(coeffs) if c})

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return self._terms

    def coeff(self, z_exp: int, q_exp: int) -> int:
        return self._terms.get((z_exp, q_exp), 0)

    def coeff_of_z(self, z_exp: int) -> LaurentPoly:
        """The q-polynomial multiplying z^{z_exp}, returned with z-exponent 0."""
        return LaurentPoly({(0, q): c for (z, q), c in self._terms.items() if z == z_exp})

    def z_exponents(self) -> list[int]:
        return sorted({z for z, _ in self._terms})

    def min_q(self) -> int:
        return min((q for _, q in self._terms), default=0)

    def specialize(self, z: int = 1, q: int = 1) -> int:
        """Evaluate at integer z, q; both must be +-1 so negative powers stay integral."""
        if z not in (1, -1) or q not in (1, -1):
            raise ValueError(f"specialize only supports z, q in {{1, -1}}, got z={z}, q={q}")
        return sum(c * z ** (ze % 2) * q ** (qe % 2) for (ze, qe), c in self._terms.items())

    def subst(self, z_pow: int = 1, q_shift: int = 0, q_invert: bool = False) -> LaurentPoly:
        """z -> z^{z_pow} q^{q_shift}, then optionally q -> 1/q on the original q powers."""
        return poly_subst(self, (z_pow, q_shift), q_invert)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({(0, 0): other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: LaurentPoly | int) -> LaurentPoly:
        return poly_add(self, _as_poly(other))

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: LaurentPoly | int) -> LaurentPoly:
        return poly_add(self, -_as_poly(other))

    def __rsub__(self, other: LaurentPoly | int) -> LaurentPoly:
        return poly_add(_as_poly(other), -self)

    def __mul__(self, other: LaurentPoly | int) -> LaurentPoly:
        return poly_mul(self, _as_poly(other))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return format_terms(self._terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _as_poly(x: LaurentPoly | int) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly({(0, 0): x})
    raise TypeError(f"expected LaurentPoly or int, got {type(x).__name__}")


def poly_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out = dict(a.terms)
    for k, c in b.terms.items():
        out[k] = out.get(k, 0) + c
    return LaurentPoly(out)


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out: dict[Monomial, int] = {}
    for (z1, q1), c1 in a.terms.items():
        for (z2, q2), c2 in b.terms.items():
            key = (z1 + z2, q1 + q2)
            out[key] = out.get(key, 0) + c1 * c2
    return LaurentPoly(out)


def poly_subst(p: LaurentPoly, z_scale: tuple[int, int] = (1, 0), q_invert: bool = False) -> LaurentPoly:
    """
    Substitute z -> z^{zPow} q^{qShift} and, when q_invert, q -> q^{-1}.

    The inversion acts on the polynomial's own q powers, the shift is applied
    afterwards, so chi(z q^{-1}, q^{-1}) is poly_subst(chi, (1, -1), True).
    """
    z_pow, q_shift = z_scale
    sign = -1 if q_invert else 1
    out: dict[Monomial, int] = {}
    for (z, q), c in p.terms.items():
        key = (z * z_pow, z * q_shift + sign * q)
        out[key] = out.get(key, 0) + c
    return LaurentPoly(out)


# -----------------------------------------------------------------------------
# Gaussian binomials
# -----------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _qbinom_dense(n: int, m: int) -> tuple[int, ...]:
    if m < 0 or m > n:
        return ()
    if m == 0 or m == n:
        return (1,)
    # [n, m] = [n-1, m-1] + q^m [n-1, m]
    left = _qbinom_dense(n - 1, m - 1)
    right = _qbinom_dense(n - 1, m)
    out = [0] * (m * (n - m) + 1)
    for j, c in enumerate(left):
        out[j] += c
    for j, c in enumerate(right):
        out[j + m] += c
    return tuple(out)


def qbinom(n: int, m: int) -> LaurentPoly:
    """Gaussian binomial [n m]_q; zero when m < 0 or m > n."""
    if n < 0:
        return LaurentPoly.zero()
    return LaurentPoly.from_q_dense(_qbinom_dense(n, m))


def qbinom_invert_check(a: int, b: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Both sides of [a b]_{1/q} = q^{-(a-b)b} [a b]_q, evaluated exactly."""
    if not 0 <= b <= a:
        raise ValueError(f"need 0 <= b <= a, got a={a}, b={b}")
    gauss = qbinom(a, b)
    lhs = poly_subst(gauss, (1, 0), q_invert=True)
    rhs = LaurentPoly.monomial(0, -(a - b) * b) * gauss
    return lhs, rhs


def qbinomial_theorem_sides(n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """prod_{j=1}^{n} (1 + z q^j) and sum_m z^m q^{m(m+1)/2} [n m]_q."""
    product = LaurentPoly.one()
    for j in range(1, n + 1):
        product = product * LaurentPoly({(0, 0): 1, (1, j): 1})
    total = LaurentPoly.zero()
    for m in range(n + 1):
        total = total + LaurentPoly.monomial(m, m * (m + 1) // 2) * qbinom(n, m)
    return product, total


# -----------------------------------------------------------------------------
# Dense univariate helpers (lists indexed by q-exponent, length order + 1)
# -----------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _inv_poch_dense(n: int, order: int) -> tuple[int, ...]:
    # n is already clamped to [0, order]
    c = [0] * (order + 1)
    c[0] = 1
    for i in range(1, n + 1):
        for j in range(i, order + 1):
            c[j] += c[j - i]
    return tuple(c)


def _inv_poch(n: int | float, order: int) -> tuple[int, ...] | None:
    """Dense 1/(q)_n truncated at order; None encodes the zero series (n < 0)."""
    if n < 0:
        return None
    eff = order if n == INF or n > order else int(n)
    return _inv_poch_dense(eff, order)


def _dense_mul(a: Sequence[int], b: Sequence[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, x in enumerate(a):
        if i > order:
            break
        if not x:
            continue
        for j in range(0, min(len(b), order + 1 - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


@lru_cache(maxsize=4096)
def _denominator_product(denominators: tuple[int | float, ...], order: int) -> tuple[int, ...] | None:
    """Dense 1/prod (q)_{d}; None when some index is negative."""
    acc: Sequence[int] | None = None
    for d in denominators:
        dense = _inv_poch(d, order)
        if dense is None:
            return None
        acc = dense if acc is None else _dense_mul(acc, dense, order)
    if acc is None:
        acc = [1] + [0] * order
    return tuple(acc)


class Term(NamedTuple):
    """coeff * z^{z_exp} q^{q_exp} / prod (q)_{d} over denominators."""

    q_exp: int
    denominators: tuple[int | float, ...] = ()
    z_exp: int = 0
    coeff: int = 1


def q_term_sum(terms: Iterable[Term], order: int, z_window: Window | None = None) -> QSeries:
    """
    Sum of q-hypergeometric-style terms, truncated at order.

    Terms with a negative denominator index vanish (1/(q)_n = 0 for n < 0).
    Terms whose z-exponent falls outside an explicit z_window are dropped and
    the result is then marked incomplete.
    """
    if order < 0:
        raise TruncationError(f"order must be >= 0, got {order}")
    slices: dict[int, list[int]] = {}
    dropped = False
    for t in terms:
        if any(d < 0 for d in t.denominators):
            continue
        if t.q_exp < 0:
            raise NegativeQExponent(f"term with q^{t.q_exp}")
        if t.q_exp > order or not t.coeff:
            continue
        if z_window is not None and not z_window[0] <= t.z_exp <= z_window[1]:
            dropped = True
            continue
        dense = _denominator_product(tuple(sorted(t.denominators)), order - t.q_exp)
        if dense is None:
            continue
        row = slices.setdefault(t.z_exp, [0] * (order + 1))
        for j, c in enumerate(dense):
            if c:
                row[t.q_exp + j] += t.coeff * c
    coeffs = {(z, q): c for z, row in slices.items() for q, c in enumerate(row) if c}
    series = QSeries(coeffs, order, z_window)
    return series.restrict(z_window) if dropped and z_window is not None else series


Perturbation = tuple[int, int]


def _is_live(t: Term, order: int) -> bool:
    return bool(t.coeff) and t.q_exp <= order and all(d >= 0 for d in t.denominators)


def family_sum(
    families: Sequence[Sequence[Term]],
    order: int,
    z_window: Window | None = None,
    perturb: Perturbation | None = None,
) -> QSeries:
    """
    Sum of several summand families. perturb=(index, delta) adds delta to the
    q-exponent of every term of one family (fault injection for the checks).
    """
    chosen = [list(f) for f in families]
    if perturb is not None:
        index, delta = perturb
        if not 0 <= index < len(chosen):
            raise ValueError(f"perturbed family {index} out of range [0, {len(chosen) - 1}]")
        if not any(_is_live(t, order) for t in chosen[index]):
            raise ValueError(f"perturbed family {index} has no nonzero term up to q^{order}")
        chosen[index] = [t._replace(q_exp=t.q_exp + delta) for t in chosen[index]]
    return q_term_sum((t for f in chosen for t in f), order, z_window)


def convex_range(exponent: Callable[[int], int], order: int, start: int = 0, step: int = 1) -> Iterator[int]:
    """
    Summation indices start, start+step, ... for a convex exponent in m.

    Stops at the first index whose exponent exceeds order while the exponent is
    no longer decreasing; every later index then also exceeds order.
    """
    m = start
    while True:
        e = exponent(m)
        if e > order and exponent(m + step) >= e:
            return
        yield m
        m += step


# -----------------------------------------------------------------------------
# QSeries
# -----------------------------------------------------------------------------
class QSeries:
    """Truncated element of Z[z, 1/z][[q]] with an explicit z-window."""

    __slots__ = ("order", "z_window", "complete", "_coeffs")

    def __init__(
        self,
        coeffs: Mapping[Monomial, int] | None = None,
        order: int = 0,
        z_window: Window | None = None,
        complete: bool = True,
    ) -> None:
        if order < 0:
            raise TruncationError(f"order must be >= 0, got {order}")
        clean: dict[Monomial, int] = {}
        for (z, q), c in (coeffs or {}).items():
            if not c:
                continue
            if q < 0:
                raise NegativeQExponent(f"coefficient at z^{z} q^{q}")
            if q <= order:
                clean[(z, q)] = int(c)
        if z_window is None:
            zs = [z for z, _ in clean]
            z_window = (min(zs), max(zs)) if zs else (0, 0)
        lo, hi = z_window
        if lo > hi:
            raise WindowUnderflow(f"empty z-window {z_window}")
        outside = [k for k in clean if not lo <= k[0] <= hi]
        for k in outside:
            del clean[k]
        self.order = order
        self.z_window: Window = (lo, hi)
        self.complete = complete and not outside
        self._coeffs: Mapping[Monomial, int] = MappingProxyType(clean)

    # --- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, order: int, z_window: Window = (0, 0)) -> QSeries:
        return cls({}, order, z_window)

    @classmethod
    def one(cls, order: int) -> QSeries:
        return cls({(0, 0): 1}, order, (0, 0))

    @classmethod
    def from_q_dense(cls, coeffs: Sequence[int], order: int, z_exp: int = 0) -> QSeries:
        return cls({(z_exp, q): c for q, c in enumerate(coeffs) if c}, order, (z_exp, z_exp))

    # --- reads ---------------------------------------------------------------
    @property
    def coeffs(self) -> Mapping[Monomial, int]:
        return self._coeffs

    def known_window(self) -> tuple[float, float]:
        """z-range on which coefficients are exact (unbounded when complete)."""
        if self.complete:
            return (-math.inf, math.inf)
        return (float(self.z_window[0]), float(self.z_window[1]))

    def _check_q(self, q_exp: int) -> None:
        if not 0 <= q_exp <= self.order:
            raise TruncationError(f"q^{q_exp} outside [0, {self.order}]")

    def _check_z(self, z_exp: int) -> None:
        lo, hi = self.z_window
        if not lo <= z_exp <= hi:
            raise WindowUnderflow(f"z^{z_exp} outside window [{lo}, {hi}]")

    def coeff(self, z_exp: int, q_exp: int) -> int:
        self._check_q(q_exp)
        self._check_z(z_exp)
        return self._coeffs.get((z_exp, q_exp), 0)

    def __getitem__(self, key: Monomial) -> int:
        return self.coeff(*key)

    def _peek(self, z_exp: int, q_exp: int) -> int:
        # Unchecked in z for complete series, where anything outside the window is 0.
        if not self.complete:
            self._check_z(z_exp)
        return self._coeffs.get((z_exp, q_exp), 0)

    def slice(self, z_exp: int) -> QSeries:
        self._check_z(z_exp)
        return QSeries({(0, q): c for (z, q), c in self._coeffs.items() if z == z_exp}, self.order, (0, 0))

    def q_coefficients(self, z_exp: int = 0) -> list[int]:
        self._check_z(z_exp)
        row = [0] * (self.order + 1)
        for (z, q), c in self._coeffs.items():
            if z == z_exp:
                row[q] = c
        return row

    def is_zero(self) -> bool:
        return not self._coeffs

    def items(self) -> list[tuple[int, int, int]]:
        """(zExp, qExp, coeff) sorted by (qExp, zExp)."""
        return sorted(((z, q, c) for (z, q), c in self._coeffs.items()), key=lambda t: (t[1], t[0]))

    # --- reshaping -----------------------------------------------------------
    def truncate(self, order: int) -> QSeries:
        if order > self.order:
            raise TruncationError(f"cannot raise order {self.order} to {order}")
        return QSeries(self._coeffs, order, self.z_window, self.complete)

    def restrict(self, z_window: Window) -> QSeries:
        """Forget everything outside z_window; the result is exact only inside it."""
        lo, hi = z_window
        klo, khi = self.known_window()
        if lo < klo or hi > khi:
            raise WindowUnderflow(f"window {z_window} exceeds known window {self.z_window}")
        return QSeries(self._coeffs, self.order, z_window, complete=False)

    def shift(self, z_shift: int = 0, q_shift: int = 0) -> QSeries:
        """Multiply by z^{z_shift} q^{q_shift}; a negative q_shift lowers the order."""
        new_order = self.order + q_shift
        if new_order < 0:
            raise TruncationError(f"shift by q^{q_shift} leaves nothing of order {self.order}")
        moved = {}
        for (z, q), c in self._coeffs.items():
            if q + q_shift < 0:
                raise NegativeQExponent(f"z^{z} q^{q} times q^{q_shift}")
            moved[(z + z_shift, q + q_shift)] = c
        lo, hi = self.z_window
        return QSeries(moved, new_order, (lo + z_shift, hi + z_shift), self.complete)

    def specialize_z(self) -> QSeries:
        """Set z = 1 (sum over all z); only meaningful for complete series."""
        if not self.complete:
            raise WindowUnderflow("cannot set z=1 on a series known only inside a window")
        row = [0] * (self.order + 1)
        for (_, q), c in self._coeffs.items():
            row[q] += c
        return QSeries.from_q_dense(row, self.order)

    # --- arithmetic ----------------------------------------------------------
    def __add__(self, other: QSeries | int) -> QSeries:
        return series_add(self, _as_series(other, self.order))

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return QSeries({k: -c for k, c in self._coeffs.items()}, self.order, self.z_window, self.complete)

    def __sub__(self, other: QSeries | int) -> QSeries:
        return series_add(self, -_as_series(other, self.order))

    def __mul__(self, other: QSeries | int) -> QSeries:
        if isinstance(other, int):
            return QSeries({k: c * other for k, c in self._coeffs.items()}, self.order, self.z_window, self.complete)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.order == other.order
            and self.z_window == other.z_window
            and self.complete == other.complete
            and dict(self._coeffs) == dict(other._coeffs)
        )

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return f"{format_terms(self._coeffs)} + O(q^{self.order + 1})"

    def __repr__(self) -> str:
        return f"QSeries(order={self.order}, z_window={self.z_window}, complete={self.complete}, terms={len(self._coeffs)})"


def _as_series(x: QSeries | int, order: int) -> QSeries:
    if isinstance(x, QSeries):
        return x
    if isinstance(x, int):
        return QSeries({(0, 0): x}, order, (0, 0))
    raise TypeError(f"expected QSeries or int, got {type(x).__name__}")


def series_from_poly(p: LaurentPoly, order: int, z_window: Window | None = None) -> QSeries:
    """Truncate a polynomial in Z[z, 1/z][q] to a series; q^{<0} is an error."""
    negative = [k for k in p.terms if k[1] < 0]
    if negative:
        z, q = min(negative, key=lambda k: k[1])
        raise NegativeQExponent(f"polynomial has term z^{z} q^{q}")
    return QSeries(p.terms, order, z_window)


def series_add(a: QSeries, b: QSeries) -> QSeries:
    order = min(a.order, b.order)
    if a.complete and b.complete:
        lo = min(a.z_window[0], b.z_window[0])
        hi = max(a.z_window[1], b.z_window[1])
        window, complete = (lo, hi), True
    else:
        alo, ahi = a.known_window()
        blo, bhi = b.known_window()
        lo_f, hi_f = max(alo, blo), min(ahi, bhi)
        if lo_f > hi_f:
            raise WindowUnderflow(f"windows {a.z_window} and {b.z_window} do not overlap")
        window, complete = (int(lo_f), int(hi_f)), False
    out: dict[Monomial, int] = {}
    for src in (a, b):
        for (z, q), c in src.coeffs.items():
            if q <= order and window[0] <= z <= window[1]:
                out[(z, q)] = out.get((z, q), 0) + c
    return QSeries(out, order, window, complete)


def _support_hull(s: QSeries) -> Window | None:
    zs = [z for z, _ in s.coeffs]
    return (min(zs), max(zs)) if zs else None


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """
    Product truncated at min(order).

    Both complete: exact everywhere. One complete (support [a0, a1]) times one
    known on [b0, b1]: exact on [b0 + a1, b1 + a0]. Neither complete: refused.
    """
    order = min(a.order, b.order)
    if not a.complete and b.complete:
        a, b = b, a
    if not a.complete:
        raise WindowUnderflow("product of two window-restricted series cannot be made exact")
    if b.complete:
        window = (a.z_window[0] + b.z_window[0], a.z_window[1] + b.z_window[1])
        complete = True
    else:
        hull = _support_hull(a)
        if hull is None:
            return QSeries.zero(order, b.z_window)
        window = (b.z_window[0] + hull[1], b.z_window[1] + hull[0])
        if window[0] > window[1]:
            raise WindowUnderflow(
                f"window {b.z_window} is narrower than the z-spread {hull} of the other factor"
            )
        complete = False
    right = sorted(b.coeffs.items(), key=lambda kv: kv[0][1])
    out: dict[Monomial, int] = {}
    for (z1, q1), c1 in a.coeffs.items():
        if q1 > order:
            continue
        for (z2, q2), c2 in right:
            if q1 + q2 > order:
                break
            z = z1 + z2
            if complete or window[0] <= z <= window[1]:
                key = (z, q1 + q2)
                out[key] = out.get(key, 0) + c1 * c2
    return QSeries(out, order, window, complete)


def coeff_of_z(s: QSeries, z_exp: int) -> QSeries:
    """Univariate slice [z^{z_exp}] s."""
    return s.slice(z_exp)


def first_mismatch(a: QSeries, b: QSeries, z_window: Window | None = None) -> tuple[int, int, int, int] | None:
    """
    First (zExp, qExp, a_coeff, b_coeff) where a and b differ, scanning q then z.

    Without a window the comparison covers the overlap of what both series
    know (the hull of both windows when both are complete).
    """
    order = min(a.order, b.order)
    if z_window is None:
        if a.complete and b.complete:
            z_window = (min(a.z_window[0], b.z_window[0]), max(a.z_window[1], b.z_window[1]))
        else:
            lo = max(a.known_window()[0], b.known_window()[0])
            hi = min(a.known_window()[1], b.known_window()[1])
            if lo > hi:
                raise WindowUnderflow(f"windows {a.z_window} and {b.z_window} do not overlap")
            z_window = (int(lo), int(hi))
    lo, hi = z_window
    for s in (a, b):
        klo, khi = s.known_window()
        if lo < klo or hi > khi:
            raise WindowUnderflow(f"comparison window {z_window} exceeds known window {s.z_window}")
    keys = {k for k in a.coeffs} | {k for k in b.coeffs}
    diffs = [
        (q, z)
        for z, q in keys
        if lo <= z <= hi and q <= order and a.coeffs.get((z, q), 0) != b.coeffs.get((z, q), 0)
    ]
    if not diffs:
        return None
    q, z = min(diffs)
    return z, q, a._peek(z, q), b._peek(z, q)


# -----------------------------------------------------------------------------
# Standard q-objects
# -----------------------------------------------------------------------------
def inv_pochhammer(n: int | float, order: int) -> QSeries:
    """1/(q)_n truncated at order; zero for n < 0, partition numbers for n = INF."""
    dense = _inv_poch(n, order)
    if dense is None:
        return QSeries.zero(order)
    return QSeries.from_q_dense(dense, order)


def pochhammer(n: int, order: int) -> QSeries:
    """(q)_n = prod_{i=1}^{n} (1 - q^i), truncated."""
    c = [0] * (order + 1)
    c[0] = 1
    for i in range(1, min(n, order) + 1):
        for j in range(order, i - 1, -1):
            c[j] -= c[j - i]
    return QSeries.from_q_dense(c, order)


def q_product(exponents: Iterable[int], order: int) -> QSeries:
    """prod 1/(1 - q^a) over the given positive exponents, truncated."""
    c = [0] * (order + 1)
    c[0] = 1
    for a in exponents:
        if a <= 0:
            raise ValueError(f"product exponents must be positive, got {a}")
        if a > order:
            continue
        for j in range(a, order + 1):
            c[j] += c[j - a]
    return QSeries.from_q_dense(c, order)


def p_infinity(l: int, order: int, z_shift: int = 0, perturb: Perturbation | None = None) -> QSeries:
    """P^l_inf(z q^{z_shift}, q) = sum_n z^n q^{z_shift n + (l+1)n(n-1)/2} / (q)_n, one summand family."""

    def exponent(n: int) -> int:
        return z_shift * n + (l + 1) * n * (n - 1) // 2

    return family_sum([[Term(exponent(n), (n,), n) for n in convex_range(exponent, order)]], order, perturb=perturb)


class QFactorialTable:
    """Precomputed 1/(q)_n for 0 <= n <= n_max and 1/(q)_inf at a fixed order."""

    def __init__(self, order: int, n_max: int | None = None) -> None:
        if order < 0:
            raise TruncationError(f"order must be >= 0, got {order}")
        self.order = order
        self.n_max = order if n_max is None else n_max
        self._table = [inv_pochhammer(n, order) for n in range(self.n_max + 1)]
        self.infinite = inv_pochhammer(INF, order)

    def inverse(self, n: int | float) -> QSeries:
        if n == INF:
            return self.infinite
        if n < 0:
            return QSeries.zero(self.order)
        if n > self.n_max:
            return inv_pochhammer(n, self.order)
        return self._table[int(n)]

    def partition_count(self, n: int) -> int:
        return self.infinite.coeff(0, n)
