"""
tests/test_fibfinite.py

Finite Fibonacci-l configurations: enumeration order, the three character
computations, Fibonacci counts and the q-binomial closed forms.
"""

import pytest

from engine.errors import CapExceeded, InvalidConfiguration
from engine.fibfinite import (
    FibConfig,
    char_brute,
    char_closed,
    char_recurrence,
    char_triple,
    charfib1_sides,
    enumerate_configs,
    p_limit_mismatch,
)
from engine.qseries import LaurentPoly


def _fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_enumeration_is_lexicographic():
    words = [str(c) for c in enumerate_configs(3, 1)]
    assert words == ["000", "001", "010", "100", "101"]


def test_config_charge_energy_and_validation():
    c = FibConfig.from_string("1001", 1)
    assert (c.n, c.charge, c.energy) == (4, 2, 3)
    with pytest.raises(InvalidConfiguration):
        FibConfig.from_string("0110", 1)
    with pytest.raises(InvalidConfiguration):
        FibConfig.from_string("012", 1)


def test_small_characters_text_form():
    assert str(char_brute(3, 1)) == "1 + z(1+q+q^2) + z^2 q^2"
    assert str(char_recurrence(0, 5)) == "1"


def test_chi_4_1_from_enumeration():
    # four sites, gap >= 2: one particle anywhere, pairs (0,2), (0,3), (1,3)
    assert str(char_brute(4, 1)) == "1 + z(1+q+q^2+q^3) + z^2(q^2+q^3+q^4)"


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_three_methods_agree(l):
    for n in range(11):
        assert char_triple(n, l).agree, (n, l)


def test_fibonacci_counts():
    for n in range(20):
        assert char_recurrence(n, 1).specialize() == _fib(n + 2)


def test_l0_is_a_product():
    product = LaurentPoly.one()
    for j in range(6):
        product = product * LaurentPoly({(0, 0): 1, (1, j): 1})
    assert char_closed(6, 0) == product


@pytest.mark.parametrize("big_n", range(1, 11))
def test_chi_at_zq(big_n):
    lhs, rhs = charfib1_sides(big_n)
    assert lhs == rhs


@pytest.mark.parametrize("l", [0, 1, 2])
def test_finite_p_stabilizes(l):
    assert p_limit_mismatch(l, 12) is None


def test_enumeration_cap_and_arguments():
    with pytest.raises(CapExceeded):
        char_brute(40, 1)
    with pytest.raises(ValueError):
        char_recurrence(-1, 1)
    with pytest.raises(ValueError):
        charfib1_sides(0)
