"""
tests/test_fibinfinite.py

Infinite configurations of type (theta, l): validation, bounded enumeration
against the bilateral closed form, stabilized sums, the left/right split and
the finite route to the left parts.
"""

import pytest

from engine.errors import BadTheta, InvalidConfiguration, WindowUnderflow
from engine.fibinfinite import (
    InfFibConfig,
    char_brute,
    char_closed,
    char_stabilized,
    check_theta,
    enumerate_upto,
    left_char,
    left_char_limit,
    right_char,
    split_identity_check,
    split_sum,
    vacuum,
    vacuum_positions,
)
from engine.qseries import first_mismatch, p_infinity

PAIRS = [(0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)]


def test_vacuum_and_single_particle():
    vac = vacuum(1, 1)
    assert vac.is_vacuum()
    assert (vac.charge, vac.energy) == (0, 0)
    assert vacuum_positions(1, 1, 3) == [-1, -3, -5]
    one = InfFibConfig(1, 1, added=frozenset({1}))
    assert (one.charge, one.energy) == (1, 1)
    assert one.support(-3) == [-3, -1, 1]


def test_configuration_validation():
    with pytest.raises(InvalidConfiguration):
        InfFibConfig(1, 1, added=frozenset({0}))  # too close to -1
    with pytest.raises(InvalidConfiguration):
        InfFibConfig(1, 1, removed=frozenset({0}))  # not a vacuum site
    with pytest.raises(InvalidConfiguration):
        InfFibConfig(1, 1, added=frozenset({-1}))  # already occupied
    with pytest.raises(BadTheta):
        check_theta(2, 1)
    with pytest.raises(BadTheta):
        InfFibConfig(0, -1)


def test_charge_zero_slice_is_partition_numbers(partition_numbers):
    series = char_closed(1, 1, 4, (-1, 1))
    assert series.q_coefficients(0) == partition_numbers[:5]


@pytest.mark.parametrize("theta,l", PAIRS)
def test_enumeration_matches_closed_form(theta, l):
    assert first_mismatch(char_brute(theta, l, 8), char_closed(theta, l, 8)) is None


def test_enumeration_margin_does_not_matter():
    assert char_brute(1, 2, 7) == char_brute(1, 2, 7, margin=6)


def test_enumeration_respects_energy_bound():
    configs = enumerate_upto(1, 1, 3)
    assert all(c.energy <= 3 for c in configs)
    assert len(configs) == sum(char_closed(1, 1, 3).specialize_z().q_coefficients())
    assert len({(c.added, c.removed) for c in configs}) == len(configs)


def test_brute_window_must_hold_every_charge():
    with pytest.raises(WindowUnderflow):
        char_brute(0, 1, 6, z_window=(0, 0))


@pytest.mark.parametrize("theta,l", [(0, 1), (1, 1), (1, 2)])
def test_stabilized_sum_agrees_below_depth(theta, l):
    k = 4
    stable = char_stabilized(theta, l, k, 10).truncate(k - 1)
    closed = char_closed(theta, l, 10).truncate(k - 1)
    assert first_mismatch(stable, closed) is None


def test_right_part_shift():
    assert right_char(1, 2, None, 10) == p_infinity(2, 10, 2)
    assert right_char(1, 2, 1, 10) == p_infinity(2, 10, 4)
    with pytest.raises(ValueError):
        right_char(1, 2, 2, 10)


@pytest.mark.parametrize("theta,l", PAIRS)
def test_split_reproduces_character(theta, l):
    assert first_mismatch(split_sum(theta, l, 12), char_closed(theta, l, 12), (-4, 4)) is None


def test_split_identity_check_report():
    report = split_identity_check(1, 1, 10, (-3, 3), brute_order=6)
    assert report.match
    assert report.identity_id == "split"
    assert report.order == 10


@pytest.mark.parametrize("theta,l,k", [(0, 0, 1), (0, 1, 1), (1, 1, 2), (1, 2, 3)])
def test_left_part_finite_route(theta, l, k):
    assert first_mismatch(left_char(theta, l, k, 10), left_char_limit(theta, l, k, 10)) is None


def test_left_part_arguments():
    with pytest.raises(ValueError):
        left_char(0, 1, 3, 5)
    with pytest.raises(ValueError):
        left_char_limit(0, 1, 1, 5, b=1)
