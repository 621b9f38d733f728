"""
tests/test_identities_at_scale.py

Goal:
- Run the character and partition identities at full size: enumeration
  against the closed form to q^20, the split to q^30, left parts to q^15 and
  the Durfee census over every partition of N <= 28.
- Marked slow; `pytest -m "not slow"` skips them.
"""

import pytest

from engine.fibinfinite import char_brute, char_closed, left_char, left_char_limit, split_identity_check
from engine.partitions import durfee_identity_check
from engine.qseries import first_mismatch

pytestmark = pytest.mark.slow

PAIRS_L3 = [(theta, l) for l in range(4) for theta in range(l + 1)]
LEFT_PARTS = [(theta, l, k) for l in range(3) for theta in range(l + 1) for k in range(1, l + 2)]


@pytest.mark.parametrize("theta,l", PAIRS_L3)
def test_enumeration_matches_closed_form_to_q20(theta, l):
    assert first_mismatch(char_brute(theta, l, 20), char_closed(theta, l, 20)) is None


@pytest.mark.parametrize("theta,l", PAIRS_L3)
def test_enumeration_window_is_self_consistent(theta, l):
    assert char_brute(theta, l, 14) == char_brute(theta, l, 14, margin=8)


@pytest.mark.parametrize("theta,l", PAIRS_L3)
def test_split_against_closed_form_and_enumeration_to_q30(theta, l):
    report = split_identity_check(theta, l, 30, brute_order=30)
    assert report.match, report.first_mismatch
    assert report.order == 30


@pytest.mark.parametrize("theta,l,k", LEFT_PARTS)
def test_left_part_finite_route_to_q15(theta, l, k):
    assert first_mismatch(left_char(theta, l, k, 15), left_char_limit(theta, l, k, 15)) is None


@pytest.mark.parametrize("l", range(5))
def test_durfee_dissection_with_census_to_28(l):
    for n in range(4):
        for m in range(4):
            report = durfee_identity_check(l, n, m, 40, census_cap=28)
            assert report.match, (n, m, report.first_mismatch)
