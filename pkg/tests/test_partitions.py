"""
tests/test_partitions.py

Durfee rectangle classification, the census against the class generating
functions and the moves along lines m = (l+1)n + m'.
"""

import pytest

from engine.errors import CapExceeded, InvalidPartition
from engine.partitions import (
    Kind,
    Partition,
    containment_facts,
    durfee_census,
    durfee_classify,
    durfee_identity_check,
    enumerate_partitions,
    line_equivalence_check,
    normalize_on_line,
)


def test_parse_and_validation():
    assert Partition.parse("4,3,1").parts == (4, 3, 1)
    assert Partition.parse(" ") == Partition()
    assert str(Partition((4, 3, 1))) == "(4,3,1)"
    with pytest.raises(InvalidPartition):
        Partition.parse("1,2")
    with pytest.raises(InvalidPartition):
        Partition.parse("3,x")
    with pytest.raises(InvalidPartition):
        Partition((2, 0))


def test_classify_with_enveloping_rectangle():
    cls = durfee_classify(Partition((4, 3, 1)), 1, 0, 0)
    assert str(cls) == "Rect k=1 i=1"
    assert cls.durfee_rect() == (1, 2)
    assert cls.enveloping_rects() == [(2, 3)]
    facts = containment_facts(Partition((4, 3, 1)), cls)
    assert facts == [("contains 1x2", True), ("contains 2x4", False), ("contains 2x3", True)]


def test_facts_name_the_first_missing_envelope():
    cls = durfee_classify(Partition((4, 3, 1)), 2, 0, 0)
    assert (cls.k, cls.i) == (1, 0)
    facts = containment_facts(Partition((4, 3, 1)), cls)
    assert facts == [("contains 1x3", True), ("contains 2x6", False), ("contains 2x4", False)]


def test_facts_at_top_envelope():
    cls = durfee_classify(Partition((5, 5)), 2, 0, 0)
    assert (cls.k, cls.i) == (1, 2)
    facts = containment_facts(Partition((5, 5)), cls)
    assert facts == [("contains 1x3", True), ("contains 2x6", False), ("contains 2x4", True), ("contains 2x5", True)]


def test_classify_shifted_rectangle():
    cls = durfee_classify(Partition((4, 3, 1)), 1, 0, 1)
    assert (cls.kind, cls.k, cls.i) == (Kind.RECT, 1, 0)
    assert cls.durfee_rect() == (1, 3)


def test_empty_partition():
    assert str(durfee_classify(Partition(), 1, 0, 0)) == "Rect k=0 i=0"
    cls = durfee_classify(Partition(), 2, 1, 1)
    assert cls.kind is Kind.NORECT
    assert cls.durfee_rect() is None
    assert cls.label() == "norect"


def test_l0_is_the_classical_durfee_square():
    cls = durfee_classify(Partition((5, 4, 4, 1)), 0, 0, 0)
    assert (cls.k, cls.i) == (3, 0)


def test_enumeration_counts(partition_numbers):
    assert [len(enumerate_partitions(n)) for n in range(15)] == partition_numbers[:15]
    assert enumerate_partitions(4)[0] == Partition((4,))
    with pytest.raises(CapExceeded):
        enumerate_partitions(60)


def test_census_totals(partition_numbers):
    census = durfee_census(1, 0, 0, 10)
    assert list(census.columns) == ["N", "kind", "k", "i", "count"]
    per_n = census.groupby("N")["count"].sum().tolist()
    assert per_n == partition_numbers[:11]


@pytest.mark.parametrize("l,n,m", [(0, 0, 0), (1, 0, 0), (1, 1, 1), (2, 0, 2), (2, 1, 3)])
def test_durfee_identity(l, n, m):
    report = durfee_identity_check(l, n, m, 20, census_cap=14)
    assert report.match, report.first_mismatch


def test_durfee_identity_detects_perturbation():
    report = durfee_identity_check(1, 0, 0, 20, census_cap=-1, perturb=(1, 1))
    assert not report.match
    assert report.first_mismatch is not None


def test_normalize_on_line():
    assert normalize_on_line(2, 7, 1) == (0, 3)
    assert normalize_on_line(1, 1, 1) == (1, 1)
    with pytest.raises(ValueError):
        normalize_on_line(-1, 0, 1)


@pytest.mark.parametrize("l,n1,m1", [(1, 1, 1), (2, 2, 1), (1, 0, 3)])
def test_line_equivalence(l, n1, m1):
    assert line_equivalence_check(l, n1, m1, 16).match
