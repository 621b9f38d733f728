"""
tests/test_voachar.py

Lattice module characters and the audit of tau against the semi-infinite
monomial basis conditions.
"""

from fractions import Fraction

import pytest

from engine.errors import BadModuleIndex
from engine.fibinfinite import InfFibConfig, char_closed, vacuum
from engine.voachar import MonomialIndices, audit_report, basis_audit, q_offset, tau, voa_char

MODULES = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]


def test_q_offset_is_exact():
    assert q_offset(0, 2) == 0
    assert q_offset(1, 2) == Fraction(-1, 4)
    assert q_offset(2, 3) == Fraction(-1, 3)


def test_module_index_validation():
    with pytest.raises(BadModuleIndex):
        q_offset(2, 2)
    with pytest.raises(BadModuleIndex):
        voa_char(0, 0, 5)


def test_character_body_is_configuration_character():
    shifted = voa_char(1, 3, 8)
    assert shifted.body == char_closed(1, 2, 8)
    assert shifted.modulus == 3
    assert str(shifted).startswith("q^(-1/3) * [")


def test_tau_of_vacuum():
    image = tau(vacuum(1, 1))
    assert image.take(4) == [1, 3, 5, 7]
    assert image.violations(2, -1) == []


def test_tau_of_excited_configuration():
    a = InfFibConfig(0, 1, added=frozenset({2}), removed=frozenset({-2}))
    assert a.support(-6) == [-6, -4, 2]
    image = tau(a)
    assert image.take(4) == [-2, 4, 6, 8]
    assert image.violations(2, 0) == []


def test_violations_named():
    bad = MonomialIndices((0, 1), 3, 2)
    assert bad.violations(2, 1) == ["gap"]
    assert MonomialIndices((), 4, 3).violations(3, 0) == ["residue"]
    assert "tail step" in MonomialIndices((), 3, 4).violations(3, 0)


@pytest.mark.parametrize("i,big_n", MODULES)
def test_basis_audit(i, big_n):
    audit = basis_audit(i, big_n, 10)
    assert audit.ok, audit.violations
    assert audit.configs_checked > 0
    assert audit.q_offset == Fraction(i * i, 2 * big_n) - Fraction(i, 2)


def test_audit_on_vacuum_only():
    audit = basis_audit(0, 2, 0)
    assert audit.configs_checked == 2
    assert audit.ok


def test_audit_report_notes_tail_residue():
    report = audit_report(1, 3, 8)
    assert report.match
    assert report.identity_id == "voa-audit"
    assert "tail_residue=2" in report.notes
    assert any("-i mod N" in note for note in report.notes)
    assert not any("-i mod N" in note for note in audit_report(0, 3, 6).notes)


def test_audit_reports_images_breaking_basis_conditions(monkeypatch):
    import engine.voachar as voachar

    monkeypatch.setattr(voachar, "tau", lambda a: MonomialIndices((0, 1), 3, 2))
    audit = basis_audit(0, 2, 2)
    assert not audit.ok
    assert audit.violations and "gap" in audit.violations[0]
    assert not audit.injective
    report = audit_report(0, 2, 2)
    assert not report.match


def test_shifted_census_energy_is_a_count_mismatch():
    audit = basis_audit(1, 3, 6, perturb=(0, 1))
    assert not audit.violations
    assert audit.first_count_mismatch is not None
    assert audit.first_count_mismatch.q_exp == 0
    with pytest.raises(ValueError, match="one family"):
        basis_audit(1, 3, 6, perturb=(1, 1))
