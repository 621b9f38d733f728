"""
tests/test_suite.py

Suite grid construction, fault injection through the config, and the
summary tables.
"""

from dataclasses import replace

import pytest

from engine.report import IdentityReport
from services.config import DEFAULTS
from services.identities import Job, SuiteConfig, run_job, run_suite, suite_jobs, summary_frame, totals_frame

SMALL = SuiteConfig(order=10, checks=("jacobi", "durfee-l0", "p-limit"), l_max=1, slice_range=2)


def test_empty_suite_runs_nothing(capsys):
    assert run_suite(SuiteConfig(checks=())) == []
    assert capsys.readouterr().err == ""


def test_job_grid_order():
    jobs = suite_jobs(SMALL)
    assert [j.identity_id for j in jobs] == ["jacobi"] + ["durfee-l0"] * 5 + ["p-limit"] * 2
    assert jobs[0].z_window == (-5, 5)
    assert [j.params["s"] for j in jobs[1:6]] == [-2, -1, 0, 1, 2]
    assert all(j.perturb is None for j in jobs)


def test_small_suite_matches(capsys):
    reports = run_suite(SMALL)
    assert len(reports) == 8
    assert all(r.match for r in reports)
    assert "[identities] ran 8 checks, 0 mismatches" in capsys.readouterr().err


def test_configured_perturbation_hits_first_job_only():
    cfg = replace(SMALL, perturb={"identity": "durfee-l0", "family": 0, "delta": 1})
    jobs = suite_jobs(cfg)
    assert [j.perturb for j in jobs if j.perturb is not None] == [(0, 1)]
    assert jobs[1].perturb == (0, 1)
    reports = run_suite(cfg)
    failed = [r for r in reports if not r.match]
    assert len(failed) == 1
    assert failed[0].params == {"s": -2}


def test_perturbation_of_missing_identity():
    with pytest.raises(ValueError, match="does not run"):
        suite_jobs(replace(SMALL, perturb={"identity": "durfee"}))


def test_unknown_check():
    with pytest.raises(ValueError, match="unknown check"):
        suite_jobs(SuiteConfig(checks=("nope",)))


def test_errors_become_reports():
    report = run_job(Job("durfee-l0", {}, 5))
    assert not report.match
    assert report.first_mismatch.label.startswith("error: ")


def test_from_config_defaults():
    cfg = SuiteConfig.from_config(DEFAULTS)
    assert cfg.order == 30
    assert cfg.checks[0] == "finite"
    assert cfg.voa_modules[2] == (1, 2)
    assert cfg.perturb is None
    with pytest.raises(ValueError, match="unknown suite keys"):
        SuiteConfig.from_config({"suite": {"colour": 1}})


def test_default_grid_covers_every_catalog_entry():
    ids = {j.identity_id for j in suite_jobs(SuiteConfig.from_config(DEFAULTS))}
    assert len(ids) == 14


def test_summary_and_totals():
    reports = [
        IdentityReport("jacobi", {}, 10, (-5, 5), True),
        IdentityReport("durfee-l0", {"s": 0}, 10, None, True, elapsed_ms=3),
        IdentityReport("durfee-l0", {"s": 1}, 10, None, True),
    ]
    bad = run_job(Job("durfee-l0", {"s": 2}, 10, perturb=(0, 1)))
    frame = summary_frame(reports + [bad])
    assert list(frame.columns) == ["identity_id", "params", "order", "match", "mismatch_q", "elapsed_ms"]
    assert frame.loc[1, "params"] == "s=0"
    totals = totals_frame(reports + [bad])
    assert totals.to_dict("records") == [
        {"identity_id": "jacobi", "checks": 1, "passed": 1, "failed": 0},
        {"identity_id": "durfee-l0", "checks": 3, "passed": 2, "failed": 1},
    ]
    assert list(totals_frame([]).columns) == ["identity_id", "checks", "passed", "failed"]
