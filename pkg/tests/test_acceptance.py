"""Acceptance gate: one test per release criterion.

Each test pulls its named check out of a single full verification run,
enforces the stated tolerance and time budget, and prints exactly one
``[acceptance]`` line so the gate can be read off the pytest output
directly.  The suite is deterministic (fixed default seed).
"""

import pytest

from screwspec import run_verification

TIME_BUDGETS = {
    "series-residual": 5.0,
    "change-of-variable": 2.0,
    "separation-identity": 2.0,
    "truncation-self-consistency": 5.0,
    "closed-form-audit": 3.0,
    "ab-periodicity": 1.0,
    "flat-oracle-validation": 15.0,
    "outer-gamma-monotonicity": 10.0,
    "rotation-affinity": 1.0,
}


@pytest.fixture(scope="session")
def full_report():
    return run_verification()


def announce(number, name, ok, detail):
    verdict = "PASS" if ok else "FAIL"
    print(f"\n[acceptance] criterion {number:02d} {name}: {verdict} ({detail})")
    assert ok, f"criterion {number:02d} {name}: {detail}"


def check_of(report, name):
    c = report.check(name)
    assert c.elapsed_s < TIME_BUDGETS[name], (
        f"{name} took {c.elapsed_s:.2f} s, budget {TIME_BUDGETS[name]} s"
    )
    return c


def test_criterion_01_series_residual(full_report):
    c = check_of(full_report, "series-residual")
    alt = full_report.check("series-residual-alternate-denominator")
    ok = (
        c.status == "PASS"
        and c.measured <= 1e-9
        and alt.status == "DISCREPANT-DOCUMENTED"
    )
    announce(
        1,
        "series-residual",
        ok,
        f"max residual {c.measured:.3e} <= 1e-09 over both models; "
        f"alternate denominator recorded {alt.status} "
        f"(residual {alt.measured:.3e})",
    )


def test_criterion_02_change_of_variable(full_report):
    c = check_of(full_report, "change-of-variable")
    ok = c.status == "PASS" and c.measured <= 1e-10
    announce(2, "change-of-variable", ok, f"max mismatch {c.measured:.3e} <= 1e-10")


def test_criterion_03_separation_identity(full_report):
    c = check_of(full_report, "separation-identity")
    ok = c.status == "PASS" and c.measured <= 1e-8
    announce(3, "separation-identity", ok, f"max residual {c.measured:.3e} <= 1e-08")


def test_criterion_04_truncation_self_consistency(full_report):
    c = check_of(full_report, "truncation-self-consistency")
    ok = c.status == "PASS" and c.measured <= 1e-10
    announce(
        4,
        "truncation-self-consistency",
        ok,
        f"max normalised |c_(n+1)| at roots {c.measured:.3e} <= 1e-10; {c.detail}",
    )


def test_criterion_05_closed_form_audit(full_report):
    c = check_of(full_report, "closed-form-audit")
    # The audit itself may never fail the gate; only broken machinery
    # (an exception inside the comparison) is a failure.
    ok = c.status in ("PASS", "DISCREPANT-DOCUMENTED") and "AGREE" in c.detail
    announce(5, "closed-form-audit", ok, f"status {c.status}; {c.detail.splitlines()[0]}")


def test_criterion_06_ab_periodicity(full_report):
    c = check_of(full_report, "ab-periodicity")
    ok = c.status == "PASS" and c.measured <= 1e-12
    announce(6, "ab-periodicity", ok, f"max |dE| {c.measured:.3e} <= 1e-12")


def test_criterion_07_flat_oracle(full_report):
    c = check_of(full_report, "flat-oracle-validation")
    ok = c.status == "PASS" and c.measured <= 5e-4
    announce(
        7,
        "flat-oracle-validation",
        ok,
        f"worst relative error {c.measured:.3e} <= 5e-04; {c.detail}",
    )


def test_criterion_08_outer_monotonicity(full_report):
    c = check_of(full_report, "outer-gamma-monotonicity")
    ok = c.status == "PASS" and c.measured <= 1e-12
    announce(
        8,
        "outer-gamma-monotonicity",
        ok,
        f"worst eigenvalue decrease {c.measured:.3e} <= 1e-12",
    )


def test_criterion_09_rotation_affinity(full_report):
    c = check_of(full_report, "rotation-affinity")
    ok = c.status == "PASS" and c.measured <= 1e-12
    announce(
        9,
        "rotation-affinity",
        ok,
        f"worst linear-fit residual {c.measured:.3e} <= 1e-12; {c.detail}",
    )


def test_criterion_10_verification_command(full_report):
    fast = run_verification(fast=True)
    ok = (
        full_report.overall_pass
        and full_report.wall_time_s < 60.0
        and fast.overall_pass
        and fast.wall_time_s < 15.0
    )
    announce(
        10,
        "verification-command",
        ok,
        f"full suite {'PASS' if full_report.overall_pass else 'FAIL'} in "
        f"{full_report.wall_time_s:.2f} s (< 60 s); fast suite "
        f"{'PASS' if fast.overall_pass else 'FAIL'} in {fast.wall_time_s:.2f} s (< 15 s)",
    )
