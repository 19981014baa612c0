"""Verification suites over presets and user curves."""

import math

import pytest

from src.core.config import DEFAULT_TOLERANCES, RunConfig
from src.pipeline.verification import CheckResult, VerificationReport, run_verification


def _checks(report):
    return {check.name: check for check in report.checks}


class TestCheckResult:
    def test_tracks_the_worst_point(self):
        check = CheckResult("demo", 1e-3)
        check.record(1e-5, 0.1)
        check.record(4e-4, 0.7)
        check.record(2e-4, 0.9)
        assert check.max_deviation == 4e-4
        assert check.worst_t == 0.7
        assert check.samples == 3
        assert check.passed

    def test_nan_fails(self):
        check = CheckResult("demo", 1.0)
        check.record(float("nan"), 2.0)
        assert not check.passed
        assert check.worst_t == 2.0

    def test_report_names_the_worst_offender(self):
        good = CheckResult("good", 1.0)
        good.record(0.5, 0.2)
        small = CheckResult("small", 1.0)
        small.record(2.0, 0.5)
        large = CheckResult("large", 1e-6)
        large.record(1e-3, 1.5)
        report = VerificationReport("demo", [good, small, large]).to_dict()
        assert report["status"] == "fail"
        assert report["failed"] == ["small", "large"]
        assert report["worst"] == {"check": "large", "t": 1.5, "deviation": 1e-3}

    def test_zero_tolerance_offender(self):
        strict = CheckResult("strict", 0.0)
        strict.record(1e-20, None)
        assert VerificationReport("demo", [strict]).worst_offender() is strict

    def test_check_without_samples_fails(self):
        empty = CheckResult("empty", 1.0)
        assert not empty.ran
        assert not empty.passed
        assert empty.to_dict()["ran"] is False
        other = CheckResult("other", 1e-6)
        other.record(1e-3, 0.4)
        report = VerificationReport("demo", [other, empty])
        assert report.to_dict()["failed"] == ["other", "empty"]
        assert report.worst_offender() is empty


# =============================================================================
# Suites
# =============================================================================


class TestRunVerification:
    def test_toroidal_helix(self):
        report = run_verification(RunConfig(preset="helix", samples=128))
        checks = _checks(report)
        assert report.passed, report.to_dict()
        assert "helix_closed_form" in checks
        assert "closed_form_z" not in checks
        assert checks["helix_closed_form"].samples > 900
        assert checks["cusp_inventory"].details["detected"] == []

    @pytest.mark.parametrize("preset", ["cardioid-strict", "nephroid-touch", "deltoid-strict", "astroid-touch"])
    def test_presets_pass(self, preset):
        report = run_verification(RunConfig(preset=preset, samples=96))
        assert report.passed, report.to_dict()
        checks = _checks(report)
        for name in ("frenet_cross", "focal_cross", "projection", "sphere", "contact", "torus_membership",
                     "closed_form_z", "fd_orders_1_2", "fd_order_3", "cusp_inventory", "closure"):
            assert name in checks
            assert checks[name].samples > 0

    def test_cusp_doubling_is_reported(self):
        report = run_verification(RunConfig(preset="deltoid-touch", samples=96))
        details = _checks(report)["cusp_inventory"].details
        assert details["cusp_count"] == 6
        assert details["strict_cusp_count"] == 3
        assert len(details["listed"]) == 7

    def test_user_curve(self):
        config = RunConfig(expr_x="cos(t)", expr_y="sin(t)", expr_f="t", samples=32)
        report = run_verification(config)
        checks = _checks(report)
        assert report.passed, report.to_dict()
        assert "torus_membership" not in checks
        assert "closure" not in checks

    def test_planar_curve_checks_nothing_and_fails(self):
        # no height and no torus: every point is a torsion zero
        report = run_verification(RunConfig(expr_x="cos(t)", expr_y="sin(t)", samples=32))
        checks = _checks(report)
        assert not report.passed
        for name in ("frenet_cross", "identities", "focal_cross", "projection", "sphere", "contact"):
            assert checks[name].samples == 0
            assert checks[name].skipped == 32
            assert name in report.to_dict()["failed"]

    def test_named_ratio_general_hypocycloid(self):
        config = RunConfig(preset="hypocycloid", R=4.0, r=1.0, a=3.0, b=1.5, samples=64)
        check = _checks(run_verification(config))["closed_form_z"]
        assert check.samples > 0
        assert check.passed, check.to_dict()

    def test_periodic_user_curve_checks_closure(self):
        config = RunConfig(
            expr_x="2*cos(t)",
            expr_y="sin(t)",
            expr_f="t",
            period=2 * math.pi,
            samples=64,
        )
        report = run_verification(config)
        assert report.passed, report.to_dict()
        assert _checks(report)["closure"].max_deviation <= DEFAULT_TOLERANCES.closure

    def test_zero_threshold_fails(self):
        tolerances = DEFAULT_TOLERANCES.with_overrides({"fd_low": 0.0})
        report = run_verification(RunConfig(preset="helix", samples=32, tolerances=tolerances))
        data = report.to_dict()
        assert data["status"] == "fail"
        assert "fd_orders_1_2" in data["failed"]
        assert data["worst"]["check"] == "fd_orders_1_2"
