"""Shared fixtures: small curves and lifts with known closed-form geometry."""

import math
import os
import sys

import pytest

# Add repository root to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.core.jets import Jet2, jet_cos, jet_sin  # noqa: E402
from src.geometry.families import create_family_lift, preset_spec  # noqa: E402
from src.geometry.lift import CylindricalLift, constant_height  # noqa: E402
from src.geometry.plane_curves import PlaneCurve  # noqa: E402

TWO_PI = 2.0 * math.pi


def circle_curve(radius: float = 1.0) -> PlaneCurve:
    return PlaneCurve(
        evaluator=lambda t: Jet2(radius * jet_cos(t), radius * jet_sin(t)),
        param_domain=(0.0, TWO_PI),
        period=TWO_PI,
        label=f"circle r={radius}",
    )


@pytest.fixture
def unit_circle() -> PlaneCurve:
    return circle_curve()


@pytest.fixture
def circular_helix(unit_circle) -> CylindricalLift:
    """(cos t, sin t, t): kappa = tau = 1/2."""
    return CylindricalLift.with_height(unit_circle, lambda t: t, label="circular helix")


@pytest.fixture
def planar_circle(unit_circle) -> CylindricalLift:
    return CylindricalLift.with_height(unit_circle, constant_height(0.0), label="planar circle")


@pytest.fixture
def toroidal_helix() -> CylindricalLift:
    return create_family_lift(preset_spec("helix"))


@pytest.fixture
def toroidal_cardioid() -> CylindricalLift:
    return create_family_lift(preset_spec("cardioid-strict"))
