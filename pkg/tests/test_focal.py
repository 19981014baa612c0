"""Focal curvatures, osculating-sphere centres and the generalized focal curve."""

import math

import numpy as np
import pytest
from src.core.errors import FlatnessError, TorsionZeroError
from src.core.jets import Jet, Jet2, fd_jet
from src.geometry.families import create_family_lift, helix_focal_closed_form, preset_spec
from src.geometry.focal import (
    FocalData,
    c2_quotient_form,
    focal_curvatures_cylindrical,
    focal_curvatures_general,
    focal_data,
    focal_point,
    generalized_focal,
    osculating_contact,
)
from src.geometry.frenet import frenet_general, kappa_jet_general
from src.geometry.lift import CylindricalLift, constant_height, lift_jet3
from src.geometry.plane_curves import arc_speed_jet, signed_curvature_jet

PRESETS = ["cardioid-strict", "nephroid-strict", "deltoid-strict", "astroid-strict", "helix"]


def _general(lift, t):
    jet3 = lift_jet3(lift, t, 3)
    frame = frenet_general(jet3, length_scale=lift.base.length_scale)
    c1, c2 = focal_curvatures_general(kappa_jet_general(jet3), frame.speed, frame.tau)
    return jet3, frame, c1, c2


def _cylindrical(lift, t):
    jet3 = lift_jet3(lift, t, 3)
    base_jet = Jet2(jet3.x, jet3.y)
    plane = (base_jet, jet3.z, signed_curvature_jet(base_jet), arc_speed_jet(base_jet))
    return plane


# =============================================================================
# Focal curvatures
# =============================================================================


class TestFocalCurvatures:
    def test_circular_helix_general(self, circular_helix):
        _, _, c1, c2 = _general(circular_helix, 0.4)
        assert c1 == pytest.approx(2.0, rel=1e-14)
        assert c2 == pytest.approx(0.0, abs=1e-12)

    def test_circular_helix_cylindrical(self, circular_helix):
        c1, c2 = focal_curvatures_cylindrical(*_cylindrical(circular_helix, 0.4))
        assert c1 == pytest.approx(2.0, rel=1e-14)
        assert c2 == pytest.approx(0.0, abs=1e-12)

    def test_planar_curve_has_no_c2(self, planar_circle):
        jet3 = lift_jet3(planar_circle, 1.0, 3)
        frame = frenet_general(jet3)
        with pytest.raises(TorsionZeroError):
            focal_curvatures_general(kappa_jet_general(jet3), frame.speed, frame.tau)

    def test_constant_height_has_no_c2(self, unit_circle):
        lift = CylindricalLift.with_height(unit_circle, constant_height(-1.0))
        with pytest.raises(TorsionZeroError):
            focal_curvatures_cylindrical(*_cylindrical(lift, 2.0))

    def test_cardioid_cross_path(self, toroidal_cardioid):
        _, _, c1, c2 = _general(toroidal_cardioid, 1.2)
        d1, d2 = focal_curvatures_cylindrical(*_cylindrical(toroidal_cardioid, 1.2))
        assert d1 == pytest.approx(c1, rel=1e-9)
        assert d2 == pytest.approx(c2, rel=1e-9, abs=1e-9 * abs(c1))

    def test_toroidal_helix_cross_path(self, toroidal_helix):
        _, _, c1, c2 = _general(toroidal_helix, 0.7)
        d1, d2 = focal_curvatures_cylindrical(*_cylindrical(toroidal_helix, 0.7))
        assert d1 == pytest.approx(c1, rel=1e-9)
        assert d2 == pytest.approx(c2, rel=1e-9, abs=1e-9 * abs(c1))

    @pytest.mark.parametrize("preset", PRESETS)
    def test_two_c2_forms_agree(self, preset):
        lift = create_family_lift(preset_spec(preset))
        for t in (0.9, 2.3, 4.1):
            jet3, frame, c1, c2 = _general(lift, t)
            alternative = c2_quotient_form(kappa_jet_general(jet3), frame.speed, frame.tau)
            assert alternative == pytest.approx(c2, rel=1e-12, abs=1e-12 * (abs(c1) + abs(c2)))

    def test_flat_kappa_rejected(self):
        with pytest.raises(FlatnessError):
            focal_curvatures_general(Jet([0.0, 1.0]), 1.0, 0.5)


# =============================================================================
# Focal curve
# =============================================================================


class TestFocalCurve:
    def test_zero_curvatures_give_the_curve(self, toroidal_cardioid):
        jet3, frame, _, _ = _general(toroidal_cardioid, 1.0)
        np.testing.assert_array_equal(focal_point(jet3.value, frame, 0.0, 0.0), jet3.value)

    def test_circular_helix_focal_curve_is_a_helix(self, circular_helix):
        for t in (0.0, 1.5, 3.0):
            jet3, frame, c1, c2 = _general(circular_helix, t)
            centre = focal_point(jet3.value, frame, c1, c2)
            np.testing.assert_allclose(centre, [-math.cos(t), -math.sin(t), t], atol=1e-12)

    def test_circular_helix_projection_matches_assembly(self, circular_helix):
        jet3, frame, c1, c2 = _general(circular_helix, 0.0)
        beta, f_tilde = generalized_focal(*_cylindrical(circular_helix, 0.0))
        np.testing.assert_allclose(np.append(beta, f_tilde), focal_point(jet3.value, frame, c1, c2), atol=1e-12)

    @pytest.mark.parametrize("preset", PRESETS)
    @pytest.mark.parametrize("t", [0.3, 0.9, 1.7, 2.6, 3.9, 4.8, 5.6])
    def test_projection_identity(self, preset, t):
        lift = create_family_lift(preset_spec(preset))
        jet3, frame, c1, c2 = _general(lift, t)
        centre = focal_point(jet3.value, frame, c1, c2)
        beta, f_tilde = generalized_focal(*_cylindrical(lift, t), length_scale=lift.base.length_scale)
        scale = float(np.linalg.norm(centre)) + math.hypot(c1, c2)
        assert float(np.linalg.norm(np.append(beta, f_tilde) - centre)) <= 1e-10 * scale

    @pytest.mark.parametrize("preset", PRESETS)
    def test_sphere_centre_identities(self, preset):
        lift = create_family_lift(preset_spec(preset))
        for t in (0.6, 1.8, 3.5, 5.2):
            jet3, frame, c1, c2 = _general(lift, t)
            offset = focal_point(jet3.value, frame, c1, c2) - jet3.value
            radius_sq = c1**2 + c2**2
            assert abs(float(np.dot(offset, frame.T))) <= 1e-10 * math.sqrt(radius_sq)
            assert float(np.dot(offset, offset)) == pytest.approx(radius_sq, rel=1e-10)

    @pytest.mark.parametrize("preset", ["cardioid-strict", "deltoid-strict", "helix"])
    def test_osculating_contact(self, preset):
        lift = create_family_lift(preset_spec(preset))
        scale_sq = lift.base.length_scale**2
        for t in (1.1, 2.7, 4.4):
            jet3, frame, c1, c2 = _general(lift, t)
            centre = focal_point(jet3.value, frame, c1, c2)
            g = osculating_contact(lift.point, centre, c1**2 + c2**2)
            estimate = fd_jet(g, t, 2, 5e-4, accuracy=4)
            assert float(np.max(np.abs(estimate.coeffs))) <= 1e-6 * scale_sq

    def test_toroidal_helix_closed_form(self, toroidal_helix):
        beta, f_tilde = generalized_focal(*_cylindrical(toroidal_helix, 0.1))
        closed = np.array(helix_focal_closed_form(4.0, 1.0, 12, 0.1))
        computed = np.append(beta, f_tilde)
        assert float(np.linalg.norm(computed - closed)) <= 1e-8 * float(np.linalg.norm(closed))

    def test_focal_data_bundle(self, toroidal_cardioid):
        jet3, frame, c1, c2 = _general(toroidal_cardioid, 2.0)
        beta, f_tilde = generalized_focal(*_cylindrical(toroidal_cardioid, 2.0))
        data = focal_data(jet3.value, frame, c1, c2, beta, f_tilde)
        assert isinstance(data, FocalData)
        lifted = np.append(data.beta, data.f_tilde)
        np.testing.assert_allclose(lifted, data.C_gamma, atol=1e-9 * float(np.linalg.norm(data.C_gamma)))
