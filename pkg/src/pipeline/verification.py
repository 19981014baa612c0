"""
Verification suites: cross-path agreement, identities and independent oracles.

Each check walks a grid, records the worst deviation and where it happened,
and compares it with its threshold from Tolerances. A report passes only
when every enabled check passes.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from src.core.config import RunConfig, Tolerances
from src.core.errors import GeometryError
from src.core.jets import fd_jet
from src.geometry.families import (
    PRESETS,
    FamilyKind,
    detect_singular_parameters,
    helix_focal_closed_form,
    preset_spec,
    toroidal_z_closed_form,
    torus_compat,
)
from src.geometry.focal import c2_quotient_form, focal_curvatures_cylindrical, osculating_contact
from src.geometry.frenet import CylindricalTerms, frame_cylindrical, kappa_jet_general
from src.geometry.lift import lift_jet3, torus_residual
from src.geometry.plane_curves import arc_speed_jet, eval_jet2, signed_curvature_jet
from src.pipeline.sample_pipeline import CurveSetup, PointEvaluation, build_setup, evaluate_point, interior_grid

logger = logging.getLogger(__name__)

FD_POINTS = 64
FD_MARGIN = 0.05
HELIX_CLOSED_FORM_POINTS = 1000
CUSP_MATCH = 1e-9


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_deviation: float = 0.0
    worst_t: Optional[float] = None
    samples: int = 0
    skipped: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def record(self, deviation: float, t: Optional[float]) -> None:
        self.samples += 1
        if not deviation <= self.max_deviation:
            self.max_deviation = float(deviation)
            self.worst_t = None if t is None else float(t)

    @property
    def ran(self) -> bool:
        return self.samples > 0

    @property
    def passed(self) -> bool:
        # a check that evaluated nothing proves nothing
        return self.ran and self.max_deviation <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "name": self.name,
            "passed": self.passed,
            "ran": self.ran,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "worst_t": self.worst_t,
            "samples": self.samples,
            "skipped": self.skipped,
        }
        if self.details:
            result["details"] = self.details
        return result


@dataclass
class VerificationReport:
    label: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def worst_offender(self) -> Optional[CheckResult]:
        failed = self.failed
        if not failed:
            return None

        def severity(check: CheckResult) -> float:
            if not check.ran or check.tolerance <= 0:
                return math.inf
            return check.max_deviation / check.tolerance

        return max(failed, key=severity)

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "status": "pass" if self.passed else "fail",
            "curve": self.label,
            "checks": [check.to_dict() for check in self.checks],
            "failed": [check.name for check in self.failed],
        }
        worst = self.worst_offender()
        if worst is not None:
            report["worst"] = {"check": worst.name, "t": worst.worst_t, "deviation": worst.max_deviation}
        return report


def _rel(delta: float, scale: float) -> float:
    return abs(delta) / scale if scale > 0 else abs(delta)


def _evaluations(setup: CurveSetup, grid: List[float], tol: Tolerances) -> Tuple[List[PointEvaluation], int]:
    evaluations, skipped = [], 0
    for t in grid:
        try:
            evaluations.append(evaluate_point(setup, t, tol))
        except GeometryError as exc:
            logger.debug("verification skips t=%r: %s", t, exc)
            skipped += 1
    return evaluations, skipped


def check_frenet_cross(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """General definitions against the cylindrical closed forms for kappa, tau and the frame."""
    result = CheckResult("frenet_cross", tol.frenet_cross)
    flips, flagged = 0, 0
    for ev in evaluations:
        general = ev.frame
        special = frame_cylindrical(ev.base_jet, ev.jet3.z, ev.K, ev.s_dot, tol, setup.curve.length_scale)
        N, B = special.N, special.B
        if float(np.dot(B, general.B)) < 0.0:
            if math.copysign(1.0, special.tau) != math.copysign(1.0, general.tau):
                flagged += 1
            else:
                flips += 1
                N, B = -N, -B
        deviation = max(
            _rel(special.kappa - general.kappa, general.kappa),
            abs(special.tau - general.tau) / (1.0 + abs(general.tau)),
            float(np.max(np.abs(special.T - general.T))),
            float(np.max(np.abs(N - general.N))),
            float(np.max(np.abs(B - general.B))),
        )
        result.record(deviation, ev.t)
    result.details = {"sign_flips": flips, "flagged": flagged}
    return result


def check_identities(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """gamma' x gamma'' = s_dot^3 K e3 - J(f'' alpha' - f' alpha''), its norm, and |gamma'|."""
    result = CheckResult("identities", tol.identity)
    for ev in evaluations:
        velocity, accel = ev.jet3.vector(1), ev.jet3.vector(2)
        cross = np.cross(velocity, accel)
        cross_norm = float(np.linalg.norm(cross))
        terms = CylindricalTerms.from_jets(ev.base_jet, ev.jet3.z)
        predicted_norm = math.sqrt((ev.s_dot**3 * ev.K) ** 2 + float(np.dot(terms.shear, terms.shear)))
        predicted_speed = math.sqrt(ev.s_dot**2 + terms.f1**2)
        deviation = max(
            float(np.linalg.norm(cross - terms.cross_vector())) / cross_norm,
            _rel(cross_norm - predicted_norm, cross_norm),
            _rel(ev.frame.speed - predicted_speed, ev.frame.speed),
        )
        result.record(deviation, ev.t)
    return result


def check_focal_cross(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """c1, c2 from kappa' against the cylindrical closed forms, and the two c2 forms."""
    result = CheckResult("focal_cross", tol.focal_cross)
    L = setup.curve.length_scale
    for ev in evaluations:
        base_jet, f_jet = ev.base_jet, ev.jet3.z
        c1, c2 = focal_curvatures_cylindrical(
            base_jet, f_jet, signed_curvature_jet(base_jet), arc_speed_jet(base_jet), tol, L
        )
        radius = abs(ev.c1) + abs(ev.c2)
        alternative = c2_quotient_form(kappa_jet_general(ev.jet3), ev.frame.speed, ev.frame.tau)
        deviation = max(
            _rel(c1 - ev.c1, abs(ev.c1)),
            _rel(c2 - ev.c2, radius),
            _rel(alternative - ev.c2, radius),
        )
        result.record(deviation, ev.t)
    return result


def check_projection(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """C_gamma assembled from the frame equals (beta, f_tilde)."""
    result = CheckResult("projection", tol.projection)
    for ev in evaluations:
        lifted = np.append(ev.beta, ev.f_tilde)
        scale = float(np.linalg.norm(ev.C_gamma)) + math.hypot(ev.c1, ev.c2)
        result.record(float(np.linalg.norm(lifted - ev.C_gamma)) / scale, ev.t)
    return result


def check_sphere(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """<C - gamma, T> = 0 and |C - gamma|^2 = c1^2 + c2^2."""
    result = CheckResult("sphere", tol.sphere)
    for ev in evaluations:
        offset = ev.C_gamma - ev.gamma
        distance = float(np.linalg.norm(offset))
        radius_sq = ev.c1**2 + ev.c2**2
        deviation = max(
            _rel(float(np.dot(offset, ev.frame.T)), distance),
            _rel(distance**2 - radius_sq, radius_sq),
        )
        result.record(deviation, ev.t)
    return result


def check_contact(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """
    Finite differences of g(u) = |gamma(u) - C|^2 - rho^2 vanish through order 2 at u = t.

    g is a difference of terms of size rho^2, so deviations are scaled by
    max(L^2, rho^2) with rho^2 = c1^2 + c2^2.
    """
    result = CheckResult("contact", tol.contact)
    length_sq = setup.curve.length_scale**2
    lift = setup.lift
    for ev in evaluations:
        radius_sq = ev.c1**2 + ev.c2**2
        scale_sq = max(length_sq, radius_sq)
        g = osculating_contact(lift.point, ev.C_gamma, radius_sq)
        try:
            estimate = fd_jet(g, ev.t, 2, tol.fd_step_contact, accuracy=4)
        except GeometryError:
            result.skipped += 1
            continue
        result.record(float(np.max(np.abs(estimate.coeffs))) / scale_sq, ev.t)
    return result


def check_torus_membership(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    result = CheckResult("torus_membership", tol.torus_membership)
    b_sq = setup.torus.b**2
    for ev in evaluations:
        result.record(abs(torus_residual(setup.torus, ev.gamma)) / b_sq, ev.t)
    return result


def check_closed_form_z(setup: CurveSetup, evaluations: List[PointEvaluation], tol: Tolerances) -> CheckResult:
    """Named closed-form heights against the generic torus height, absolute with scale b."""
    result = CheckResult("closed_form_z", tol.closed_form_z)
    torus, branch = setup.torus, setup.lift.branch
    for ev in evaluations:
        z = toroidal_z_closed_form(setup.family, torus, ev.t, branch)
        result.record(abs(z - ev.gamma[2]) / torus.b, ev.t)
    return result


def check_helix_closed_form(setup: CurveSetup, tol: Tolerances) -> CheckResult:
    """Generalized focal curve of the toroidal helix against its closed form on a uniform grid."""
    result = CheckResult("helix_closed_form", tol.helix_closed_form)
    spec = setup.family
    a, b, n = spec.torus.a, spec.torus.b, int(spec.n)
    period = spec.period
    for j in range(HELIX_CLOSED_FORM_POINTS):
        t = period * j / HELIX_CLOSED_FORM_POINTS
        try:
            closed = np.array(helix_focal_closed_form(a, b, n, t))
            ev = evaluate_point(setup, t, tol)
        except GeometryError as exc:
            logger.debug("helix closed form skips t=%r: %s", t, exc)
            result.skipped += 1
            continue
        computed = np.append(ev.beta, ev.f_tilde)
        result.record(float(np.linalg.norm(computed - closed)) / float(np.linalg.norm(closed)), t)
    return result


def check_fd_kernel(setup: CurveSetup, tol: Tolerances) -> Tuple[CheckResult, CheckResult]:
    """
    Analytic jets of x, y, z against central differences.

    Deviations are normalised by the largest analytic magnitude of the same
    derivative order and component over the point set.
    """
    low = CheckResult("fd_orders_1_2", tol.fd_low)
    high = CheckResult("fd_order_3", tol.fd_high)
    lift = setup.lift
    grid = interior_grid(setup.arcs, FD_POINTS, margin=FD_MARGIN)

    def component(index: int) -> Callable[[float], float]:
        return lambda u: float(lift.point(u)[index])

    analytic, numeric, points = [], [], []
    for t in grid:
        try:
            jet3 = lift_jet3(lift, t, 3)
            estimates = []
            for index in range(3):
                estimates.append(
                    [fd_jet(component(index), t, k, tol.fd_step(k)).coeffs[k] for k in range(1, 4)]
                )
        except GeometryError:
            low.skipped += 1
            high.skipped += 1
            continue
        analytic.append([[c[k] for k in range(1, 4)] for c in jet3.components()])
        numeric.append(estimates)
        points.append(t)
    if not points:
        return low, high

    analytic_arr, numeric_arr = np.array(analytic), np.array(numeric)
    magnitude = np.max(np.abs(analytic_arr), axis=0)
    magnitude[magnitude == 0.0] = 1.0
    normalized = np.abs(numeric_arr - analytic_arr) / magnitude
    for t, per_point in zip(points, normalized):
        low.record(float(np.max(per_point[:, :2])), t)
        high.record(float(np.max(per_point[:, 2])), t)
    return low, high


def check_cusp_inventory(setup: CurveSetup, tol: Tolerances) -> CheckResult:
    """
    Detected singular parameters against the listed cusps, plus cusp doubling.

    The deviation counts mismatched parameters; a touching preset that does not
    have twice the cusps of its strict counterpart adds one.
    """
    result = CheckResult("cusp_inventory", 0.0)
    compat = setup.compat
    detected = detect_singular_parameters(setup.lift, compat.period, tol)
    listed = compat.cusp_params
    unmatched = [t for t in detected if not any(abs(t - c) <= CUSP_MATCH for c in listed)]
    missing = [c for c in listed if not any(abs(t - c) <= CUSP_MATCH for t in detected)]
    result.record(float(len(unmatched) + len(missing)), (unmatched or missing or [None])[0])
    result.details = {"listed": list(listed), "detected": list(detected)}

    name = setup.preset or ""
    if name.endswith("-touch") and name.replace("-touch", "-strict") in PRESETS:
        strict_spec = preset_spec(name.replace("-touch", "-strict"), r=setup.family.r)
        strict_count = torus_compat(strict_spec, strict_spec.torus).cusp_count
        doubled = compat.cusp_count == 2 * strict_count
        result.details["cusp_count"] = compat.cusp_count
        result.details["strict_cusp_count"] = strict_count
        if not doubled:
            result.record(result.max_deviation + 1.0, None)
    return result


def check_closure(setup: CurveSetup, tol: Tolerances) -> CheckResult:
    """Plane jets at 0 and at the period agree through order 3."""
    result = CheckResult("closure", tol.closure)
    curve = setup.curve
    start, end = eval_jet2(curve, 0.0, 3), eval_jet2(curve, curve.period, 3)
    for k in range(4):
        delta = float(np.max(np.abs(start.vector(k) - end.vector(k))))
        result.record(delta / curve.length_scale, curve.period)
    result.details = {"orders": 4}
    return result


def _inside_margin(setup: CurveSetup, t: float) -> bool:
    for lo, hi in setup.arcs:
        width = hi - lo
        if lo + FD_MARGIN * width <= t <= hi - FD_MARGIN * width:
            return True
    return False


def run_verification(config: RunConfig, setup: Optional[CurveSetup] = None) -> VerificationReport:
    """Run every check that applies to the configured curve."""
    tol = config.tolerances
    setup = setup or build_setup(config)
    grid = interior_grid(setup.arcs, config.samples)
    evaluations, skipped = _evaluations(setup, grid, tol)
    logger.info("%s: %d interior points evaluated, %d skipped", setup.label, len(evaluations), skipped)

    checks = [
        check_frenet_cross(setup, evaluations, tol),
        check_identities(setup, evaluations, tol),
        check_focal_cross(setup, evaluations, tol),
        check_projection(setup, evaluations, tol),
        check_sphere(setup, evaluations, tol),
        check_contact(setup, [ev for ev in evaluations if _inside_margin(setup, ev.t)], tol),
    ]
    for check in checks:
        check.skipped += skipped
    if setup.torus is not None:
        checks.append(check_torus_membership(setup, evaluations, tol))
    family = setup.family
    if family is not None and family.kind is not FamilyKind.HELIX_PROJECTION:
        checks.append(check_closed_form_z(setup, evaluations, tol))
    if family is not None and family.kind is FamilyKind.HELIX_PROJECTION:
        checks.append(check_helix_closed_form(setup, tol))
    checks.extend(check_fd_kernel(setup, tol))
    if setup.compat is not None:
        checks.append(check_cusp_inventory(setup, tol))
    if setup.curve.period is not None:
        checks.append(check_closure(setup, tol))

    report = VerificationReport(label=setup.label, checks=checks)
    for check in report.failed:
        logger.warning("check %s failed: %r > %r at t=%r", check.name, check.max_deviation, check.tolerance, check.worst_t)
    return report
