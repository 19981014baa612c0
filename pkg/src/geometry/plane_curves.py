"""
Regular plane curves alpha(t) = (x(t), y(t), 0).

Houses the complex structure J, the arc-length prime s_dot = |alpha'| and the
signed curvature K = <alpha'', J alpha'> / |alpha'|^3. All angles in radians.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from src.core.config import DEFAULT_TOLERANCES, Tolerances
from src.core.errors import GeometryError, ParameterError, RegularityError
from src.core.jets import MAX_ORDER, Jet, Jet2, jet_sqrt, jet_var

logger = logging.getLogger(__name__)

PROBE_POINTS = 64


def j_rotate(v) -> np.ndarray:
    """Counterclockwise rotation by pi/2: (p1, p2) -> (-p2, p1)."""
    return np.array([-v[1], v[0]], dtype=float)


@dataclass(frozen=True)
class PlaneCurve:
    """
    Parametric plane curve evaluated through jets.

    The evaluator maps the identity jet of t to the Jet2 of (x, y) at the
    same order. Curves with a period accept any real t.
    """

    evaluator: Callable[[Jet], Jet2]
    param_domain: Tuple[float, float]
    period: Optional[float] = None
    label: str = "curve"

    def __post_init__(self):
        lo, hi = self.param_domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ParameterError(f"invalid parameter domain {self.param_domain}")
        if self.period is not None and not self.period > 0:
            raise ParameterError(f"period must be positive, got {self.period}")

    def contains(self, t: float) -> bool:
        if self.period is not None:
            return math.isfinite(t)
        lo, hi = self.param_domain
        return lo <= t <= hi

    def jet(self, t: float, order: int) -> Jet2:
        return eval_jet2(self, t, order)

    def point(self, t: float) -> np.ndarray:
        return eval_jet2(self, t, 0).value

    def _probe(self) -> np.ndarray:
        lo, hi = self.param_domain
        return np.linspace(lo, hi, PROBE_POINTS, endpoint=False) + 0.5 * (hi - lo) / PROBE_POINTS

    @cached_property
    def speed_scale(self) -> float:
        """max |alpha'| over a coarse probe grid."""
        speeds = []
        for t in self._probe():
            try:
                speeds.append(float(np.linalg.norm(eval_jet2(self, t, 1).vector(1))))
            except GeometryError:
                continue
        scale = max(speeds, default=0.0)
        return scale if scale > 0 else 1.0

    @cached_property
    def length_scale(self) -> float:
        """max |alpha| over the probe grid; the curve's size."""
        sizes = []
        for t in self._probe():
            try:
                sizes.append(float(np.linalg.norm(eval_jet2(self, t, 0).value)))
            except GeometryError:
                continue
        return max(max(sizes, default=1.0), 1e-12)


@dataclass(frozen=True)
class PlaneInvariants:
    s_dot: float
    K: float
    R_curv: Optional[float]
    regular: bool


def eval_jet2(c: PlaneCurve, t: float, order: int) -> Jet2:
    """Jets of x and y at t."""
    if not 0 <= order <= MAX_ORDER:
        raise ParameterError(f"jet order {order} outside 0..{MAX_ORDER}", t=t)
    if not c.contains(t):
        raise ParameterError(f"t outside parameter domain {c.param_domain} of {c.label}", t=t)
    try:
        return c.evaluator(jet_var(float(t), order))
    except GeometryError as exc:
        raise exc.at(t)


def arc_speed_jet(base_jet: Jet2) -> Jet:
    """Jet of s_dot = |alpha'|, one order below the base jet."""
    velocity = base_jet.derivative()
    squared = velocity.x * velocity.x + velocity.y * velocity.y
    if squared.value <= 0.0:
        raise RegularityError("plane curve is not regular (s_dot = 0)", s_dot=0.0)
    return jet_sqrt(squared)


def turning_jet(base_jet: Jet2) -> Jet:
    """Jet of <alpha'', J alpha'> = x'y'' - y'x'' (equals s_dot^3 K)."""
    velocity = base_jet.derivative()
    accel = velocity.derivative()
    vx, vy = velocity.x.truncate(accel.order), velocity.y.truncate(accel.order)
    return vx * accel.y - vy * accel.x


def signed_curvature_jet(base_jet: Jet2) -> Jet:
    """Jet of K, two orders below the base jet."""
    turning = turning_jet(base_jet)
    speed = arc_speed_jet(base_jet).truncate(turning.order)
    return turning / (speed * speed * speed)


def signed_curvature_of(base_jet: Jet2) -> float:
    """K from a jet of order >= 2, with no regularity guard."""
    velocity, accel = base_jet.vector(1), base_jet.vector(2)
    s_dot = float(np.linalg.norm(velocity))
    return float(np.dot(accel, j_rotate(velocity))) / s_dot**3


def signed_curvature(c: PlaneCurve, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PlaneInvariants:
    """
    Arc-length prime, signed curvature and radius of curvature at t.

    Raises:
        RegularityError: s_dot below eps_reg relative to the curve's speed scale
    """
    jet = eval_jet2(c, t, 2)
    velocity, accel = jet.vector(1), jet.vector(2)
    s_dot = float(np.linalg.norm(velocity))
    if s_dot <= tolerances.eps_reg * c.speed_scale:
        raise RegularityError(f"{c.label} is not regular", t=t, s_dot=s_dot)
    K = float(np.dot(accel, j_rotate(velocity))) / s_dot**3
    R_curv = 1.0 / K if K != 0.0 else None
    return PlaneInvariants(s_dot=s_dot, K=K, R_curv=R_curv, regular=True)
