"""
Frenet-Serret data of space curves.

Two independent paths:
- the general definitions on the 3D jet of gamma (cross products, triple product)
- closed forms for cylindrical lifts gamma = alpha + f e3, written with the
  plane quantities alpha', alpha'', alpha''', J and the height f only

Cross-path agreement between the two is checked by the verification suite.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.core.config import DEFAULT_TOLERANCES, Tolerances
from src.core.errors import FlatnessError, JetDomainError, ParameterError, RegularityError
from src.core.jets import Jet, Jet2, Jet3, jet_cross, jet_dot, jet_sqrt
from src.geometry.plane_curves import j_rotate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrenetData:
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    speed: float


def _require_order(order: int, needed: int, what: str) -> None:
    if order < needed:
        raise ParameterError(f"{what} needs a jet of order >= {needed}, got {order}")


def frenet_general(
    jet3: Jet3,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
    speed_scale: float = 1.0,
) -> FrenetData:
    """
    Frame, curvature and torsion from the definitional formulas.

    Args:
        jet3: component jets of gamma, order >= 3
        tolerances: eps_reg and eps_flat guards
        length_scale: curve size L; the frame is flat when kappa * L <= eps_flat
        speed_scale: reference speed for the regularity guard

    Returns:
        FrenetData

    Raises:
        RegularityError: |gamma'| <= eps_reg * speed_scale
        FlatnessError: kappa * L <= eps_flat
    """
    _require_order(jet3.order, 3, "frenet_general")
    velocity, accel, jerk = jet3.vector(1), jet3.vector(2), jet3.vector(3)
    speed = float(np.linalg.norm(velocity))
    if speed <= tolerances.eps_reg * speed_scale:
        raise RegularityError("space curve is not regular", speed=speed)

    binormal_dir = np.cross(velocity, accel)
    cross_norm = float(np.linalg.norm(binormal_dir))
    kappa = cross_norm / speed**3
    if kappa * length_scale <= tolerances.eps_flat:
        raise FlatnessError("curvature vanishes; Frenet frame undefined", kappa=kappa)

    normal_dir = np.cross(binormal_dir, velocity)
    tau = float(np.dot(binormal_dir, jerk)) / cross_norm**2
    return FrenetData(
        T=velocity / speed,
        N=normal_dir / float(np.linalg.norm(normal_dir)),
        B=binormal_dir / cross_norm,
        kappa=kappa,
        tau=tau,
        speed=speed,
    )


def kappa_jet_general(jet3: Jet3) -> Jet:
    """Jet of kappa = |gamma' x gamma''| / |gamma'|^3, two orders below jet3."""
    _require_order(jet3.order, 2, "kappa_jet_general")
    velocity = jet3.derivative()
    accel = velocity.derivative()
    vel = tuple(c.truncate(accel.order) for c in velocity.components())
    acc = accel.components()
    cross = jet_cross(vel, acc)
    speed_sq = jet_dot(vel, vel)
    if speed_sq.value <= 0.0:
        raise RegularityError("space curve is not regular", speed=0.0)
    try:
        cross_norm = jet_sqrt(jet_dot(cross, cross))
    except JetDomainError:
        raise FlatnessError("curvature vanishes; kappa has no jet here", kappa=0.0)
    return cross_norm / speed_sq**1.5


@dataclass(frozen=True)
class CylindricalTerms:
    """
    Plane-side building blocks of a lift at one parameter.

    turning is <alpha'', J alpha'> = s_dot^3 K, shear is f'' alpha' - f' alpha'',
    speed_sq is s_dot^2 + f'^2 and cross_sq is turning^2 + |shear|^2.
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    f1: float
    f2: float
    f3: float
    turning: float
    shear: np.ndarray
    speed_sq: float
    cross_sq: float

    @classmethod
    def from_jets(cls, base_jet: Jet2, f_jet: Jet) -> "CylindricalTerms":
        _require_order(min(base_jet.order, f_jet.order), 3, "cylindrical formulas")
        a1, a2, a3 = base_jet.vector(1), base_jet.vector(2), base_jet.vector(3)
        f1, f2, f3 = f_jet[1], f_jet[2], f_jet[3]
        turning = float(np.dot(a2, j_rotate(a1)))
        shear = f2 * a1 - f1 * a2
        return cls(
            a1=a1,
            a2=a2,
            a3=a3,
            f1=f1,
            f2=f2,
            f3=f3,
            turning=turning,
            shear=shear,
            speed_sq=float(np.dot(a1, a1)) + f1 * f1,
            cross_sq=turning**2 + float(np.dot(shear, shear)),
        )

    @property
    def triple(self) -> float:
        """(gamma' gamma'' gamma''') = f''' turning - <J shear, alpha'''>."""
        return self.f3 * self.turning - float(np.dot(j_rotate(self.shear), self.a3))

    def cross_vector(self) -> np.ndarray:
        """gamma' x gamma'' = turning e3 - J shear, embedded in 3D."""
        rotated = j_rotate(self.shear)
        return np.array([-rotated[0], -rotated[1], self.turning])


def checked_terms(base_jet: Jet2, f_jet: Jet, tolerances: Tolerances, length_scale: float) -> CylindricalTerms:
    terms = CylindricalTerms.from_jets(base_jet, f_jet)
    if terms.speed_sq <= 0.0:
        raise RegularityError("lift is not regular (s_dot^2 + f'^2 = 0)", speed=0.0)
    kappa = math.sqrt(terms.cross_sq) / terms.speed_sq**1.5
    if kappa * length_scale <= tolerances.eps_flat:
        raise FlatnessError("curvature of the lift vanishes", kappa=kappa)
    return terms


def kappa_cylindrical(base_jet: Jet2, f_jet: Jet) -> float:
    """kappa = sqrt(<alpha'', J alpha'>^2 + |f'' alpha' - f' alpha''|^2) / (s_dot^2 + f'^2)^(3/2)."""
    terms = CylindricalTerms.from_jets(base_jet, f_jet)
    if terms.speed_sq <= 0.0:
        raise RegularityError("lift is not regular (s_dot^2 + f'^2 = 0)", speed=0.0)
    return math.sqrt(terms.cross_sq) / terms.speed_sq**1.5


def tau_cylindrical(
    base_jet: Jet2,
    f_jet: Jet,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
) -> float:
    """
    tau = (f''' <alpha'', J alpha'> + f'' <-J alpha', alpha'''> + f' <J alpha'', alpha'''>)
          / (<alpha'', J alpha'>^2 + |f'' alpha' - f' alpha''|^2)

    Raises:
        FlatnessError: the denominator vanishes (kappa * L <= eps_flat)
    """
    terms = checked_terms(base_jet, f_jet, tolerances, length_scale)
    a1, a2, a3 = terms.a1, terms.a2, terms.a3
    numerator = (
        terms.f3 * terms.turning
        + terms.f2 * float(np.dot(-j_rotate(a1), a3))
        + terms.f1 * float(np.dot(j_rotate(a2), a3))
    )
    return numerator / terms.cross_sq


def frame_cylindrical(
    base_jet: Jet2,
    f_jet: Jet,
    K: float,
    s_dot: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
) -> FrenetData:
    """
    Frenet frame of the lift from plane data.

    T = (alpha' + f' e3) / sqrt(S)
    N = [S alpha'' - S'/2 alpha' + (f'' s_dot^2 - f' s_dot s_dot') e3] / (sqrt(S) sqrt(E))
    B = [s_dot^3 K e3 - J(f'' alpha' - f' alpha'')] / sqrt(E)

    with S = s_dot^2 + f'^2 and E = s_dot^6 K^2 + |f'' alpha' - f' alpha''|^2.
    K may vanish as long as E does not.
    """
    if not s_dot > 0.0:
        raise RegularityError("plane curve is not regular", s_dot=s_dot)
    terms = checked_terms(base_jet, f_jet, tolerances, length_scale)
    a1, a2 = terms.a1, terms.a2
    f1, f2 = terms.f1, terms.f2
    turning = s_dot**3 * K
    speed_sq = s_dot**2 + f1 * f1
    cross_sq = turning**2 + float(np.dot(terms.shear, terms.shear))
    speed = math.sqrt(speed_sq)
    cross_norm = math.sqrt(cross_sq)
    # s_dot s_dot' = <alpha', alpha''>
    s_sdot = float(np.dot(a1, a2))
    speed_sq_dot = 2.0 * s_sdot + 2.0 * f1 * f2

    tangent = np.append(a1, f1) / speed
    normal_plane = speed_sq * a2 - 0.5 * speed_sq_dot * a1
    normal = np.append(normal_plane, f2 * s_dot**2 - f1 * s_sdot) / (speed * cross_norm)
    rotated = j_rotate(terms.shear)
    binormal = np.array([-rotated[0], -rotated[1], turning]) / cross_norm

    return FrenetData(
        T=tangent,
        N=normal,
        B=binormal,
        kappa=cross_norm / speed_sq**1.5,
        tau=tau_cylindrical(base_jet, f_jet, tolerances, length_scale),
        speed=speed,
    )
