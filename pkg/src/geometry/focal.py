"""
Focal curvatures and focal curves.

The focal curve C = gamma + c1 N + c2 B is the locus of osculating-sphere
centres, with c1 = 1/kappa and c2 = -kappa' / (|gamma'| kappa^2 tau).
For a cylindrical lift the same quantities have closed forms in the plane
data; the projection of C onto the base plane is the generalized focal
curve beta and its height is f_tilde.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.config import DEFAULT_TOLERANCES, Tolerances
from src.core.errors import FlatnessError, RegularityError, TorsionZeroError
from src.core.jets import Jet, Jet2
from src.geometry.frenet import FrenetData, checked_terms
from src.geometry.plane_curves import j_rotate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FocalData:
    c1: float
    c2: float
    C_gamma: np.ndarray
    beta: np.ndarray
    f_tilde: float


def _check_torsion(tau: float, tolerances: Tolerances, length_scale: float) -> None:
    if abs(tau) * length_scale <= tolerances.eps_tau:
        raise TorsionZeroError("torsion vanishes; c2 is undefined", tau=tau)


def c2_quotient_form(kappa_jet: Jet, speed: float, tau: float) -> float:
    """c2 written as (d c1/dt) / (|gamma'| tau) with c1 = 1/kappa propagated as a jet."""
    c1_jet = 1.0 / kappa_jet.truncate(1)
    return c1_jet[1] / (speed * tau)


def focal_curvatures_general(
    kappa_jet: Jet,
    speed: float,
    tau: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
) -> Tuple[float, float]:
    """
    c1 = 1/kappa and c2 = -kappa' / (|gamma'| kappa^2 tau).

    Args:
        kappa_jet: jet of kappa(t), order >= 1
        speed: |gamma'(t)|
        tau: torsion at t
        tolerances: eps_flat, eps_tau and the identity threshold
        length_scale: curve size L used by the guards

    Returns:
        (c1, c2)

    Raises:
        FlatnessError: kappa * L <= eps_flat
        TorsionZeroError: |tau| * L <= eps_tau
    """
    kappa = kappa_jet.value
    if kappa * length_scale <= tolerances.eps_flat:
        raise FlatnessError("curvature vanishes; c1 is undefined", kappa=kappa)
    if speed <= 0.0:
        raise RegularityError("space curve is not regular", speed=speed)
    _check_torsion(tau, tolerances, length_scale)

    c1 = 1.0 / kappa
    c2 = -kappa_jet[1] / (speed * kappa**2 * tau)
    alternative = c2_quotient_form(kappa_jet, speed, tau)
    if abs(alternative - c2) > tolerances.identity * (abs(c1) + abs(c2)):
        logger.warning("c2 forms disagree: %r vs %r", c2, alternative)
    return c1, c2


def _speed_and_cross_jets(base_jet: Jet2, f_jet: Jet, K_jet: Jet, s_dot_jet: Jet) -> Tuple[Jet, Jet]:
    """Order-1 jets of S = s_dot^2 + f'^2 and E = s_dot^6 K^2 + |f'' alpha' - f' alpha''|^2."""
    velocity = base_jet.derivative()
    accel = velocity.derivative()
    f1 = f_jet.derivative()
    f2 = f1.derivative()

    def low(j: Jet) -> Jet:
        return j.truncate(1)

    s_dot, K = low(s_dot_jet), low(K_jet)
    shear_x = low(f2) * low(velocity.x) - low(f1) * low(accel.x)
    shear_y = low(f2) * low(velocity.y) - low(f1) * low(accel.y)
    turning = s_dot * s_dot * s_dot * K
    speed_sq = s_dot * s_dot + low(f1) * low(f1)
    cross_sq = turning * turning + shear_x * shear_x + shear_y * shear_y
    return speed_sq, cross_sq


def focal_curvatures_cylindrical(
    base_jet: Jet2,
    f_jet: Jet,
    K_jet: Jet,
    s_dot_jet: Jet,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
) -> Tuple[float, float]:
    """
    Closed forms for a lift, with S = s_dot^2 + f'^2 and E = s_dot^6 K^2 + |f'' alpha' - f' alpha''|^2:

        c1 = S^(3/2) / sqrt(E)
        c2 = (3 E S' - S E') / (2 sqrt(E) (f''' s_dot^3 K - <J(f'' alpha' - f' alpha''), alpha'''>))

    S' and E' come from jet propagation of S and E.
    """
    terms = checked_terms(base_jet, f_jet, tolerances, length_scale)
    speed_sq, cross_sq = _speed_and_cross_jets(base_jet, f_jet, K_jet, s_dot_jet)
    S, E = speed_sq.value, cross_sq.value
    triple = terms.triple
    _check_torsion(triple / E, tolerances, length_scale)

    root_E = math.sqrt(E)
    c1 = S**1.5 / root_E
    c2 = (3.0 * E * speed_sq[1] - S * cross_sq[1]) / (2.0 * root_E * triple)
    return c1, c2


def focal_point(gamma_t, frame: FrenetData, c1: float, c2: float) -> np.ndarray:
    """Centre of the osculating sphere, gamma + c1 N + c2 B."""
    return np.asarray(gamma_t, dtype=float) + c1 * frame.N + c2 * frame.B


def generalized_focal(
    base_jet: Jet2,
    f_jet: Jet,
    K_jet: Jet,
    s_dot_jet: Jet,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    length_scale: float = 1.0,
) -> Tuple[np.ndarray, float]:
    """
    Projection beta and height f_tilde of the focal curve, from plane data.

        beta = alpha + [c1 (S alpha'' - S'/2 alpha') - c2 sqrt(S) J(f'' alpha' - f' alpha'')] / (sqrt(S) sqrt(E))
        f_tilde = f + [c1 (f'' s_dot^2 - f' s_dot s_dot') + c2 sqrt(S) s_dot^3 K] / (sqrt(S) sqrt(E))
    """
    c1, c2 = focal_curvatures_cylindrical(base_jet, f_jet, K_jet, s_dot_jet, tolerances, length_scale)
    speed_sq, cross_sq = _speed_and_cross_jets(base_jet, f_jet, K_jet, s_dot_jet)
    S, S_dot = speed_sq.value, speed_sq[1]
    root_S, root_E = math.sqrt(S), math.sqrt(cross_sq.value)

    a1, a2 = base_jet.vector(1), base_jet.vector(2)
    f1, f2 = f_jet[1], f_jet[2]
    shear = f2 * a1 - f1 * a2
    s_dot, K = s_dot_jet.value, K_jet.value
    denominator = root_S * root_E

    beta = base_jet.value + (c1 * (S * a2 - 0.5 * S_dot * a1) - c2 * root_S * j_rotate(shear)) / denominator
    lift_term = f2 * s_dot**2 - f1 * float(np.dot(a1, a2))
    f_tilde = f_jet.value + (c1 * lift_term + c2 * root_S * s_dot**3 * K) / denominator
    return beta, f_tilde


def focal_data(gamma_t, frame: FrenetData, c1: float, c2: float, beta, f_tilde: float) -> FocalData:
    return FocalData(
        c1=c1,
        c2=c2,
        C_gamma=focal_point(gamma_t, frame, c1, c2),
        beta=np.asarray(beta, dtype=float),
        f_tilde=float(f_tilde),
    )


def osculating_contact(gamma_fn, center: np.ndarray, radius_sq: float):
    """g(u) = |gamma(u) - center|^2 - radius^2; vanishes to third order at the sample point."""

    def g(u: float) -> float:
        diff = gamma_fn(u) - center
        return float(np.dot(diff, diff)) - radius_sq

    return g
