"""
Cylindrical lifts gamma(t) = alpha(t) + f(t) e3 and the torus height function.

The torus is (a - sqrt(x^2 + y^2))^2 + z^2 = b^2 with a > b > 0. Over a base
curve inside the open annulus (a-b)^2 < x^2+y^2 < (a+b)^2 its two sheets are
f = +-sqrt(b^2 - (a - sqrt(x^2+y^2))^2), propagated here through jets.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Callable, Optional

import numpy as np

from src.core.config import DEFAULT_TOLERANCES
from src.core.errors import GeometryError, JetDomainError, ParameterError, TorusDomainError
from src.core.jets import Jet, Jet2, Jet3, jet_const, jet_sqrt, jet_var
from src.geometry.plane_curves import PlaneCurve, eval_jet2

logger = logging.getLogger(__name__)

HeightFunction = Callable[[Jet, Jet2], Jet]


class HeightBranch(Enum):
    UPPER = 1
    LOWER = -1

    @classmethod
    def from_name(cls, name: str) -> "HeightBranch":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ParameterError(f"unknown height branch {name!r}; expected upper or lower")


@dataclass(frozen=True)
class TorusSpec:
    a: float
    b: float

    def __post_init__(self):
        if not self.a > self.b > 0:
            raise ParameterError(f"torus requires a > b > 0, got a={self.a}, b={self.b}")

    @property
    def inner_radius_sq(self) -> float:
        return (self.a - self.b) ** 2

    @property
    def outer_radius_sq(self) -> float:
        return (self.a + self.b) ** 2


def torus_residual(torus: TorusSpec, p) -> float:
    """(a - sqrt(x^2+y^2))^2 + z^2 - b^2; zero on the torus."""
    rho = math.hypot(p[0], p[1])
    return (torus.a - rho) ** 2 + p[2] ** 2 - torus.b**2


def torus_height_jet(
    torus: TorusSpec,
    base_jet: Jet2,
    branch: HeightBranch = HeightBranch.UPPER,
    eps_dom: float = DEFAULT_TOLERANCES.eps_dom,
) -> Jet:
    """
    Jet of f(t) = +-sqrt(b^2 - (a - sqrt(x^2+y^2))^2) at the base jet's order.

    Raises:
        TorusDomainError: the base point is not strictly inside the annulus,
            with a guard band of eps_dom * (a+b)^2 on both sides
    """
    rho_sq = base_jet.x * base_jet.x + base_jet.y * base_jet.y
    guard = eps_dom * torus.outer_radius_sq
    value = rho_sq.value
    if not torus.inner_radius_sq + guard < value < torus.outer_radius_sq - guard:
        residual = torus.b**2 - (torus.a - math.sqrt(max(value, 0.0))) ** 2
        raise TorusDomainError(
            "base point outside the open annulus of the torus",
            residual=residual,
            rho_squared=value,
        )
    offset = torus.a - jet_sqrt(rho_sq)
    radicand = torus.b**2 - offset * offset
    try:
        height = jet_sqrt(radicand)
    except JetDomainError:
        raise TorusDomainError("torus height radicand is not positive", residual=radicand.value)
    return height * float(branch.value)


def _torus_height(torus: TorusSpec, branch: HeightBranch, eps_dom: float, t_jet: Jet, base_jet: Jet2) -> Jet:
    return torus_height_jet(torus, base_jet, branch, eps_dom)


def _explicit_height(fn: Callable[[Jet], Jet], t_jet: Jet, base_jet: Jet2) -> Jet:
    return fn(t_jet)


def constant_height(c: float) -> Callable[[Jet], Jet]:
    return lambda t_jet: jet_const(c, t_jet.order)


@dataclass(frozen=True)
class CylindricalLift:
    """Space curve on the right generalized cylinder over `base`."""

    base: PlaneCurve
    height: HeightFunction
    label: str = "lift"
    torus: Optional[TorusSpec] = None
    branch: HeightBranch = HeightBranch.UPPER
    torus_derived: bool = False

    @classmethod
    def over_torus(
        cls,
        base: PlaneCurve,
        torus: TorusSpec,
        branch: HeightBranch = HeightBranch.UPPER,
        eps_dom: float = DEFAULT_TOLERANCES.eps_dom,
        label: Optional[str] = None,
    ) -> "CylindricalLift":
        return cls(
            base=base,
            height=partial(_torus_height, torus, branch, eps_dom),
            label=label or f"toroidal {base.label}",
            torus=torus,
            branch=branch,
            torus_derived=True,
        )

    @classmethod
    def with_height(
        cls,
        base: PlaneCurve,
        fn: Callable[[Jet], Jet],
        label: Optional[str] = None,
        torus: Optional[TorusSpec] = None,
    ) -> "CylindricalLift":
        """Lift with an explicit height f(t); `torus` only records the surface it lies on."""
        return cls(base=base, height=partial(_explicit_height, fn), label=label or f"lift of {base.label}", torus=torus)

    def point(self, t: float) -> np.ndarray:
        return lift_jet3(self, t, 0).value


def lift_jet3(lift: CylindricalLift, t: float, order: int) -> Jet3:
    """Component jets (x, y, f) of gamma at t."""
    base_jet = eval_jet2(lift.base, t, order)
    try:
        height = lift.height(jet_var(float(t), order), base_jet)
    except GeometryError as exc:
        raise exc.at(t)
    return Jet3(base_jet.x, base_jet.y, height)
