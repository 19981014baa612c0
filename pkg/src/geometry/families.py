"""
Built-in curve families and their toroidal lifts.

- epicycloids (cardioid r/R = 1, nephroid r/R = 1/2) lifted over a torus with R = a - b
- hypocycloids (deltoid r/R = 2/3, astroid r/R = 1/4) lifted over a torus with R <= a + b
- the plane projection of the toroidal helix (cos t (a + b cos nt), sin t (a + b cos nt))

Cusps sit at t = 2 pi j where the rolling point meets the fixed circle; when
the curve also touches the far boundary of the annulus the lift gains cusps
at the odd multiples of pi as well.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import DEFAULT_TOLERANCES, Tolerances
from src.core.errors import GeometryError, ParameterError, SingularParameterError, TorusDomainError
from src.core.jets import Jet, Jet2, jet_cos, jet_sin
from src.geometry.lift import CylindricalLift, HeightBranch, TorusSpec, lift_jet3
from src.geometry.plane_curves import PlaneCurve, eval_jet2

logger = logging.getLogger(__name__)

MAX_RATIO_DENOMINATOR = 1000
CUSP_GRID_PER_PI = 32


class FamilyKind(Enum):
    EPICYCLOID = "epicycloid"
    HYPOCYCLOID = "hypocycloid"
    HELIX_PROJECTION = "helix"


@dataclass(frozen=True)
class FamilySpec:
    """
    One member of a family.

    R and r are the fixed and rolling radii (unused for the helix projection),
    n the helix winding count and k the period multiplier, t in [0, 2 k pi].
    k defaults to the smallest value that closes the curve.
    """

    kind: FamilyKind
    R: float = 0.0
    r: float = 0.0
    n: int = 1
    k: Optional[int] = None
    torus: Optional[TorusSpec] = None

    def __post_init__(self):
        if self.kind is FamilyKind.HELIX_PROJECTION:
            if self.torus is None:
                raise ParameterError("helix projection needs the torus radii a and b")
            if int(self.n) != self.n or self.n < 1:
                raise ParameterError(f"helix winding count must be a positive integer, got {self.n}")
            return
        if not (self.R > 0 and self.r > 0):
            raise ParameterError(f"{self.kind.value} needs R > 0 and r > 0, got R={self.R}, r={self.r}")
        if self.kind is FamilyKind.HYPOCYCLOID and not self.R > self.r:
            raise ParameterError(f"hypocycloid needs R > r, got R={self.R}, r={self.r}")
        if self.k is not None and (self.k < 1 or self.k % self.closing_multiplier):
            raise ParameterError(
                f"k={self.k} does not close the curve; use a multiple of {self.closing_multiplier}",
                k=self.k,
            )

    @property
    def ratio(self) -> Fraction:
        """r/R in lowest terms."""
        return Fraction(self.r / self.R).limit_denominator(MAX_RATIO_DENOMINATOR)

    @property
    def closing_multiplier(self) -> int:
        if self.kind is FamilyKind.HELIX_PROJECTION:
            return 1
        return self.ratio.denominator

    @property
    def period(self) -> float:
        return 2.0 * math.pi * (self.k or self.closing_multiplier)


@dataclass(frozen=True)
class TorusCompatibility:
    constraint_ok: bool
    touches_outer: bool
    touches_inner: bool
    cusp_params: Tuple[float, ...]
    period: float

    @property
    def cusp_count(self) -> int:
        """Distinct cusp points on the closed curve (the endpoints coincide)."""
        return max(len(self.cusp_params) - 1, 0)


_NAMED_RATIOS = {
    (FamilyKind.EPICYCLOID, Fraction(1)): "cardioid",
    (FamilyKind.EPICYCLOID, Fraction(1, 2)): "nephroid",
    (FamilyKind.HYPOCYCLOID, Fraction(2, 3)): "deltoid",
    (FamilyKind.HYPOCYCLOID, Fraction(1, 4)): "astroid",
}


def family_label(spec: FamilySpec) -> str:
    if spec.kind is FamilyKind.HELIX_PROJECTION:
        return "toroidal helix projection"
    return _NAMED_RATIOS.get((spec.kind, spec.ratio), spec.kind.value)


def _epicycloid(R: float, r: float, t: Jet) -> Jet2:
    slow, fast = t * (r / R), t * ((R + r) / R)
    return Jet2(
        (R + r) * jet_cos(slow) - r * jet_cos(fast),
        (R + r) * jet_sin(slow) - r * jet_sin(fast),
    )


def _hypocycloid(R: float, r: float, t: Jet) -> Jet2:
    slow, fast = t * (r / R), t * ((R - r) / R)
    return Jet2(
        r * jet_cos(fast) + (R - r) * jet_cos(slow),
        (R - r) * jet_sin(slow) - r * jet_sin(fast),
    )


def _helix_projection(a: float, b: float, n: int, t: Jet) -> Jet2:
    radius = a + b * jet_cos(t * float(n))
    return Jet2(jet_cos(t) * radius, jet_sin(t) * radius)


def family_curve(spec: FamilySpec) -> PlaneCurve:
    if spec.kind is FamilyKind.EPICYCLOID:
        evaluator = partial(_epicycloid, spec.R, spec.r)
    elif spec.kind is FamilyKind.HYPOCYCLOID:
        evaluator = partial(_hypocycloid, spec.R, spec.r)
    else:
        evaluator = partial(_helix_projection, spec.torus.a, spec.torus.b, int(spec.n))
    period = spec.period
    return PlaneCurve(evaluator=evaluator, param_domain=(0.0, period), period=period, label=family_label(spec))


def _close(x: float, y: float, scale: float) -> bool:
    return abs(x - y) <= 1e-9 * scale


def torus_compat(spec: FamilySpec, torus: TorusSpec) -> TorusCompatibility:
    """Compatibility verdict, boundary contact and the cusp parameters on [0, period]."""
    period = spec.period
    scale = torus.a + torus.b
    if spec.kind is FamilyKind.HELIX_PROJECTION:
        # the explicit height b sin(nt) keeps the lift smooth; boundary contact is a cycloid notion
        return TorusCompatibility(True, False, False, (), period)

    if spec.kind is FamilyKind.EPICYCLOID:
        outer_reach = spec.R + 2.0 * spec.r
        constraint_ok = _close(spec.R, torus.a - torus.b, scale) and outer_reach <= scale * (1 + 1e-9)
        touches_outer = _close(outer_reach, scale, scale)
        touches_inner = False
        doubled = touches_outer
    else:
        inner_reach = abs(2.0 * spec.r - spec.R)
        constraint_ok = inner_reach >= (torus.a - torus.b) - 1e-9 * scale and spec.R <= scale * (1 + 1e-9)
        touches_outer = False
        touches_inner = _close(inner_reach, torus.a - torus.b, scale)
        doubled = touches_inner

    step = math.pi if doubled else 2.0 * math.pi
    count = int(round(period / step))
    cusps = tuple(step * j for j in range(count + 1))
    if not constraint_ok:
        logger.info("%s is not compatible with torus a=%s b=%s", family_label(spec), torus.a, torus.b)
    return TorusCompatibility(constraint_ok, touches_outer, touches_inner, cusps, period)


def radius_squared_closed_form(spec: FamilySpec, t: float) -> float:
    """|alpha(t)|^2 without evaluating alpha."""
    R, r = spec.R, spec.r
    if spec.kind is FamilyKind.EPICYCLOID:
        return (R + r) ** 2 + r**2 - 2.0 * r * (R + r) * math.cos(t)
    if spec.kind is FamilyKind.HYPOCYCLOID:
        return (R - r) ** 2 + r**2 + 2.0 * r * (R - r) * math.cos(t)
    a, b = spec.torus.a, spec.torus.b
    return (a + b * math.cos(spec.n * t)) ** 2


def _named_height_terms(label: str, r: float, a: float, t: float) -> Optional[Tuple[float, float]]:
    """(squared tube radius, distance from the axis) in the named closed forms."""
    if label == "cardioid":
        return (a - r) ** 2, r * math.sqrt(5.0 - 4.0 * math.cos(t))
    if label == "nephroid":
        return (a - 2.0 * r) ** 2, r * math.sqrt(10.0 - 6.0 * math.cos(t))
    if label == "deltoid":
        return (1.5 * r - a) ** 2, 0.5 * r * math.sqrt(5.0 + 4.0 * math.cos(t))
    if label == "astroid":
        return (4.0 * r - a) ** 2, r * math.sqrt(10.0 + 6.0 * math.cos(t))
    return None


def toroidal_z_closed_form(
    spec: FamilySpec,
    torus: TorusSpec,
    t: float,
    branch: HeightBranch = HeightBranch.UPPER,
) -> float:
    """
    Height of the toroidal epicycloid or hypocycloid from its closed form.

    Named ratios use their own radicands (e.g. cardioid
    sqrt((a-r)^2 - (a - r sqrt(5 - 4 cos t))^2)) when the tube radius they
    imply equals b; everything else uses sqrt(b^2 - (a - |alpha(t)|)^2).

    Raises:
        ParameterError: the family is the helix projection or is not torus compatible
        TorusDomainError: t is at or beyond a cusp (radicand <= 0)
    """
    if spec.kind is FamilyKind.HELIX_PROJECTION:
        raise ParameterError("the helix projection has an explicit height b sin(nt)")
    if not torus_compat(spec, torus).constraint_ok:
        raise ParameterError(f"{family_label(spec)} is not compatible with torus a={torus.a}, b={torus.b}")
    terms = _named_height_terms(family_label(spec), spec.r, torus.a, t)
    # named forms assume their own tube radius (R = a + b for the hypocycloids)
    if terms is None or not _close(math.sqrt(terms[0]), torus.b, torus.a + torus.b):
        terms = torus.b**2, math.sqrt(radius_squared_closed_form(spec, t))
    tube_sq, rho = terms
    radicand = tube_sq - (torus.a - rho) ** 2
    if radicand <= 0.0:
        raise TorusDomainError("closed-form height undefined at a cusp", residual=radicand, t=t)
    return branch.value * math.sqrt(radicand)


def helix_focal_closed_form(a: float, b: float, n: int, t: float) -> Tuple[float, float, float]:
    """
    Focal curve (x_beta, y_beta, f_tilde) of the toroidal helix in closed form.

    Raises:
        SingularParameterError: the shared denominator vanishes at t
    """
    if n == 1:
        logger.warning("helix focal closed form with n = 1: the (n^2 - 1) terms vanish")
    n2 = n * n
    nt = n * t
    cos_nt, sin_nt = math.cos(nt), math.sin(nt)
    lead = 4.0 * a**2 * (n2 - 1) - b**2 * (8.0 * n2**2 + 13.0 * n2 + 3.0)
    tail = b * (
        4.0 * a * (n2**2 - 1)
        - 4.0 * a * (2.0 * n2 + 1.0) * math.cos(2.0 * nt)
        + b * (n2 - 1) * math.cos(3.0 * nt)
    )
    denominator = lead * cos_nt + tail
    scale = abs(lead) + abs(b) * (4.0 * a * (abs(n2**2 - 1) + 2.0 * n2 + 1.0) + abs(b * (n2 - 1)))
    if abs(denominator) <= 1e-12 * scale:
        raise SingularParameterError("helix focal closed form denominator vanishes", t=t, denominator=denominator)

    radial = a * (n2 - 1) - b * (2.0 * n2 + 1.0) * cos_nt
    twist = 3.0 * b * n * sin_nt
    x_beta = 4.0 * a * b * n2 * (math.cos(t) * radial + math.sin(t) * twist) / denominator
    y_beta = 4.0 * a * b * n2 * (math.sin(t) * radial - math.cos(t) * twist) / denominator
    f_tilde = (
        2.0
        * a
        * sin_nt
        * (
            -2.0 * a**2 * (n2 - 1)
            + 4.0 * a * b * (2.0 * n2 + 1.0) * cos_nt
            - b**2 * (n2 - 1) * math.cos(2.0 * nt)
            + b**2 * (11.0 * n2 + 1.0)
        )
        / denominator
    )
    return x_beta, y_beta, f_tilde


@dataclass(frozen=True)
class Preset:
    """A named family member with radii given as multiples of the rolling radius r."""

    name: str
    kind: FamilyKind
    R_per_r: float
    a_per_r: float
    b_per_r: float

    def spec(self, r: float = 1.0) -> FamilySpec:
        if not r > 0:
            raise ParameterError(f"rolling radius must be positive, got {r}")
        torus = TorusSpec(self.a_per_r * r, self.b_per_r * r)
        return FamilySpec(kind=self.kind, R=self.R_per_r * r, r=r, torus=torus)


HELIX_PRESET = "helix"
HELIX_DEFAULTS = {"a": 4.0, "b": 1.0, "n": 12}

PRESETS: Dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("cardioid-strict", FamilyKind.EPICYCLOID, 1.0, 4.0, 3.0),
        Preset("cardioid-touch", FamilyKind.EPICYCLOID, 1.0, 2.0, 1.0),
        Preset("nephroid-strict", FamilyKind.EPICYCLOID, 2.0, 6.0, 4.0),
        Preset("nephroid-touch", FamilyKind.EPICYCLOID, 2.0, 3.0, 1.0),
        Preset("deltoid-strict", FamilyKind.HYPOCYCLOID, 1.5, 0.9, 0.6),
        Preset("deltoid-touch", FamilyKind.HYPOCYCLOID, 1.5, 1.0, 0.5),
        Preset("astroid-strict", FamilyKind.HYPOCYCLOID, 4.0, 8.0 / 3.0, 4.0 / 3.0),
        Preset("astroid-touch", FamilyKind.HYPOCYCLOID, 4.0, 3.0, 1.0),
    )
}

PRESET_NAMES: Tuple[str, ...] = tuple(PRESETS) + (HELIX_PRESET,)

# any ratio, with R, r, a and b all given explicitly
GENERAL_FAMILIES: Dict[str, FamilyKind] = {
    "epicycloid": FamilyKind.EPICYCLOID,
    "hypocycloid": FamilyKind.HYPOCYCLOID,
}


def preset_spec(
    name: str,
    r: Optional[float] = None,
    a: Optional[float] = None,
    b: Optional[float] = None,
    n: Optional[int] = None,
    R: Optional[float] = None,
) -> FamilySpec:
    """
    FamilySpec of a named preset.

    Ratio presets take the rolling radius r (default 1) and derive R, a, b
    from it; the helix takes a, b, n (defaults 4, 1, 12); the general
    epicycloid and hypocycloid need R, r, a and b.
    """
    if name in GENERAL_FAMILIES:
        if None in (R, r, a, b):
            raise ParameterError(f"{name} needs R, r, a and b", preset=name)
        return FamilySpec(kind=GENERAL_FAMILIES[name], R=R, r=r, torus=TorusSpec(a, b))
    if R is not None:
        raise ParameterError(f"preset {name} derives R itself", preset=name)
    if name == HELIX_PRESET:
        if r is not None:
            raise ParameterError("the helix preset takes a, b and n, not r")
        torus = TorusSpec(
            HELIX_DEFAULTS["a"] if a is None else a,
            HELIX_DEFAULTS["b"] if b is None else b,
        )
        return FamilySpec(kind=FamilyKind.HELIX_PROJECTION, n=HELIX_DEFAULTS["n"] if n is None else n, torus=torus)
    if name not in PRESETS:
        raise ParameterError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES + tuple(GENERAL_FAMILIES))}", preset=name)
    if a is not None or b is not None or n is not None:
        raise ParameterError(f"preset {name} fixes a and b from r; only --r applies", preset=name)
    return PRESETS[name].spec(1.0 if r is None else r)


def _helix_height(b: float, n: int, t_jet: Jet) -> Jet:
    return b * jet_sin(t_jet * float(n))


def create_family_lift(
    spec: FamilySpec,
    branch: HeightBranch = HeightBranch.UPPER,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CylindricalLift:
    """
    Factory for the toroidal lift of a family member.

    Epicycloids and hypocycloids use the torus height branch; the helix
    projection uses its explicit height b sin(nt), which stays on the torus
    where the projection touches the boundary circles.
    """
    curve = family_curve(spec)
    if spec.kind is FamilyKind.HELIX_PROJECTION:
        return CylindricalLift.with_height(
            curve,
            partial(_helix_height, spec.torus.b, int(spec.n)),
            label="toroidal helix",
            torus=spec.torus,
        )
    return CylindricalLift.over_torus(
        curve,
        spec.torus,
        branch=branch,
        eps_dom=tolerances.eps_dom,
        label=f"toroidal {family_label(spec)}",
    )


def describe_preset(name: str, spec: FamilySpec) -> Dict[str, Any]:
    compat = torus_compat(spec, spec.torus)
    return {
        "name": name,
        "family": family_label(spec),
        "kind": spec.kind.value,
        "R": spec.R if spec.kind is not FamilyKind.HELIX_PROJECTION else None,
        "r": spec.r if spec.kind is not FamilyKind.HELIX_PROJECTION else None,
        "a": spec.torus.a,
        "b": spec.torus.b,
        "n": spec.n if spec.kind is FamilyKind.HELIX_PROJECTION else None,
        "period": spec.period,
        "cusp_params": list(compat.cusp_params),
        "touches_outer": compat.touches_outer,
        "touches_inner": compat.touches_inner,
        "constraint_ok": compat.constraint_ok,
    }


def arcs_between_cusps(
    domain: Tuple[float, float],
    cusps: Sequence[float],
    guard: float,
) -> List[Tuple[float, float]]:
    """Open parameter intervals of `domain` left after removing [c - guard, c + guard] around each cusp."""
    lo, hi = domain
    arcs = []
    start = lo
    for cusp in sorted(cusps):
        if cusp + guard < lo or cusp - guard > hi:
            continue
        if cusp - guard > start:
            arcs.append((start, cusp - guard))
        start = max(start, cusp + guard)
    if hi > start:
        arcs.append((start, hi))
    return arcs


def _is_singular(lift: CylindricalLift, t: float, tolerances: Tolerances) -> bool:
    try:
        base = eval_jet2(lift.base, t, 1)
        if float(np.linalg.norm(base.vector(1))) <= tolerances.eps_reg * lift.base.speed_scale:
            return True
        lift_jet3(lift, t, 1)
    except TorusDomainError:
        return True
    except GeometryError as exc:
        logger.debug("singular scan at t=%r: %s", t, exc)
        return True
    return False


def detect_singular_parameters(
    lift: CylindricalLift,
    period: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    points_per_pi: int = CUSP_GRID_PER_PI,
) -> Tuple[float, ...]:
    """
    Grid points on [0, period] where the plane speed vanishes or the height guard trips.

    The grid contains every multiple of pi, where the family cusps lie.
    """
    steps = int(round(period / math.pi)) * points_per_pi
    grid = [math.pi * j / points_per_pi for j in range(steps + 1)]
    found = tuple(t for t in grid if _is_singular(lift, t, tolerances))
    logger.debug("%s: %d singular parameters on %d grid points", lift.label, len(found), len(grid))
    return found
