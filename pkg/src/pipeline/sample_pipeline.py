"""
Per-point sampling pipeline for toroidal and cylindrical curves.

Nodes, in order:
  build_setup -> evaluate_lift -> classify_cusp -> plane_invariants ->
  frenet_node -> focal_node -> route_on_status

Every singularity a node meets is turned into a status code, with priority
domain > near_cusp > flat > torsion_zero. Numeric fields are only filled for
status ok.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import RunConfig, Tolerances
from src.core.errors import (
    FlatnessError,
    JetDomainError,
    RegularityError,
    TorsionZeroError,
)
from src.core.expressions import CurveExpression, expression_evaluator
from src.core.jets import Jet2, Jet3
from src.geometry.families import (
    FamilySpec,
    TorusCompatibility,
    arcs_between_cusps,
    create_family_lift,
    preset_spec,
    torus_compat,
)
from src.geometry.focal import FocalData, focal_curvatures_general, focal_data, generalized_focal
from src.geometry.frenet import FrenetData, frenet_general, kappa_jet_general
from src.geometry.lift import CylindricalLift, HeightBranch, TorusSpec, constant_height, lift_jet3
from src.geometry.plane_curves import PlaneCurve, arc_speed_jet, signed_curvature, signed_curvature_jet

logger = logging.getLogger(__name__)

PIPELINE_ORDER = 3
DEFAULT_EXPRESSION_DOMAIN = (0.0, 2.0 * math.pi)

STATUS_OK = "ok"
STATUS_DOMAIN = "domain"
STATUS_NEAR_CUSP = "near_cusp"
STATUS_FLAT = "flat"
STATUS_TORSION_ZERO = "torsion_zero"
STATUSES = (STATUS_OK, STATUS_DOMAIN, STATUS_NEAR_CUSP, STATUS_FLAT, STATUS_TORSION_ZERO)


@dataclass(frozen=True)
class CurveSetup:
    """Everything the per-point nodes need, resolved once from a RunConfig."""

    label: str
    lift: CylindricalLift
    domain: Tuple[float, float]
    cusps: Tuple[float, ...]
    guard: float
    arcs: Tuple[Tuple[float, float], ...]
    preset: Optional[str] = None
    family: Optional[FamilySpec] = None
    compat: Optional[TorusCompatibility] = None

    @property
    def curve(self) -> PlaneCurve:
        return self.lift.base

    @property
    def torus(self) -> Optional[TorusSpec]:
        return self.lift.torus

    def arc_index(self, t: float) -> Optional[int]:
        for index, (lo, hi) in enumerate(self.arcs):
            if lo <= t <= hi:
                return index
        return None

    def near_cusp(self, t: float) -> bool:
        return any(abs(t - c) <= self.guard for c in self.cusps)


@dataclass(frozen=True)
class PointEvaluation:
    """Full per-point result kept by the verification suite."""

    t: float
    jet3: Jet3
    frame: FrenetData
    K: float
    s_dot: float
    focal: FocalData

    @property
    def c1(self) -> float:
        return self.focal.c1

    @property
    def c2(self) -> float:
        return self.focal.c2

    @property
    def C_gamma(self) -> np.ndarray:
        return self.focal.C_gamma

    @property
    def beta(self) -> np.ndarray:
        return self.focal.beta

    @property
    def f_tilde(self) -> float:
        return self.focal.f_tilde

    @property
    def base_jet(self) -> Jet2:
        return Jet2(self.jet3.x, self.jet3.y)

    @property
    def gamma(self) -> np.ndarray:
        return self.jet3.value


def _vec(v) -> Optional[List[float]]:
    return None if v is None else [float(x) for x in v]


@dataclass(frozen=True)
class SampleRecord:
    t: float
    status: str
    arc: Optional[int] = None
    alpha: Optional[Tuple[float, float]] = None
    f: Optional[float] = None
    gamma: Optional[Tuple[float, float, float]] = None
    s_dot: Optional[float] = None
    K: Optional[float] = None
    T: Optional[Tuple[float, float, float]] = None
    N: Optional[Tuple[float, float, float]] = None
    B: Optional[Tuple[float, float, float]] = None
    kappa: Optional[float] = None
    tau: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    C_gamma: Optional[Tuple[float, float, float]] = None
    beta: Optional[Tuple[float, float]] = None
    f_tilde: Optional[float] = None

    @classmethod
    def from_evaluation(cls, ev: PointEvaluation, arc: Optional[int]) -> "SampleRecord":
        gamma = ev.gamma
        return cls(
            t=float(ev.t),
            status=STATUS_OK,
            arc=arc,
            alpha=tuple(_vec(gamma[:2])),
            f=float(gamma[2]),
            gamma=tuple(_vec(gamma)),
            s_dot=ev.s_dot,
            K=ev.K,
            T=tuple(_vec(ev.frame.T)),
            N=tuple(_vec(ev.frame.N)),
            B=tuple(_vec(ev.frame.B)),
            kappa=ev.frame.kappa,
            tau=ev.frame.tau,
            c1=ev.c1,
            c2=ev.c2,
            C_gamma=tuple(_vec(ev.C_gamma)),
            beta=tuple(_vec(ev.beta)),
            f_tilde=ev.f_tilde,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "arc": self.arc,
            "status": self.status,
            "alpha": _vec(self.alpha),
            "f": self.f,
            "gamma": _vec(self.gamma),
            "s_dot": self.s_dot,
            "K": self.K,
            "T": _vec(self.T),
            "N": _vec(self.N),
            "B": _vec(self.B),
            "kappa": self.kappa,
            "tau": self.tau,
            "c1": self.c1,
            "c2": self.c2,
            "C_gamma": _vec(self.C_gamma),
            "beta": _vec(self.beta),
            "f_tilde": self.f_tilde,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SampleRecord":
        def tup(key):
            value = data.get(key)
            return None if value is None else tuple(float(x) for x in value)

        def num(key):
            value = data.get(key)
            return None if value is None else float(value)

        return cls(
            t=float(data["t"]),
            status=str(data["status"]),
            arc=data.get("arc"),
            alpha=tup("alpha"),
            f=num("f"),
            gamma=tup("gamma"),
            s_dot=num("s_dot"),
            K=num("K"),
            T=tup("T"),
            N=tup("N"),
            B=tup("B"),
            kappa=num("kappa"),
            tau=num("tau"),
            c1=num("c1"),
            c2=num("c2"),
            C_gamma=tup("C_gamma"),
            beta=tup("beta"),
            f_tilde=num("f_tilde"),
        )


def build_setup(config: RunConfig) -> CurveSetup:
    """
    Node: build_setup
    Resolve the curve, its lift, the parameter domain and the cusp guards.
    """
    tol = config.tolerances
    branch = HeightBranch.from_name(config.branch)
    if config.preset is not None:
        spec = preset_spec(config.preset, r=config.r, a=config.a, b=config.b, n=config.n, R=config.R)
        lift = create_family_lift(spec, branch=branch, tolerances=tol)
        compat = torus_compat(spec, spec.torus)
        domain = config.t_range or (0.0, spec.period)
        cusps = compat.cusp_params
        label = config.preset
    else:
        spec, compat, cusps = None, None, ()
        period = config.period
        domain = config.t_range or ((0.0, period) if period else DEFAULT_EXPRESSION_DOMAIN)
        curve = PlaneCurve(
            evaluator=expression_evaluator(config.expr_x, config.expr_y),
            param_domain=domain,
            period=period,
            label=f"({config.expr_x}, {config.expr_y})",
        )
        if config.a is not None and config.b is not None:
            lift = CylindricalLift.over_torus(curve, TorusSpec(config.a, config.b), branch, tol.eps_dom)
        elif config.expr_f:
            lift = CylindricalLift.with_height(curve, CurveExpression.parse(config.expr_f))
        else:
            lift = CylindricalLift.with_height(curve, constant_height(0.0), label=f"planar {curve.label}")
        label = lift.label

    guard = tol.cusp_guard * (compat.period if compat is not None else domain[1] - domain[0])
    arcs = tuple(arcs_between_cusps(domain, cusps, guard))
    logger.info("%s: domain %s, %d cusps, %d arcs", label, domain, len(cusps), len(arcs))
    return CurveSetup(
        label=label,
        lift=lift,
        domain=domain,
        cusps=tuple(cusps),
        guard=guard,
        arcs=arcs,
        preset=config.preset,
        family=spec,
        compat=compat,
    )


def evaluate_point(setup: CurveSetup, t: float, tolerances: Tolerances) -> PointEvaluation:
    """
    Run every geometric node at t.

    Raises:
        JetDomainError: height undefined (torus boundary)
        RegularityError, FlatnessError, TorsionZeroError: singular point
    """
    # Node: evaluate_lift
    jet3 = lift_jet3(setup.lift, t, PIPELINE_ORDER)
    base_jet, f_jet = Jet2(jet3.x, jet3.y), jet3.z
    curve = setup.curve
    length_scale, speed_scale = curve.length_scale, curve.speed_scale

    try:
        # Node: plane_invariants
        plane = signed_curvature(curve, t, tolerances)

        # Node: frenet_node
        frame = frenet_general(jet3, tolerances, length_scale, speed_scale)

        # Node: focal_node
        kappa_jet = kappa_jet_general(jet3)
        c1, c2 = focal_curvatures_general(kappa_jet, frame.speed, frame.tau, tolerances, length_scale)
        K_jet = signed_curvature_jet(base_jet)
        s_dot_jet = arc_speed_jet(base_jet)
        beta, f_tilde = generalized_focal(base_jet, f_jet, K_jet, s_dot_jet, tolerances, length_scale)
    except (RegularityError, FlatnessError, TorsionZeroError) as exc:
        raise exc.at(t)

    return PointEvaluation(
        t=float(t),
        jet3=jet3,
        frame=frame,
        K=plane.K,
        s_dot=plane.s_dot,
        focal=focal_data(jet3.value, frame, c1, c2, beta, f_tilde),
    )


def route_on_status(setup: CurveSetup, t: float, tolerances: Tolerances) -> SampleRecord:
    """
    Node: route_on_status
    Map one parameter to a record, translating singularities to status codes.
    """
    arc = setup.arc_index(t)
    try:
        lift_jet3(setup.lift, t, 0)
    except JetDomainError:
        return SampleRecord(t=float(t), status=STATUS_DOMAIN)
    if setup.near_cusp(t):
        return SampleRecord(t=float(t), status=STATUS_NEAR_CUSP)
    try:
        evaluation = evaluate_point(setup, t, tolerances)
    except JetDomainError:
        return SampleRecord(t=float(t), status=STATUS_DOMAIN)
    except RegularityError:
        return SampleRecord(t=float(t), status=STATUS_NEAR_CUSP)
    except FlatnessError:
        return SampleRecord(t=float(t), status=STATUS_FLAT)
    except TorsionZeroError:
        return SampleRecord(t=float(t), status=STATUS_TORSION_ZERO)
    return SampleRecord.from_evaluation(evaluation, arc)


def sample_grid(domain: Tuple[float, float], samples: int) -> np.ndarray:
    lo, hi = domain
    return np.linspace(lo, hi, samples)


def interior_grid(arcs: Sequence[Tuple[float, float]], total: int, margin: float = 0.0) -> List[float]:
    """
    Midpoint grid with about `total` points spread over the arcs.

    margin trims that fraction of each arc's length from both ends.
    """
    if not arcs:
        return []
    per_arc = max(1, math.ceil(total / len(arcs)))
    points = []
    for lo, hi in arcs:
        width = hi - lo
        lo, hi = lo + margin * width, hi - margin * width
        step = (hi - lo) / per_arc
        points.extend(lo + (j + 0.5) * step for j in range(per_arc))
    return points


@dataclass
class SamplePipeline:
    """Deterministic sampler: uniform grid in t, ordered results whatever the worker count."""

    config: RunConfig
    setup: CurveSetup = field(init=False)

    def __post_init__(self):
        self.setup = build_setup(self.config)

    def process_point(self, t: float) -> SampleRecord:
        return route_on_status(self.setup, float(t), self.config.tolerances)

    def run(self) -> List[SampleRecord]:
        grid = sample_grid(self.setup.domain, self.config.samples)
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                records = list(pool.map(self.process_point, grid))
        else:
            records = [self.process_point(t) for t in grid]
        counts = {status: 0 for status in STATUSES}
        for record in records:
            counts[record.status] += 1
        logger.info("%s: sampled %d points %s", self.setup.label, len(records), counts)
        return records


def create_sample_pipeline(config: RunConfig) -> SamplePipeline:
    return SamplePipeline(config)
