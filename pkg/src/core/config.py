"""
Run configuration and numeric guards.

Precedence is CLI flags > config file > the defaults declared here.
The config file is TOML (`key = value` lines); tolerance keys are written
either as `tol.<name> = value` (quoted key) or inside a `[tol]` table.
"""

import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from src.core.errors import ConfigurationError

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "json", "svg", "obj")


@dataclass(frozen=True)
class Tolerances:
    """Singularity guards, finite-difference steps and verification thresholds."""

    # guards
    eps_reg: float = 1e-9
    eps_flat: float = 1e-9
    eps_tau: float = 1e-9
    eps_dom: float = 1e-9
    cusp_guard: float = 1e-4
    # finite-difference steps, by stencil order
    fd_step_low: float = 1e-5
    fd_step_mid: float = 1e-4
    fd_step_high: float = 1e-3
    fd_step_contact: float = 5e-4
    # verification thresholds
    frenet_cross: float = 1e-9
    focal_cross: float = 1e-9
    projection: float = 1e-10
    sphere: float = 1e-10
    contact: float = 1e-6
    identity: float = 1e-12
    torus_membership: float = 1e-10
    closed_form_z: float = 1e-10
    helix_closed_form: float = 1e-8
    closure: float = 1e-9
    fd_low: float = 1e-6
    fd_high: float = 1e-3

    def fd_step(self, order: int) -> float:
        if order <= 1:
            return self.fd_step_low
        if order == 2:
            return self.fd_step_mid
        return self.fd_step_high

    def with_overrides(self, overrides: Mapping[str, Any]) -> "Tolerances":
        known = {f.name for f in fields(self)}
        clean = {}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigurationError(f"unknown tolerance key {key!r}", key=key, known=sorted(known))
            try:
                number = float(value)
            except (TypeError, ValueError):
                raise ConfigurationError(f"tolerance {key!r} must be a number, got {value!r}", key=key)
            if not math.isfinite(number) or number < 0:
                raise ConfigurationError(f"tolerance {key!r} must be finite and >= 0", key=key, value=number)
            clean[key] = number
        return replace(self, **clean)


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs: curve selection, torus, grid, outputs."""

    preset: Optional[str] = None
    expr_x: Optional[str] = None
    expr_y: Optional[str] = None
    expr_f: Optional[str] = None
    a: Optional[float] = None
    b: Optional[float] = None
    n: Optional[int] = None
    r: Optional[float] = None
    R: Optional[float] = None
    branch: str = "upper"
    samples: int = 512
    t_range: Optional[Tuple[float, float]] = None
    period: Optional[float] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    outputs: FrozenSet[str] = frozenset({"csv"})
    out_dir: Path = Path("out")
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.samples < 2:
            raise ConfigurationError(f"samples must be >= 2, got {self.samples}", key="samples")
        if self.preset is None and not (self.expr_x and self.expr_y):
            raise ConfigurationError("either a preset or both --expr-x and --expr-y are required", key="curve")
        if self.preset is not None and (self.expr_x or self.expr_y):
            raise ConfigurationError("a preset and user expressions are mutually exclusive", key="curve")
        if (self.a is None) != (self.b is None) and self.preset is None:
            raise ConfigurationError("torus needs both a and b", key="torus")
        if self.a is not None and self.b is not None and not self.a > self.b > 0:
            raise ConfigurationError(f"torus requires a > b > 0 (a={self.a}, b={self.b})", key="torus")
        if self.branch not in ("upper", "lower"):
            raise ConfigurationError(f"branch must be upper or lower, got {self.branch!r}", key="branch")
        if self.t_range is not None and not self.t_range[0] < self.t_range[1]:
            raise ConfigurationError(f"t range must be increasing, got {self.t_range}", key="t_range")
        unknown = set(self.outputs) - set(OUTPUT_FORMATS)
        if unknown:
            raise ConfigurationError(f"unknown output formats {sorted(unknown)}", key="outputs")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1", key="workers")


_RUN_KEYS = {f.name for f in fields(RunConfig)} - {"tolerances"}


def parse_outputs(value: Any) -> FrozenSet[str]:
    if isinstance(value, str):
        items = [part.strip() for part in value.split(",")]
    else:
        items = [str(part).strip() for part in value]
    return frozenset(item for item in items if item)


def parse_tolerance_pairs(pairs: Iterable[str]) -> Dict[str, str]:
    """Parse repeated `KEY=VAL` strings."""
    result = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"tolerance override must look like KEY=VAL, got {pair!r}", key="tol")
        result[key.strip()] = value.strip()
    return result


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a TOML config file into a flat dict of RunConfig keys plus `tol`."""
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}", key="config")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid TOML: {exc}", key="config")

    values: Dict[str, Any] = {}
    tol: Dict[str, Any] = dict(raw.pop("tol", {}) or {})
    for key, value in raw.items():
        if key.startswith("tol."):
            tol[key[4:]] = value
        elif key in _RUN_KEYS or key == "out":
            values["outputs" if key == "out" else key] = value
        else:
            raise ConfigurationError(f"unknown config key {key!r} in {path}", key=key)
    if tol:
        values["tol"] = tol
    logger.debug("loaded config %s: %s", path, values)
    return values


def build_run_config(file_values: Mapping[str, Any], flag_values: Mapping[str, Any]) -> RunConfig:
    """Merge defaults < file < flags into a validated RunConfig."""
    merged: Dict[str, Any] = {}
    tol_overrides: Dict[str, Any] = {}
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is None:
                continue
            if key == "tol":
                tol_overrides.update(value)
            else:
                merged[key] = value

    if "outputs" in merged:
        merged["outputs"] = parse_outputs(merged["outputs"])
    if "out_dir" in merged:
        merged["out_dir"] = Path(merged["out_dir"])
    if "t_range" in merged:
        lo, hi = merged["t_range"]
        merged["t_range"] = (float(lo), float(hi))
    for key in ("a", "b", "r", "R", "period"):
        if key in merged:
            merged[key] = float(merged[key])
    for key in ("n", "samples", "workers"):
        if key in merged:
            merged[key] = int(merged[key])

    merged["tolerances"] = DEFAULT_TOLERANCES.with_overrides(tol_overrides)
    return RunConfig(**merged)
