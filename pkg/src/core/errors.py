"""
Structured errors for the toroidal curve toolkit.

Every singularity the kernel meets (cusps, flat points, vanishing torsion,
torus boundary) surfaces as one of these exceptions, never as NaN.
"""

from typing import Any, Dict, Optional


class GeometryError(Exception):
    """Base error carrying a machine-readable code and the offending parameter."""

    error_code = "GEOMETRY_ERROR"

    def __init__(self, message: str, t: Optional[float] = None, **details: Any):
        super().__init__(message)
        self.message = message
        self.t = t
        self.details = details

    def at(self, t: float) -> "GeometryError":
        """Attach the curve parameter if it is not known yet."""
        if self.t is None:
            self.t = float(t)
        return self

    def to_dict(self) -> Dict[str, Any]:
        record = {
            "error_type": type(self).__name__,
            "error_code": self.error_code,
            "message": self.message,
            "t": self.t,
        }
        record.update(self.details)
        return record

    def __str__(self) -> str:
        if self.t is None:
            return self.message
        return f"{self.message} (t={self.t!r})"


class ParameterError(GeometryError, ValueError):
    error_code = "INVALID_PARAMETERS"


class JetOrderError(ParameterError):
    error_code = "JET_ORDER"


class JetDomainError(GeometryError, ArithmeticError):
    error_code = "DOMAIN"


class TorusDomainError(JetDomainError):
    """Point outside the open annulus (a-b)^2 < x^2+y^2 < (a+b)^2."""

    error_code = "TORUS_DOMAIN"

    def __init__(self, message: str, residual: float, t: Optional[float] = None, **details: Any):
        super().__init__(message, t=t, residual=residual, **details)
        self.residual = residual


class RegularityError(GeometryError):
    error_code = "NOT_REGULAR"


class FlatnessError(GeometryError):
    error_code = "FLAT"


class TorsionZeroError(GeometryError):
    error_code = "TORSION_ZERO"


class SingularParameterError(GeometryError):
    error_code = "SINGULAR_PARAMETER"


class ExpressionError(ParameterError):
    error_code = "EXPRESSION_SYNTAX"


class ConfigurationError(ParameterError):
    error_code = "CONFIG_INVALID"


class ExportError(GeometryError):
    error_code = "EXPORT_FAILED"
