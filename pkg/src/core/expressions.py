"""
User curve expressions evaluated through jets.

The grammar is a small arithmetic subset (see docs/USER_GUIDE.md):
numbers, t, pi, e, + - * / and ^ (or **) with a constant exponent, unary
minus, parentheses and the functions sin, cos, sqrt. Text is parsed with
the `ast` module and every node is checked against a whitelist before
anything is evaluated.
"""

import ast
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Union

from src.core.errors import ExpressionError, JetDomainError
from src.core.jets import Jet, Jet2, jet_const, jet_cos, jet_sin, jet_sqrt

logger = logging.getLogger(__name__)

Value = Union[Jet, float]

_JET_FUNCTIONS = {"sin": jet_sin, "cos": jet_cos, "sqrt": jet_sqrt}
_FLOAT_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "sqrt": math.sqrt}
_CONSTANTS = {"pi": math.pi, "e": math.e}
_VARIABLE = "t"

_BINARY = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARY = (ast.USub, ast.UAdd)


def _validate(node: ast.AST, source: str) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, source)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINARY):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed in {source!r}", expression=source)
        _validate(node.left, source)
        _validate(node.right, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _UNARY):
            raise ExpressionError(f"unary operator not allowed in {source!r}", expression=source)
        _validate(node.operand, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _JET_FUNCTIONS:
            raise ExpressionError(f"unknown function in {source!r}; allowed: sin, cos, sqrt", expression=source)
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument", expression=source)
        _validate(node.args[0], source)
    elif isinstance(node, ast.Name):
        if node.id != _VARIABLE and node.id not in _CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r} in {source!r}", expression=source)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"only real number literals are allowed, got {node.value!r}", expression=source)
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__} in {source!r}", expression=source)


def _depends_on_t(node: ast.AST) -> bool:
    return any(isinstance(sub, ast.Name) and sub.id == _VARIABLE for sub in ast.walk(node))


@dataclass(frozen=True)
class CurveExpression:
    """A parsed scalar expression in t."""

    source: str
    tree: ast.Expression = field(repr=False, compare=False)

    @classmethod
    def parse(cls, text: str) -> "CurveExpression":
        if not text or not text.strip():
            raise ExpressionError("empty expression")
        # ^ is the power operator here, not xor
        normalized = text.strip().replace("^", "**")
        try:
            tree = ast.parse(normalized, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {text!r}: {exc.msg}", expression=text, offset=exc.offset)
        _validate(tree, text)
        for node in ast.walk(tree):
            if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow) and _depends_on_t(node.right):
                raise ExpressionError(f"exponents must be constant in {text!r}", expression=text)
        logger.debug("parsed expression %r", text)
        return cls(source=text, tree=tree)

    @property
    def depends_on_t(self) -> bool:
        return _depends_on_t(self.tree)

    def __call__(self, t_jet: Jet) -> Jet:
        """Evaluate at the jet of t; constant expressions give a constant jet of the same order."""
        result = self._eval(self.tree.body, t_jet)
        if isinstance(result, Jet):
            return result
        return jet_const(result, t_jet.order)

    def _eval(self, node: ast.AST, t_jet: Jet) -> Value:
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return t_jet if node.id == _VARIABLE else _CONSTANTS[node.id]
        if isinstance(node, ast.UnaryOp):
            operand = self._eval(node.operand, t_jet)
            return -operand if isinstance(node.op, ast.USub) else operand
        if isinstance(node, ast.Call):
            arg = self._eval(node.args[0], t_jet)
            return self._apply(node.func.id, arg)
        left = self._eval(node.left, t_jet)
        right = self._eval(node.right, t_jet)
        op = node.op
        if isinstance(op, ast.Add):
            return left + right
        if isinstance(op, ast.Sub):
            return left - right
        if isinstance(op, ast.Mult):
            return left * right
        if isinstance(op, ast.Div):
            if not isinstance(right, Jet) and right == 0.0:
                raise JetDomainError(f"division by zero in {self.source!r}", expression=self.source)
            return left / right
        return self._power(left, right)

    def _apply(self, name: str, arg: Value) -> Value:
        if isinstance(arg, Jet):
            return _JET_FUNCTIONS[name](arg)
        if name == "sqrt" and arg < 0:
            raise JetDomainError(f"sqrt of negative constant {arg!r} in {self.source!r}", value=arg)
        return _FLOAT_FUNCTIONS[name](arg)

    def _power(self, base: Value, exponent: float) -> Value:
        if isinstance(base, Jet):
            return base**exponent
        try:
            return math.pow(base, exponent)
        except (ValueError, ZeroDivisionError):
            raise JetDomainError(f"{base!r} ** {exponent!r} is undefined", value=base, exponent=exponent)


def expression_evaluator(expr_x: str, expr_y: str) -> Callable[[Jet], Jet2]:
    """Plane-curve evaluator from two coordinate expressions."""
    x, y = CurveExpression.parse(expr_x), CurveExpression.parse(expr_y)

    def evaluate(t_jet: Jet) -> Jet2:
        return Jet2(x(t_jet), y(t_jet))

    return evaluate

