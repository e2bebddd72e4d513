"""Scalar helpers for the two numeric regimes used throughout.

Exact rationals (int / fractions.Fraction) drive the 1-D systems with
rational coefficients; float64 drives everything else.  The helpers here
parse, classify and serialise scalars so the rest of the code can stay
agnostic about which regime it is in.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction

Scalar = int | float | Fraction


def is_exact(x) -> bool:
    """True for scalars that participate in exact rational arithmetic."""
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(xs) -> bool:
    return all(is_exact(x) for x in xs)


def as_float(x) -> float:
    return float(x)


def parse_scalar(v) -> Scalar:
    """Decode a JSON scalar.  Strings such as "1/3" or "0.25" become Fractions."""
    if isinstance(v, bool):
        raise ValueError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse scalar {v!r}") from exc
    raise ValueError(f"not a number: {v!r}")


def scalar_to_json(x):
    """Encode a scalar for JSON output; rationals become strings like "1/3"."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.BitXor)


def eval_rational(expr: str, m: int) -> Fraction:
    """Evaluate a closed-form rational expression in the integer parameter m.

    Allowed: integer literals, the name ``m``, unary +/-, and the operators
    + - * / and ** (``^`` is accepted as a synonym for **).  Exponents must
    be integers.  Everything is computed with exact rationals, e.g.
    ``eval_rational("1/2**(2*m-1)", 3)`` is Fraction(1, 32).
    """
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {expr!r}") from exc

    def ev(node) -> Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int) and not isinstance(node.value, bool):
                return Fraction(node.value)
            raise ValueError(f"non-integer literal in {expr!r}")
        if isinstance(node, ast.Name):
            if node.id == "m":
                return Fraction(m)
            raise ValueError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            a, b = ev(node.left), ev(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return a + b
            if isinstance(op, ast.Sub):
                return a - b
            if isinstance(op, ast.Mult):
                return a * b
            if isinstance(op, ast.Div):
                if b == 0:
                    raise ZeroDivisionError(f"division by zero in {expr!r}")
                return a / b
            # Pow and BitXor both mean exponentiation here.
            if b.denominator != 1:
                raise ValueError(f"non-integer exponent in {expr!r}")
            return a ** int(b)
        raise ValueError(f"unsupported syntax in {expr!r}")

    return ev(tree)


def log3_exponent(eps: Scalar) -> int | None:
    """Return k when eps equals 3**-k exactly, else None."""
    if not is_exact(eps):
        return None
    f = Fraction(eps)
    if f.numerator != 1 or f <= 0:
        return None
    d, k = f.denominator, 0
    while d % 3 == 0:
        d //= 3
        k += 1
    return k if d == 1 else None
