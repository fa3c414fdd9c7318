"""Exact multivariate polynomials and rational functions over QQ.

Polynomials wrap ``sympy.Poly`` over the rational field; nothing in this module
rounds. Numeric evaluators are produced on demand through ``sympy.lambdify`` so the
same objects feed both the exact identity checks and the floating-point solvers.
"""

import itertools
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np
import sympy as sp

from slag.logger import get_logger

logger = get_logger(__name__)


class ExactPolyError(Exception):
    """Exact polynomial error."""

    pass


class ParseError(ExactPolyError):
    """Expression text could not be parsed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NegativeExponentError(ParseError):
    """A power with a negative exponent."""

    pass


class UnknownVariableError(ExactPolyError):
    """Symbol not among the declared variables."""

    pass


class DimensionError(ExactPolyError):
    """Mismatched variable lists or map sizes."""

    pass


class EvaluationError(ExactPolyError, ZeroDivisionError):
    """Denominator vanishes at the evaluation point."""

    pass


def to_fraction(value: Any) -> Fraction:
    """Convert an exact scalar (int, Fraction, sympy Rational, rational string) to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"not an exact rational: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def is_exact_scalar(value: Any) -> bool:
    return isinstance(value, (Fraction, int, np.integer, sp.Rational)) and not isinstance(
        value, bool
    )


def _rational(value: Any) -> sp.Rational:
    fraction = to_fraction(value)
    return sp.Rational(fraction.numerator, fraction.denominator)


def _symbols(variables: Sequence[str]) -> tuple[sp.Symbol, ...]:
    return tuple(sp.Symbol(name) for name in variables)


class Polynomial:
    """Immutable polynomial with big-rational coefficients in an ordered variable list."""

    def __init__(self, poly: sp.Poly):
        if poly.get_domain() != sp.QQ:
            poly = poly.set_domain(sp.QQ)
        self._poly = poly

    @classmethod
    def from_expr(cls, expr: Any, variables: Sequence[str]) -> "Polynomial":
        return cls(sp.Poly(expr, *_symbols(variables), domain=sp.QQ))

    @classmethod
    def from_terms(
        cls, terms: dict[tuple[int, ...], Any], variables: Sequence[str]
    ) -> "Polynomial":
        for monomial in terms:
            if len(monomial) != len(variables):
                raise DimensionError(
                    f"exponent vector {monomial} does not match {len(variables)} variables"
                )
        data = {monomial: _rational(c) for monomial, c in terms.items() if to_fraction(c) != 0}
        if not data:
            return cls.zero(variables)
        return cls(sp.Poly.from_dict(data, *_symbols(variables), domain=sp.QQ))

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls.from_expr(sp.Integer(0), variables)

    @classmethod
    def constant(cls, value: Any, variables: Sequence[str]) -> "Polynomial":
        return cls.from_expr(_rational(value), variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "Polynomial":
        if name not in variables:
            raise UnknownVariableError(f"unknown variable {name!r}")
        return cls.from_expr(sp.Symbol(name), variables)

    @property
    def poly(self) -> sp.Poly:
        return self._poly

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(str(gen) for gen in self._poly.gens)

    @property
    def symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(self._poly.gens)

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Exponent vector -> coefficient; zero coefficients are never present."""
        return {
            tuple(monomial): to_fraction(coeff)
            for monomial, coeff in self._poly.terms()
            if coeff != 0
        }

    @property
    def is_zero(self) -> bool:
        return bool(self._poly.is_zero)

    @property
    def degree(self) -> int:
        return 0 if self.is_zero else int(self._poly.total_degree())

    def as_expr(self) -> sp.Expr:
        return self._poly.as_expr()

    def _coerce(self, other: Any) -> sp.Poly | None:
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise DimensionError(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other._poly
        if is_exact_scalar(other):
            return sp.Poly(_rational(other), *self._poly.gens, domain=sp.QQ)
        return None

    def __add__(self, other: Any) -> "Polynomial":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        return Polynomial(self._poly + poly)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Polynomial":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        return Polynomial(self._poly - poly)

    def __rsub__(self, other: Any) -> "Polynomial":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        return Polynomial(poly - self._poly)

    def __mul__(self, other: Any) -> "Polynomial":
        poly = self._coerce(other)
        if poly is None:
            return NotImplemented
        return Polynomial(self._poly * poly)

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._poly)

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, (int, np.integer)) or exponent < 0:
            raise ExactPolyError(f"exponent must be a nonnegative integer, got {exponent!r}")
        return Polynomial(self._poly ** int(exponent))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.variables == other.variables and (self._poly - other._poly).is_zero
        if is_exact_scalar(other):
            return (self - other).is_zero
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.variables, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, variables={self.variables})"

    def diff(self, variable: str) -> "Polynomial":
        if variable not in self.variables:
            raise UnknownVariableError(f"unknown variable {variable!r}")
        return Polynomial(self._poly.diff(sp.Symbol(variable)))

    def evaluate(self, point: Sequence[Any]) -> Fraction:
        """Exact value at a rational point."""
        if len(point) != len(self.variables):
            raise DimensionError(
                f"point has {len(point)} coordinates, expected {len(self.variables)}"
            )
        values = [to_fraction(v) for v in point]
        total = Fraction(0)
        for monomial, coeff in self.terms.items():
            term = coeff
            for value, power in zip(values, monomial):
                if power:
                    term *= value**power
            total += term
        return total

    @cached_property
    def numeric(self) -> Callable[[np.ndarray], np.ndarray]:
        """Vectorized float/complex evaluator: points of shape (..., n) -> values (...)."""
        function = sp.lambdify(self.symbols, self.as_expr(), modules="numpy")

        def evaluate(points: np.ndarray) -> np.ndarray:
            points = np.asarray(points)
            value = function(*np.moveaxis(points, -1, 0))
            dtype = np.result_type(points.dtype, np.float64)
            return np.array(np.broadcast_to(np.asarray(value, dtype=dtype), points.shape[:-1]))

        return evaluate

    def to_text(self) -> str:
        """Deterministic serialization: graded-lex order, explicit rational coefficients."""
        if self.is_zero:
            return "0"
        parts = []
        for monomial, coeff in self._poly.terms(order="grlex"):
            fraction = to_fraction(coeff)
            sign = "-" if fraction < 0 else "+"
            magnitude = abs(fraction)
            factors = [
                name if power == 1 else f"{name}^{power}"
                for name, power in zip(self.variables, monomial)
                if power
            ]
            text = str(magnitude)
            if factors:
                text = f"{text}*{'*'.join(factors)}"
            parts.append((sign, text))
        first_sign, first_text = parts[0]
        out = ("-" if first_sign == "-" else "") + first_text
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Quotient of two polynomials in the same variables; equality by cross-multiplication."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        if self.numerator.variables != self.denominator.variables:
            raise DimensionError("numerator and denominator use different variables")
        if self.denominator.is_zero:
            raise ExactPolyError("denominator is the zero polynomial")

    @classmethod
    def from_polynomial(cls, polynomial: Polynomial) -> "RationalFunction":
        return cls(polynomial, Polynomial.constant(1, polynomial.variables))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.numerator.variables

    def _promote(self, other: Any) -> "RationalFunction | None":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_polynomial(other)
        if is_exact_scalar(other):
            return RationalFunction.from_polynomial(Polynomial.constant(other, self.variables))
        return None

    def __eq__(self, other: object) -> bool:
        other = self._promote(other)
        if other is None:
            return NotImplemented
        if other.variables != self.variables:
            return False
        cross = self.numerator * other.denominator - other.numerator * self.denominator
        return cross.is_zero

    __hash__ = None

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __add__(self, other: Any) -> "RationalFunction":
        other = self._promote(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RationalFunction":
        other = self._promote(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Any) -> "RationalFunction":
        other = self._promote(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        other = self._promote(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __repr__(self) -> str:
        return f"RationalFunction({self.to_text()!r})"

    def as_expr(self) -> sp.Expr:
        return self.numerator.as_expr() / self.denominator.as_expr()

    def diff(self, variable: str) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        return RationalFunction(n.diff(variable) * d - n * d.diff(variable), d * d)

    def evaluate(self, point: Sequence[Any]) -> Fraction:
        denominator = self.denominator.evaluate(point)
        if denominator == 0:
            raise EvaluationError(f"denominator vanishes at {list(point)}")
        return self.numerator.evaluate(point) / denominator

    def numeric(self, points: np.ndarray) -> np.ndarray:
        return self.numerator.numeric(points) / self.denominator.numeric(points)

    def compose(self, substitutions: Sequence["RationalFunction"]) -> "RationalFunction":
        """Substitute one rational function per variable (simultaneously) and cancel."""
        if len(substitutions) != len(self.variables):
            raise DimensionError(
                f"{len(substitutions)} substitutions for {len(self.variables)} variables"
            )
        target = substitutions[0].variables
        mapping = {
            symbol: substitution.as_expr()
            for symbol, substitution in zip(self.numerator.symbols, substitutions)
        }
        expr = sp.cancel(self.as_expr().subs(mapping, simultaneous=True))
        numerator, denominator = sp.fraction(expr)
        return RationalFunction(
            Polynomial.from_expr(numerator, target), Polynomial.from_expr(denominator, target)
        )

    def to_text(self) -> str:
        return f"({self.numerator.to_text()}) / ({self.denominator.to_text()})"


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if match is None:
            start = position + len(text[position:]) - len(text[position:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser building exact polynomials."""

    def __init__(self, text: str, variables: Sequence[str]):
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def _advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _is_op(self, *ops: str) -> bool:
        kind, value, _ = self.current
        return kind == "op" and value in ops

    def parse(self) -> Polynomial:
        result = self._expression()
        kind, value, position = self.current
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", position)
        return result

    def _expression(self) -> Polynomial:
        result = self._term()
        while self._is_op("+", "-"):
            _, op, _ = self._advance()
            operand = self._term()
            result = result + operand if op == "+" else result - operand
        return result

    def _term(self) -> Polynomial:
        result = self._unary()
        while self._is_op("*"):
            self._advance()
            result = result * self._unary()
        return result

    def _unary(self) -> Polynomial:
        if self._is_op("-"):
            self._advance()
            return -self._unary()
        if self._is_op("+"):
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> Polynomial:
        base = self._atom()
        if self._is_op("^", "**"):
            self._advance()
            kind, value, position = self.current
            if kind == "op" and value == "-":
                raise NegativeExponentError("negative exponent", position)
            if kind != "number" or "/" in value:
                raise ParseError("exponent must be a nonnegative integer", position)
            self._advance()
            return base ** int(value)
        return base

    def _atom(self) -> Polynomial:
        kind, value, position = self._advance()
        if kind == "number":
            numerator, _, denominator = value.partition("/")
            if denominator and int(denominator) == 0:
                raise ParseError("zero denominator in rational literal", position)
            literal = Fraction(int(numerator), int(denominator or 1))
            return Polynomial.constant(literal, self.variables)
        if kind == "name":
            if value not in self.variables:
                raise UnknownVariableError(f"unknown symbol {value!r} at position {position}")
            return Polynomial.variable(value, self.variables)
        if kind == "op" and value == "(":
            inner = self._expression()
            closing_kind, closing, closing_position = self._advance()
            if closing_kind != "op" or closing != ")":
                raise ParseError("expected ')'", closing_position)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of expression", position)
        raise ParseError(f"unexpected token {value!r}", position)


def parse_expression(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse +, -, *, ^ (or **), parentheses, integer and p/q literals into a polynomial."""
    return _Parser(text, variables).parse()


def differentiate(p: Polynomial, variable: str) -> Polynomial:
    return p.diff(variable)


def evaluate(expr: Polynomial | RationalFunction, point: Sequence[Any]) -> Fraction:
    return expr.evaluate(point)


def _permutation_sign(permutation: Sequence[int]) -> int:
    inversions = sum(
        1
        for a, b in itertools.combinations(range(len(permutation)), 2)
        if permutation[a] > permutation[b]
    )
    return -1 if inversions % 2 else 1


def polynomial_determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Division-free Leibniz expansion."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise DimensionError("determinant of a non-square matrix")
    variables = matrix[0][0].variables
    total = Polynomial.zero(variables)
    for permutation in itertools.permutations(range(size)):
        term = Polynomial.constant(_permutation_sign(permutation), variables)
        for row, column in enumerate(permutation):
            entry = matrix[row][column]
            if entry.is_zero:
                break
            term = term * entry
        else:
            total = total + term
    return total


def _check_square(
    components: Sequence[RationalFunction | Polynomial], variables: Sequence[str]
) -> list[RationalFunction]:
    """Promote polynomial components and require an n x n map in n distinct variables."""
    if not variables:
        raise DimensionError("map needs at least one variable")
    if len(set(variables)) != len(variables):
        raise DimensionError(f"repeated variables in {tuple(variables)}")
    if len(components) != len(variables):
        raise DimensionError(
            f"map has {len(components)} components in {len(variables)} variables"
        )
    promoted = [
        RationalFunction.from_polynomial(c) if isinstance(c, Polynomial) else c
        for c in components
    ]
    for component in promoted:
        if component.variables != tuple(variables):
            raise DimensionError(
                f"component variables {component.variables} differ from {tuple(variables)}"
            )
    return promoted


def jacobian_matrix(
    components: Sequence[RationalFunction | Polynomial], variables: Sequence[str]
) -> list[list[RationalFunction]]:
    components = _check_square(components, variables)
    return [[component.diff(v) for v in variables] for component in components]


def jacobian_determinant(
    components: Sequence[RationalFunction | Polynomial], variables: Sequence[str]
) -> RationalFunction:
    """Exact Jacobian determinant, comparable by cross-multiplication.

    Row k of the Jacobian of n_k/d_k shares the denominator d_k^2, so the determinant is
    det(n_k' d_k - n_k d_k') / prod(d_k^2) with a polynomial determinant on top.
    """
    components = _check_square(components, variables)
    rows = []
    denominator = Polynomial.constant(1, variables)
    for component in components:
        n, d = component.numerator, component.denominator
        rows.append([n.diff(v) * d - n * d.diff(v) for v in variables])
        denominator = denominator * d * d
    return RationalFunction(polynomial_determinant(rows), denominator)
