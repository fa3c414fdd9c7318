"""Tests for exactpoly module."""

from fractions import Fraction

import numpy as np
import pytest

from slag.exactpoly import (
    DimensionError,
    EvaluationError,
    ExactPolyError,
    NegativeExponentError,
    ParseError,
    Polynomial,
    RationalFunction,
    UnknownVariableError,
    differentiate,
    evaluate,
    jacobian_determinant,
    parse_expression,
    polynomial_determinant,
    to_fraction,
)

ZETA = ("zeta1", "zeta2", "zeta3", "zeta4")
XYZ = ("x", "y", "z")


def rational(numerator: str, denominator: str = "1") -> RationalFunction:
    return RationalFunction(parse_expression(numerator, ZETA), parse_expression(denominator, ZETA))


def random_polynomial(rng: np.random.Generator, degree: int = 3, terms: int = 5) -> Polynomial:
    monomials = {}
    for _ in range(terms):
        exponents = tuple(int(e) for e in rng.integers(0, degree + 1, size=3))
        monomials[exponents] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
    return Polynomial.from_terms(monomials, XYZ)


def random_point(rng: np.random.Generator) -> list[Fraction]:
    return [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in XYZ]


class TestToFraction:
    def test_int_and_string(self):
        assert to_fraction(3) == Fraction(3)
        assert to_fraction("-1/2") == Fraction(-1, 2)

    def test_rejects_float(self):
        with pytest.raises(TypeError):
            to_fraction(0.5)

    def test_rejects_bool(self):
        with pytest.raises(TypeError):
            to_fraction(True)


class TestParseExpression:
    def test_two_by_two_minor(self):
        p = parse_expression("z0*w1 - z1*w0", ("z0", "z1", "w0", "w1"))

        assert p.terms == {(1, 0, 0, 1): Fraction(1), (0, 1, 1, 0): Fraction(-1)}

    def test_binomial_identity_is_zero(self):
        p = parse_expression("(a+b)^2 - a^2 - 2*a*b - b^2", ("a", "b"))

        assert p.is_zero
        assert p.to_text() == "0"

    def test_rational_literal(self):
        p = parse_expression("1/2*x + 3/4", ("x",))

        assert p.terms == {(1,): Fraction(1, 2), (0,): Fraction(3, 4)}

    def test_double_star_power(self):
        assert parse_expression("x**3", ("x",)) == parse_expression("x^3", ("x",))

    def test_unary_minus(self):
        assert parse_expression("-(x - 1)", ("x",)) == parse_expression("1 - x", ("x",))

    def test_negative_exponent(self):
        with pytest.raises(NegativeExponentError) as excinfo:
            parse_expression("x^-2", ("x",))

        assert excinfo.value.position == 2

    def test_unknown_symbol(self):
        with pytest.raises(UnknownVariableError, match="'y' at position 4"):
            parse_expression("x + y", ("x",))

    def test_unexpected_character(self):
        with pytest.raises(ParseError) as excinfo:
            parse_expression("x $ 1", ("x",))

        assert excinfo.value.position == 2

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ParseError, match="expected"):
            parse_expression("(x + 1", ("x",))

    def test_trailing_token(self):
        with pytest.raises(ParseError, match="unexpected token"):
            parse_expression("x 1", ("x",))

    def test_zero_denominator_literal(self):
        with pytest.raises(ParseError, match="zero denominator"):
            parse_expression("1/0", ("x",))

    def test_fractional_exponent(self):
        with pytest.raises(ParseError, match="nonnegative integer"):
            parse_expression("x^1/2", ("x",))


class TestPolynomial:
    def test_evaluate_exact(self):
        p = parse_expression("1 + x^4", ("x",))

        assert evaluate(p, [2]) == 17
        assert p.evaluate([Fraction(1, 2)]) == Fraction(17, 16)

    def test_evaluate_wrong_dimension(self):
        p = parse_expression("x*y", ("x", "y"))

        with pytest.raises(DimensionError):
            p.evaluate([1])

    def test_arithmetic_with_scalars(self):
        x = Polynomial.variable("x", ("x",))

        assert (x * 2 + Fraction(1, 3)) == parse_expression("2*x + 1/3", ("x",))
        assert (1 - x) == parse_expression("1 - x", ("x",))

    def test_mismatched_variables(self):
        x = Polynomial.variable("x", ("x",))
        y = Polynomial.variable("y", ("y",))

        with pytest.raises(DimensionError):
            x + y

    def test_degree(self):
        assert parse_expression("x^3*y + y^2", ("x", "y")).degree == 4
        assert Polynomial.zero(("x",)).degree == 0

    def test_from_terms_drops_zero_coefficients(self):
        p = Polynomial.from_terms({(2,): 0, (1,): "1/3"}, ("x",))

        assert p.terms == {(1,): Fraction(1, 3)}

    def test_to_text_is_deterministic(self):
        p = parse_expression("1 - zeta3^4 + zeta1^4", ZETA)

        assert p.to_text() == "1*zeta1^4 - 1*zeta3^4 + 1"

    def test_numeric_matches_exact(self):
        p = parse_expression("x^2*y - 3*y + 1/2", ("x", "y"))
        points = np.array([[1.0, 2.0], [0.5, -1.0]])

        values = p.numeric(points)

        assert values.shape == (2,)
        assert values[0] == pytest.approx(float(p.evaluate([1, 2])))
        assert values[1] == pytest.approx(float(p.evaluate([Fraction(1, 2), -1])))

    def test_numeric_constant_broadcasts(self):
        p = Polynomial.constant(5, ("x", "y"))

        assert p.numeric(np.zeros((3, 2))).tolist() == [5.0, 5.0, 5.0]

    def test_hash_matches_equality(self):
        a = parse_expression("(x+1)^2", ("x",))
        b = parse_expression("x^2 + 2*x + 1", ("x",))

        assert a == b
        assert hash(a) == hash(b)


class TestRingProperties:
    def test_ring_axioms(self, rng):
        zero, one = Polynomial.zero(XYZ), Polynomial.constant(1, XYZ)
        for _ in range(20):
            p, q, r = (random_polynomial(rng) for _ in range(3))

            assert (p + q) + r == p + (q + r)
            assert (p * q) * r == p * (q * r)
            assert p + q == q + p
            assert p * q == q * p
            assert p * (q + r) == p * q + p * r
            assert p + zero == p
            assert p * one == p
            assert (p - p).is_zero

    def test_evaluate_is_a_homomorphism(self, rng):
        p, q = random_polynomial(rng), random_polynomial(rng)
        for _ in range(100):
            point = random_point(rng)
            a, b = p.evaluate(point), q.evaluate(point)

            assert (p + q).evaluate(point) == a + b
            assert (p * q).evaluate(point) == a * b
            assert (p - q).evaluate(point) == a - b

    def test_leibniz_rule(self, rng):
        for _ in range(20):
            p, q = random_polynomial(rng), random_polynomial(rng)
            for name in XYZ:
                expected = differentiate(p, name) * q + p * differentiate(q, name)

                assert differentiate(p * q, name) == expected

    def test_derivatives_commute(self, rng):
        p = random_polynomial(rng, degree=4, terms=8)

        assert p.diff("x").diff("z") == p.diff("z").diff("x")


class TestDifferentiate:
    def test_constant(self):
        assert differentiate(Polynomial.constant(7, ("x",)), "x").is_zero

    def test_quartic(self):
        x4 = parse_expression("x^4", ("x",))

        assert differentiate(x4, "x") == parse_expression("4*x^3", ("x",))

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariableError):
            differentiate(parse_expression("x", ("x",)), "y")


class TestRationalFunction:
    def test_equality_by_cross_multiplication(self):
        assert rational("zeta1*zeta2", "zeta1^2") == rational("zeta2", "zeta1")

    def test_evaluate(self):
        assert evaluate(rational("1", "zeta1^4"), [2, 0, 0, 0]) == Fraction(1, 16)

    def test_evaluate_pole(self):
        with pytest.raises(EvaluationError):
            rational("1", "zeta1").evaluate([0, 1, 1, 1])

    def test_pole_is_a_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            rational("1", "zeta1").evaluate([0, 1, 1, 1])

    def test_quotient_rule(self):
        derivative = rational("1", "zeta1").diff("zeta1")

        assert derivative == rational("-1", "zeta1^2")

    def test_compose(self):
        inverse = rational("1", "zeta1")
        identity = [rational(name) for name in ZETA]

        swapped = inverse.compose([inverse, *identity[1:]])

        assert swapped == rational("zeta1")

    def test_zero_denominator(self):
        with pytest.raises(ExactPolyError, match="zero polynomial"):
            RationalFunction(Polynomial.constant(1, ZETA), Polynomial.zero(ZETA))


class TestJacobianDeterminant:
    def test_identity_map(self):
        identity = [rational(name) for name in ZETA]

        assert jacobian_determinant(identity, ZETA) == 1

    def test_first_type(self):
        components = [
            rational("-zeta2", "zeta1"),
            rational("1", "zeta1"),
            rational("-(zeta1*zeta4 - zeta2*zeta3)", "zeta1"),
            rational("zeta3", "zeta1"),
        ]

        determinant = jacobian_determinant(components, ZETA)

        assert determinant == rational("-1", "zeta1^4")

    def test_second_type(self):
        d = "zeta1*zeta4 - zeta2*zeta3"
        components = [
            rational("-zeta4", d),
            rational("zeta2", d),
            rational("zeta3", d),
            rational("-zeta1", d),
        ]

        assert jacobian_determinant(components, ZETA) == rational("1", f"({d})^4")

    def test_wrong_component_count(self):
        with pytest.raises(DimensionError):
            jacobian_determinant([rational("zeta1")], ZETA)

    def test_component_variables_must_match(self):
        components = [rational(name) for name in ZETA]
        components[2] = RationalFunction.from_polynomial(parse_expression("x", ("x",)))

        with pytest.raises(DimensionError, match="component variables"):
            jacobian_determinant(components, ZETA)

    def test_three_components_in_four_variables(self):
        with pytest.raises(DimensionError, match="3 components in 4 variables"):
            jacobian_determinant([rational(name) for name in ZETA[:3]], ZETA)

    def test_repeated_variables(self):
        variables = ("zeta1", "zeta1", "zeta3", "zeta4")

        with pytest.raises(DimensionError, match="repeated"):
            jacobian_determinant([rational(name) for name in ZETA], variables)

    def test_empty_map(self):
        with pytest.raises(DimensionError):
            jacobian_determinant([], ())

    def test_shape_errors_are_exactpoly_errors(self):
        with pytest.raises(ExactPolyError):
            jacobian_determinant([rational("zeta1")] * 5, ZETA)

    def test_polynomial_components(self):
        components = [parse_expression(f"2*{name}", ZETA) for name in ZETA]

        assert jacobian_determinant(components, ZETA) == 16

    def test_polynomial_determinant_non_square(self):
        x = parse_expression("x", ("x",))

        with pytest.raises(DimensionError):
            polynomial_determinant([[x, x]])
