"""Tests for grassmann module."""

from fractions import Fraction

import numpy as np
import pytest

from slag.exactpoly import RationalFunction, parse_expression
from slag.grassmann import (
    CHARTS,
    ZETA,
    ChartError,
    ChartPoint,
    DegenerateFrameError,
    Frame,
    GrassmannError,
    chart_coords,
    check_cocycle,
    check_equivariance,
    check_quadric,
    check_round_trip,
    first_type,
    first_type_map,
    frame_action,
    pluecker,
    quadric_polynomial,
    reconstruct_frame,
    second_type,
    target_minor,
    transition,
    transition_jacobian,
    transition_map,
    verify_transition_jacobians,
)


def fractions(*values) -> list[Fraction]:
    return [Fraction(v) for v in values]


class TestFrame:
    def test_integers_become_exact(self, known_frame):
        assert known_frame.exact
        assert all(isinstance(x, Fraction) for x in known_frame.u)

    def test_floats_stay_floating(self):
        frame = Frame((1.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0))

        assert not frame.exact

    def test_dependent_vectors_rejected(self):
        with pytest.raises(DegenerateFrameError):
            Frame((1, 2, 3, 4), (2, 4, 6, 8))

    def test_wrong_length(self):
        with pytest.raises(GrassmannError, match="4 entries"):
            Frame((1, 0, 0), (0, 1, 0))

    def test_from_coordinates(self):
        frame = Frame.from_coordinates([1, 0, 0, 0, 0, 1, 0, 0])

        assert list(frame.u_prime) == fractions(0, 1, 0, 0)


class TestPluecker:
    def test_coordinate_plane(self):
        eta = pluecker(Frame((1, 0, 0, 0), (0, 1, 0, 0))).eta

        assert list(eta) == fractions(1, 0, 0, 0, 0, 0)

    def test_known_frame(self, known_frame):
        assert list(pluecker(known_frame).eta) == fractions(-1, 0, 0, 1, 0, 0)

    def test_quadric_vanishes(self, rational_frames):
        for frame in rational_frames(25, seed=11):
            point = pluecker(frame)
            assert point.quadric_residual() == 0
            assert point.satisfies_quadric()

    def test_quadric_polynomial_matches(self, rational_frames):
        quadric = quadric_polynomial()
        for frame in rational_frames(10, seed=12):
            assert quadric.evaluate(list(pluecker(frame).eta)) == 0

    def test_float_frame(self):
        eta = pluecker(Frame((0.5, 1.0, 0.0, 0.0), (0.0, 0.0, 2.0, 0.0))).eta

        assert eta.dtype == float
        assert eta[1] == pytest.approx(1.0)
        assert eta[3] == pytest.approx(2.0)


class TestFrameAction:
    def test_identity(self, known_frame):
        acted = frame_action(known_frame, 1, 0, 0, 1)

        assert list(acted.u) == list(known_frame.u)
        assert list(acted.u_prime) == list(known_frame.u_prime)

    def test_swap_negates(self, known_frame):
        acted = pluecker(frame_action(known_frame, 0, 1, 1, 0)).eta

        assert list(acted) == [-e for e in pluecker(known_frame).eta]

    def test_scaling(self):
        frame = Frame((1, 0, 0, 0), (0, 1, 0, 0))

        assert list(pluecker(frame_action(frame, 2, 0, 0, 1)).eta) == fractions(2, 0, 0, 0, 0, 0)

    def test_singular_matrix(self, known_frame):
        with pytest.raises(DegenerateFrameError):
            frame_action(known_frame, 1, 2, 2, 4)


class TestChartCoords:
    def test_coordinate_plane_is_origin(self):
        point = chart_coords(Frame((1, 0, 0, 0), (0, 1, 0, 0)), (0, 1))

        assert list(point.zeta) == fractions(0, 0, 0, 0)

    def test_explicit_inverse(self):
        point = chart_coords(Frame((1, 0, 1, 0), (0, 1, 0, 1)), (0, 1))

        assert list(point.zeta) == fractions(0, 1, 1, 0)

    def test_outside_chart(self, known_frame):
        with pytest.raises(ChartError):
            chart_coords(known_frame, (0, 2))

    def test_unknown_chart(self, known_frame):
        with pytest.raises(ChartError, match="unknown chart"):
            chart_coords(known_frame, (1, 0))

    @pytest.mark.parametrize("chart", CHARTS)
    def test_round_trip(self, chart):
        point = ChartPoint(chart, (Fraction(1, 2), -3, Fraction(2, 7), 5))

        assert chart_coords(reconstruct_frame(point), chart) == point

    def test_invariant_under_action(self, rational_frames):
        frame = rational_frames(1, seed=5)[0]
        acted = frame_action(frame, 2, Fraction(1, 3), -1, 4)

        for chart in CHARTS:
            try:
                expected = chart_coords(frame, chart)
            except ChartError:
                continue
            assert chart_coords(acted, chart) == expected


class TestTransition:
    def test_first_type_formula(self):
        assert list(first_type((1, 2, 3, 4))) == fractions(-2, 1, 2, 3)

    def test_second_type_formula(self):
        assert list(second_type((1, 0, 0, 2))) == [
            Fraction(-1),
            Fraction(0),
            Fraction(0),
            Fraction(-1, 2),
        ]

    def test_first_type_needs_nonzero_zeta1(self):
        with pytest.raises(ChartError):
            first_type((0, 1, 1, 1))

    def test_second_type_needs_nonzero_determinant(self):
        with pytest.raises(ChartError):
            second_type((1, 1, 1, 1))

    def test_same_chart_is_identity(self):
        point = ChartPoint((1, 3), (1, 2, 3, 4))

        assert transition(point, (1, 3)) == point

    def test_atlas_first_type(self):
        point = ChartPoint((0, 1), (1, 2, 3, 4))

        moved = transition(point, (0, 2))

        assert list(moved.zeta) == fractions(1, 2, -3, -2)

    def test_agrees_with_chart_coords(self, rational_frames):
        frame = rational_frames(1, seed=8)[0]
        source = chart_coords(frame, (0, 1))

        for target in CHARTS:
            try:
                expected = chart_coords(frame, target)
            except ChartError:
                continue
            assert transition(source, target) == expected

    def test_exact_map_matches_numeric(self):
        zeta = (Fraction(1, 2), 2, -1, 3)
        point = ChartPoint((0, 1), zeta)

        for target in CHARTS[1:]:
            try:
                expected = transition(point, target)
            except ChartError:
                continue
            components = transition_map((0, 1), target)
            assert [c.evaluate(list(zeta)) for c in components] == list(expected.zeta)

    def test_target_minor(self):
        minor = target_minor((0, 1), (2, 3))

        assert minor == parse_expression("zeta2*zeta3 - zeta1*zeta4", ZETA)

    def test_numeric_jacobian_matches_finite_difference(self):
        zeta = np.array([0.7, -0.2, 0.4, 1.1], dtype=complex)
        jacobian = transition_jacobian((0, 1), (1, 3))(zeta)
        step = 1e-6

        def image(z):
            return transition(ChartPoint((0, 1), z), (1, 3)).zeta

        for column in range(4):
            delta = np.zeros(4, dtype=complex)
            delta[column] = step
            difference = (image(zeta + delta) - image(zeta - delta)) / (2 * step)
            assert np.allclose(jacobian[:, column], difference, atol=1e-6)


class TestVerifyTransitionJacobians:
    @pytest.fixture(scope="class")
    def report(self):
        return verify_transition_jacobians()

    def test_all_identities_pass(self, report):
        assert report.passed
        assert report.failures == []

    def test_covers_every_ordered_pair(self, report):
        canonical = [c for c in report.checks if c.name.startswith("canonical bundle")]

        assert len(canonical) == 30

    def test_named_types_present(self, report):
        names = {check.name for check in report.checks}

        assert "atlas first type U01->U02" in names
        assert "atlas second type U01->U23" in names
        assert "printed first type" in names
        assert "printed second type" in names
        assert "printed first type composed with itself" in names

    def test_symbolic_forms_reported(self, report):
        check = next(c for c in report.checks if c.name == "atlas first type U01->U02")

        assert check.determinant
        assert "zeta1^4" in check.expected
        assert check.to_dict()["passed"] is True

    def test_corrupted_map_fails(self):
        corrupted = first_type_map()
        corrupted[0] = corrupted[0] * 2

        report = verify_transition_jacobians(overrides={"printed first type": corrupted})

        assert not report.passed
        assert report.failures == ["printed first type"]

    def test_unknown_override(self):
        identity = [RationalFunction.from_polynomial(parse_expression(z, ZETA)) for z in ZETA]

        with pytest.raises(GrassmannError, match="unknown identities"):
            verify_transition_jacobians(overrides={"no such identity": identity})


class TestPropertySuites:
    def test_quadric(self):
        result = check_quadric(trials=200)

        assert result.passed
        assert result.to_dict() == {"name": "pluecker quadric", "trials": 200, "failures": 0}

    def test_equivariance(self):
        assert check_equivariance(trials=50).passed

    def test_cocycle(self):
        assert check_cocycle(trials=30).passed

    def test_round_trip(self):
        assert check_round_trip(trials=30).passed

    @pytest.mark.slow
    def test_full_size(self):
        assert check_quadric(1000).passed
        assert check_equivariance(200).passed
        assert check_cocycle(100).passed
        assert check_round_trip(100).passed
