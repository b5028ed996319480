"""Equation language: grammar, lowering, rendering round-trips, fuzzing."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qpuiseux.field import KScalar, qpow
from qpuiseux.parser import (
    EquationSyntaxError,
    UnsupportedExponent,
    YAtom,
    lower,
    parse_equation,
    parse_scalar,
    parse_to_poly,
)

from conftest import rand_poly, rand_scalar


def K(r):
    return KScalar.from_rational(Fraction(r))


class TestGrammar:
    def test_shift_reference_forms(self):
        ast = parse_equation("y(q*x) - y(x) - x")
        P = lower(ast)
        assert P.terms[(Fraction(0), (0, 1))] == K(1)
        assert P.terms[(Fraction(0), (1,))] == -K(1)
        assert P.terms[(Fraction(1), ())] == -K(1)

    def test_equation_sides_folded(self):
        P = parse_to_poly("y*y(q*x) = x")
        assert P.terms[(Fraction(0), (1, 1))] == K(1)
        assert P.terms[(Fraction(1), ())] == -K(1)

    def test_fractional_power_of_y_rejected(self):
        with pytest.raises(UnsupportedExponent):
            parse_to_poly("y^(1/2)")
        with pytest.raises(UnsupportedExponent):
            parse_to_poly("(y + x)^(1/2)")
        with pytest.raises(UnsupportedExponent):
            parse_to_poly("y^-1")

    def test_higher_shift_syntax(self):
        P = parse_to_poly("y(q^3*x)")
        assert list(P.terms) == [(Fraction(0), (0, 0, 0, 1))]

    def test_yj_alias(self):
        assert parse_to_poly("y1 - y0 - x").eq(parse_to_poly("y(q*x) - y - x"))

    def test_bare_y_is_shift_zero(self):
        ast = parse_equation("y")
        assert ast == YAtom(0)

    def test_rational_literals(self):
        P = parse_to_poly("1/2*y - 3*x")
        assert P.terms[(Fraction(0), (1,))] == K(Fraction(1, 2))

    def test_x_fractional_exponent(self):
        P = parse_to_poly("x^(1/2)*y")
        assert list(P.terms) == [(Fraction(1, 2), (1,))]

    def test_q_negative_exponent(self):
        P = parse_to_poly("q^(-1)*y")
        assert P.terms[(Fraction(0), (1,))] == qpow(-1)

    def test_precedence(self):
        # ^ binds tighter than unary minus, * binds tighter than +
        assert parse_to_poly("-x^2 + x*x").is_zero()
        P = parse_to_poly("2*x + 3*x")
        assert P.terms[(Fraction(1), ())] == K(5)

    def test_scalar_coefficient_expression(self):
        P = parse_to_poly("(q - 1)*y")
        assert P.terms[(Fraction(0), (1,))] == qpow(1) - K(1)

    def test_scalar_inverse_power(self):
        P = parse_to_poly("(q - 1)^-1 * y")
        assert P.terms[(Fraction(0), (1,))] == (qpow(1) - K(1)).inv()


class TestErrors:
    def test_syntax_error_carries_position(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("y + ")
        assert err.value.line == 1 and err.value.column == 5

    def test_unbalanced_parenthesis(self):
        with pytest.raises(EquationSyntaxError):
            parse_equation("(y + x")

    def test_unknown_character(self):
        with pytest.raises(EquationSyntaxError) as err:
            parse_equation("y + #x")
        assert err.value.column == 5

    def test_unknown_name(self):
        with pytest.raises(EquationSyntaxError):
            parse_equation("y + z")

    def test_negative_shift_rejected(self):
        with pytest.raises(EquationSyntaxError):
            parse_equation("y(q^-1*x)")

    def test_empty_input(self):
        with pytest.raises(EquationSyntaxError):
            parse_equation("   ")

    def test_depth_guard(self):
        deep = "(" * 600 + "y" + ")" * 600
        with pytest.raises(EquationSyntaxError):
            parse_equation(deep)

    def test_division_requires_scalar_divisor(self):
        # '/' is a documented extension; the divisor must be a field scalar
        P = parse_to_poly("x/(q-1)")
        assert P.terms[(Fraction(1), ())] == (qpow(1) - K(1)).inv()
        with pytest.raises(UnsupportedExponent):
            parse_to_poly("x/y")


class TestScalarMode:
    def test_division(self):
        s = parse_scalar("(2*q^(3/2) - 1)/(q - 1)")
        assert s == (K(2) * qpow(Fraction(3, 2)) - K(1)) / (qpow(1) - K(1))

    def test_x_rejected(self):
        with pytest.raises(EquationSyntaxError):
            parse_scalar("x + 1")

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            parse_scalar("1/(q - q)")

    def test_scalar_round_trip(self, rng):
        for _ in range(40):
            s = rand_scalar(rng)
            assert parse_scalar(str(s)) == s


class TestRoundTrip:
    def test_render_parse_round_trip(self, rng):
        for _ in range(40):
            P = rand_poly(rng)
            Q = parse_to_poly(P.render())
            assert Q.eq(P)

    def test_corpus_round_trip(self):
        from conftest import CORPUS
        for text in CORPUS.values():
            P = parse_to_poly(text)
            assert parse_to_poly(P.render()).eq(P)


class TestFuzz:
    @settings(max_examples=300, deadline=None)
    @given(st.text(
        alphabet="qxy0123456789+-*/^()= .\n", min_size=0, max_size=80))
    def test_parser_totality(self, text):
        # never crash or hang: either parse or raise a diagnosed error
        try:
            parse_to_poly(text)
        except (EquationSyntaxError, UnsupportedExponent, ZeroDivisionError):
            pass

    @settings(max_examples=100, deadline=None)
    @given(st.text(min_size=0, max_size=40))
    def test_parser_totality_arbitrary_unicode(self, text):
        try:
            parse_to_poly(text)
        except (EquationSyntaxError, UnsupportedExponent, ZeroDivisionError):
            pass
