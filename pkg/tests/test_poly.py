"""q-difference polynomials, series, and the substitution operations."""

from fractions import Fraction

import pytest

from qpuiseux.field import KScalar, qpow
from qpuiseux.poly import (
    INF,
    PuiseuxSeries,
    QDiffPolynomial,
    apply_shift_to_series,
    mi_height,
    mi_trim,
    mi_weight,
    partial_derivative,
    series_equal_upto,
    shift_substitute,
    substitute_series,
    truncate_x,
)
from qpuiseux.parser import parse_to_poly

from conftest import rand_poly, rand_scalar, rand_series


def K(r):
    return KScalar.from_rational(Fraction(r))


def poly(text):
    return parse_to_poly(text)


class TestMultiIndex:
    def test_trim_and_stats(self):
        assert mi_trim([1, 0, 2, 0, 0]) == (1, 0, 2)
        assert mi_height((1, 0, 2)) == 3
        assert mi_weight((1, 0, 2)) == 4
        with pytest.raises(ValueError):
            mi_trim([1, -1])


class TestStructure:
    def test_order_degree(self):
        P = poly("y*y(q^2*x) + x*y(q*x) - x^3")
        assert P.order == 2
        assert P.degree == 2
        assert P.constant_part() == {Fraction(3): -K(1)}

    def test_merge_and_prune(self):
        P = QDiffPolynomial.from_terms([(0, (1,), 1), (0, (1,), -1), (1, (), 2)])
        assert (Fraction(0), (1,)) not in P.terms
        assert len(P.terms) == 1

    def test_render_parses_back(self):
        P = poly("(q-1)*x*y^2 - x^2*y(q*x) + 1/2")
        assert poly(P.render()).eq(P)


class TestShiftOnSeries:
    def test_basic_shift(self):
        s = PuiseuxSeries.monomial(K(1), 1)
        assert apply_shift_to_series(s, 1).terms == ((Fraction(1), qpow(1)),)

    def test_half_exponent_shift(self):
        s = PuiseuxSeries.monomial(K(3), Fraction(1, 2))
        shifted = apply_shift_to_series(s, 2)
        assert shifted.terms[0][1] == K(3) * qpow(1)

    def test_identity_shift(self):
        s = PuiseuxSeries.from_terms([(1, K(2)), (2, qpow(1))], trunc=Fraction(9))
        assert apply_shift_to_series(s, 0) is s

    def test_shift_bound(self):
        with pytest.raises(ValueError):
            apply_shift_to_series(PuiseuxSeries.monomial(K(1), 1), 65)
        with pytest.raises(ValueError):
            apply_shift_to_series(PuiseuxSeries.monomial(K(1), 1), -1)

    def test_shift_at_q_one_is_identity(self, rng):
        # with q specialized to 1 the shift acts trivially on series values
        from qpuiseux.field import EvalDenominatorZero
        checked = 0
        for _ in range(30):
            s = rand_series(rng, Fraction(0))
            shifted = apply_shift_to_series(s, 2)
            x = rng.uniform(0.1, 2.0)
            try:
                v1 = s.eval_numeric(x, 1)
                v2 = shifted.eval_numeric(x, 1)
            except EvalDenominatorZero:
                continue  # a coefficient has a pole at q = 1
            assert abs(v1 - v2) <= 1e-9 * (1 + abs(v1))
            checked += 1
        assert checked > 10


class TestSubstituteSeries:
    def test_shift_linear_solution(self):
        P = poly("y(q*x) - y - x")
        s = PuiseuxSeries.monomial(K(1) / (qpow(1) - K(1)), 1, trunc=Fraction(10))
        residual = substitute_series(P, s)
        assert residual.is_zero()

    def test_sqrt_solution(self):
        P = poly("y*y(q*x) - x")
        s = PuiseuxSeries.monomial(qpow(Fraction(-1, 4)), Fraction(1, 2),
                                   trunc=Fraction(5))
        assert substitute_series(P, s).is_zero()

    def test_direct_expansion(self):
        P = poly("y - x")
        s = PuiseuxSeries.monomial(K(1), 2)
        residual = substitute_series(P, s)
        assert residual.valuation() == 1
        assert residual.coefficient(1) == -K(1)
        assert residual.coefficient(2) == K(1)

    def test_trunc_window_respected(self):
        P = poly("y^2")
        s = PuiseuxSeries.from_terms([(1, K(1))], trunc=Fraction(3))
        residual = substitute_series(P, s)
        # one factor known to 3, the other contributes valuation 1
        assert residual.trunc == Fraction(4)

    def test_linearity(self, rng):
        for _ in range(15):
            P = rand_poly(rng, max_terms=4)
            Q = rand_poly(rng, max_terms=4)
            s = rand_series(rng, Fraction(0))
            lhs = substitute_series(P + Q, s)
            rhs = substitute_series(P, s) + substitute_series(Q, s)
            assert series_equal_upto(lhs, rhs)


class TestShiftSubstitute:
    def test_exact_solution_reached(self):
        P1 = shift_substitute(poly("y - x"), K(1), Fraction(1))
        assert P1.eq(poly("y"))

    def test_x_term_cancels(self):
        P = poly("y(q*x) - y - x")
        P1 = shift_substitute(P, K(1) / (qpow(1) - K(1)), Fraction(1))
        assert P1.eq(poly("y(q*x) - y"))
        # and the zero series is an exact solution of the transform
        assert substitute_series(P1, PuiseuxSeries.zero(Fraction(10))).is_zero()

    def test_binomial_expansion(self):
        P1 = shift_substitute(poly("y^2"), K(1), Fraction(1))
        assert P1.eq(poly("y^2 + 2*x*y + x^2"))

    def test_substitution_identity(self, rng):
        # P(x, c*x^mu + s) = (shift_substitute P)(x, s), exactly
        for _ in range(25):
            P = rand_poly(rng, max_terms=5)
            c = rand_scalar(rng)
            mu = Fraction(rng.randint(1, 4), rng.choice((1, 2)))
            s = rand_series(rng, mu)
            transformed = shift_substitute(P, c, mu)
            lhs = substitute_series(transformed, s)
            combined = PuiseuxSeries.from_terms(
                [(mu, c)] + list(s.terms), s.trunc)
            rhs = substitute_series(P, combined)
            assert series_equal_upto(lhs, rhs)

    def test_zero_coefficient_rejected(self):
        with pytest.raises(ValueError):
            shift_substitute(poly("y"), KScalar.zero(), Fraction(1))


class TestTruncatePoly:
    def test_drop_above(self):
        P = poly("y + x^5*y")
        assert truncate_x(P, Fraction(3)).eq(poly("y"))

    def test_inf_sentinel(self):
        P = poly("y + x^5*y")
        assert truncate_x(P, INF) is P

    def test_boundary_kept(self):
        P = poly("x^3*y")
        assert truncate_x(P, Fraction(3)).eq(P)


class TestPartialDerivative:
    def test_product(self):
        assert partial_derivative(poly("y*y(q*x)"), 1).eq(poly("y"))

    def test_power(self):
        assert partial_derivative(poly("x*y^2"), 0).eq(poly("2*x*y"))

    def test_independence(self):
        assert partial_derivative(poly("y(q*x)"), 0).is_zero()

    def test_range_check(self):
        with pytest.raises(ValueError):
            partial_derivative(poly("y"), 3)


class TestSeriesBasics:
    def test_from_terms_merges(self):
        s = PuiseuxSeries.from_terms([(1, K(1)), (1, K(-1)), (2, K(3))],
                                     trunc=Fraction(5))
        assert s.terms == ((Fraction(2), K(3)),)

    def test_exponents_beyond_trunc_dropped(self):
        s = PuiseuxSeries.from_terms([(1, K(1)), (7, K(1))], trunc=Fraction(5))
        assert s.last_exponent() == 1

    def test_mul_validity_window(self):
        a = PuiseuxSeries.from_terms([(1, K(1))], trunc=Fraction(4))
        b = PuiseuxSeries.from_terms([(2, K(1))], trunc=Fraction(6))
        prod = a * b
        assert prod.trunc == Fraction(6)  # min(4+2, 6+1)
        assert prod.terms == ((Fraction(3), K(1)),)

    def test_json_exports_strings(self):
        s = PuiseuxSeries.from_terms([(Fraction(3, 2), qpow(Fraction(1, 2)))],
                                     trunc=Fraction(5))
        data = s.to_json()
        assert data == {"trunc": "5", "terms": [["3/2", "q^(1/2)"]]}
