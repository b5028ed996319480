"""Characteristic polynomials and root extraction, exact and numeric."""

from fractions import Fraction

import pytest

from qpuiseux.field import KScalar, NumericField, qpow
from qpuiseux.poly import PuiseuxSeries, substitute_series
from qpuiseux.polygon import build_polygon, support_value
from qpuiseux.charpoly import (
    CharPolynomial,
    ExactRootsUnavailable,
    build_char_poly,
    nonzero_roots,
)
from qpuiseux.parser import parse_to_poly as poly

from conftest import rand_poly


def K(r):
    return KScalar.from_rational(Fraction(r))


def interpolated_char_poly(P, mu, npts=20):
    """Independent oracle: evaluate the x^omega coefficient of P(c0*x^mu) at
    rational values of c0 and interpolate the polynomial in c0 exactly."""
    omega = support_value(P, mu)
    nodes = [Fraction(k + 1) for k in range(npts)]
    values = []
    for c0 in nodes:
        series = PuiseuxSeries.monomial(K(c0), mu)  # exact monomial series
        residual = substitute_series(P, series)
        values.append(residual.coefficient(omega))
    # Newton divided differences over the field, rational nodes
    diffs = list(values)
    for j in range(1, npts):
        for i in range(npts - 1, j - 1, -1):
            diffs[i] = (diffs[i] - diffs[i - 1]) / K(nodes[i] - nodes[i - j])
    # expand the Newton form into monomial coefficients
    coeffs = {0: diffs[npts - 1]}
    for i in range(npts - 2, -1, -1):
        shifted = {d + 1: c for d, c in coeffs.items()}
        minus = {d: c * K(-nodes[i]) for d, c in coeffs.items()}
        coeffs = shifted
        for d, c in minus.items():
            coeffs[d] = coeffs.get(d, KScalar.zero()) + c
        coeffs[0] = coeffs.get(0, KScalar.zero()) + diffs[i]
    return {d: c for d, c in coeffs.items() if not c.is_zero()}


class TestBuild:
    def test_shift_linear(self):
        phi = build_char_poly(poly("y(q*x) - y - x"), Fraction(1))
        assert phi.coeffs[1] == qpow(1) - K(1)
        assert phi.coeffs[0] == -K(1)
        assert phi.degree == 1

    def test_sqrt_case_twist(self):
        phi = build_char_poly(poly("y*y(q*x) - x"), Fraction(1, 2))
        assert phi.coeffs[2] == qpow(Fraction(1, 2))
        assert phi.coeffs[0] == -K(1)

    def test_no_shift_no_twist(self):
        phi = build_char_poly(poly("y - x"), Fraction(1))
        assert phi.coeffs == {1: K(1), 0: -K(1)}

    def test_render(self):
        phi = build_char_poly(poly("y - x"), Fraction(1))
        assert phi.render() == "c - 1"


class TestExactRoots:
    def test_linear(self):
        phi = build_char_poly(poly("y(q*x) - y - x"), Fraction(1))
        roots = nonzero_roots(phi)
        assert len(roots) == 1
        assert roots[0].exact and roots[0].multiplicity == 1
        assert roots[0].value == K(1) / (qpow(1) - K(1))

    def test_binomial(self):
        phi = build_char_poly(poly("y*y(q*x) - x"), Fraction(1, 2))
        roots = nonzero_roots(phi)
        values = sorted(str(r.value) for r in roots)
        assert len(roots) == 2
        assert all(r.value ** 2 == qpow(Fraction(-1, 2)) for r in roots)
        assert any(r.value == qpow(Fraction(-1, 4)) for r in roots)
        assert any(r.value == -qpow(Fraction(-1, 4)) for r in roots)

    def test_stripped_power_no_roots(self):
        phi = CharPolynomial({2: K(1)}, Fraction(1))
        assert nonzero_roots(phi) == []

    def test_quadratic_square_discriminant(self):
        # roots (3 +- q)/2: discriminant is the monomial q^2
        a, b, c = K(1), -K(3), (K(9) - qpow(2)) * K(Fraction(1, 4))
        phi = CharPolynomial({2: a, 1: b, 0: c}, Fraction(1))
        roots = nonzero_roots(phi)
        assert len(roots) == 2
        expected = [(K(3) + qpow(1)) / K(2), (K(3) - qpow(1)) / K(2)]
        for r in roots:
            assert any(r.value == e for e in expected)

    def test_double_root_multiplicity(self):
        phi = CharPolynomial({2: K(1), 1: -K(2), 0: K(1)}, Fraction(1))
        roots = nonzero_roots(phi)
        assert len(roots) == 1
        assert roots[0].value == K(1)
        assert roots[0].multiplicity == 2

    def test_every_exact_root_is_a_root(self, rng):
        checked = 0
        for _ in range(150):
            P = rand_poly(rng, simple_coeffs=True)
            NP = build_polygon(P)
            if not NP.edges:
                continue
            mu = NP.edges[0].coslope
            if mu <= 0:
                continue
            phi = build_char_poly(P, mu)
            try:
                roots = nonzero_roots(phi)
            except ExactRootsUnavailable:
                continue
            for r in roots:
                assert phi.eval(r.value).is_zero()
            checked += 1
        assert checked > 20

    def test_unavailable_raises_without_q(self):
        # c^3 + c + 1 is neither linear, binomial, nor quadratic
        phi = CharPolynomial({3: K(1), 1: K(1), 0: K(1)}, Fraction(1))
        with pytest.raises(ExactRootsUnavailable):
            nonzero_roots(phi)

    def test_fallback_to_numeric_with_q(self):
        phi = CharPolynomial({3: K(1), 1: K(1), 0: K(1)}, Fraction(1))
        roots = nonzero_roots(phi, q_value=2)
        assert len(roots) == 3
        assert all(not r.exact for r in roots)
        for r in roots:
            v = r.value
            assert abs(v ** 3 + v + 1) <= 1e-9


class TestNumericRoots:
    def test_residual_bound(self):
        field = NumericField(2.0)
        phi = CharPolynomial({3: 1 + 0j, 1: 2 + 0j, 0: -5 + 0j}, Fraction(1), field)
        roots = nonzero_roots(phi, mode="numeric", q_value=2)
        scale = 5.0
        for r in roots:
            v = r.value
            assert abs(v ** 3 + 2 * v - 5) <= 1e-9 * scale

    def test_mode_validation(self):
        phi = CharPolynomial({1: K(1), 0: K(1)}, Fraction(1))
        with pytest.raises(ValueError):
            nonzero_roots(phi, mode="numeric")
        with pytest.raises(ValueError):
            nonzero_roots(phi, mode="numeric", q_value=1.0)
        with pytest.raises(ValueError):
            nonzero_roots(phi, mode="bogus")


class TestInterpolationOracle:
    def test_char_poly_matches_substitution(self, rng):
        checked = 0
        while checked < 25:
            P = rand_poly(rng, max_terms=5)
            NP = build_polygon(P)
            slopes = [m for m in NP.coslopes() if m > 0]
            if not slopes:
                continue
            mu = slopes[rng.randrange(len(slopes))]
            expected = interpolated_char_poly(P, mu)
            phi = build_char_poly(P, mu)
            assert set(phi.coeffs) == set(expected)
            for d, c in expected.items():
                assert phi.coeffs[d] == c
            checked += 1

    def test_non_coslope_has_no_nonzero_roots(self, rng):
        checked = 0
        for _ in range(100):
            P = rand_poly(rng)
            NP = build_polygon(P)
            slopes = NP.coslopes()
            # any mu beyond the last co-slope supports a single vertex
            mu = (slopes[-1] if slopes else Fraction(1)) + Fraction(1, 3)
            if mu <= 0:
                continue
            phi = build_char_poly(P, mu)
            try:
                roots = nonzero_roots(phi)
            except ExactRootsUnavailable:
                continue
            assert roots == []
            checked += 1
        assert checked > 50
