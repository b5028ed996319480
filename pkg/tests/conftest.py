"""Shared generators and helpers for the test suite.

Random objects are built from seeded ``random.Random`` instances so every
run exercises identical cases; hypothesis-based tests manage their own
generation.
"""

import random
from fractions import Fraction

import pytest

from qpuiseux.field import KScalar, QMonomialSum
from qpuiseux.poly import PuiseuxSeries, QDiffPolynomial, mi_trim


CORPUS = {
    "shift-linear": "y(q*x) - y - x",
    "sqrt-branch": "y*y(q*x) - x",
    "qfactorial": "y - x*y(q*x) - x",
    "plain": "y - x",
    "order-two": "y(q^2*x) - y - x^2",
}


def rand_fraction(rng, lo=-4, hi=4, dens=(1, 2)):
    num = rng.randint(lo, hi)
    return Fraction(num, rng.choice(dens))


def rand_nonzero_fraction(rng, lo=-4, hi=4, dens=(1, 2)):
    while True:
        f = rand_fraction(rng, lo, hi, dens)
        if f != 0:
            return f


def rand_qsum(rng, max_terms=2, nonzero=True):
    terms = []
    for _ in range(rng.randint(1 if nonzero else 0, max_terms)):
        exp = rand_fraction(rng, -2, 2, (1, 2))
        coeff = rand_nonzero_fraction(rng, -3, 3, (1, 2))
        terms.append((exp, coeff))
    s = QMonomialSum(terms)
    if nonzero and s.is_zero():
        return QMonomialSum.one()
    return s


def rand_scalar(rng, allow_denominator=True):
    """Random nonzero field element, biased toward simple shapes."""
    roll = rng.random()
    if roll < 0.45:
        return KScalar.from_rational(rand_nonzero_fraction(rng))
    if roll < 0.75:
        return KScalar(QMonomialSum.monomial(
            rand_nonzero_fraction(rng), rand_fraction(rng, -2, 2, (1, 2))))
    num = rand_qsum(rng, 2)
    den = rand_qsum(rng, 2) if allow_denominator else QMonomialSum.one()
    return KScalar(num, den)


def rand_multiindex(rng, max_order=2, max_degree=3):
    tau = [0] * (max_order + 1)
    height = rng.randint(0, max_degree)
    for _ in range(height):
        tau[rng.randint(0, max_order)] += 1
    return mi_trim(tau)


def rand_poly(rng, max_terms=6, max_order=2, max_degree=3,
              alpha_hi=8, alpha_dens=(1, 2), simple_coeffs=False):
    items = []
    for _ in range(rng.randint(1, max_terms)):
        alpha = Fraction(rng.randint(0, alpha_hi), rng.choice(alpha_dens))
        tau = rand_multiindex(rng, max_order, max_degree)
        coeff = (KScalar.from_rational(rand_nonzero_fraction(rng))
                 if simple_coeffs else rand_scalar(rng))
        items.append((alpha, tau, coeff))
    P = QDiffPolynomial.from_terms(items)
    if P.is_zero():
        return QDiffPolynomial.from_terms([(0, (1,), KScalar.one())])
    return P


def rand_series(rng, min_exp, max_terms=3, trunc=Fraction(5)):
    exps = set()
    while len(exps) < rng.randint(0, max_terms):
        e = min_exp + Fraction(rng.randint(1, 6), rng.choice((1, 2)))
        if e <= trunc:
            exps.add(e)
    return PuiseuxSeries.from_terms(
        [(e, rand_scalar(rng)) for e in sorted(exps)], trunc)


@pytest.fixture
def rng():
    return random.Random(20260810)
