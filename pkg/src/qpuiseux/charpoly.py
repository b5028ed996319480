"""Characteristic polynomials of polygon co-slopes and their nonzero roots.

Substituting y = c*x^mu into P sends each term a * x^alpha * prod yj^tj to
a * q^(mu*w(tau)) * c^|tau| * x^(alpha + |tau|*mu).  The coefficient of the
minimal power x^omega(mu) is therefore

    Phi_mu(c) = sum over terms on the supporting line of
                a * q^(mu*w(tau)) * c^|tau|

and the admissible leading coefficients of a solution branch with exponent
mu are exactly the nonzero roots of Phi_mu.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from qpuiseux.field import EXACT, ExactField, KScalar, NumericField, as_fraction
from qpuiseux.poly import QDiffPolynomial, mi_height, mi_weight
from qpuiseux.polygon import points_on_line


class ExactRootsUnavailable(RuntimeError):
    """Exact root extraction failed and no numeric q was provided."""


@dataclass
class RootCandidate:
    value: object  # KScalar in exact mode, complex in numeric mode
    multiplicity: int
    exact: bool

    def sort_key(self):
        if self.exact:
            return (0, self.value.sort_text())
        return (1, round(self.value.real, 9), round(self.value.imag, 9))


class CharPolynomial:
    """Polynomial in the root variable c, coefficients keyed by degree."""

    def __init__(self, coeffs: Dict[int, object], mu: Fraction, field=EXACT):
        self.coeffs = {d: c for d, c in coeffs.items() if not field.is_zero(c)}
        self.mu = mu
        self.field = field

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def lowest_degree(self) -> int:
        return min(self.coeffs, default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def stripped(self) -> "CharPolynomial":
        """Divide out the c^k factor, exposing the nonzero roots."""
        k = self.lowest_degree
        if k == 0:
            return self
        return CharPolynomial({d - k: c for d, c in self.coeffs.items()},
                              self.mu, self.field)

    def eval(self, c):
        total = self.field.zero()
        p = self.field.one()
        prev = 0
        for d in sorted(self.coeffs):
            for _ in range(d - prev):
                p = p * c
            prev = d
            total = total + self.coeffs[d] * p
        return total

    def divide_linear(self, r) -> Optional["CharPolynomial"]:
        """Synthetic division by (c - r); None if the remainder is nonzero."""
        field = self.field
        n = self.degree
        dense = [self.coeffs.get(d, field.zero()) for d in range(n + 1)]
        out = [field.zero()] * n
        carry = dense[n]
        for d in range(n - 1, -1, -1):
            out[d] = carry
            carry = dense[d] + carry * r
        if not field.is_zero(carry):
            return None
        return CharPolynomial({d: c for d, c in enumerate(out)}, self.mu, field)

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        exact = isinstance(self.field, ExactField)
        parts = []
        for d in sorted(self.coeffs, reverse=True):
            coeff = self.coeffs[d]
            sign = ""
            if exact:
                _, lead = coeff.num.lowest()
                if lead < 0:
                    sign, coeff = "-", -coeff
                ctext = self.field.render(coeff)
                if len(coeff.num.terms) > 1 or not coeff.den.is_one():
                    ctext = "(%s)" % ctext
            else:
                ctext = "(%s)" % self.field.render(coeff)
            cpart = "" if d == 0 else ("c" if d == 1 else "c^%d" % d)
            if not cpart:
                body = ctext
            elif exact and coeff.is_one():
                body = cpart
            else:
                body = "%s*%s" % (ctext, cpart)
            if not parts:
                parts.append(sign + body)
            else:
                parts.append((" - " if sign == "-" else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "CharPolynomial(%s)" % self.render()


def build_char_poly(P: QDiffPolynomial, mu: Fraction) -> CharPolynomial:
    """Assemble Phi_mu from the terms on the supporting line of co-slope mu."""
    mu = as_fraction(mu)
    field = P.field
    coeffs: Dict[int, object] = {}
    for key in points_on_line(P, mu):
        xexp, tau = key
        h = mi_height(tau)
        contrib = P.terms[key] * field.qpow(mu * mi_weight(tau))
        coeffs[h] = coeffs[h] + contrib if h in coeffs else contrib
    return CharPolynomial(coeffs, mu, field)


# ---------------------------------------------------------------------------
# exact root extraction
# ---------------------------------------------------------------------------


def _int_nth_root(n: int, k: int) -> Optional[int]:
    """Exact nonnegative k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _fraction_nth_root(r: Fraction, k: int) -> Optional[Fraction]:
    """Exact real k-th root of a rational, when it is again rational."""
    if r < 0:
        if k % 2 == 0:
            return None
        neg = _fraction_nth_root(-r, k)
        return -neg if neg is not None else None
    num = _int_nth_root(r.numerator, k)
    den = _int_nth_root(r.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _monomial_sqrt(k: KScalar) -> Optional[KScalar]:
    """Square root of a monomial scalar r*q^e when r is a rational square."""
    if not k.is_monomial():
        return None
    coeff, exp = k.as_monomial()
    root = _fraction_nth_root(coeff, 2)
    if root is None:
        return None
    return KScalar.from_rational(root) * KScalar.q_power(exp / 2)


def _exact_roots(phi: CharPolynomial) -> Optional[List[KScalar]]:
    """Distinct nonzero roots of a stripped characteristic polynomial.

    Handles the cases that occur along the polygon process: linear factors,
    binomials A*c^m + B with -B/A a q-monomial carrying an exact rational
    m-th root (real branch only; even m adds the sign variant), and
    quadratics whose discriminant is a perfect-square q-monomial.  Returns
    None when the polynomial falls outside these classes.
    """
    degs = sorted(phi.coeffs)
    if degs == [0] or not degs:
        return []
    if phi.degree == 1:
        a = phi.coeffs[1]
        b = phi.coeffs.get(0, KScalar.zero())
        return [] if b.is_zero() else [-b / a]
    if len(degs) == 2 and degs[0] == 0:
        m = degs[1]
        rhs = -phi.coeffs[0] / phi.coeffs[m]  # c^m = rhs
        if not rhs.is_monomial():
            return None
        coeff, exp = rhs.as_monomial()
        root = _fraction_nth_root(coeff, m)
        if root is None:
            return None
        base = KScalar.from_rational(root) * KScalar.q_power(Fraction(exp, m))
        roots = [base]
        if m % 2 == 0:
            roots.append(-base)
        return roots
    if phi.degree == 2:
        a = phi.coeffs[2]
        b = phi.coeffs.get(1, KScalar.zero())
        c0 = phi.coeffs.get(0, KScalar.zero())
        disc = b * b - KScalar.from_rational(4) * a * c0
        if disc.is_zero():
            r = -b / (KScalar.from_rational(2) * a)
            return [] if r.is_zero() else [r]
        s = _monomial_sqrt(disc)
        if s is None:
            return None
        two_a = KScalar.from_rational(2) * a
        roots = [(-b + s) / two_a, (-b - s) / two_a]
        return [r for r in roots if not r.is_zero()]
    return None


def _with_multiplicities(phi: CharPolynomial, roots: List[KScalar]) -> List[RootCandidate]:
    out = []
    seen: List[KScalar] = []
    for r in roots:
        if any(r == s for s in seen):
            continue
        seen.append(r)
        mult = 0
        rest = phi
        while rest is not None and rest.degree >= 1:
            nxt = rest.divide_linear(r)
            if nxt is None:
                break
            mult += 1
            rest = nxt
        if mult == 0:
            raise ArithmeticError("claimed root %s does not divide %s" % (r, phi))
        out.append(RootCandidate(value=r, multiplicity=mult, exact=True))
    out.sort(key=RootCandidate.sort_key)
    return out


# ---------------------------------------------------------------------------
# numeric root extraction
# ---------------------------------------------------------------------------


def _numeric_roots(phi: CharPolynomial, q_value: complex) -> List[RootCandidate]:
    nfield = phi.field if isinstance(phi.field, NumericField) else None
    n = phi.degree

    def cval(c) -> complex:
        if isinstance(c, KScalar):
            return c.eval_at(q_value)
        return complex(c)

    dense = [cval(phi.coeffs.get(d, 0)) for d in range(n + 1)]
    scale = max(abs(c) for c in dense)
    roots = np.roots(list(reversed(dense)))

    # Newton polish: downstream substitutions amplify any root error
    deriv = [dense[d] * d for d in range(1, n + 1)]

    def fval(c):
        v = 0j
        for coeff in reversed(dense):
            v = v * c + coeff
        return v

    def dval(c):
        v = 0j
        for coeff in reversed(deriv):
            v = v * c + coeff
        return v

    polished = []
    for r in roots:
        c = complex(r)
        for _ in range(60):
            f = fval(c)
            if abs(f) <= 1e-12 * scale * max(1.0, abs(c)) ** n:
                break
            d = dval(c)
            if d == 0:
                break
            c = c - f / d
        polished.append(c)

    zero_tol = nfield.zero_tol if nfield else 1e-9
    polished = [c for c in polished if abs(c) > zero_tol]
    polished.sort(key=lambda z: (z.real, z.imag))
    clusters: List[Tuple[complex, int]] = []
    for c in polished:
        for i, (rep, m) in enumerate(clusters):
            if abs(c - rep) <= 1e-8 * max(1.0, abs(rep)):
                clusters[i] = (rep, m + 1)
                break
        else:
            clusters.append((c, 1))
    out = [RootCandidate(value=rep, multiplicity=m, exact=False)
           for rep, m in clusters]
    out.sort(key=RootCandidate.sort_key)
    return out


def nonzero_roots(phi: CharPolynomial, mode: str = "exact",
                  q_value: Optional[complex] = None) -> List[RootCandidate]:
    """Nonzero roots of a characteristic polynomial, with multiplicities.

    In exact mode the structured cases (linear, binomial, quadratic with
    square discriminant) are solved in the coefficient field; anything else
    falls back to numeric roots at ``q_value``, or raises
    :class:`ExactRootsUnavailable` when no q was given.
    """
    if mode not in ("exact", "numeric"):
        raise ValueError("mode must be 'exact' or 'numeric'")
    stripped = phi.stripped()
    if stripped.degree == 0:
        return []

    numeric_q = q_value
    if numeric_q is None and isinstance(phi.field, NumericField):
        numeric_q = phi.field.q
    if numeric_q is not None:
        numeric_q = complex(numeric_q)
        if abs(numeric_q) in (0.0,) or abs(abs(numeric_q) - 1.0) < 1e-12:
            raise ValueError("numeric root finding needs |q| not in {0, 1}")

    if mode == "exact" and isinstance(phi.field, ExactField):
        roots = _exact_roots(stripped)
        if roots is not None:
            return _with_multiplicities(stripped, roots)
        if numeric_q is None:
            raise ExactRootsUnavailable(
                "no exact form for the roots of %s and no numeric q given" % phi)
        return _numeric_roots(stripped, numeric_q)

    if numeric_q is None:
        raise ValueError("numeric mode requires a q value")
    return _numeric_roots(stripped, numeric_q)
