"""Exact arithmetic over the coefficient field Q(q^(1/*)).

Scalars are quotients of finite sums ``sum r_i * q^(e_i)`` with rational
coefficients ``r_i`` and rational exponents ``e_i``, where ``q`` is a formal
transcendental.  This is the ground field for every other module: equation
coefficients, characteristic roots and series coefficients all live here.

Two layers:

``QMonomialSum``
    A canonical finite sum of q-monomials (sparse "polynomial" in q with
    rational exponents, negative exponents allowed).

``KScalar``
    A quotient num/den of two ``QMonomialSum``s, normalized so that the
    lowest-exponent term of the denominator is exactly ``1*q^0``.  Equality
    is decided by cross-multiplication, so num/den need not be coprime
    (reduction is best-effort: only common monomial factors are cancelled).

All operations are exact; a separate numeric mode substitutes a concrete
complex value for q via :func:`KScalar.eval_at` / :class:`NumericField`.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Tuple, Union

Rational = Fraction

RationalLike = Union[int, Fraction]


class EvalDenominatorZero(ArithmeticError):
    """Numeric evaluation hit a vanishing denominator."""


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected an int or Fraction, got %r" % (x,))


def _pow_principal(q: complex, e: Fraction) -> complex:
    """q**e using the principal branch (real branch for real q > 0)."""
    if e == 0:
        return 1.0 + 0j
    if isinstance(q, (int, float)) or (isinstance(q, complex) and q.imag == 0):
        qr = q.real if isinstance(q, complex) else float(q)
        if qr > 0:
            return complex(math.exp(float(e) * math.log(qr)))
        if qr == 0:
            raise EvalDenominatorZero("q = 0 is not allowed")
    return cmath.exp(complex(e) * cmath.log(complex(q)))


class QMonomialSum:
    """Canonical finite sum of terms ``coeff * q^exp`` (coeff, exp rational).

    Terms are stored sorted by strictly increasing exponent with no zero
    coefficients, so structural equality coincides with mathematical
    equality and instances are hashable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Tuple[Fraction, Fraction]] = ()):
        # terms: iterable of (exp, coeff); merged and canonicalized here
        merged: dict = {}
        for exp, coeff in terms:
            exp = as_fraction(exp)
            coeff = as_fraction(coeff)
            acc = merged.get(exp)
            acc = coeff if acc is None else acc + coeff
            if acc == 0:
                merged.pop(exp, None)
            else:
                merged[exp] = acc
        self._terms = tuple(sorted(merged.items()))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "QMonomialSum":
        return _QSUM_ZERO

    @classmethod
    def one(cls) -> "QMonomialSum":
        return _QSUM_ONE

    @classmethod
    def rational(cls, r: RationalLike) -> "QMonomialSum":
        r = as_fraction(r)
        if r == 0:
            return _QSUM_ZERO
        return cls(((Fraction(0), r),))

    @classmethod
    def monomial(cls, coeff: RationalLike, exp: RationalLike) -> "QMonomialSum":
        return cls(((as_fraction(exp), as_fraction(coeff)),))

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        """Canonical (exp, coeff) pairs, sorted by increasing exp."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_one(self) -> bool:
        return self._terms == ((Fraction(0), Fraction(1)),)

    def lowest(self) -> Tuple[Fraction, Fraction]:
        """(exp, coeff) of the term with minimal exponent."""
        if not self._terms:
            raise ValueError("zero sum has no lowest term")
        return self._terms[0]

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMonomialSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "QMonomialSum") -> "QMonomialSum":
        if not isinstance(other, QMonomialSum):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        return QMonomialSum(self._terms + other._terms)

    def __neg__(self) -> "QMonomialSum":
        out = QMonomialSum.__new__(QMonomialSum)
        out._terms = tuple((e, -c) for e, c in self._terms)
        return out

    def __sub__(self, other: "QMonomialSum") -> "QMonomialSum":
        return self + (-other)

    def __mul__(self, other: "QMonomialSum") -> "QMonomialSum":
        if not isinstance(other, QMonomialSum):
            return NotImplemented
        if not self._terms or not other._terms:
            return _QSUM_ZERO
        acc: dict = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                e = e1 + e2
                prev = acc.get(e)
                v = c1 * c2 if prev is None else prev + c1 * c2
                if v == 0:
                    acc.pop(e, None)
                else:
                    acc[e] = v
        out = QMonomialSum.__new__(QMonomialSum)
        out._terms = tuple(sorted(acc.items()))
        return out

    def mul_monomial(self, coeff: Fraction, exp: Fraction) -> "QMonomialSum":
        if coeff == 0:
            return _QSUM_ZERO
        out = QMonomialSum.__new__(QMonomialSum)
        out._terms = tuple((e + exp, c * coeff) for e, c in self._terms)
        return out

    def scale(self, r: RationalLike) -> "QMonomialSum":
        return self.mul_monomial(as_fraction(r), Fraction(0))

    # -- numeric -----------------------------------------------------------

    def eval_at(self, qval: complex) -> complex:
        total = 0j
        for e, c in self._terms:
            total += complex(c) * _pow_principal(qval, e)
        return total

    # -- text --------------------------------------------------------------

    def __str__(self) -> str:
        return render_qsum(self)

    def __repr__(self) -> str:
        return "QMonomialSum(%s)" % (render_qsum(self),)


_QSUM_ZERO = QMonomialSum.__new__(QMonomialSum)
_QSUM_ZERO._terms = ()
_QSUM_ONE = QMonomialSum.__new__(QMonomialSum)
_QSUM_ONE._terms = ((Fraction(0), Fraction(1)),)


def _frac_str(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else "%d/%d" % (r.numerator, r.denominator)


def _monomial_str(exp: Fraction, coeff: Fraction) -> str:
    # sign handled by the caller; coeff > 0 expected
    if exp == 0:
        return _frac_str(coeff)
    if exp == 1:
        qpart = "q"
    elif exp.denominator == 1 and exp >= 0:
        qpart = "q^%d" % exp.numerator
    else:
        qpart = "q^(%s)" % _frac_str(exp)
    if coeff == 1:
        return qpart
    return "%s*%s" % (_frac_str(coeff), qpart)


def render_qsum(s: QMonomialSum) -> str:
    if s.is_zero():
        return "0"
    parts = []
    for i, (exp, coeff) in enumerate(s.terms):
        mono = _monomial_str(exp, abs(coeff))
        if i == 0:
            parts.append(mono if coeff > 0 else "-" + mono)
        else:
            parts.append((" + " if coeff > 0 else " - ") + mono)
    return "".join(parts)


class KScalar:
    """Element of the field Q(q^(1/*)), stored as num/den of q-monomial sums.

    Normal form: den is nonzero and its lowest term is ``1*q^0`` (both num
    and den are divided by the lowest monomial of den on construction).
    Consequently a scalar with a trivial denominator has ``den == 1``
    exactly, and pure monomials are always num-only.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: QMonomialSum, den: QMonomialSum = _QSUM_ONE):
        if den.is_zero():
            raise ZeroDivisionError("denominator is zero")
        if num.is_zero():
            self.num = _QSUM_ZERO
            self.den = _QSUM_ONE
            return
        e0, c0 = den.lowest()
        if c0 != 1 or e0 != 0:
            inv_c, inv_e = 1 / c0, -e0
            num = num.mul_monomial(inv_c, inv_e)
            den = den.mul_monomial(inv_c, inv_e)
        if num == den:
            num, den = _QSUM_ONE, _QSUM_ONE
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "KScalar":
        return K_ZERO

    @classmethod
    def one(cls) -> "KScalar":
        return K_ONE

    @classmethod
    def from_rational(cls, r: RationalLike) -> "KScalar":
        return cls(QMonomialSum.rational(r))

    @classmethod
    def q_power(cls, e: RationalLike) -> "KScalar":
        """The pure monomial q^e."""
        return cls(QMonomialSum.monomial(1, as_fraction(e)))

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def is_monomial(self) -> bool:
        """True when the scalar is exactly r*q^e (trivial denominator)."""
        return self.den.is_one() and self.num.is_monomial()

    def as_monomial(self) -> Tuple[Fraction, Fraction]:
        """(coeff, exp) for a monomial scalar; raises otherwise."""
        if not self.is_monomial():
            raise ValueError("not a q-monomial: %s" % (self,))
        exp, coeff = self.num.lowest()
        return coeff, exp

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- field operations --------------------------------------------------

    def _coerce(self, other) -> "KScalar":
        if isinstance(other, KScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return KScalar.from_rational(other)
        raise TypeError("cannot coerce %r into the coefficient field" % (other,))

    def __add__(self, other) -> "KScalar":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return KScalar(self.num + other.num, self.den)
        return KScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "KScalar":
        out = KScalar.__new__(KScalar)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other) -> "KScalar":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "KScalar":
        return (-self) + other

    def __mul__(self, other) -> "KScalar":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return K_ZERO
        return KScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "KScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return KScalar(self.den, self.num)

    def __truediv__(self, other) -> "KScalar":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other) -> "KScalar":
        return self._coerce(other) * self.inv()

    def __pow__(self, n: int) -> "KScalar":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        out = K_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = KScalar.from_rational(other)
        if not isinstance(other, KScalar):
            return NotImplemented
        # cross multiplication: num/den need not be in lowest terms
        return (self.num * other.den) == (other.num * self.den)

    __hash__ = None  # equality is by value of the quotient, not by structure

    # -- numeric -----------------------------------------------------------

    def eval_at(self, qval: complex, den_tol: float = 1e-12) -> complex:
        """Substitute a concrete q (principal branch for fractional powers)."""
        dv = self.den.eval_at(qval)
        if abs(dv) <= den_tol:
            raise EvalDenominatorZero(
                "denominator %s vanishes at q = %r" % (self.den, qval))
        return self.num.eval_at(qval) / dv

    # -- text --------------------------------------------------------------

    def __str__(self) -> str:
        return render_scalar(self)

    def __repr__(self) -> str:
        return "KScalar(%s)" % (render_scalar(self),)

    def sort_text(self) -> str:
        """Canonical text used to order root candidates deterministically."""
        return render_scalar(self)


K_ZERO = KScalar(_QSUM_ZERO)
K_ONE = KScalar(_QSUM_ONE)


def render_scalar(k: KScalar) -> str:
    """Text form like ``(2*q^(3/2) - 1)/(q - 1)``; num/den parenthesized
    only when they carry more than one term."""
    if k.den.is_one():
        return render_qsum(k.num)
    num = render_qsum(k.num)
    if len(k.num.terms) > 1:
        num = "(%s)" % num
    return "%s/(%s)" % (num, render_qsum(k.den))


def qpow(e: RationalLike) -> KScalar:
    return KScalar.q_power(e)


def kscalar(x) -> KScalar:
    """Coerce an int, Fraction, QMonomialSum or KScalar into the field."""
    if isinstance(x, KScalar):
        return x
    if isinstance(x, QMonomialSum):
        return KScalar(x)
    if isinstance(x, (int, Fraction)):
        return KScalar.from_rational(x)
    raise TypeError("cannot coerce %r into the coefficient field" % (x,))


# ---------------------------------------------------------------------------
# field contexts: exact (formal q) vs numeric (q specialized to a complex)
# ---------------------------------------------------------------------------


class ExactField:
    """Operations that depend on the coefficient representation, exact mode."""

    name = "exact"

    def zero(self):
        return K_ZERO

    def one(self):
        return K_ONE

    def from_fraction(self, r: RationalLike):
        return KScalar.from_rational(r)

    def qpow(self, e: RationalLike):
        return KScalar.q_power(e)

    def coerce(self, x):
        return kscalar(x)

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def eq(self, a, b) -> bool:
        return a == b

    def sort_key(self, a):
        return a.sort_text()

    def render(self, a) -> str:
        return render_scalar(a)


class NumericField:
    """Same operations with q specialized; zero tests use a tolerance."""

    name = "numeric"

    def __init__(self, q_value: complex, zero_tol: float = 1e-9):
        q_value = complex(q_value)
        if q_value == 0:
            raise ValueError("q must be nonzero")
        if abs(abs(q_value) - 1.0) < 1e-12:
            raise ValueError("|q| = 1 is not supported")
        self.q = q_value
        self.zero_tol = zero_tol

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def from_fraction(self, r: RationalLike):
        return complex(as_fraction(r))

    def qpow(self, e: RationalLike):
        return _pow_principal(self.q, as_fraction(e))

    def coerce(self, x):
        if isinstance(x, complex):
            return x
        if isinstance(x, (int, float, Fraction)):
            return complex(x)
        if isinstance(x, KScalar):
            return x.eval_at(self.q)
        raise TypeError("cannot coerce %r to a numeric coefficient" % (x,))

    def is_zero(self, a) -> bool:
        return abs(a) <= self.zero_tol

    def eq(self, a, b) -> bool:
        return abs(a - b) <= self.zero_tol * (1 + max(abs(a), abs(b)))

    def sort_key(self, a):
        return (round(a.real, 9), round(a.imag, 9))

    def render(self, a) -> str:
        return format_complex(a)


def format_complex(z: complex) -> str:
    re = "%.12g" % z.real
    im = "%.12g" % abs(z.imag)
    if z.imag == 0:
        return re
    return "%s %s %sj" % (re, "-" if z.imag < 0 else "+", im)


EXACT = ExactField()
