"""q-difference polynomials and truncated Puiseux series.

A q-difference polynomial is a finite sum of terms

    a * x^alpha * y0^t0 * y1^t1 * ... * yn^tn

where ``yj`` stands for the j-th q-shift of the unknown, yj(x) = y(q^j x).
The multi-index tau = (t0, ..., tn) has height |tau| = sum tj and weight
w(tau) = sum j*tj; the weight records how shifts twist leading coefficients
by powers of q, since yj(c*x^mu) = c * q^(j*mu) * x^mu.

Truncated Puiseux series carry an explicit validity bound ``trunc``: the
series is known modulo terms of exponent > trunc.  All series arithmetic
propagates that bound so that substitution results are never silently wrong
beyond their stated window.

Exponents are rationals throughout (``fractions.Fraction``); ramified
branches need no re-encoding, the ramification index is metadata.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from qpuiseux.field import EXACT, ExactField, KScalar, as_fraction

INF = math.inf

Exponent = Union[Fraction, float]  # float only for the +inf sentinel
MultiIndex = Tuple[int, ...]
TermKey = Tuple[Fraction, MultiIndex]

MAX_SHIFT = 64


# ---------------------------------------------------------------------------
# multi-index helpers
# ---------------------------------------------------------------------------


def mi_trim(tau: Iterable[int]) -> MultiIndex:
    """Canonical multi-index: trailing zeros removed, entries >= 0."""
    t = list(tau)
    while t and t[-1] == 0:
        t.pop()
    for v in t:
        if v < 0:
            raise ValueError("multi-index entries must be nonnegative")
    return tuple(t)


def mi_height(tau: MultiIndex) -> int:
    return sum(tau)


def mi_weight(tau: MultiIndex) -> int:
    return sum(j * t for j, t in enumerate(tau))


def format_exponent(e: Exponent) -> str:
    if e == INF:
        return "inf"
    e = as_fraction(e)
    if e.denominator == 1:
        return str(e.numerator)
    return "%d/%d" % (e.numerator, e.denominator)


def parse_exponent(text: str) -> Exponent:
    text = text.strip()
    if text == "inf":
        return INF
    return Fraction(text)


def _tplus(a: Exponent, b: Exponent) -> Exponent:
    if a == INF or b == INF:
        return INF
    return a + b


# ---------------------------------------------------------------------------
# QDiffPolynomial
# ---------------------------------------------------------------------------


class QDiffPolynomial:
    """Sparse q-difference polynomial keyed by (x-exponent, multi-index).

    Coefficients live in the field attached at construction (exact KScalar
    by default, complex in numeric mode).  Zero coefficients are pruned, so
    the stored support is the true support.
    """

    __slots__ = ("terms", "field")

    def __init__(self, terms: Optional[Dict[TermKey, object]] = None, field=EXACT):
        self.terms: Dict[TermKey, object] = dict(terms) if terms else {}
        self.field = field

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[Exponent, Iterable[int], object]],
                   field=EXACT) -> "QDiffPolynomial":
        """Build from (xexp, tau, coeff) triples, merging duplicates."""
        acc: Dict[TermKey, object] = {}
        for xexp, tau, coeff in items:
            key = (as_fraction(xexp), mi_trim(tau))
            coeff = field.coerce(coeff)
            if key in acc:
                coeff = acc[key] + coeff
            if field.is_zero(coeff):
                acc.pop(key, None)
            else:
                acc[key] = coeff
        return cls(acc, field)

    @classmethod
    def zero(cls, field=EXACT) -> "QDiffPolynomial":
        return cls({}, field)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> List[Tuple[TermKey, object]]:
        """Terms in the canonical order (xexp ascending, then multi-index)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    @property
    def order(self) -> int:
        """Largest shift j appearing with a positive exponent (0 if none)."""
        n = 0
        for (_, tau) in self.terms:
            if tau:
                n = max(n, len(tau) - 1)
        return n

    @property
    def degree(self) -> int:
        """Largest height |tau| over the support (0 if no y at all)."""
        return max((mi_height(tau) for (_, tau) in self.terms), default=0)

    def has_y(self) -> bool:
        return any(tau for (_, tau) in self.terms)

    def constant_part(self) -> Dict[Fraction, object]:
        """x-exponent -> coefficient for the terms free of y."""
        return {xexp: c for (xexp, tau), c in self.terms.items() if not tau}

    def min_xexp(self) -> Optional[Fraction]:
        return min((x for (x, _) in self.terms), default=None)

    def max_xexp(self) -> Optional[Fraction]:
        return max((x for (x, _) in self.terms), default=None)

    def x_span(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.max_xexp() - self.min_xexp()

    # -- ring operations ---------------------------------------------------

    def _merged(self, items) -> "QDiffPolynomial":
        acc = dict(self.terms)
        field = self.field
        for key, coeff in items:
            if key in acc:
                coeff = acc[key] + coeff
            if field.is_zero(coeff):
                acc.pop(key, None)
            else:
                acc[key] = coeff
        return QDiffPolynomial(acc, field)

    def __add__(self, other: "QDiffPolynomial") -> "QDiffPolynomial":
        return self._merged(other.terms.items())

    def __sub__(self, other: "QDiffPolynomial") -> "QDiffPolynomial":
        return self._merged((k, -c) for k, c in other.terms.items())

    def __neg__(self) -> "QDiffPolynomial":
        return QDiffPolynomial({k: -c for k, c in self.terms.items()}, self.field)

    def scale(self, c) -> "QDiffPolynomial":
        c = self.field.coerce(c)
        if self.field.is_zero(c):
            return QDiffPolynomial.zero(self.field)
        return QDiffPolynomial({k: v * c for k, v in self.terms.items()}, self.field)

    def eq(self, other: "QDiffPolynomial") -> bool:
        if set(self.terms) != set(other.terms):
            return False
        return all(self.field.eq(c, other.terms[k]) for k, c in self.terms.items())

    # -- numeric specialization --------------------------------------------

    def specialize(self, numeric_field) -> "QDiffPolynomial":
        """Evaluate every coefficient at the numeric field's q."""
        acc = {}
        for key, coeff in self.terms.items():
            v = numeric_field.coerce(coeff)
            if not numeric_field.is_zero(v):
                acc[key] = v
        return QDiffPolynomial(acc, numeric_field)

    # -- text / export -------------------------------------------------------

    def render(self) -> str:
        return render_poly(self)

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return "QDiffPolynomial(%s)" % render_poly(self)

    def to_json(self) -> dict:
        return {
            "terms": [
                {
                    "xexp": format_exponent(xexp),
                    "tau": list(tau),
                    "coeff": self.field.render(coeff),
                }
                for (xexp, tau), coeff in self.sorted_terms()
            ]
        }


def _term_text(xexp: Fraction, tau: MultiIndex) -> str:
    factors = []
    if xexp != 0:
        if xexp == 1:
            factors.append("x")
        elif xexp.denominator == 1 and xexp > 0:
            factors.append("x^%d" % xexp.numerator)
        else:
            factors.append("x^(%s)" % format_exponent(xexp))
    for j, t in enumerate(tau):
        if t == 0:
            continue
        factors.append("y%d" % j if t == 1 else "y%d^%d" % (j, t))
    return "*".join(factors)


def render_poly(P: QDiffPolynomial) -> str:
    """Canonical text, e.g. ``(q - 1)*x*y0^2 - x^2*y1``.

    ``yj`` denotes the j-th q-shift of y.  The form is parseable by the
    equation parser, so rendering round-trips.
    """
    if not P.terms:
        return "0"
    exact = isinstance(P.field, ExactField)
    parts = []
    for (xexp, tau), coeff in P.sorted_terms():
        sign = ""
        if exact:
            # pull a leading minus out of the coefficient for readability
            _, lead = coeff.num.lowest()
            if lead < 0:
                sign = "-"
                coeff = -coeff
            ctext = P.field.render(coeff)
            if len(coeff.num.terms) > 1 or not coeff.den.is_one():
                ctext = "(%s)" % ctext
        else:
            ctext = "(%s)" % P.field.render(coeff)
        mono = _term_text(xexp, tau)
        if not mono:
            body = ctext
        elif exact and coeff.is_one():
            body = mono
        else:
            body = "%s*%s" % (ctext, mono)
        if not parts:
            parts.append(sign + body)
        else:
            parts.append((" - " if sign == "-" else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# PuiseuxSeries
# ---------------------------------------------------------------------------


class PuiseuxSeries:
    """Truncated series sum(c_i * x^(e_i)) with strictly increasing rational
    exponents, known modulo terms of exponent > ``trunc``.
    """

    __slots__ = ("terms", "trunc", "field")

    def __init__(self, terms: Tuple[Tuple[Fraction, object], ...] = (),
                 trunc: Exponent = INF, field=EXACT):
        self.terms = terms
        self.trunc = trunc
        self.field = field

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[Exponent, object]],
                   trunc: Exponent = INF, field=EXACT) -> "PuiseuxSeries":
        acc: Dict[Fraction, object] = {}
        for exp, coeff in items:
            exp = as_fraction(exp)
            if exp > trunc:
                continue
            coeff = field.coerce(coeff)
            if exp in acc:
                coeff = acc[exp] + coeff
            if field.is_zero(coeff):
                acc.pop(exp, None)
            else:
                acc[exp] = coeff
        return cls(tuple(sorted(acc.items(), key=lambda t: t[0])), trunc, field)

    @classmethod
    def zero(cls, trunc: Exponent = INF, field=EXACT) -> "PuiseuxSeries":
        return cls((), trunc, field)

    @classmethod
    def monomial(cls, coeff, exp: Exponent, trunc: Exponent = INF,
                 field=EXACT) -> "PuiseuxSeries":
        return cls.from_terms([(exp, coeff)], trunc, field)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Optional[Fraction]:
        """Exponent of the first nonzero term, None for the (known) zero part."""
        return self.terms[0][0] if self.terms else None

    def valuation_lower_bound(self) -> Exponent:
        """A lower bound for the valuation, usable when no term is known."""
        return self.terms[0][0] if self.terms else self.trunc

    def coefficient(self, exp: Exponent):
        exp = as_fraction(exp)
        for e, c in self.terms:
            if e == exp:
                return c
        return self.field.zero()

    def last_exponent(self) -> Optional[Fraction]:
        return self.terms[-1][0] if self.terms else None

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        trunc = min(self.trunc, other.trunc)
        return PuiseuxSeries.from_terms(
            list(self.terms) + list(other.terms), trunc, self.field)

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(tuple((e, -c) for e, c in self.terms),
                             self.trunc, self.field)

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self + (-other)

    def scale(self, c) -> "PuiseuxSeries":
        c = self.field.coerce(c)
        if self.field.is_zero(c):
            return PuiseuxSeries((), self.trunc, self.field)
        return PuiseuxSeries(tuple((e, v * c) for e, v in self.terms),
                             self.trunc, self.field)

    def mul_xpow(self, exp: Exponent) -> "PuiseuxSeries":
        exp = as_fraction(exp)
        return PuiseuxSeries(tuple((e + exp, c) for e, c in self.terms),
                             _tplus(self.trunc, exp), self.field)

    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        # validity: unknown tail of one factor meets the valuation of the other
        field = self.field
        trunc = min(_tplus(self.trunc, other.valuation_lower_bound()),
                    _tplus(other.trunc, self.valuation_lower_bound()))
        acc: Dict[Fraction, object] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = ea + eb
                if e > trunc:
                    break  # other.terms sorted ascending
                v = ca * cb
                if e in acc:
                    v = acc[e] + v
                if field.is_zero(v):
                    acc.pop(e, None)
                else:
                    acc[e] = v
        return PuiseuxSeries(tuple(sorted(acc.items(), key=lambda t: t[0])),
                             trunc, field)

    def pow(self, k: int) -> "PuiseuxSeries":
        if k < 0:
            raise ValueError("negative series powers are not supported")
        out = PuiseuxSeries.monomial(self.field.one(), 0, INF, self.field)
        for _ in range(k):
            out = out * self
        return out

    def truncated(self, T: Exponent) -> "PuiseuxSeries":
        T = min(self.trunc, T if T == INF else as_fraction(T))
        return PuiseuxSeries(tuple((e, c) for e, c in self.terms if e <= T),
                             T, self.field)

    def with_trunc(self, T: Exponent) -> "PuiseuxSeries":
        """Assert validity up to T (caller guarantees the extension)."""
        if T <= self.trunc:
            return self.truncated(T)
        return PuiseuxSeries(self.terms, T, self.field)

    # -- evaluation / export -------------------------------------------------

    def eval_numeric(self, xval: complex, qval: complex) -> complex:
        total = 0j
        for e, c in self.terms:
            cv = c.eval_at(qval) if isinstance(c, KScalar) else complex(c)
            total += cv * complex(xval) ** float(e)
        return total

    def render(self) -> str:
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e, c in self.terms:
                if e == 1:
                    mono = "x"
                elif e != 0 and as_fraction(e).denominator == 1 and e > 0:
                    mono = "x^%d" % as_fraction(e).numerator
                else:
                    mono = "x^(%s)" % format_exponent(e)
                if e == 0:
                    parts.append(self.field.render(c))
                    continue
                if isinstance(c, KScalar) and c.is_one():
                    parts.append(mono)
                    continue
                ctext = self.field.render(c)
                if ("+" in ctext[1:]) or ("-" in ctext[1:]) or "-" == ctext[0] or "/" in ctext:
                    ctext = "(%s)" % ctext
                parts.append("%s*%s" % (ctext, mono))
            body = " + ".join(parts)
        tail = "" if self.trunc == INF else " + O(x^(>%s))" % format_exponent(self.trunc)
        return body + tail

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return "PuiseuxSeries(%s)" % self.render()

    def to_json(self) -> dict:
        return {
            "trunc": format_exponent(self.trunc),
            "terms": [[format_exponent(e), self.field.render(c)]
                      for e, c in self.terms],
        }


def series_equal_upto(a: PuiseuxSeries, b: PuiseuxSeries,
                      T: Optional[Exponent] = None) -> bool:
    """Exact term-by-term equality up to min of the validity windows (or T)."""
    bound = min(a.trunc, b.trunc)
    if T is not None:
        bound = min(bound, T)
    ta = [(e, c) for e, c in a.terms if e <= bound]
    tb = [(e, c) for e, c in b.terms if e <= bound]
    if len(ta) != len(tb):
        return False
    field = a.field
    return all(ea == eb and field.eq(ca, cb) for (ea, ca), (eb, cb) in zip(ta, tb))


# ---------------------------------------------------------------------------
# operations tying polynomials and series together
# ---------------------------------------------------------------------------


def apply_shift_to_series(s: PuiseuxSeries, j: int, max_shift: int = MAX_SHIFT) -> PuiseuxSeries:
    """The q-shift acting on series: x^e picks up a factor q^(j*e)."""
    if j < 0:
        raise ValueError("shift must be nonnegative")
    if j > max_shift:
        raise ValueError("shift %d exceeds the configured maximum %d" % (j, max_shift))
    if j == 0:
        return s
    field = s.field
    return PuiseuxSeries(
        tuple((e, c * field.qpow(j * e)) for e, c in s.terms),
        s.trunc, field)


def substitute_series(P: QDiffPolynomial, s: PuiseuxSeries) -> PuiseuxSeries:
    """Residual oracle: expand P(x, s(x), s(qx), ..., s(q^n x)).

    The result records its own validity window: a term of height h >= 1 is
    fully determined up to ``alpha + (h-1)*val(s) + s.trunc`` (its unknown
    tail enters through one factor, the remaining h-1 factors contribute at
    least the valuation each); pure-x terms are exact.
    """
    field = s.field
    shifted: Dict[int, PuiseuxSeries] = {}

    def shift(j: int) -> PuiseuxSeries:
        if j not in shifted:
            shifted[j] = apply_shift_to_series(s, j)
        return shifted[j]

    partials: List[PuiseuxSeries] = []
    overall_trunc: Exponent = INF
    for (xexp, tau), coeff in P.sorted_terms():
        if not tau:
            partials.append(PuiseuxSeries.monomial(coeff, xexp, INF, field))
            continue
        prod = PuiseuxSeries.monomial(coeff, xexp, INF, field)
        for j, t in enumerate(tau):
            if t:
                prod = prod * shift(j).pow(t)
        partials.append(prod)
        overall_trunc = min(overall_trunc, prod.trunc)
    acc = PuiseuxSeries.zero(overall_trunc, field)
    for p in partials:
        acc = acc + p.truncated(overall_trunc)
    return acc


def shift_substitute(P: QDiffPolynomial, c, mu: Fraction) -> QDiffPolynomial:
    """The polygon-process step y -> c*x^mu + y, expanded exactly.

    Each shifted variable yj is replaced by c*q^(j*mu)*x^mu + yj and the
    powers are expanded multinomially.  The identity
    P1(x, y) = P(x, c*x^mu + y) holds as formal series.
    """
    field = P.field
    c = field.coerce(c)
    if field.is_zero(c):
        raise ValueError("substitution coefficient must be nonzero")
    mu = as_fraction(mu)

    acc: Dict[TermKey, object] = {}
    for (xexp, tau), coeff in P.terms.items():
        # choices[j] = list of (k_j, binom(t_j, k_j) * (c*q^(j*mu))^k_j)
        expansions = []
        for j, t in enumerate(tau):
            base = c * field.qpow(j * mu)
            opts = []
            p = field.one()
            for k in range(t + 1):
                opts.append((k, field.coerce(math.comb(t, k)) * p))
                p = p * base
            expansions.append(opts)
        stack = [(0, coeff, [])]
        while stack:
            idx, partial, ks = stack.pop()
            if idx == len(expansions):
                ktot = sum(ks)
                new_tau = mi_trim(t - k for t, k in zip(tau, ks))
                key = (xexp + ktot * mu, new_tau)
                v = partial
                if key in acc:
                    v = acc[key] + v
                if field.is_zero(v):
                    acc.pop(key, None)
                else:
                    acc[key] = v
                continue
            for k, factor in expansions[idx]:
                stack.append((idx + 1, partial * factor, ks + [k]))
    return QDiffPolynomial(acc, field)


def truncate_x(P: QDiffPolynomial, T: Exponent) -> QDiffPolynomial:
    """Drop every term with x-exponent > T (T = inf is a no-op).

    Sound for solution terms of exponent <= T: with all solution exponents
    positive, a dropped term only ever contributes to residual exponents
    beyond its own x-exponent.
    """
    if T == INF:
        return P
    T = as_fraction(T)
    return QDiffPolynomial(
        {k: c for k, c in P.terms.items() if k[0] <= T}, P.field)


def partial_derivative(P: QDiffPolynomial, j: int) -> QDiffPolynomial:
    """Formal derivative with respect to yj, the shifts being independent."""
    if j < 0 or j > max(P.order, 0):
        raise ValueError("shift index %d out of range for order %d" % (j, P.order))
    field = P.field
    acc: Dict[TermKey, object] = {}
    for (xexp, tau), coeff in P.terms.items():
        if j >= len(tau) or tau[j] == 0:
            continue
        t = tau[j]
        new_tau = mi_trim(tau[:j] + (t - 1,) + tau[j + 1:])
        key = (xexp, new_tau)
        v = coeff * field.coerce(t)
        if key in acc:
            v = acc[key] + v
        if not field.is_zero(v):
            acc[key] = v
        else:
            acc.pop(key, None)
    return QDiffPolynomial(acc, field)
