"""Equation language: parsing and lowering to q-difference polynomials.

Grammar (whitespace insignificant)::

    equation := expr ( "=" expr )?
    expr     := term (("+"|"-") term)*
    term     := factor ("*" factor)*
    factor   := atom ("^" exponent)?
    atom     := rational | "q" | "x" | yref | "(" expr ")" | "-" atom
    yref     := "y" "(" shiftarg ")" | "y"
    shiftarg := "x" | "q" ("^" integer)? "*" "x"
    exponent := integer | "(" rational ")"
    rational := integer ("/" positive-integer)?

``y`` alone means y(x); ``y(q^j*x)`` is the j-th shift; an ``= rhs`` moves
the right side to the left.  Operators are left-associative with the usual
precedence (^ binds tighter than unary minus, then ``*``, then ``+``/``-``).

Two documented extensions beyond the grammar above (supersets: every input
matching the grammar parses identically):

* ``yj`` (``y0``, ``y1``, ...) is accepted as an alias for y(q^j*x), so the
  canonical rendering of a polynomial parses back (round-trip).
* ``/`` is accepted as a binary operator with the precedence of ``*``; the
  divisor must lower to a field scalar.  Rendered coefficients such as
  ``1/(q - 1)`` are unavoidable in solver output, and this keeps both the
  polynomial and the scalar text forms round-trippable.
  :func:`parse_scalar` uses the same grammar with x and y forbidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from qpuiseux.field import KScalar
from qpuiseux.poly import QDiffPolynomial
from qpuiseux.charpoly import _fraction_nth_root

MAX_DEPTH = 512
MAX_INT_EXPONENT = 10 ** 6


class EquationSyntaxError(SyntaxError):
    """Syntax error with 1-based line/column information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__("%s (line %d, column %d)" % (message, line, column))
        self.line = line
        self.column = column


class UnsupportedExponent(ValueError):
    """Exponent outside the language: fractional powers of y, etc."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: Fraction


@dataclass(frozen=True)
class QAtom:
    pass


@dataclass(frozen=True)
class XAtom:
    pass


@dataclass(frozen=True)
class YAtom:
    shift: int


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: Fraction


Node = Union[Lit, QAtom, XAtom, YAtom, Neg, BinOp, Pow]


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------


@dataclass
class Token:
    kind: str  # INT NAME OP EOF
    text: str
    line: int
    column: int


_OPS = set("+-*/^()=")


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i + 1
            if ch == "y":
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise EquationSyntaxError("unexpected character %r" % ch, line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# recursive-descent parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, scalar_mode: bool = False):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.scalar_mode = scalar_mode
        self.depth = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise EquationSyntaxError(message, tok.line, tok.column)

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            self.error("expected %r" % text)
        return self.advance()

    def at_op(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text in texts

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("expression nesting exceeds %d levels" % MAX_DEPTH)

    def _leave(self):
        self.depth -= 1

    # -- grammar -------------------------------------------------------------

    def parse_equation(self) -> Node:
        lhs = self.parse_expr()
        if self.at_op("="):
            self.advance()
            rhs = self.parse_expr()
            lhs = BinOp("-", lhs, rhs)
        if self.peek().kind != "EOF":
            self.error("trailing input")
        return lhs

    def parse_expr(self) -> Node:
        self._enter()
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_term())
        self._leave()
        return node

    def parse_term(self) -> Node:
        self._enter()
        node = self.parse_factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_factor())
        self._leave()
        return node

    def parse_factor(self) -> Node:
        node = self.parse_atom()
        if self.at_op("^"):
            self.advance()
            exponent = self.parse_exponent()
            node = Pow(node, exponent)
        return node

    def parse_atom(self) -> Node:
        self._enter()
        tok = self.peek()
        try:
            if tok.kind == "OP" and tok.text == "-":
                # ^ binds tighter than unary minus: -x^2 is -(x^2)
                self.advance()
                return Neg(self.parse_factor())
            if tok.kind == "OP" and tok.text == "(":
                self.advance()
                node = self.parse_expr()
                self.expect_op(")")
                return node
            if tok.kind == "INT":
                self.advance()
                return Lit(Fraction(int(tok.text)))
            if tok.kind == "NAME":
                return self.parse_name()
            self.error("expected a value")
        finally:
            self._leave()

    def parse_name(self) -> Node:
        tok = self.advance()
        name = tok.text
        if name == "q":
            return QAtom()
        if name == "x":
            if self.scalar_mode:
                self.error("x is not allowed in a scalar expression", tok)
            return XAtom()
        if name == "y" or (name.startswith("y") and name[1:].isdigit()):
            if self.scalar_mode:
                self.error("y is not allowed in a scalar expression", tok)
            if len(name) > 1:
                return YAtom(int(name[1:]))
            if self.at_op("("):
                self.advance()
                shift = self.parse_shiftarg()
                self.expect_op(")")
                return YAtom(shift)
            return YAtom(0)
        self.error("unknown name %r" % name, tok)

    def parse_shiftarg(self) -> int:
        tok = self.peek()
        if tok.kind == "NAME" and tok.text == "x":
            self.advance()
            return 0
        if tok.kind == "NAME" and tok.text == "q":
            self.advance()
            j = 1
            if self.at_op("^"):
                self.advance()
                j_frac = self.parse_signed_integer()
                if j_frac < 0:
                    self.error("shift must be nonnegative", tok)
                j = j_frac
            self.expect_op("*")
            nxt = self.peek()
            if nxt.kind != "NAME" or nxt.text != "x":
                self.error("expected x in the shift argument")
            self.advance()
            return j
        self.error("expected x or q^j*x inside y(...)")

    def parse_signed_integer(self) -> int:
        negative = False
        if self.at_op("-"):
            self.advance()
            negative = True
        tok = self.peek()
        if tok.kind != "INT":
            self.error("expected an integer")
        self.advance()
        value = int(tok.text)
        return -value if negative else value

    def parse_exponent(self) -> Fraction:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            value = self.parse_rational_signed()
            self.expect_op(")")
            return value
        return Fraction(self.parse_signed_integer())

    def parse_rational_signed(self) -> Fraction:
        negative = False
        if self.at_op("-"):
            self.advance()
            negative = True
        tok = self.peek()
        if tok.kind != "INT":
            self.error("expected a rational")
        self.advance()
        num = int(tok.text)
        den = 1
        if self.at_op("/"):
            self.advance()
            den_tok = self.peek()
            if den_tok.kind != "INT":
                self.error("expected a positive integer denominator")
            self.advance()
            den = int(den_tok.text)
            if den <= 0:
                self.error("denominator must be positive", den_tok)
        value = Fraction(num, den)
        return -value if negative else value


def _contains_y(node: Node) -> bool:
    if isinstance(node, YAtom):
        return True
    if isinstance(node, Neg):
        return _contains_y(node.arg)
    if isinstance(node, BinOp):
        return _contains_y(node.left) or _contains_y(node.right)
    if isinstance(node, Pow):
        return _contains_y(node.base)
    return False


def _validate(node: Node) -> None:
    if isinstance(node, Pow):
        if abs(node.exponent.numerator) > MAX_INT_EXPONENT:
            raise UnsupportedExponent("exponent %s is unreasonably large" % node.exponent)
        if _contains_y(node.base):
            if node.exponent.denominator != 1 or node.exponent < 0:
                raise UnsupportedExponent(
                    "powers of y must be nonnegative integers, got %s" % node.exponent)
        _validate(node.base)
    elif isinstance(node, Neg):
        _validate(node.arg)
    elif isinstance(node, BinOp):
        _validate(node.left)
        _validate(node.right)


def parse_equation(text: str) -> Node:
    """Parse the equation language into an AST (see the module docstring)."""
    if not text or not text.strip():
        raise EquationSyntaxError("empty input", 1, 1)
    ast = _Parser(text).parse_equation()
    _validate(ast)
    return ast


def parse_scalar_ast(text: str) -> Node:
    if not text or not text.strip():
        raise EquationSyntaxError("empty input", 1, 1)
    parser = _Parser(text, scalar_mode=True)
    ast = parser.parse_equation()
    _validate(ast)
    return ast


# ---------------------------------------------------------------------------
# lowering
# ---------------------------------------------------------------------------


def _as_scalar(P: QDiffPolynomial) -> Optional[KScalar]:
    """The polynomial as a field element, when it is one (no x, no y)."""
    if P.is_zero():
        return KScalar.zero()
    if len(P.terms) != 1:
        items = list(P.terms.items())
        if all(k == (Fraction(0), ()) for k, _ in items):
            pass  # unreachable: keys are unique
        return None
    (xexp, tau), coeff = next(iter(P.terms.items()))
    if xexp == 0 and not tau:
        return coeff
    return None


def _scalar_pow(base: KScalar, e: Fraction) -> KScalar:
    if e.denominator == 1:
        return base ** e.numerator
    if base.is_monomial():
        coeff, exp = base.as_monomial()
        root = _fraction_nth_root(coeff, e.denominator)
        if root is not None:
            mono = KScalar.from_rational(root) * KScalar.q_power(exp / e.denominator)
            return mono ** e.numerator
    raise UnsupportedExponent(
        "cannot take the %s power of %s exactly" % (e, base))


def lower(ast: Node) -> QDiffPolynomial:
    """Expand an AST into a canonical q-difference polynomial."""
    if isinstance(ast, Lit):
        return QDiffPolynomial.from_terms([(0, (), KScalar.from_rational(ast.value))])
    if isinstance(ast, QAtom):
        return QDiffPolynomial.from_terms([(0, (), KScalar.q_power(1))])
    if isinstance(ast, XAtom):
        return QDiffPolynomial.from_terms([(1, (), KScalar.one())])
    if isinstance(ast, YAtom):
        tau = tuple([0] * ast.shift + [1])
        return QDiffPolynomial.from_terms([(0, tau, KScalar.one())])
    if isinstance(ast, Neg):
        return -lower(ast.arg)
    if isinstance(ast, BinOp):
        left = lower(ast.left)
        right = lower(ast.right)
        if ast.op == "+":
            return left + right
        if ast.op == "-":
            return left - right
        if ast.op == "*":
            return _poly_mul(left, right)
        if ast.op == "/":
            scalar = _as_scalar(right)
            if scalar is None:
                raise UnsupportedExponent("division only by field scalars")
            if scalar.is_zero():
                raise ZeroDivisionError("division by zero scalar")
            return left.scale(scalar.inv())
        raise AssertionError(ast.op)
    if isinstance(ast, Pow):
        e = ast.exponent
        if isinstance(ast.base, XAtom):
            return QDiffPolynomial.from_terms([(e, (), KScalar.one())])
        if isinstance(ast.base, QAtom):
            return QDiffPolynomial.from_terms([(0, (), KScalar.q_power(e))])
        base = lower(ast.base)
        if e.denominator == 1 and e >= 0:
            out = QDiffPolynomial.from_terms([(0, (), KScalar.one())])
            for _ in range(e.numerator):
                out = _poly_mul(out, base)
            return out
        scalar = _as_scalar(base)
        if scalar is not None:
            return QDiffPolynomial.from_terms([(0, (), _scalar_pow(scalar, e))])
        single = _single_x_monomial(base)
        if single is not None:
            coeff, xexp = single
            return QDiffPolynomial.from_terms(
                [(xexp * e, (), _scalar_pow(coeff, e))])
        raise UnsupportedExponent(
            "exponent %s needs a scalar or pure-x base" % e)
    raise TypeError("not an AST node: %r" % (ast,))


def _single_x_monomial(P: QDiffPolynomial):
    if len(P.terms) != 1:
        return None
    (xexp, tau), coeff = next(iter(P.terms.items()))
    if tau:
        return None
    return coeff, xexp


def _poly_mul(a: QDiffPolynomial, b: QDiffPolynomial) -> QDiffPolynomial:
    items = []
    for (xa, ta), ca in a.terms.items():
        for (xb, tb), cb in b.terms.items():
            ln = max(len(ta), len(tb))
            tau = tuple((ta[i] if i < len(ta) else 0) + (tb[i] if i < len(tb) else 0)
                        for i in range(ln))
            items.append((xa + xb, tau, ca * cb))
    return QDiffPolynomial.from_terms(items, a.field)


def parse_to_poly(text: str) -> QDiffPolynomial:
    """Convenience: parse an equation and lower it in one step."""
    return lower(parse_equation(text))


def parse_scalar(text: str) -> KScalar:
    """Parse a field scalar such as ``(2*q^(3/2) - 1)/(q - 1)``."""
    poly = lower(parse_scalar_ast(text))
    scalar = _as_scalar(poly)
    if scalar is None:
        raise EquationSyntaxError("expression is not a scalar", 1, 1)
    return scalar
