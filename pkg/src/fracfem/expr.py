"""Closed-form source terms and potentials.

A :class:`FunctionExpr` is a finite sum of terms

    coef * x^p * (1 - x)^r * chi_[lo, hi](x)

with ``p, r > -1``.  That covers polynomials, the endpoint powers used as
singular sources, indicator (step) functions and their sums and products,
and keeps every endpoint exponent explicit so quadrature can absorb it.

The text grammar understood by :func:`parse_function_expr`::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' unary) | ('/' unary))*      division by constants only
    unary    := ('-' | '+') unary | power
    power    := atom ('^' exponent)?
    atom     := number | 'x' | 'step' '(' number ',' number ')' | '(' expr ')'
    exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ExprParseError, InvalidArgumentError, UnsupportedExpressionError


def _is_int(v):
    return float(v).is_integer()


@dataclass(frozen=True, order=True)
class Term:
    """``coef * x^xpow * (1-x)^omxpow`` restricted to ``[lo, hi]``."""

    xpow: float = 0.0
    omxpow: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    coef: float = 1.0

    def key(self):
        return (self.xpow, self.omxpow, self.lo, self.hi)

    def smooth_part(self, x):
        """Term value without the indicator."""
        x = np.asarray(x, dtype=float)
        v = np.full_like(x, self.coef)
        if self.xpow != 0:
            v = v * x**self.xpow
        if self.omxpow != 0:
            v = v * (1.0 - x) ** self.omxpow
        return v

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.smooth_part(x)
        if self.lo > 0 or self.hi < 1:
            v = np.where((x >= self.lo) & (x <= self.hi), v, 0.0)
        return v


def _expand_integer_omx(t):
    """Rewrite ``(1-x)^r`` with integer ``r >= 0`` as monomials, so each function has one form."""
    if t.omxpow == 0 or not _is_int(t.omxpow):
        return [t]
    r = int(t.omxpow)
    return [Term(t.xpow + k, 0.0, t.lo, t.hi, t.coef * math.comb(r, k) * (-1) ** k) for k in range(r + 1)]


class FunctionExpr:
    """Sum of :class:`Term` objects, kept in canonical (merged, sorted) form."""

    def __init__(self, terms=()):
        merged = {}
        for t in terms:
            if t.xpow <= -1 or t.omxpow <= -1:
                raise UnsupportedExpressionError("exponents must exceed -1")
            if not (0.0 <= t.lo < t.hi <= 1.0):
                raise UnsupportedExpressionError(f"empty or invalid indicator [{t.lo}, {t.hi}]")
            for u in _expand_integer_omx(t):
                merged[u.key()] = merged.get(u.key(), 0.0) + u.coef
        self.terms = tuple(
            Term(*k, coef=c) for k, c in sorted(merged.items()) if c != 0.0
        )

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls([Term(coef=float(c))])

    @classmethod
    def x_power(cls, p, coef=1.0):
        return cls([Term(xpow=float(p), coef=float(coef))])

    @classmethod
    def one_minus_x_power(cls, r, coef=1.0):
        return cls([Term(omxpow=float(r), coef=float(coef))])

    @classmethod
    def step(cls, lo, hi):
        return cls([Term(lo=float(lo), hi=float(hi))])

    @classmethod
    def polynomial(cls, coeffs):
        """From ascending coefficients ``c_0 + c_1 x + ...``."""
        return cls([Term(xpow=float(k), coef=float(c)) for k, c in enumerate(coeffs)])

    # algebra -----------------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        return FunctionExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return FunctionExpr([Term(*t.key(), coef=-t.coef) for t in self.terms])

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out = []
        for s in self.terms:
            for t in other.terms:
                lo, hi = max(s.lo, t.lo), min(s.hi, t.hi)
                if lo >= hi:
                    continue
                out.append(Term(s.xpow + t.xpow, s.omxpow + t.omxpow, lo, hi, s.coef * t.coef))
        return FunctionExpr(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FunctionExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    # queries -------------------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out = out + t(x)
        return float(out) if out.ndim == 0 else out

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_constant(self):
        return all(t.xpow == 0 and t.omxpow == 0 and t.lo == 0 and t.hi == 1 for t in self.terms)

    @property
    def is_polynomial(self):
        return all(
            _is_int(t.xpow) and t.xpow >= 0 and t.omxpow == 0 and t.lo == 0 and t.hi == 1
            for t in self.terms
        )

    def poly_coeffs(self):
        """Ascending monomial coefficients; only for polynomial expressions."""
        if not self.is_polynomial:
            raise UnsupportedExpressionError(f"{self} is not a polynomial")
        if self.is_zero:
            return np.zeros(1)
        c = np.zeros(int(max(t.xpow for t in self.terms)) + 1)
        for t in self.terms:
            c[int(t.xpow)] += t.coef
        return c

    @property
    def breakpoints(self):
        """Indicator endpoints strictly inside (0, 1), sorted."""
        pts = {p for t in self.terms for p in (t.lo, t.hi) if 0.0 < p < 1.0}
        return sorted(pts)

    def __str__(self):
        return format_function_expr(self)

    def __repr__(self):
        return f"FunctionExpr({format_function_expr(self)!r})"


def _lift(v):
    if isinstance(v, FunctionExpr):
        return v
    if isinstance(v, (int, float, np.floating, np.integer)):
        return FunctionExpr.constant(float(v))
    raise TypeError(f"cannot combine FunctionExpr with {type(v).__name__}")


# printing ------------------------------------------------------------------------


def _num(v):
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _pow(v):
    s = _num(v)
    return f"({s})" if v < 0 else s


def _format_term(t):
    factors = []
    if t.xpow != 0:
        factors.append("x" if t.xpow == 1 else f"x^{_pow(t.xpow)}")
    if t.omxpow != 0:
        factors.append("(1-x)" if t.omxpow == 1 else f"(1-x)^{_pow(t.omxpow)}")
    if t.lo > 0 or t.hi < 1:
        factors.append(f"step({_num(t.lo)},{_num(t.hi)})")
    mag = abs(t.coef)
    if not factors:
        body = _num(mag)
    elif mag == 1:
        body = "*".join(factors)
    else:
        body = "*".join([_num(mag)] + factors)
    return t.coef < 0, body


def format_function_expr(expr):
    """Canonical text form; parsing it returns an equal expression."""
    if expr.is_zero:
        return "0"
    out = []
    for k, t in enumerate(expr.terms):
        neg, body = _format_term(t)
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# parsing -------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos == len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ExprParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ExprParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprParseError(f"unexpected {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if not rhs.is_constant or rhs.is_zero or len(rhs.terms) != 1:
                    raise ExprParseError("division is only supported by nonzero constants", pos)
                e = e * (1.0 / rhs.terms[0].coef)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        start = self.peek()[2]
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        pos = self.take()[2]
        s = self.exponent()
        if s <= -1:
            raise ExprParseError(f"exponent {_num(s)} is not integrable (must exceed -1)", pos)
        return _raise_power(base, s, start)

    def number(self):
        kind, val, pos = self.take()
        sign = 1.0
        if val == "-":
            sign = -1.0
            kind, val, pos = self.take()
        if kind != "num":
            raise ExprParseError(f"expected a number, found {val or 'end of input'!r}", pos)
        return sign * float(val)

    def exponent(self):
        if self.peek()[1] == "(":
            self.take()
            v = self.number()
            if self.peek()[1] == "/":
                pos = self.take()[2]
                d = self.number()
                if d == 0:
                    raise ExprParseError("zero denominator in exponent", pos)
                v = v / d
            self.expect(")")
            return v
        return self.number()

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return FunctionExpr.constant(float(val))
        if kind == "name":
            self.take()
            if val == "x":
                return FunctionExpr.x_power(1.0)
            if val == "step":
                self.expect("(")
                lo = self.number()
                self.expect(",")
                hi = self.number()
                self.expect(")")
                if not (0.0 <= lo < hi <= 1.0):
                    raise ExprParseError(f"step({_num(lo)},{_num(hi)}) needs 0 <= a < b <= 1", pos)
                return FunctionExpr.step(lo, hi)
            raise ExprParseError(f"unknown name {val!r}", pos)
        if val == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        raise ExprParseError(f"unexpected {val or 'end of input'!r}", pos)


_X = FunctionExpr.x_power(1.0)
_OMX = FunctionExpr.polynomial([1.0, -1.0])


def _raise_power(base, s, pos):
    if _is_int(s) and s >= 0:
        out = FunctionExpr.constant(1.0)
        for _ in range(int(s)):
            out = out * base
        return out
    if len(base.terms) == 1:
        t = base.terms[0]
        if t.coef > 0:
            # a single term is a product of powers, so it can be raised termwise
            return FunctionExpr([Term(t.xpow * s, t.omxpow * s, t.lo, t.hi, t.coef**s)])
    if base == _OMX:
        return FunctionExpr.one_minus_x_power(s)
    raise ExprParseError("non-integer powers are only supported for x, (1-x) and single terms", pos)


def parse_function_expr(text):
    """Parse the text form of a :class:`FunctionExpr` (see the module docstring)."""
    if not isinstance(text, str) or not text.strip():
        raise ExprParseError("empty expression", 0)
    try:
        return _Parser(text).parse()
    except UnsupportedExpressionError as exc:
        raise ExprParseError(str(exc), 0) from exc


def as_function_expr(value):
    """Accept a FunctionExpr, a number or an expression string."""
    if isinstance(value, FunctionExpr):
        return value
    if isinstance(value, str):
        return parse_function_expr(value)
    if isinstance(value, (int, float)) and math.isfinite(value):
        return FunctionExpr.constant(value)
    raise InvalidArgumentError(f"cannot interpret {value!r} as a function expression")
