"""Text grammar for algebra elements and 1-forms.

::

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' ['-'] INT)?
    base   := INT ['/' INT] | sym | '(' expr ')'
    sym    := x1|x2|x3|r|t|lam|gam|dx1|dx2|dx3|dt|th

Negative exponents are accepted only on ``r``; basis forms take exponent 1.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import GAM, LAM, ONE, AlgebraElement, mul, r, t, x
from .forms import BASIS, FormSum, ModelConfig, left_mul, right_mul


class ParseError(ValueError):
    """Syntax or typing error in an expression, with the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")
_ATOMS = {
    "x1": lambda: x(1),
    "x2": lambda: x(2),
    "x3": lambda: x(3),
    "r": lambda: r(1),
    "t": lambda: t(1),
    "lam": lambda: LAM,
    "gam": lambda: GAM,
}


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("sym", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, model: ModelConfig | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.model = model

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return value

    def expr(self):
        negate = False
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = self._combine(acc, rhs, val, pos)
            else:
                return acc

    def _combine(self, a, b, op, pos):
        if isinstance(a, FormSum) != isinstance(b, FormSum):
            raise ParseError("cannot add a function and a 1-form", pos)
        return a + b if op == "+" else a - b

    def term(self):
        acc = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                rhs = self.factor()
                acc = self._product(acc, rhs, pos)
            else:
                return acc

    def _product(self, a, b, pos):
        if isinstance(a, FormSum) and isinstance(b, FormSum):
            raise ParseError("wedge not supported", pos)
        if isinstance(a, FormSum):
            try:
                return right_mul(a, b, self.model)
            except ValueError as exc:
                raise ParseError(str(exc), pos) from None
        if isinstance(b, FormSum):
            return left_mul(a, b)
        return mul(a, b)

    def factor(self):
        kind, val, pos = self.peek()
        base = self.base()
        k2, v2, p2 = self.peek()
        if not (k2 == "op" and v2 == "^"):
            return base
        self.take()
        sign = 1
        k3, v3, p3 = self.peek()
        if k3 == "op" and v3 == "-":
            self.take()
            sign = -1
        k4, v4, p4 = self.take()
        if k4 != "int":
            raise ParseError("expected integer exponent", p4)
        expo = sign * v4
        if isinstance(base, FormSum):
            if expo != 1:
                raise ParseError("exponents on basis forms must be 1", p4)
            return base
        if expo < 0:
            if not (kind == "sym" and val == "r"):
                raise ParseError("negative exponents are only allowed on r", p3)
            return r(expo)
        return base ** expo

    def base(self):
        kind, val, pos = self.take()
        if kind == "int":
            k2, v2, p2 = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, p3 = self.take()
                if k3 != "int":
                    raise ParseError("expected integer denominator", p3)
                if v3 == 0:
                    raise ParseError("zero denominator", p3)
                return AlgebraElement.const(Fraction(val, v3))
            return AlgebraElement.const(val)
        if kind == "sym":
            if val in _ATOMS:
                return _ATOMS[val]()
            if val in BASIS:
                return FormSum.basis(val)
            raise ParseError(f"unknown symbol {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse(text: str, model: ModelConfig | None = None):
    """Parse ``text`` into a canonical AlgebraElement or FormSum.

    ``model`` supplies ``beta`` when a ``dt`` has to be moved past ``t``.
    """
    return _Parser(text, model).parse()


def _format_power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _format_element(f: AlgebraElement) -> str:
    raw = f.raw_terms
    if not raw:
        return "0"
    pieces = []
    for key in sorted(raw, key=lambda k: (k[4], k[5], k[6], k[:4])):
        v = raw[key]
        a1, a2, a3, k, n, p, q = key
        factors = []
        for name, e in (("lam", p), ("gam", q), ("x1", a1), ("x2", a2), ("x3", a3), ("r", k), ("t", n)):
            if e:
                factors.append(_format_power(name, e))
        mag = abs(v)
        if mag != 1 or not factors:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if not pieces:
            pieces.append(("-" if v < 0 else "") + body)
        else:
            pieces.append((" - " if v < 0 else " + ") + body)
    return "".join(pieces)


def format_expr(e) -> str:
    """Render an AlgebraElement or FormSum so that ``parse`` reads it back exactly."""
    if isinstance(e, AlgebraElement):
        return _format_element(e)
    if isinstance(e, FormSum):
        parts = [f"({_format_element(c)})*{name}" for c, name in zip(e.coeffs, BASIS) if not c.is_zero()]
        return " + ".join(parts) if parts else "0*dt"
    raise TypeError(f"cannot format {type(e).__name__}")


__all__ = ["ParseError", "format_expr", "parse"]
