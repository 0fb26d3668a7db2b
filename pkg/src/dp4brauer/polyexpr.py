"""Parser for polynomial expressions in T0..T4 with rational coefficients.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/')? factor)*      # juxtaposition multiplies
    factor := ('+' | '-') factor | atom ('^' | '**') INT | atom
    atom   := INT | VAR | '(' expr ')'
    VAR    := 'T' DIGIT | 't' DIGIT | 'x' DIGIT

Division is only allowed by a constant. Polynomials are dicts mapping
exponent 5-tuples to Fractions.
"""

from __future__ import annotations

import re
from fractions import Fraction

Poly = dict[tuple[int, ...], Fraction]
NVARS = 5

_TOKEN = re.compile(r"\s*(?:(\d+)|([Ttx])(\d)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text[:pos]}<<HERE>>{text[pos:]}")
        self.pos = pos


def const(c) -> Poly:
    c = Fraction(c)
    return {(0,) * NVARS: c} if c else {}


def var(i: int) -> Poly:
    e = [0] * NVARS
    e[i] = 1
    return {tuple(e): Fraction(1)}


def add(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, Fraction(0)) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            v = out.get(m, Fraction(0)) + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def degree(a: Poly) -> int:
    return max((sum(m) for m in a), default=-1)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, object, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError("unexpected character", text, pos)
            start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
            if m.group(1):
                self.tokens.append(("int", int(m.group(1)), start))
            elif m.group(2):
                i = int(m.group(3))
                if i >= NVARS:
                    raise ParseError(f"variable index {i} out of range", text, start)
                self.tokens.append(("var", i, start))
            else:
                self.tokens.append(("op", m.group(4), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", self.text, pos)

    def parse(self) -> Poly:
        p = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", self.text, pos)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                p = add(p, self.term(), 1 if val == "+" else -1)
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = mul(p, self.factor())
            elif kind == "op" and val == "/":
                self.take()
                d = self.factor()
                if degree(d) > 0 or not d:
                    raise ParseError("division by a non-constant", self.text, pos)
                p = mul(p, const(1 / d[(0,) * NVARS]))
            elif kind in ("int", "var") or (kind == "op" and val == "("):
                p = mul(p, self.factor())
            else:
                return p

    def factor(self) -> Poly:
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.factor()
            return f if val == "+" else mul(const(-1), f)
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val in ("^", "**"):
            self.take()
            k, e, epos = self.take()
            if k != "int":
                raise ParseError("expected integer exponent", self.text, epos)
            out = const(1)
            for _ in range(e):
                out = mul(out, base)
            return out
        return base

    def atom(self) -> Poly:
        kind, val, pos = self.take()
        if kind == "int":
            return const(val)
        if kind == "var":
            return var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise ParseError("unexpected token", self.text, pos)


def parse_poly(text: str) -> Poly:
    return _Parser(text).parse()


def format_poly(p: Poly, names=("T0", "T1", "T2", "T3", "T4")) -> str:
    if not p:
        return "0"
    parts = []
    for m in sorted(p, reverse=True):
        c = p[m]
        mono = "*".join(
            f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(m) if e
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out
