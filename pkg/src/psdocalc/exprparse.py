"""Expression grammar for the command-line surface.

    expr   := term (('+'|'-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | factor
    factor := atom ('^' int)?
    atom   := int | int '/' int | 'd'i | 'z'i | 's'i | 'sp'i | ident
            | ident '_{' suffix '}' | tvar | '(' expr ')' ['+'|'-']
    tvar   := 't[' int (',' int)* ']'
    suffix := ('x' | 'y' | tvar)+

A trailing '+' or '-' after a parenthesized expression selects the plus or
minus part of an operator; it is read as a split marker only when the next
token cannot start a summand.  Atoms evaluate to exact rationals, jet
polynomials, time polynomials, operators, or z/s-series, with rationals
promoting into any of the other domains.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from . import multiindex as mi
from .diffpoly import DiffPoly, TimePolynomial, jet
from .errors import ParseError, PsdoCalcError, WindowError
from .psdop import PsdOp
from .wave import LaurentSeries

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()\[\]{},_]))"
)


class Token(NamedTuple):
    kind: str
    value: str
    pos: int


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
        if m.group("int") is not None:
            tokens.append(Token("int", m.group("int"), m.start("int")))
        elif m.group("ident") is not None:
            tokens.append(Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


_VAR_RE = re.compile(r"^(d|z|sp|s)(\d+)$")


class Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self):
        t = self.tokens[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def expect(self, value):
        t = self.next()
        if t.value != value:
            raise ParseError(f"expected {value!r}, found {t.value or 'end of input'!r}", t.pos)
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected trailing input {t.value!r}", t.pos)
        return e

    def expr(self):
        node = self.term()
        while self.peek().value in ("+", "-") and not self._is_split_marker():
            op = self.next().value
            rhs = self.term()
            node = (("add" if op == "+" else "sub"), node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().value == "*":
            self.next()
            node = ("mul", node, self.unary())
        return node

    def unary(self):
        if self.peek().value == "-":
            t = self.next()
            return ("neg", self.unary())
        return self.factor()

    def factor(self):
        node = self.atom()
        if self.peek().value == "^":
            self.next()
            node = ("pow", node, self._signed_int())
        return node

    def _signed_int(self):
        sign = 1
        if self.peek().value == "-":
            self.next()
            sign = -1
        t = self.next()
        if t.kind != "int":
            raise ParseError(f"expected an integer exponent, found {t.value!r}", t.pos)
        return sign * int(t.value)

    def _is_split_marker(self):
        # '+'/'-' right after ')' acts as a split only when nothing that
        # could start a summand follows
        if self.i == 0 or self.tokens[self.i - 1].value != ")":
            return False
        nxt = self.peek(1)
        return nxt.kind == "end" or nxt.value in (")", "*", "^")

    def atom(self):
        t = self.next()
        if t.kind == "int":
            if self.peek().value == "/":
                self.next()
                d = self.next()
                if d.kind != "int":
                    raise ParseError("expected a denominator", d.pos)
                return ("rat", Fraction(int(t.value), int(d.value)))
            return ("rat", Fraction(int(t.value)))
        if t.value == "(":
            node = self.expr()
            self.expect(")")
            if self.peek().value in ("+", "-") and self._is_split_marker():
                mark = self.next().value
                return ("split", node, mark)
            return node
        if t.kind == "ident":
            if t.value == "t" and self.peek().value == "[":
                return ("tvar", self._bracket_index())
            m = _VAR_RE.match(t.value)
            if m and m.group(1) in ("d", "z", "s", "sp"):
                return (m.group(1), int(m.group(2)))
            if self.peek().value == "_":
                self.next()
                self.expect("{")
                profile = self._suffix()
                self.expect("}")
                return ("jet", t.value, profile)
            return ("sym", t.value)
        raise ParseError(f"unexpected token {t.value or 'end of input'!r}", t.pos)

    def _bracket_index(self):
        self.expect("[")
        parts = [self._signed_int()]
        while self.peek().value == ",":
            self.next()
            parts.append(self._signed_int())
        self.expect("]")
        return tuple(parts)

    def _suffix(self):
        entries = []
        while self.peek().value != "}":
            t = self.next()
            if t.kind != "ident":
                raise ParseError(f"unexpected {t.value!r} in derivative suffix", t.pos)
            name = t.value
            if self.peek().value == "[":
                # letters followed by a bracketed time index: the final 't'
                # opens the index, preceding letters are axis aliases
                if not name.endswith("t"):
                    raise ParseError(f"unexpected {name!r} before '[' in suffix", t.pos)
                for ch in name[:-1]:
                    entries.append(ch)
                entries.append(("tvar", self._bracket_index()))
            else:
                for ch in name:
                    entries.append(ch)
        return entries


def parse(text):
    """Parse an expression into a tree of tuples."""
    return Parser(text).parse()


class EvalContext(NamedTuple):
    n: int
    window: tuple = None
    degree: int = 6
    definitions: dict = None
    alphabet: tuple = None


def _axis_direction(ch, n):
    if ch == "x":
        return mi.unit(n, 0)
    if ch == "y":
        if n < 2:
            raise PsdoCalcError("alias 'y' needs dimension >= 2")
        return mi.unit(n, 1)
    raise PsdoCalcError(f"unknown derivative alias {ch!r} (use x, y, or t[...])")


_LEVEL = {Fraction: 0, DiffPoly: 1, TimePolynomial: 1, PsdOp: 2, LaurentSeries: 2}


def _promote_pair(u, v, ctx):
    lu, lv = _LEVEL[type(u)], _LEVEL[type(v)]
    if lu == lv and type(u) is not type(v) and not (lu == 0):
        raise PsdoCalcError(
            f"cannot combine {type(u).__name__} with {type(v).__name__}"
        )
    if lu < lv:
        u = _lift(u, type(v), ctx, like=v)
    elif lv < lu:
        v = _lift(v, type(u), ctx, like=u)
    return u, v


def _lift(value, target, ctx, like=None):
    if isinstance(value, target):
        return value
    if target is DiffPoly:
        if isinstance(value, Fraction):
            return DiffPoly.constant(value)
    if target is TimePolynomial:
        if isinstance(value, Fraction):
            return TimePolynomial.constant(value)
    if target is PsdOp:
        if isinstance(value, Fraction):
            value = DiffPoly.constant(value)
        if isinstance(value, DiffPoly):
            return PsdOp(ctx.n, {mi.zero(ctx.n): value})
    if target is LaurentSeries:
        if isinstance(value, (Fraction, DiffPoly, TimePolynomial)):
            groups = like.groups if like is not None else ("z",)
            return LaurentSeries.constant(ctx.n, value, groups)
    raise PsdoCalcError(f"cannot use a {type(value).__name__} where a {target.__name__} is needed")


def evaluate(node, ctx):
    """Evaluate a parse tree to an engine value."""
    kind = node[0]
    if kind == "rat":
        return node[1]
    if kind == "sym":
        name = node[1]
        defs = ctx.definitions or {}
        if name in defs:
            return defs[name]
        if ctx.alphabet is not None and name not in ctx.alphabet:
            raise PsdoCalcError(f"undeclared symbol {name!r} (declared: {', '.join(ctx.alphabet)})")
        return DiffPoly.sym(name)
    if kind == "jet":
        _, name, suffix = node
        if ctx.alphabet is not None and name not in ctx.alphabet:
            raise PsdoCalcError(f"undeclared symbol {name!r}")
        profile = {}
        for entry in suffix:
            if isinstance(entry, str):
                d = _axis_direction(entry, ctx.n)
            else:
                d = tuple(entry[1])
                mi.check_dim(d, ctx.n)
                if not mi.in_zplus(d):
                    raise PsdoCalcError(f"derivative direction {d} is not in the positive cone")
            profile[d] = profile.get(d, 0) + 1
        return DiffPoly.from_jet(jet(name, profile))
    if kind == "tvar":
        d = tuple(node[1])
        mi.check_dim(d, ctx.n)
        return TimePolynomial.var(d)
    if kind == "d":
        i = node[1]
        if not 1 <= i <= ctx.n:
            raise PsdoCalcError(f"d{i} out of range for dimension {ctx.n}")
        return PsdOp.d(ctx.n, i - 1)
    if kind in ("z", "s", "sp"):
        i = node[1]
        if not 1 <= i <= ctx.n:
            raise PsdoCalcError(f"{kind}{i} out of range for dimension {ctx.n}")
        return LaurentSeries.var(ctx.n, kind, i - 1)
    if kind == "neg":
        return -evaluate(node[1], ctx)
    if kind in ("add", "sub"):
        u, v = _promote_pair(evaluate(node[1], ctx), evaluate(node[2], ctx), ctx)
        return u + v if kind == "add" else u - v
    if kind == "mul":
        return _mul(evaluate(node[1], ctx), evaluate(node[2], ctx), ctx)
    if kind == "pow":
        return _pow(evaluate(node[1], ctx), node[2], ctx)
    if kind == "split":
        v = evaluate(node[1], ctx)
        if not isinstance(v, PsdOp):
            raise PsdoCalcError("split markers apply to operators only")
        return v.plus() if node[2] == "+" else v.minus()
    raise PsdoCalcError(f"unknown node {kind!r}")


def _mul(u, v, ctx):
    if isinstance(u, PsdOp) or isinstance(v, PsdOp):
        u, v = _promote_pair(u, v, ctx)
        # exact products stay exact; fall back to the session window only
        # when the Leibniz sum needs a truncation to terminate
        try:
            return u.mul(v)
        except WindowError:
            if ctx.window is None:
                raise
            return u.mul(v, window=ctx.window)
    if isinstance(u, LaurentSeries) or isinstance(v, LaurentSeries):
        u, v = _promote_pair(u, v, ctx)
        return u.mul(v)
    u, v = _promote_pair(u, v, ctx)
    return u * v


def _pow(u, k, ctx):
    if isinstance(u, Fraction):
        return u**k
    if k >= 0:
        out = _lift(Fraction(1), type(u), ctx, like=u)
        for _ in range(k):
            out = _mul(out, u, ctx)
        return out
    if isinstance(u, (PsdOp, LaurentSeries)):
        terms = u.terms
        if len(terms) == 1:
            ((key, coeff),) = terms.items()
            unit = coeff == Fraction(1) if isinstance(coeff, Fraction) else (
                coeff.is_constant() and coeff.constant_value() == 1
            )
            if unit:
                if isinstance(u, PsdOp):
                    return PsdOp.monomial(u.n, tuple(c * k for c in key), 1, u.window)
                nk = tuple(tuple(c * k for c in e) for e in key)
                return LaurentSeries(u.n, u.groups, {nk: Fraction(1)}, u.trunc)
        if isinstance(u, PsdOp):
            inv = u.inverse(window=ctx.window)
            out = inv
            for _ in range(-k - 1):
                out = out.mul(inv, window=ctx.window)
            return out
    raise PsdoCalcError(f"cannot raise this {type(u).__name__} to a negative power")


def parse_value(text, ctx):
    return evaluate(parse(text), ctx)
