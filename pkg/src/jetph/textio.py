"""Infix text form of expressions.

Grammar (``^`` or ``**`` for integer powers)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') ['-'] INT)?
    atom   := NUMBER | IDENT | '(' expr ')'

Identifiers naming a dependent variable, optionally followed by ``_`` and
derivative letters (``w_tXY``, letters in any order), are jet coordinates;
every other identifier is a parameter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import OrderOverflowError, ParseError
from .symbolic import (
    Add,
    Const,
    DepCoord,
    Expression,
    IndepCoord,
    JetCoordinate,
    Mul,
    Param,
    Pow,
    normalize,
)


@dataclass(frozen=True)
class Chart:
    """Independent and dependent coordinates of a bundle chart."""

    indep: tuple
    deps: tuple

    def __post_init__(self):
        object.__setattr__(self, "indep", tuple(self.indep))
        object.__setattr__(self, "deps", tuple(self.deps))
        if len({c.index for c in self.indep}) != len(self.indep):
            raise ValueError("independent coordinate indices must be unique")
        if len({c.name for c in self.indep}) != len(self.indep):
            raise ValueError("independent coordinate names must be unique")
        if len({d.name for d in self.deps}) != len(self.deps):
            raise ValueError("dependent coordinate names must be unique")
        for c in self.indep:
            if len(c.name) != 1:
                raise ValueError(f"independent coordinate names must be single letters, got {c.name!r}")

    @classmethod
    def from_names(cls, indep: Sequence[str], deps: Sequence[str], time: bool = True) -> "Chart":
        start = 0 if time else 1
        return cls(
            tuple(IndepCoord(n, i + start) for i, n in enumerate(indep)),
            tuple(DepCoord(n, i) for i, n in enumerate(deps)),
        )

    @property
    def time(self) -> IndepCoord | None:
        for c in self.indep:
            if c.is_time:
                return c
        return None

    @property
    def spatial(self) -> tuple:
        return tuple(c for c in self.indep if not c.is_time)

    def dep(self, name: str) -> DepCoord:
        for d in self.deps:
            if d.name == name:
                return d
        raise KeyError(name)

    def coord(self, name: str) -> IndepCoord:
        for c in self.indep:
            if c.name == name:
                return c
        raise KeyError(name)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


def resolve_identifier(name: str, chart: Chart) -> Expression:
    by_name = {d.name: d for d in chart.deps}
    if name in by_name:
        return JetCoordinate(by_name[name])
    letters = {c.name: c for c in chart.indep}
    best = None
    for dname, dep in by_name.items():
        prefix = dname + "_"
        if name.startswith(prefix) and len(name) > len(prefix):
            tail = name[len(prefix):]
            if all(ch in letters for ch in tail) and (best is None or len(dname) > len(best[0].name)):
                best = (dep, tail)
    if best is not None:
        dep, tail = best
        try:
            return JetCoordinate(dep, tuple((letters[ch], 1) for ch in tail))
        except OrderOverflowError as exc:
            raise ParseError(str(exc)) from None
    return Param(name)


class _Parser:
    def __init__(self, tokens, chart):
        self.toks = tokens
        self.i = 0
        self.chart = chart

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'}, found {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = node * rhs if op == "*" else node / rhs
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError(f"exponent must be an integer, got {val!r}")
            return Pow(base, sign * int(val))
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(val))
        if kind == "ident":
            self.take()
            return resolve_identifier(val, self.chart)
        if val == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected token {val!r}")


def parse_raw(text: str, chart: Chart) -> Expression:
    """Parse to an unnormalized tree."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression")
    p = _Parser(toks, chart)
    node = p.expr()
    if p.i != len(toks):
        raise ParseError(f"trailing input at token {toks[p.i][1]!r}")
    return node


def parse(text: str, chart: Chart) -> Expression:
    """Parse and normalize; ``parse(to_text(n), chart) == n`` for normalized ``n``."""
    return normalize(parse_raw(text, chart))


# ---------------------------------------------------------------------------
# printing


def _const_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _atom_text(e: Expression) -> str:
    """Text for ``e`` in a position binding tighter than ``*``."""
    if isinstance(e, (Param, JetCoordinate)):
        return to_text(e)
    if isinstance(e, Const) and e.value >= 0 and e.value.denominator == 1:
        return _const_text(e.value)
    return f"({to_text(e)})"


def _factor_text(e: Expression, first: bool) -> str:
    if isinstance(e, Const):
        if first or (e.value >= 0):
            return _const_text(e.value) if first or e.value.denominator == 1 else f"({_const_text(e.value)})"
        return f"({_const_text(e.value)})"
    if isinstance(e, Pow):
        return f"{_atom_text(e.base)}^{e.exp}"
    if isinstance(e, Add):
        return f"({to_text(e)})"
    if isinstance(e, Mul) and not first:
        return f"({to_text(e)})"
    return to_text(e)


def _negated(term: Expression):
    """Return the positive counterpart of ``term`` if it carries a leading negative constant."""
    if isinstance(term, Const) and term.value < 0:
        return Const(-term.value)
    if isinstance(term, Mul) and term.args and isinstance(term.args[0], Const) and term.args[0].value < 0:
        c = -term.args[0].value
        rest = term.args[1:]
        if c == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((Const(c), *rest))
    return None


def to_text(e: Expression) -> str:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, JetCoordinate):
        return e.label
    if isinstance(e, Pow):
        return f"{_atom_text(e.base)}^{e.exp}"
    if isinstance(e, Mul):
        neg = _negated(e)
        if neg is not None:
            body = to_text(neg)
            return f"-{body}" if not isinstance(neg, Add) else f"-({body})"
        parts = [_factor_text(a, i == 0) for i, a in enumerate(e.args)]
        return "*".join(parts)
    if isinstance(e, Add):
        out = []
        for i, term in enumerate(e.args):
            neg = _negated(term)
            body = to_text(neg if neg is not None else term)
            if isinstance(neg if neg is not None else term, Add):
                body = f"({body})"
            if i == 0:
                out.append(("-" + body) if neg is not None else body)
            else:
                out.append((" - " if neg is not None else " + ") + body)
        return "".join(out)
    raise TypeError(f"cannot print {e!r}")
