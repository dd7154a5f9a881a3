"""Exact polynomial algebra over jet coordinates.

Expressions are immutable trees built from rational constants, named
parameters, jet coordinates, sums, products and integer powers.  The
canonical form produced by :func:`normalize` is a fully expanded
polynomial in the jet coordinates whose coefficients are Laurent
monomials in the parameters with rational factors.  Because this is a
canonical form, ``normalize(a - b)`` is the zero constant exactly when
``a`` and ``b`` are equal as polynomials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

from .errors import EquivalenceMismatchError, OrderOverflowError, UnsupportedExpressionError

MAX_ORDER = 2


@dataclass(frozen=True)
class IndepCoord:
    """Independent coordinate; index 0 is reserved for time."""

    name: str
    index: int

    @property
    def is_time(self) -> bool:
        return self.index == 0


@dataclass(frozen=True)
class DepCoord:
    """Dependent (field) coordinate."""

    name: str
    index: int


class Expression:
    """Base class for expression tree nodes.

    Python operators build raw trees; call :func:`normalize` to expand.
    """

    __slots__ = ()

    def __add__(self, other):
        return Add((self, as_expression(other)))

    def __radd__(self, other):
        return Add((as_expression(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Const(-1), as_expression(other)))))

    def __rsub__(self, other):
        return Add((as_expression(other), Mul((Const(-1), self))))

    def __neg__(self):
        return Mul((Const(-1), self))

    def __mul__(self, other):
        return Mul((self, as_expression(other)))

    def __rmul__(self, other):
        return Mul((as_expression(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(as_expression(other), -1)))

    def __rtruediv__(self, other):
        return Mul((as_expression(other), Pow(self, -1)))

    def __pow__(self, n):
        if isinstance(n, bool) or not isinstance(n, int):
            raise UnsupportedExpressionError(f"only integer powers are supported, got {n!r}")
        return Pow(self, n)

    def __str__(self) -> str:
        from .textio import to_text

        return to_text(self)


@dataclass(frozen=True, repr=False)
class Const(Expression):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, repr=False)
class Param(Expression):
    """Opaque nonzero symbolic parameter (density, stiffness, ...)."""

    name: str

    def __repr__(self):
        return f"Param({self.name!r})"


@dataclass(frozen=True, repr=False)
class JetCoordinate(Expression):
    """A dependent coordinate together with a derivative multi-index.

    ``multi_index`` is stored as a tuple of ``(IndepCoord, count)`` pairs
    sorted by coordinate index, so mixed partials are identified.
    """

    dep: DepCoord
    multi_index: tuple = ()

    def __post_init__(self):
        counts: dict[IndepCoord, int] = {}
        for coord, n in self.multi_index:
            if n < 0:
                raise ValueError("derivative counts must be non-negative")
            counts[coord] = counts.get(coord, 0) + n
        mi = tuple(sorted(((c, n) for c, n in counts.items() if n), key=lambda cn: (cn[0].index, cn[0].name)))
        if sum(n for _, n in mi) > MAX_ORDER:
            raise OrderOverflowError(
                f"jet of {self.dep.name} with order {sum(n for _, n in mi)} exceeds {MAX_ORDER}"
            )
        object.__setattr__(self, "multi_index", mi)

    @property
    def order(self) -> int:
        return sum(n for _, n in self.multi_index)

    def count(self, coord: IndepCoord) -> int:
        for c, n in self.multi_index:
            if c == coord:
                return n
        return 0

    def raised(self, coord: IndepCoord) -> "JetCoordinate":
        return JetCoordinate(self.dep, self.multi_index + ((coord, 1),))

    @property
    def label(self) -> str:
        if not self.multi_index:
            return self.dep.name
        return self.dep.name + "_" + "".join(c.name * n for c, n in self.multi_index)

    def __repr__(self):
        return f"Jet({self.label})"


@dataclass(frozen=True, repr=False)
class Add(Expression):
    args: tuple

    def __repr__(self):
        return f"Add{self.args!r}"


@dataclass(frozen=True, repr=False)
class Mul(Expression):
    args: tuple

    def __repr__(self):
        return f"Mul{self.args!r}"


@dataclass(frozen=True, repr=False)
class Pow(Expression):
    base: Expression
    exp: int

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exp})"


Symbol = Union[Param, JetCoordinate]
ExprLike = Union[Expression, int, Fraction]

ZERO = Const(0)
ONE = Const(1)


def jet(dep: DepCoord, *coords: IndepCoord) -> JetCoordinate:
    """``jet(w, X, Y)`` is the coordinate for the mixed derivative w_XY."""
    return JetCoordinate(dep, tuple((c, 1) for c in coords))


def as_expression(x) -> Expression:
    if isinstance(x, Expression):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(x, (int, Rational)):
        return Const(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


# ---------------------------------------------------------------------------
# polynomial kernel: {monomial: coefficient}, monomial = sorted ((symbol, exp), ...)


def symbol_key(s: Symbol) -> tuple:
    if isinstance(s, JetCoordinate):
        return (0, s.dep.index, s.dep.name, s.order, tuple((c.index, c.name, n) for c, n in s.multi_index))
    return (1, s.name)


def _mono(items: Iterable[tuple[Symbol, int]]) -> tuple:
    acc: dict = {}
    for s, e in items:
        acc[s] = acc.get(s, 0) + e
    return tuple(sorted(((s, e) for s, e in acc.items() if e), key=lambda se: symbol_key(se[0])))


def _poly_add(a: dict, b: dict, scale: Fraction = Fraction(1)) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono(m1 + m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _poly_pow(p: dict, n: int) -> dict:
    if n >= 0:
        out = {(): Fraction(1)}
        for _ in range(n):
            out = _poly_mul(out, p)
        return out
    if len(p) != 1:
        raise UnsupportedExpressionError("negative power of a non-monomial expression")
    (m, c), = p.items()
    for s, _ in m:
        if isinstance(s, JetCoordinate):
            raise UnsupportedExpressionError(f"negative power of jet coordinate {s.label}")
    return {tuple((s, e * n) for s, e in m): Fraction(c) ** n}


def to_poly(e: Expression) -> dict:
    """Expand ``e`` into its canonical coefficient dictionary."""
    if isinstance(e, Const):
        return {(): e.value} if e.value else {}
    if isinstance(e, (Param, JetCoordinate)):
        return {((e, 1),): Fraction(1)}
    if isinstance(e, Add):
        out: dict = {}
        for a in e.args:
            out = _poly_add(out, to_poly(a))
        return out
    if isinstance(e, Mul):
        out = {(): Fraction(1)}
        for a in e.args:
            out = _poly_mul(out, to_poly(a))
            if not out:
                return {}
        return out
    if isinstance(e, Pow):
        base = to_poly(e.base)
        if not base and e.exp < 0:
            raise UnsupportedExpressionError("division by zero")
        return _poly_pow(base, e.exp)
    raise UnsupportedExpressionError(f"unknown node {e!r}")


def _term_key(item) -> tuple:
    m, _ = item
    return tuple((symbol_key(s), e) for s, e in m)


def from_poly(p: Mapping) -> Expression:
    """Build the canonical tree for a coefficient dictionary."""
    terms = []
    for m, c in sorted(p.items(), key=_term_key):
        ordered = [se for se in m if isinstance(se[0], Param)] + [se for se in m if isinstance(se[0], JetCoordinate)]
        factors = [s if e == 1 else Pow(s, e) for s, e in ordered]
        if not factors:
            terms.append(Const(c))
        elif c == 1 and len(factors) == 1:
            terms.append(factors[0])
        elif c == 1:
            terms.append(Mul(tuple(factors)))
        else:
            terms.append(Mul((Const(c), *factors)))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


# ---------------------------------------------------------------------------
# public operations


def normalize(e: ExprLike) -> Expression:
    return from_poly(to_poly(as_expression(e)))


def is_zero(e: ExprLike) -> bool:
    return not to_poly(as_expression(e))


def symbols(e: Expression) -> set:
    """All parameter and jet leaves of ``e`` (unnormalized tree)."""
    if isinstance(e, (Param, JetCoordinate)):
        return {e}
    if isinstance(e, (Add, Mul)):
        out: set = set()
        for a in e.args:
            out |= symbols(a)
        return out
    if isinstance(e, Pow):
        return symbols(e.base)
    return set()


def jets(e: Expression) -> set:
    """Jet coordinates occurring in the normalized form of ``e``."""
    return {s for m in to_poly(e) for s, _ in m if isinstance(s, JetCoordinate)}


def params(e: Expression) -> set:
    return {s for m in to_poly(e) for s, _ in m if isinstance(s, Param)}


def jet_order(e: Expression) -> int:
    return max((j.order for j in jets(e)), default=0)


def partial_jet(e: ExprLike, v: Symbol) -> Expression:
    """Formal partial derivative; every distinct leaf is an independent symbol."""
    out: dict = {}
    for m, c in to_poly(as_expression(e)).items():
        for i, (s, k) in enumerate(m):
            if s == v:
                rest = m[:i] + ((s, k - 1),) + m[i + 1:]
                out = _poly_add(out, {_mono(rest): c * k})
    return from_poly(out)


def total_derivative(e: ExprLike, coord: IndepCoord) -> Expression:
    """Total derivative d_A: chain rule through every jet coordinate.

    Expressions carry no explicit dependence on the base coordinates, so the
    ``∂_A`` part of d_A vanishes.
    """
    out: dict = {}
    for m, c in to_poly(as_expression(e)).items():
        for i, (s, k) in enumerate(m):
            if not isinstance(s, JetCoordinate):
                continue
            rest = m[:i] + ((s, k - 1),) + m[i + 1:] + ((s.raised(coord), 1),)
            out = _poly_add(out, {_mono(rest): c * k})
    return from_poly(out)


def substitute(e: ExprLike, bindings: Mapping) -> Expression:
    """Simultaneous substitution of leaves, followed by normalization."""
    bindings = {k: as_expression(v) for k, v in bindings.items()}

    def walk(node):
        if node in bindings:
            return bindings[node]
        if isinstance(node, Add):
            return Add(tuple(walk(a) for a in node.args))
        if isinstance(node, Mul):
            return Mul(tuple(walk(a) for a in node.args))
        if isinstance(node, Pow):
            return Pow(walk(node.base), node.exp)
        return node

    return normalize(walk(as_expression(e)))


def jet_coefficient(e: ExprLike, monomial: Mapping[JetCoordinate, int]) -> Expression:
    """Parameter-valued coefficient of a jet monomial in the expanded form."""
    target = _mono(monomial.items())
    out: dict = {}
    for m, c in to_poly(as_expression(e)).items():
        jet_part = tuple((s, k) for s, k in m if isinstance(s, JetCoordinate))
        if jet_part == target:
            out = _poly_add(out, {tuple((s, k) for s, k in m if isinstance(s, Param)): c})
    return from_poly(out)


def evaluate(e: ExprLike, env: Mapping, exact: bool | None = None):
    """Evaluate the tree with leaves looked up in ``env``.

    Works leaf-by-leaf on the given (possibly unnormalized) tree, so it is
    independent of the normalization code.  Values may be Fractions (exact
    mode), floats or numpy arrays.
    """
    if exact is None:
        exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in env.values())

    def walk(node):
        if isinstance(node, Const):
            return node.value if exact else float(node.value)
        if isinstance(node, (Param, JetCoordinate)):
            try:
                return env[node]
            except KeyError:
                raise KeyError(f"no value for {node!r}") from None
        if isinstance(node, Add):
            total = 0
            for a in node.args:
                total = total + walk(a)
            return total
        if isinstance(node, Mul):
            total = 1
            for a in node.args:
                total = total * walk(a)
            return total
        if isinstance(node, Pow):
            base = walk(node.base)
            if node.exp >= 0:
                return base ** node.exp
            return 1 / base ** (-node.exp) if exact else base ** float(node.exp)
        raise TypeError(f"unknown node {node!r}")

    return walk(as_expression(e))


def random_rational_point(leaves: Iterable, rng: random.Random) -> dict:
    point = {}
    for s in sorted(leaves, key=symbol_key):
        num = rng.randint(1, 97) * rng.choice((-1, 1))
        point[s] = Fraction(num, rng.randint(1, 29))
    return point


def equivalent(a: ExprLike, b: ExprLike, points: int = 8, seed: int = 20240617) -> bool:
    """Polynomial identity test with a random-evaluation cross-check.

    The symbolic answer is ``normalize(a - b) == 0``.  Both inputs are also
    evaluated, unexpanded, at ``points`` pseudo-random rational points; a
    disagreement between the two methods raises
    :class:`EquivalenceMismatchError`.
    """
    a, b = as_expression(a), as_expression(b)
    symbolic = is_zero(a - b)
    rng = random.Random(seed)
    leaves = symbols(a) | symbols(b)
    numeric = True
    for _ in range(points):
        pt = random_rational_point(leaves, rng)
        if evaluate(a, pt, exact=True) != evaluate(b, pt, exact=True):
            numeric = False
            break
    if symbolic != numeric:
        raise EquivalenceMismatchError(
            f"symbolic test says {symbolic}, random evaluation says {numeric} for {a} vs {b}"
        )
    return symbolic
