"""A small prefix grammar for counterexample functions g : N -> N.

::

    g ::= "const" K | "id" | "affine" A B | "comp" g g

``affine a b`` is ``n -> a*n + b`` and ``comp F G`` is ``n -> F(G(n))``.
All literals are natural numbers, so every expression denotes a
nondecreasing total function and carries a log2 growth bound.

Rational-valued overrides for u use a sibling grammar::

    u ::= "const" R | "monomial" C K        (C * eps**K)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from metastability.rates import FuncNN, affine_func, compose, const_func, identity_func


class GrammarError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Const:
    k: int

    def __str__(self):
        return f"const {self.k}"

    def __call__(self, n):
        return self.k


@dataclass(frozen=True)
class Id:
    def __str__(self):
        return "id"

    def __call__(self, n):
        return n


@dataclass(frozen=True)
class Affine:
    a: int
    b: int

    def __str__(self):
        return f"affine {self.a} {self.b}"

    def __call__(self, n):
        return self.a * n + self.b


@dataclass(frozen=True)
class Comp:
    outer: GExpr
    inner: GExpr

    def __str__(self):
        return f"comp {self.outer} {self.inner}"

    def __call__(self, n):
        return self.outer(self.inner(n))


GExpr = Union[Const, Id, Affine, Comp]

_TOKEN = re.compile(r"\S+")


def _tokens(text: str):
    return [(m.group(), m.start()) for m in _TOKEN.finditer(text)]


def _nat(tokens, i, text):
    if i >= len(tokens):
        raise GrammarError("expected a natural number literal, found end of input", len(text))
    tok, off = tokens[i]
    if not tok.isdigit():
        raise GrammarError(f"expected a natural number literal, found {tok!r}", off)
    return int(tok)


def _parse(tokens, i, text):
    if i >= len(tokens):
        raise GrammarError("expected one of 'const', 'id', 'affine', 'comp', found end of input",
                           len(text))
    tok, off = tokens[i]
    if tok == "const":
        return Const(_nat(tokens, i + 1, text)), i + 2
    if tok == "id":
        return Id(), i + 1
    if tok == "affine":
        return Affine(_nat(tokens, i + 1, text), _nat(tokens, i + 2, text)), i + 3
    if tok == "comp":
        outer, j = _parse(tokens, i + 1, text)
        inner, j = _parse(tokens, j, text)
        return Comp(outer, inner), j
    raise GrammarError(f"expected one of 'const', 'id', 'affine', 'comp', found {tok!r}", off)


def parse_g(text: str) -> GExpr:
    tokens = _tokens(text)
    expr, i = _parse(tokens, 0, text)
    if i != len(tokens):
        raise GrammarError(f"unexpected trailing token {tokens[i][0]!r}", tokens[i][1])
    return expr


def to_func(expr: GExpr) -> FuncNN:
    """The FuncNN denoted by an expression, with monotonicity and log2 bound attached."""
    if isinstance(expr, Const):
        return const_func(expr.k)
    if isinstance(expr, Id):
        return identity_func()
    if isinstance(expr, Affine):
        return affine_func(expr.a, expr.b)
    f = compose(to_func(expr.outer), to_func(expr.inner))
    f.name = str(expr)
    return f


def g_func(text: str) -> FuncNN:
    return to_func(parse_g(text))


def parse_rational(text) -> Fraction:
    """``"3"``, ``"1/2"`` or an existing number as an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?", str(text))
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError("zero denominator")
    return Fraction(int(m.group(1)), den)


@dataclass(frozen=True)
class UExpr:
    """``eps -> coefficient * eps**exponent``; ``const R`` has exponent 0."""

    coefficient: Fraction
    exponent: int = 0

    def __call__(self, eps) -> Fraction:
        return self.coefficient * Fraction(eps) ** self.exponent

    def __str__(self):
        if self.exponent == 0:
            return f"const {self.coefficient}"
        return f"monomial {self.coefficient} {self.exponent}"


def parse_u(text: str) -> UExpr:
    tokens = _tokens(text)
    if not tokens:
        raise GrammarError("expected 'const' or 'monomial', found end of input", 0)
    head, off = tokens[0]
    try:
        if head == "const" and len(tokens) == 2:
            c = parse_rational(tokens[1][0])
            if c <= 0:
                raise GrammarError("u must be positive", tokens[1][1])
            return UExpr(c)
        if head == "monomial" and len(tokens) == 3:
            c = parse_rational(tokens[1][0])
            if c <= 0:
                raise GrammarError("u must be positive", tokens[1][1])
            return UExpr(c, _nat(tokens, 2, text))
    except ValueError as exc:
        if isinstance(exc, GrammarError):
            raise
        raise GrammarError(str(exc), off) from None
    raise GrammarError("expected 'const R' or 'monomial C K'", off)
