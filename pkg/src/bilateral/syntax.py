"""Unsigned formulas, signed formulas and the absurdity constant.

Formulas are immutable and compare structurally.  A signed formula is an
asserted (``+``) or denied (``-``) formula; ``BOT`` is the incoherence marker
that may stand where a signed formula stands as the conclusion of a rule.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

CONNECTIVES = {"and": 2, "or": 2, "imp": 2, "not": 1, "tonk": 2, "conk": 2, "honk": 2}
SIGNS = ("+", "-")

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_SYMBOLS = {"and": "∧", "or": "∨", "imp": "⊃", "tonk": " tonk ", "conk": " conk ", "honk": " honk "}


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.match(self.name):
            raise ValueError(f"bad atom name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compound:
    connective: str
    operands: tuple

    def __post_init__(self):
        arity = CONNECTIVES.get(self.connective)
        if arity is None:
            raise ValueError(f"unknown connective {self.connective!r}")
        if not isinstance(self.operands, tuple):
            object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) != arity:
            raise ValueError(f"{self.connective} takes {arity} operand(s), got {len(self.operands)}")

    def __str__(self):
        if self.connective == "not":
            return f"¬{_wrap(self.operands[0])}"
        left, right = self.operands
        return f"{_wrap(left)}{_SYMBOLS[self.connective]}{_wrap(right)}"


Formula = Union[Atom, Compound]


def _wrap(f):
    if isinstance(f, Compound) and f.connective != "not":
        return f"({f})"
    return str(f)


@dataclass(frozen=True)
class SignedFormula:
    sign: str
    body: Formula

    def __post_init__(self):
        if self.sign not in SIGNS:
            raise ValueError(f"bad sign {self.sign!r}")

    def __str__(self):
        return f"{self.sign} {self.body}"


class Absurdity:
    """The conclusion ⊥.  There is exactly one instance, ``BOT``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __str__(self):
        return "⊥"

    def __reduce__(self):
        return (Absurdity, ())


BOT = Absurdity()

Conclusion = Union[SignedFormula, Absurdity]


# constructors used throughout the package and the tests

def atom(name):
    return Atom(name)


def conj(a, b):
    return Compound("and", (a, b))


def disj(a, b):
    return Compound("or", (a, b))


def imp(a, b):
    return Compound("imp", (a, b))


def neg(a):
    return Compound("not", (a,))


def plus(f):
    return SignedFormula("+", f)


def minus(f):
    return SignedFormula("-", f)


def star(alpha: SignedFormula) -> SignedFormula:
    """Reverse the sign of ``alpha``."""
    return SignedFormula("-" if alpha.sign == "+" else "+", alpha.body)


def formula_degree(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    return 1 + sum(formula_degree(g) for g in f.operands)


def degree(c: Conclusion) -> int:
    """Number of connectives in the body of ``c``; ⊥ has degree 0."""
    if c is BOT:
        return 0
    if isinstance(c, SignedFormula):
        return formula_degree(c.body)
    return formula_degree(c)


def subformulas(f: Formula) -> set:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, Compound):
            stack.extend(g.operands)
    return out


def connectives_of(f: Formula) -> set:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Compound):
            out.add(g.connective)
            stack.extend(g.operands)
    return out


def is_atomic(c: Conclusion) -> bool:
    return isinstance(c, SignedFormula) and isinstance(c.body, Atom)


def main_connective(c: Conclusion):
    if isinstance(c, SignedFormula) and isinstance(c.body, Compound):
        return c.body.connective
    return None
