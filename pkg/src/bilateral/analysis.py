"""Maximal formulas, segments and the rank of a deduction.

Four kinds of maximal formula are recognised, named after the rule that
concludes the occurrence and the rule that consumes it:

``ie``   introduction / major premise of an elimination
``re``   reductio / major premise of an elimination
``rnc``  reductio / premise of non-contradiction
``inc``  introduction / premise of non-contradiction whose other premise is
         also concluded by an introduction

A segment is a maximal chain of equal occurrences threaded through the minor
premises of ``+orE``/``-andE``; it is maximal when its last occurrence is the
major premise of an elimination or a premise of non-contradiction.  Maximal
segments sharing a last occurrence are grouped into one ``perm`` redex.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional

from .kernel import (
    RULES, SEGMENT_RULES, Hyp, Inf, is_intro, is_red, open_assumptions, walk,
)
from .syntax import BOT, degree, main_connective, subformulas


@dataclass(frozen=True)
class Segment:
    positions: tuple
    formula: object
    maximal: bool

    @property
    def length(self) -> int:
        return len(self.positions)

    @property
    def top(self):
        return self.positions[0]

    @property
    def bottom(self):
        return self.positions[-1]


@dataclass(frozen=True)
class Redex:
    kind: str
    position: tuple
    formula: object
    degree: int
    bumped: bool = False               # right nc premise beside a maximal left one
    consumer: Optional[str] = None     # rule applied to the occurrence
    segments: tuple = ()               # perm only: maximal segments ending here

    @property
    def effective_degree(self) -> int:
        return self.degree + (1 if self.bumped else 0)

    @property
    def level(self) -> tuple:
        """Sort key used by the rank: the bump breaks ties between equal
        degrees but never lifts a redex past the next degree."""
        return (self.degree, self.bumped)

    @property
    def connective(self):
        return main_connective(self.formula)

    @property
    def tops(self):
        if self.kind == "perm":
            return tuple(s.top for s in self.segments)
        return (self.position,)

    @property
    def weight(self) -> int:
        """Contribution to the second component of the rank."""
        if self.kind == "perm":
            return sum(s.length for s in self.segments)
        return 1

    def __str__(self):
        where = "/".join(map(str, self.position)) or "root"
        return f"{self.kind} at {where}: {self.formula} (degree {self.effective_degree})"


@functools.total_ordering
@dataclass(frozen=True)
class Rank:
    """``<d, l>``: the highest redex level and the weight of redexes on it.

    ``half`` marks a level made of bumped redexes; it sits between degree
    ``d`` and degree ``d + 1``.  ``zero`` is the rank of a normal deduction.
    """

    d: int = 0
    l: int = 0
    zero: bool = True
    half: bool = False

    def _key(self):
        return (-1, False, 0) if self.zero else (self.d, self.half, self.l)

    @property
    def degree(self):
        """``d`` as a number, with ``.5`` for a bumped level."""
        return self.d + 0.5 if self.half else self.d

    def __lt__(self, other):
        return self._key() < other._key()

    def __eq__(self, other):
        return isinstance(other, Rank) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return "0" if self.zero else f"<{self.degree}, {self.l}>"


ZERO = Rank()


@dataclass
class Analysis:
    """Everything the normaliser needs to know about one deduction."""

    deduction: object
    nodes: dict = field(default_factory=dict)       # path -> node
    post: dict = field(default_factory=dict)        # path -> post-order index
    sizes: dict = field(default_factory=dict)       # path -> subtree node count
    formulas: list = field(default_factory=list)    # ie/re/rnc/inc redexes
    segments: list = field(default_factory=list)
    perms: list = field(default_factory=list)

    @property
    def items(self):
        return self.formulas + self.perms

    @property
    def normal(self) -> bool:
        return not self.formulas and not self.perms

    def rank(self, literal: bool = False) -> Rank:
        items = self.items
        if not items:
            return ZERO
        if literal:
            d = max(r.effective_degree for r in items)
            return Rank(d, sum(r.weight for r in items), False)
        top = max(r.level for r in items)
        return Rank(top[0], sum(r.weight for r in items if r.level == top), False, top[1])


def _consumer_kind(nodes, path):
    """How the occurrence at ``path`` is used: "major", "minor", "nc" or None."""
    if not path:
        return None
    parent = nodes[path[:-1]]
    if parent.rule == "nc":
        return "nc"
    rule = RULES.get(parent.rule)
    if rule is not None and rule.kind == "elim":
        return "major" if path[-1] == 0 else "minor"
    return None


def _formula_kind(nodes, path):
    node = nodes[path]
    use = _consumer_kind(nodes, path)
    if use == "major":
        if is_intro(node):
            return "ie"
        if is_red(node):
            return "re"
    elif use == "nc":
        if is_red(node):
            return "rnc"
        sibling = nodes[path[:-1] + (1 - path[-1],)]
        if is_intro(node) and is_intro(sibling):
            return "inc"
    return None


def _nc_premise_maximal(nodes, path):
    """Is the non-contradiction premise at ``path`` a maximal formula or segment end?"""
    node = nodes[path]
    if is_red(node) or (isinstance(node, Inf) and node.rule in SEGMENT_RULES):
        return True
    sibling = nodes[path[:-1] + (1 - path[-1],)]
    return is_intro(node) and is_intro(sibling)


def bumped(nodes, path) -> bool:
    """Right premise of non-contradiction whose left premise is maximal too."""
    if not path or path[-1] != 1 or nodes[path[:-1]].rule != "nc":
        return False
    return _nc_premise_maximal(nodes, path[:-1] + (0,))


def scan(d) -> Analysis:
    a = Analysis(d)
    order = []
    stack = [((), d, False)]
    while stack:
        path, node, done = stack.pop()
        if done or isinstance(node, Hyp):
            a.nodes[path] = node
            a.post[path] = len(order)
            a.sizes[path] = 1 + sum(a.sizes[path + (k,)] for k in range(len(node.premises))) \
                if isinstance(node, Inf) else 1
            order.append(path)
            continue
        stack.append((path, node, True))
        for k in range(len(node.premises) - 1, -1, -1):
            stack.append((path + (k,), node.premises[k], False))
    nodes = a.nodes

    for path in order:
        kind = _formula_kind(nodes, path)
        if kind is None:
            continue
        node = nodes[path]
        a.formulas.append(Redex(kind, path, node.conclusion, degree(node.conclusion),
                                bumped(nodes, path), nodes[path[:-1]].rule))

    by_bottom = {}
    for path in order:
        if not path or path[-1] == 0:
            continue
        parent = nodes[path[:-1]]
        if parent.rule not in SEGMENT_RULES:
            continue
        node = nodes[path]
        if isinstance(node, Inf) and node.rule in SEGMENT_RULES:
            continue
        chain = [path]
        cur = path
        while cur and cur[-1] != 0 and nodes[cur[:-1]].rule in SEGMENT_RULES:
            cur = cur[:-1]
            chain.append(cur)
        use = _consumer_kind(nodes, cur)
        seg = Segment(tuple(chain), node.conclusion, use in ("major", "nc"))
        a.segments.append(seg)
        if seg.maximal:
            by_bottom.setdefault(cur, []).append(seg)

    for bottom in sorted(by_bottom, key=a.post.__getitem__):
        segs = by_bottom[bottom]
        a.perms.append(Redex("perm", bottom, segs[0].formula, degree(segs[0].formula),
                             bumped(nodes, bottom), nodes[bottom[:-1]].rule, tuple(segs)))
    return a


# ---------------------------------------------------------------------------
# public operations

def segments(d) -> list:
    return scan(d).segments


def maximal_occurrences(d) -> list:
    return scan(d).formulas


def maximal_segments(d) -> list:
    return [s for s in scan(d).segments if s.maximal]


def effective_degree(r: Redex, d=None) -> int:
    """Degree of the redex formula, plus one for a right non-contradiction
    premise whose left premise is maximal as well."""
    if d is None:
        return r.effective_degree
    return r.degree + (1 if bumped(scan(d).nodes, r.position) else 0)


def rank(d, literal: bool = False) -> Rank:
    """Rank of ``d``.

    The default counts, on the highest level only, maximal formulas plus the
    lengths of maximal segments, with the bump worth half a degree.  With
    ``literal`` the bump is a full degree and every redex is counted; that
    measure can stay level under reduction steps and is kept for comparison.
    """
    return scan(d).rank(literal)


def is_normal(d) -> bool:
    return scan(d).normal


def redundant_eliminations(d) -> list:
    """``+orE``/``-andE`` applications with an empty class in a minor premise."""
    out = []
    for path, node in walk(d):
        if isinstance(node, Inf) and node.rule in SEGMENT_RULES and len(node.premises) == 3 \
                and len(node.discharged) == 2:
            for k in (1, 2):
                label = node.discharged[k - 1]
                if not any(isinstance(n, Hyp) and n.label == label for _, n in walk(node.premises[k])):
                    out.append(Redex("simp", path, node.conclusion, degree(node.conclusion),
                                     False, node.rule))
                    break
    return out


@dataclass(frozen=True)
class SubformulaViolation:
    position: tuple
    formula: object

    def __str__(self):
        where = "/".join(map(str, self.position)) or "root"
        return f"at {where}: {self.formula} is not a subformula of the conclusion or open assumptions"


def subformula_report(d) -> list:
    """Occurrences whose body is outside the subformulas of the conclusion and
    the open assumptions (⊥ is exempt)."""
    allowed = set()
    if d.conclusion is not BOT:
        allowed |= subformulas(d.conclusion.body)
    for formula, _ in open_assumptions(d).values():
        if formula is not BOT:
            allowed |= subformulas(formula.body)
    out = []
    for path, node in walk(d):
        c = node.conclusion
        if c is not BOT and c.body not in allowed:
            out.append(SubformulaViolation(path, c))
    return out
