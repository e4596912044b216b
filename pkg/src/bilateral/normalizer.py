"""Reduction steps, redex selection and the normalisation loop.

Every step works on the subtree rooted at the rule that consumes the redex
formula and returns a replacement for it.  Fresh class labels come from a
:class:`~bilateral.kernel.LabelSupply` owned by the session, so copies made
during one run never share a discharged class.

Some steps create new redexes of the same degree right where the old one was
(a rebuilt hypothesis that is now an introduction feeding an elimination, a
copied non-contradiction whose premises are both introductions, ...).  These
are reduced on the spot as part of the step; see :func:`_settle`.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

from .analysis import Rank, Redex, scan
from .kernel import (
    B, BASE_CONNECTIVES, RULES, SEGMENT_RULES, Hyp, Inf, KernelError, LabelSupply,
    SystemConfig, check, discharged_within, hypothesis_positions, is_intro, is_red,
    is_segment_rule, plug, relabel, replace, subtree, substitute_hypotheses, walk,
)
from .syntax import BOT, Compound, SignedFormula, connectives_of, star

EXPLOSIVE = frozenset({"tonk", "conk", "honk"})


class Stuck(Exception):
    """A redex has no reduction step (``tonk`` detours, ``conk``/``honk``/``tonk``
    reductio detours)."""

    def __init__(self, redexes):
        self.redexes = list(redexes)
        super().__init__("; ".join(describe_stuck(r) for r in self.redexes))


class InvariantError(RuntimeError):
    """A step failed to decrease the rank, or produced an ill-formed deduction."""


def describe_stuck(r: Redex) -> str:
    where = "/".join(map(str, r.position)) or "root"
    return f"{r.kind} redex on {r.connective} has no reduction step (at {where}: {r.formula})"


@dataclass(frozen=True)
class StepRecord:
    index: int
    kind: str
    subcase: str
    position: tuple
    rank_before: Rank
    rank_after: Rank


@dataclass
class Trace:
    steps: list = field(default_factory=list)
    outcome: str = "normal"
    stuck: list = field(default_factory=list)


class _Session:
    def __init__(self, supply: LabelSupply):
        self.supply = supply

    def fresh(self) -> int:
        return self.supply.fresh()

    def copy(self, d, mapping=None):
        """Copy with every class discharged inside ``d`` renamed apart."""
        m = {x: self.fresh() for x in sorted(discharged_within(d))}
        if mapping:
            m.update(mapping)
        return relabel(d, m)

    def sub(self, d, label, replacement):
        return substitute_hypotheses(d, label, replacement, self.supply)


# ---------------------------------------------------------------------------
# small builders

def _nc(left, right):
    return Inf("nc", BOT, (), (left, right))


def _red(label, body, conclusion):
    return Inf("red", conclusion, (label,), (body,))


def _parent_positions(seams):
    """Distinct parents of ``seams``, deepest first so that rewriting one never
    moves another."""
    return sorted({s[:-1] for s in seams if s}, key=len, reverse=True)


def _maximal_premise(p, other) -> bool:
    return is_red(p) or is_segment_rule(p) or (is_intro(p) and is_intro(other))


def _clash(n, s):
    """Reduce the right premise of non-contradiction ``n`` when both premises
    are maximal, which is exactly when the right one outranks the left."""
    left, right = n.premises
    if not _maximal_premise(left, right):
        return n
    if is_intro(left) and is_intro(right):
        return _reduce_inc(n, s)[0]
    if is_red(right):
        return _reduce_rnc(n, 1, s)[0]
    if is_segment_rule(right):
        return _permute(n, 1, s)[0]
    return n


def _settle(d, seams, s):
    """Reduce the redexes a substitution created right below ``seams`` whose
    degree matches the one just removed."""
    for p in _parent_positions(seams):
        node = subtree(d, p)
        if node.rule == "nc":
            d = replace(d, p, _clash(node, s))
        elif RULES[node.rule].kind == "elim" and is_intro(node.premises[0]) \
                and node.rule != "tonkE" and p + (0,) in seams:
            d = replace(d, p, _reduce_ie(node, s)[0])
    return d


# ---------------------------------------------------------------------------
# introduction / elimination

def _reduce_ie(e, s):
    intro = e.premises[0]
    conn = RULES[e.rule].connective
    if e.rule == "tonkE":
        raise KernelError("tonk detours have no reduction step")
    if e.rule == "+impE":
        return s.sub(intro.premises[0], intro.discharged[0], e.premises[1]), "ie-imp"
    if e.rule in SEGMENT_RULES:
        k = 1 if intro.rule.endswith("1") else 2
        return s.sub(e.premises[k], e.discharged[k - 1], intro.premises[0]), f"ie-{conn}"
    k = 1 if e.rule.endswith("E2") else 0
    return intro.premises[k], f"ie-{conn}"


def reduce_ie(d, r: Redex, supply: Optional[LabelSupply] = None):
    s = _Session(supply or LabelSupply.above(d))
    e = r.position[:-1]
    new, _ = _reduce_ie(subtree(d, e), s)
    return replace(d, e, new)


# ---------------------------------------------------------------------------
# non-contradiction over two introductions

def _reduce_inc(n, s):
    left, right = n.premises
    pos, neg = (left, right) if left.conclusion.sign == "+" else (right, left)
    conn = pos.conclusion.body.connective
    if conn == "imp":
        x = s.sub(pos.premises[0], pos.discharged[0], neg.premises[0])
        y = neg.premises[1]
    elif conn == "and":
        x = pos.premises[0 if neg.rule == "-andI1" else 1]
        y = neg.premises[0]
    elif conn == "or":
        x = pos.premises[0]
        y = neg.premises[0 if pos.rule == "+orI1" else 1]
    elif conn == "not":
        x, y = pos.premises[0], neg.premises[0]
    elif conn in ("conk", "honk"):
        # clash on the first component, which both introductions derive first
        x, y = pos.premises[0], neg.premises[0]
    else:
        raise KernelError(f"no introduction clash step for {conn}")
    a, b = (x, y) if x.conclusion.sign == left.conclusion.sign else (y, x)
    new = _nc(a, b)
    if is_intro(a) and is_intro(b):
        new, _ = _reduce_inc(new, s)
    return new, f"inc-{conn}"


def reduce_inc(d, r: Redex, supply: Optional[LabelSupply] = None):
    s = _Session(supply or LabelSupply.above(d))
    n = r.position[:-1]
    return replace(d, n, _reduce_inc(subtree(d, n), s)[0])


# ---------------------------------------------------------------------------
# reductio over non-contradiction

def _reduce_rnc(n, k, s):
    red = n.premises[k]
    other = n.premises[1 - k]
    label, body = red.discharged[0], red.premises[0]
    seams = hypothesis_positions(body, label)
    at_nc = any(subtree(body, p[:-1]).rule == "nc" for p in seams)
    new = _settle(s.sub(body, label, other), seams, s)
    return new, "rnc-2" if at_nc else "rnc-1"


def reduce_rnc(d, r: Redex, supply: Optional[LabelSupply] = None):
    s = _Session(supply or LabelSupply.above(d))
    n = r.position[:-1]
    return replace(d, n, _reduce_rnc(subtree(d, n), r.position[-1], s)[0])


# ---------------------------------------------------------------------------
# reductio over elimination

# rules re-deriving the assumption of a reductio from the new hypothesis
_REBUILD = {
    "+andE1": "-andI1", "+andE2": "-andI2",
    "-orE1": "+orI1", "-orE2": "+orI2",
    "+notE": "-notI", "-notE": "+notI",
}
_SUBCASE = {
    "+andE1": "re-and", "+andE2": "re-and", "-orE1": "re-or", "-orE2": "re-or",
    "+notE": "re-not", "-notE": "re-not", "+impE": "re-imp-i", "-impE2": "re-imp-ii",
    "-impE1": "re-imp-iii", "+orE": "re-or", "-andE": "re-and",
}


def _cap(p, c, phi, s):
    """A deduction of ⊥ from ``p : phi`` and the class ``c`` of ``phi*``.

    A reductio at the end of ``p`` already has the ⊥ we need, so its class is
    merged into ``c``; a segment rule at the end of ``p`` gets the cap pushed
    into both of its minor premises."""
    if is_red(p):
        return relabel(p.premises[0], {p.discharged[0]: c})
    if is_segment_rule(p):
        return Inf(p.rule, BOT, p.discharged,
                   (p.premises[0], _cap(p.premises[1], c, phi, s), _cap(p.premises[2], c, phi, s)))
    return _nc(p, Hyp(c, star(phi)))


def _reduce_re(e, s):
    red = e.premises[0]
    alpha = red.conclusion
    label, body = red.discharged[0], red.premises[0]
    rule = e.rule
    seams = hypothesis_positions(body, label)
    beta = e.conclusion
    a_star = star(alpha)

    if rule in SEGMENT_RULES:
        left, right = alpha.body.operands
        p1, p2 = e.premises[1], e.premises[2]
        i1, i2 = e.discharged
        sign = "-" if alpha.sign == "+" else "+"
        intro = "-orI" if rule == "+orE" else "+andI"
        if beta is BOT:
            def rebuild():
                a, b = s.fresh(), s.fresh()
                return Inf(intro, a_star, (), (
                    _red(a, s.copy(p1, {i1: a}), SignedFormula(sign, left)),
                    _red(b, s.copy(p2, {i2: b}), SignedFormula(sign, right))))
            return _settle(plug(body, seams, rebuild), seams, s), _SUBCASE[rule] + "-bot"
        c = s.fresh()

        def rebuild():
            a, b = s.fresh(), s.fresh()
            return Inf(intro, a_star, (), (
                _red(a, _cap(s.copy(p1, {i1: a}), c, beta, s), SignedFormula(sign, left)),
                _red(b, _cap(s.copy(p2, {i2: b}), c, beta, s), SignedFormula(sign, right))))
        new = _settle(plug(body, seams, rebuild), seams, s)
        return _red(c, new, beta), _SUBCASE[rule]

    n = s.fresh()
    hyp = Hyp(n, star(beta))
    if rule in _REBUILD:
        def rebuild():
            return Inf(_REBUILD[rule], a_star, (), (hyp,))
    elif rule == "+impE":
        minor = e.premises[1]

        def rebuild():
            return Inf("-impI", a_star, (), (s.copy(minor), hyp))
    elif rule == "-impE2":
        def rebuild():
            return Inf("+impI", a_star, (s.fresh(),), (hyp,))
    elif rule == "-impE1":
        consequent = SignedFormula("+", alpha.body.operands[1])

        def rebuild():
            k, v = s.fresh(), s.fresh()
            clash = _nc(Hyp(k, beta), hyp)
            return Inf("+impI", a_star, (k,), (_red(v, clash, consequent),))
    else:
        raise KernelError(f"no reductio step for {rule}")
    new = _settle(plug(body, seams, rebuild), seams, s)
    return _red(n, new, beta), _SUBCASE[rule]


def reduce_re(d, r: Redex, supply: Optional[LabelSupply] = None):
    s = _Session(supply or LabelSupply.above(d))
    e = r.position[:-1]
    return replace(d, e, _reduce_re(subtree(d, e), s)[0])


# ---------------------------------------------------------------------------
# permutations

def _permute(consumer, k, s):
    """Push ``consumer`` (whose premise ``k`` ends a segment) into the minor
    premises of that segment rule."""
    seg = consumer.premises[k]
    copies = []
    for j, branch in enumerate(seg.premises[1:]):
        others = [p for i, p in enumerate(consumer.premises) if i != k]
        mapping = {}
        if j:
            inner = set(consumer.discharged)
            for p in others:
                inner |= discharged_within(p)
            mapping = {x: s.fresh() for x in sorted(inner)}
        premises = [relabel(p, mapping) for p in consumer.premises]
        premises[k] = branch
        copy = Inf(consumer.rule, consumer.conclusion,
                   tuple(mapping.get(x, x) for x in consumer.discharged), tuple(premises))
        copies.append(_clash(copy, s) if copy.rule == "nc" else copy)
    new = Inf(seg.rule, consumer.conclusion, seg.discharged, (seg.premises[0], *copies))
    return new, "perm-into-nc" if consumer.rule == "nc" else "perm-into-elim"


def apply_permutative(d, r: Redex, supply: Optional[LabelSupply] = None):
    if r.kind != "perm":
        raise KernelError("not a maximal segment")
    s = _Session(supply or LabelSupply.above(d))
    e = r.position[:-1]
    return replace(d, e, _permute(subtree(d, e), r.position[-1], s)[0])


# ---------------------------------------------------------------------------
# simplification

def simplify(d, supply: Optional[LabelSupply] = None):
    """Remove every ``+orE``/``-andE`` with an empty class in a minor premise.

    With a ``supply``, a non-contradiction that ends up with two maximal
    premises because a minor premise moved down into it is reduced as well.
    """
    s = _Session(supply) if supply is not None else None

    def go(node):
        if isinstance(node, Hyp):
            return node, {node.label}, False
        results = [go(p) for p in node.premises]
        if node.rule in SEGMENT_RULES and len(results) == 3 and len(node.discharged) == 2:
            for k in (1, 2):
                if node.discharged[k - 1] not in results[k][1]:
                    return results[k][0], results[k][1], True
        seen = set()
        for _, labels, _ in results:
            seen |= labels
        premises = tuple(p for p, _, _ in results)
        if all(a is b for a, b in zip(premises, node.premises)):
            return node, seen, False
        new = Inf(node.rule, node.conclusion, node.discharged, premises)
        if s is not None and new.rule == "nc" and any(moved for _, _, moved in results):
            settled = _clash(new, s)
            if settled is not new:
                return settled, {h.label for _, h in walk(settled) if isinstance(h, Hyp)}, False
        return new, seen, False

    return go(d)[0]


# ---------------------------------------------------------------------------
# strategy

def reducible(r: Redex) -> bool:
    if r.kind == "ie":
        return r.consumer != "tonkE"
    if r.kind == "re":
        return RULES[r.consumer].connective not in EXPLOSIVE
    return True


class _Eligibility:
    """Decides the strategy's side conditions for redexes on the top level.

    Every subtree is an interval of post-order indices, so "a top-level
    redex lies inside this premise" is one binary search.
    """

    def __init__(self, top, a):
        self.a = a
        self.posts = sorted(a.post[r.position] for r in top)
        self.on_segments = {p for r in top if r.kind == "perm" for sg in r.segments for p in sg.positions}

    def _any_between(self, lo, hi) -> bool:
        i = bisect.bisect_left(self.posts, lo)
        return i < len(self.posts) and self.posts[i] < hi

    def _inside(self, path, strict=False) -> bool:
        end = self.a.post[path]
        return self._any_between(end - self.a.sizes[path] + 1, end if strict else end + 1)

    def __call__(self, r: Redex) -> bool:
        pos = r.position
        # (i) nothing of top level above the redex
        if self._inside(pos, strict=True):
            return False
        # (ii) nothing of top level in the other premises of the consumer
        e = pos[:-1]
        consumer = self.a.nodes[e]
        if any(self._inside(e + (k,)) for k in range(len(consumer.premises)) if k != pos[-1]):
            return False
        # (iii) no maximal segment of top level through a minor premise of the consumer
        if consumer.rule in SEGMENT_RULES and pos[-1] == 0:
            if e + (1,) in self.on_segments or e + (2,) in self.on_segments:
                return False
        return True


def select_redex(d, a=None):
    """The redex the strategy reduces next, or ``None`` for a normal deduction.

    Raises :class:`Stuck` when the only candidates have no reduction step.
    """
    a = a or scan(d)
    items = a.items
    if not items:
        return None
    k = max(r.level for r in items)
    top = [r for r in items if r.level == k]
    by_order = sorted(top, key=lambda r: a.post[r.position], reverse=True)
    eligible = _Eligibility(top, a)
    for r in by_order:
        if reducible(r) and eligible(r):
            return r
    for r in by_order:
        if reducible(r):
            return r
    raise Stuck([r for r in items if not reducible(r)])


def apply_step(d, r: Redex, supply: LabelSupply):
    """Apply the step for ``r``; returns ``(deduction, subcase)``."""
    s = _Session(supply)
    e = r.position[:-1]
    node = subtree(d, e)
    if not reducible(r):
        raise Stuck([r])
    if r.kind == "ie":
        new, tag = _reduce_ie(node, s)
    elif r.kind == "re":
        new, tag = _reduce_re(node, s)
    elif r.kind == "rnc":
        new, tag = _reduce_rnc(node, r.position[-1], s)
    elif r.kind == "inc":
        new, tag = _reduce_inc(node, s)
    elif r.kind == "perm":
        new, tag = _permute(node, r.position[-1], s)
    else:
        raise KernelError(f"unknown redex kind {r.kind!r}")
    return replace(d, e, new), tag


def normalize(d, cfg: SystemConfig = B, max_steps: int = 100000, *,
              strict: bool = True, debug: bool = False):
    """Normalise ``d`` with the strategy; returns ``(deduction, Trace)``.

    With ``strict`` a step that fails to lower the rank raises
    :class:`InvariantError`; otherwise it is recorded and the run continues.
    ``debug`` re-checks every intermediate deduction.
    """
    supply = LabelSupply.above(d)
    trace = Trace()
    a = scan(d)
    while True:
        if a.normal:
            trace.outcome = "normal"
            return d, trace
        if len(trace.steps) >= max_steps:
            trace.outcome = "stepLimit"
            return d, trace
        try:
            r = select_redex(d, a)
        except Stuck as exc:
            trace.outcome = "stuck"
            trace.stuck = exc.redexes
            return d, trace
        before = a.rank()
        new, tag = apply_step(d, r, supply)
        new = simplify(new, supply)
        a = scan(new)
        after = a.rank()
        trace.steps.append(StepRecord(len(trace.steps), r.kind, tag, r.position, before, after))
        if debug:
            report = check(new, cfg)
            if not report.ok:
                raise InvariantError(f"step {len(trace.steps) - 1} ({tag}) produced an "
                                     f"ill-formed deduction: {report.violations[0]}")
        if strict and not after < before:
            raise InvariantError(f"step {len(trace.steps) - 1} ({tag} at {r.position}) "
                                 f"did not lower the rank: {before} -> {after}")
        d = new


# ---------------------------------------------------------------------------
# atomic non-contradiction

def _atomize_pair(left, right, s):
    alpha = left.conclusion
    if not isinstance(alpha.body, Compound):
        return _nc(left, right)
    pos, neg = (left, right) if alpha.sign == "+" else (right, left)
    pos_left = pos is left
    body = pos.conclusion.body
    conn = body.connective
    c, dd = (body.operands + (None,))[:2]

    def pair(x, y):
        """nc on a positive ``x`` and negative ``y``, keeping the original sides."""
        return _atomize_pair(x, y, s) if pos_left else _atomize_pair(y, x, s)

    if conn == "or":
        i, j = s.fresh(), s.fresh()
        return Inf("+orE", BOT, (i, j), (
            pos,
            pair(Hyp(i, SignedFormula("+", c)), Inf("-orE1", SignedFormula("-", c), (), (neg,))),
            pair(Hyp(j, SignedFormula("+", dd)), Inf("-orE2", SignedFormula("-", dd), (), (s.copy(neg),)))))
    if conn == "and":
        i, j = s.fresh(), s.fresh()
        return Inf("-andE", BOT, (i, j), (
            neg,
            pair(Inf("+andE1", SignedFormula("+", c), (), (pos,)), Hyp(i, SignedFormula("-", c))),
            pair(Inf("+andE2", SignedFormula("+", dd), (), (s.copy(pos),)), Hyp(j, SignedFormula("-", dd)))))
    if conn == "imp":
        antecedent = Inf("-impE1", SignedFormula("+", c), (), (neg,))
        return pair(Inf("+impE", SignedFormula("+", dd), (), (pos, antecedent)),
                    Inf("-impE2", SignedFormula("-", dd), (), (s.copy(neg),)))
    if conn == "not":
        x = Inf("+notE", SignedFormula("-", c), (), (pos,))
        y = Inf("-notE", SignedFormula("+", c), (), (neg,))
        # x is negative, y positive: keep x on the side of pos
        return _atomize_pair(x, y, s) if pos_left else _atomize_pair(y, x, s)
    raise KernelError(f"no atomic non-contradiction construction for {conn}")


def atomize_nc(d, supply: Optional[LabelSupply] = None):
    """Replace every non-contradiction on compound formulas by applications to
    atomic formulas only."""
    for _, node in walk(d):
        c = node.conclusion
        if isinstance(c, SignedFormula) and connectives_of(c.body) - BASE_CONNECTIVES:
            raise KernelError(f"no atomic non-contradiction construction for {c}")
    s = _Session(supply or LabelSupply.above(d))

    def go(node):
        if isinstance(node, Hyp):
            return node
        premises = tuple(go(p) for p in node.premises)
        if node.rule == "nc":
            return _atomize_pair(premises[0], premises[1], s)
        return Inf(node.rule, node.conclusion, node.discharged, premises)

    return go(d)
