"""Deduction trees, the rule table and the well-formedness checker.

A deduction is either a hypothesis ``Hyp(label, formula)`` or an inference
``Inf(rule, conclusion, discharged, premises)``.  Assumption-class labels are
global to a tree: a class is discharged at no more than one node, and every
hypothesis of a discharged class must sit inside the premise the rule binds it
in.  Rules are described by small patterns over the metavariables ``A``/``B``
(formulas), ``phi`` (any conclusion) and ``alpha`` (any signed formula).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .syntax import (
    BOT, Compound, Conclusion, SignedFormula, connectives_of, is_atomic, star,
)


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class Hyp:
    label: int
    formula: Conclusion

    @property
    def conclusion(self):
        return self.formula


@dataclass(frozen=True)
class Inf:
    rule: str
    conclusion: Conclusion
    discharged: tuple = ()
    premises: tuple = ()

    def __post_init__(self):
        if not isinstance(self.discharged, tuple):
            object.__setattr__(self, "discharged", tuple(self.discharged))
        if not isinstance(self.premises, tuple):
            object.__setattr__(self, "premises", tuple(self.premises))


Deduction = Union[Hyp, Inf]
Path = tuple


# ---------------------------------------------------------------------------
# rule table

@dataclass(frozen=True)
class Rule:
    name: str
    kind: str                  # "intro", "elim" or "coord"
    connective: Optional[str]  # connective of the principal formula
    premises: tuple
    conclusion: object
    discharges: tuple = ()     # (premise index, signed pattern) per label

    @property
    def arity(self):
        return len(self.premises)


def _p(f):
    return ("+", f)


def _m(f):
    return ("-", f)


_A, _B = "A", "B"


def _c(conn, *args):
    return (conn,) + args


_AND, _OR, _IMP = _c("and", _A, _B), _c("or", _A, _B), _c("imp", _A, _B)
_NOT = _c("not", _A)
_TONK, _CONK, _HONK = _c("tonk", _A, _B), _c("conk", _A, _B), _c("honk", _A, _B)


def _rule(name, kind, conn, premises, conclusion, discharges=()):
    return Rule(name, kind, conn, tuple(premises), conclusion, tuple(discharges))


_TABLE = [
    _rule("+andI", "intro", "and", [_p(_A), _p(_B)], _p(_AND)),
    _rule("+andE1", "elim", "and", [_p(_AND)], _p(_A)),
    _rule("+andE2", "elim", "and", [_p(_AND)], _p(_B)),
    _rule("-andI1", "intro", "and", [_m(_A)], _m(_AND)),
    _rule("-andI2", "intro", "and", [_m(_B)], _m(_AND)),
    _rule("-andE", "elim", "and", [_m(_AND), "phi", "phi"], "phi", [(1, _m(_A)), (2, _m(_B))]),
    _rule("+orI1", "intro", "or", [_p(_A)], _p(_OR)),
    _rule("+orI2", "intro", "or", [_p(_B)], _p(_OR)),
    _rule("+orE", "elim", "or", [_p(_OR), "phi", "phi"], "phi", [(1, _p(_A)), (2, _p(_B))]),
    _rule("-orI", "intro", "or", [_m(_A), _m(_B)], _m(_OR)),
    _rule("-orE1", "elim", "or", [_m(_OR)], _m(_A)),
    _rule("-orE2", "elim", "or", [_m(_OR)], _m(_B)),
    _rule("+impI", "intro", "imp", [_p(_B)], _p(_IMP), [(0, _p(_A))]),
    _rule("+impE", "elim", "imp", [_p(_IMP), _p(_A)], _p(_B)),
    _rule("-impI", "intro", "imp", [_p(_A), _m(_B)], _m(_IMP)),
    _rule("-impE1", "elim", "imp", [_m(_IMP)], _p(_A)),
    _rule("-impE2", "elim", "imp", [_m(_IMP)], _m(_B)),
    _rule("+notI", "intro", "not", [_m(_A)], _p(_NOT)),
    _rule("+notE", "elim", "not", [_p(_NOT)], _m(_A)),
    _rule("-notI", "intro", "not", [_p(_A)], _m(_NOT)),
    _rule("-notE", "elim", "not", [_m(_NOT)], _p(_A)),
    _rule("red", "coord", None, ["bot"], "alpha", [(0, "alpha*")]),
    _rule("nc", "coord", None, ["alpha", "alpha*"], "bot"),
    # extensions
    _rule("+tonkI", "intro", "tonk", [_p(_A)], _p(_TONK)),
    _rule("tonkE", "elim", "tonk", [_p(_TONK)], _p(_B)),
    _rule("+conkI", "intro", "conk", [_p(_A), _p(_B)], _p(_CONK)),
    _rule("+conkE1", "elim", "conk", [_p(_CONK)], _p(_A)),
    _rule("+conkE2", "elim", "conk", [_p(_CONK)], _p(_B)),
    _rule("-conkI", "intro", "conk", [_m(_A), _m(_B)], _m(_CONK)),
    _rule("-conkE1", "elim", "conk", [_m(_CONK)], _m(_A)),
    _rule("-conkE2", "elim", "conk", [_m(_CONK)], _m(_B)),
    _rule("+honkI", "intro", "honk", [_m(_A), _p(_B)], _p(_HONK)),
    _rule("+honkE1", "elim", "honk", [_p(_HONK)], _m(_A)),
    _rule("+honkE2", "elim", "honk", [_p(_HONK)], _p(_B)),
    _rule("-honkI", "intro", "honk", [_p(_A), _m(_B)], _m(_HONK)),
    _rule("-honkE1", "elim", "honk", [_m(_HONK)], _p(_A)),
    _rule("-honkE2", "elim", "honk", [_m(_HONK)], _m(_B)),
]

RULES = {r.name: r for r in _TABLE}
BASE_RULES = tuple(r.name for r in _TABLE[:23])
EXTENSION_RULES = tuple(r.name for r in _TABLE[23:])

# eliminations whose minor premises carry segments
SEGMENT_RULES = frozenset({"+orE", "-andE"})


def is_intro(d) -> bool:
    return isinstance(d, Inf) and d.rule in RULES and RULES[d.rule].kind == "intro"


def is_elim(d) -> bool:
    return isinstance(d, Inf) and d.rule in RULES and RULES[d.rule].kind == "elim"


def is_red(d) -> bool:
    return isinstance(d, Inf) and d.rule == "red"


def is_nc(d) -> bool:
    return isinstance(d, Inf) and d.rule == "nc"


def is_segment_rule(d) -> bool:
    return isinstance(d, Inf) and d.rule in SEGMENT_RULES


# -- pattern matching --------------------------------------------------------

def _match_body(pat, f, env):
    if isinstance(pat, str):
        if pat in env:
            return env[pat] == f
        env[pat] = f
        return True
    if not isinstance(f, Compound) or f.connective != pat[0]:
        return False
    return all(_match_body(p, g, env) for p, g in zip(pat[1:], f.operands))


def _match(pat, c, env):
    if pat == "bot":
        return c is BOT
    if pat == "phi":
        if "phi" in env:
            return env["phi"] == c
        env["phi"] = c
        return True
    if not isinstance(c, SignedFormula):
        return False
    if pat in ("alpha", "alpha*"):
        value = c if pat == "alpha" else star(c)
        if "alpha" in env:
            return env["alpha"] == value
        env["alpha"] = value
        return True
    sign, body = pat
    return c.sign == sign and _match_body(body, c.body, env)


def _build_body(pat, env):
    if isinstance(pat, str):
        return env[pat]
    return Compound(pat[0], tuple(_build_body(p, env) for p in pat[1:]))


def _build(pat, env):
    if pat == "alpha*":
        return star(env["alpha"])
    if pat == "alpha":
        return env["alpha"]
    return SignedFormula(pat[0], _build_body(pat[1], env))


def match_rule(rule: Rule, conclusion, premise_conclusions):
    """Bindings for ``rule`` or ``None`` when the node does not fit it."""
    env = {}
    if not _match(rule.conclusion, conclusion, env):
        return None
    for pat, c in zip(rule.premises, premise_conclusions):
        if not _match(pat, c, env):
            return None
    return env


def discharge_formulas(rule: Rule, env) -> list:
    return [(idx, _build(pat, env)) for idx, pat in rule.discharges]


def premise_formulas(rule: Rule, env) -> list:
    """Premise conclusions of ``rule`` under complete bindings ``env``."""
    return [BOT if pat == "bot" else env["phi"] if pat == "phi" else _build(pat, env)
            for pat in rule.premises]


def metavariables(rule: Rule) -> set:
    """Formula metavariables (``A``/``B``) occurring in ``rule``."""
    out = set()

    def body(pat):
        if isinstance(pat, str):
            out.add(pat)
        else:
            for p in pat[1:]:
                body(p)

    for pat in (*rule.premises, rule.conclusion):
        if isinstance(pat, tuple):
            body(pat[1])
    return out


# ---------------------------------------------------------------------------
# system configurations

MODES = ("general", "atomic", "off")
BASE_CONNECTIVES = frozenset({"and", "or", "imp", "not"})


@dataclass(frozen=True)
class SystemConfig:
    connectives: frozenset = BASE_CONNECTIVES
    reductio: str = "general"
    nc: str = "general"

    def __post_init__(self):
        object.__setattr__(self, "connectives", frozenset(self.connectives))
        if self.reductio not in MODES or self.nc not in MODES:
            raise ValueError(f"modes must be one of {MODES}")

    @classmethod
    def named(cls, name: str, **modes) -> "SystemConfig":
        try:
            base = SYSTEMS[name]
        except KeyError:
            raise ValueError(f"unknown system {name!r}; expected one of {sorted(SYSTEMS)}") from None
        if modes:
            base = SystemConfig(base.connectives, modes.get("reductio", base.reductio),
                                modes.get("nc", base.nc))
        return base


SYSTEMS = {
    "B": SystemConfig(),
    "B+tonk": SystemConfig(BASE_CONNECTIVES | {"tonk"}),
    "B+conk": SystemConfig(BASE_CONNECTIVES | {"conk"}),
    "B+honk": SystemConfig(BASE_CONNECTIVES | {"honk"}),
    "B-coord": SystemConfig(BASE_CONNECTIVES, "off", "off"),
}
B = SYSTEMS["B"]


# ---------------------------------------------------------------------------
# checking

@dataclass(frozen=True)
class Violation:
    position: tuple
    message: str
    rule: Optional[str] = None

    def __str__(self):
        where = "/".join(map(str, self.position)) or "root"
        rule = f" [{self.rule}]" if self.rule else ""
        return f"at {where}{rule}: {self.message}"


@dataclass
class CheckReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def check(d: Deduction, cfg: SystemConfig = B) -> CheckReport:
    """Report every way in which ``d`` fails to be a deduction of ``cfg``."""
    violations = []
    hyps = {}        # label -> [(node id, formula)]
    discharges = {}  # label -> [(node id, rule, premise interval, expected formula)]
    # nodes are numbered in pre-order, so the premise with id q covers the
    # ids [q, q + sizes[q]); positions are rebuilt only for violations
    parent, branch, sizes = [], [], []

    def at(i):
        path = []
        while parent[i] >= 0:
            path.append(branch[i])
            i = parent[i]
        return tuple(reversed(path))

    def formula_ok(c, i, rule):
        if isinstance(c, SignedFormula):
            extra = connectives_of(c.body) - cfg.connectives
            for conn in sorted(extra):
                violations.append(Violation(at(i), f"connective {conn} outside configured system", rule))
        elif c is not BOT:
            violations.append(Violation(at(i), f"not a conclusion: {c!r}", rule))

    def visit_leaf(node, i):
        if isinstance(node, Hyp):
            if node.formula is BOT:
                violations.append(Violation(at(i), "⊥ hypothesis"))
            else:
                formula_ok(node.formula, i, None)
            if not isinstance(node.label, int) or node.label < 0:
                violations.append(Violation(at(i), f"bad class label {node.label!r}"))
            hyps.setdefault(node.label, []).append((i, node.formula))
        else:
            violations.append(Violation(at(i), f"not a deduction node: {node!r}"))

    def check_node(node, i, spans):
        rule = RULES.get(node.rule)
        name = node.rule
        formula_ok(node.conclusion, i, name)
        if rule is None:
            violations.append(Violation(at(i), f"unknown rule {name!r}", name))
            return
        if rule.connective is not None and rule.connective not in cfg.connectives:
            violations.append(Violation(at(i), "rule outside configured system", name))
        if name == "red":
            if cfg.reductio == "off":
                violations.append(Violation(at(i), "reductio disabled in configured system", name))
            elif cfg.reductio == "atomic" and not is_atomic(node.conclusion):
                violations.append(Violation(at(i), "reductio restricted to atomic conclusions", name))
        if name == "nc":
            if cfg.nc == "off":
                violations.append(Violation(at(i), "non-contradiction disabled in configured system", name))
            elif cfg.nc == "atomic" and not all(is_atomic(p.conclusion) for p in node.premises):
                violations.append(Violation(at(i), "non-contradiction restricted to atomic premises", name))
        if len(node.premises) != rule.arity:
            violations.append(Violation(
                at(i), f"arity mismatch: expected {rule.arity} premises, got {len(node.premises)}", name))
            return
        if len(node.discharged) != len(rule.discharges):
            violations.append(Violation(
                at(i), f"expected {len(rule.discharges)} discharged class(es), got {len(node.discharged)}", name))
            return
        if len(set(node.discharged)) != len(node.discharged):
            violations.append(Violation(at(i), "discharged classes must be distinct", name))
            return
        env = match_rule(rule, node.conclusion, [p.conclusion for p in node.premises])
        if env is None:
            shown = ", ".join(str(p.conclusion) for p in node.premises)
            violations.append(Violation(
                at(i), f"schema mismatch: {shown} / {node.conclusion} does not fit {name}", name))
            return
        for label, (idx, expected) in zip(node.discharged, discharge_formulas(rule, env)):
            discharges.setdefault(label, []).append((i, name, spans[idx], expected))

    order, stack = [], [(d, -1, 0)]
    while stack:
        node, up, k = stack.pop()
        parent.append(up)
        branch.append(k)
        order.append(node)
        if isinstance(node, Inf):
            i = len(order) - 1
            for j in range(len(node.premises) - 1, -1, -1):
                stack.append((node.premises[j], i, j))
    sizes = [1] * len(order)
    kids = [[] for _ in order]
    for i in range(len(order) - 1, 0, -1):
        sizes[parent[i]] += sizes[i]
        kids[parent[i]].append(i)
    for i in range(len(order) - 1, -1, -1):
        node = order[i]
        if isinstance(node, Inf):
            check_node(node, i, [(q, q + sizes[q]) for q in reversed(kids[i])])
        else:
            visit_leaf(node, i)

    for label, occurrences in hyps.items():
        occurrences.sort(key=lambda x: x[0])
        first = occurrences[0][1]
        for i, formula in occurrences[1:]:
            if formula != first:
                violations.append(Violation(
                    at(i), f"inconsistent assumption class {label}: {formula} vs {first}"))
    for label, sites in discharges.items():
        if len(sites) > 1:
            for i, name, _, _ in sites[1:]:
                violations.append(Violation(at(i), f"class {label} discharged more than once", name))
        site, name, (start, end), expected = sites[0]
        for h, formula in hyps.get(label, ()):
            if not start <= h < end:
                violations.append(Violation(
                    at(h), f"discharge-scope violation: class {label} is discharged at "
                           f"{'/'.join(map(str, at(site))) or 'root'} but occurs outside its scope", name))
            elif formula != expected:
                violations.append(Violation(
                    at(h), f"schema mismatch: class {label} holds {formula}, {name} discharges {expected}",
                    name))
    return CheckReport(violations)


# ---------------------------------------------------------------------------
# tree plumbing

def subtree(d: Deduction, path) -> Deduction:
    for k in path:
        d = d.premises[k]
    return d


def replace(d: Deduction, path, new: Deduction) -> Deduction:
    spine = []
    for k in path:
        spine.append(d)
        d = d.premises[k]
    for node, k in zip(reversed(spine), reversed(path)):
        premises = list(node.premises)
        premises[k] = new
        new = Inf(node.rule, node.conclusion, node.discharged, tuple(premises))
    return new


def walk(d: Deduction, path=()) -> Iterator:
    """Pre-order ``(path, node)`` pairs."""
    stack = [(path, d)]
    while stack:
        p, node = stack.pop()
        yield p, node
        if isinstance(node, Inf):
            for k in range(len(node.premises) - 1, -1, -1):
                stack.append((p + (k,), node.premises[k]))


def postorder(d: Deduction, path=()) -> list:
    out = []
    stack = [(path, d, False)]
    while stack:
        p, node, done = stack.pop()
        if done or not isinstance(node, Inf):
            out.append((p, node))
            continue
        stack.append((p, node, True))
        for k in range(len(node.premises) - 1, -1, -1):
            stack.append((p + (k,), node.premises[k], False))
    return out


def size(d: Deduction) -> int:
    return sum(1 for _ in walk(d))


def labels(d: Deduction) -> set:
    out = set()
    for _, node in walk(d):
        if isinstance(node, Hyp):
            out.add(node.label)
        else:
            out.update(node.discharged)
    return out


def max_label(*trees) -> int:
    return max((x for t in trees for x in labels(t) if isinstance(x, int)), default=0)


class LabelSupply:
    """Monotone source of class labels never used before in one session."""

    def __init__(self, start: int = 1):
        self.next = start

    @classmethod
    def above(cls, *trees) -> "LabelSupply":
        return cls(max_label(*trees) + 1)

    def fresh(self) -> int:
        n = self.next
        self.next += 1
        return n

    def reserve(self, *trees):
        self.next = max(self.next, max_label(*trees) + 1)


def relabel(d: Deduction, mapping: dict) -> Deduction:
    if not mapping:
        return d
    if isinstance(d, Hyp):
        return Hyp(mapping.get(d.label, d.label), d.formula)
    return Inf(d.rule, d.conclusion,
               tuple(mapping.get(x, x) for x in d.discharged),
               tuple(relabel(p, mapping) for p in d.premises))


def alpha_equivalent(d1: Deduction, d2: Deduction) -> bool:
    """Same tree up to a one-to-one renaming of class labels."""
    fwd, back = {}, {}

    def same(x, y):
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
        return True

    stack = [(d1, d2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Hyp) or isinstance(b, Hyp):
            if not (isinstance(a, Hyp) and isinstance(b, Hyp)):
                return False
            if a.formula != b.formula or not same(a.label, b.label):
                return False
            continue
        if (a.rule, a.conclusion) != (b.rule, b.conclusion) \
                or len(a.discharged) != len(b.discharged) or len(a.premises) != len(b.premises):
            return False
        if not all(same(x, y) for x, y in zip(a.discharged, b.discharged)):
            return False
        stack.extend(zip(a.premises, b.premises))
    return True


def discharged_within(d: Deduction) -> set:
    out = set()
    for _, node in walk(d):
        if isinstance(node, Inf):
            out.update(node.discharged)
    return out


def refresh(d: Deduction, supply: LabelSupply) -> Deduction:
    """Copy of ``d`` whose internally discharged classes get fresh labels."""
    inner = sorted(discharged_within(d))
    return relabel(d, {x: supply.fresh() for x in inner})


def open_hypotheses(d: Deduction, path=()) -> list:
    """``(path, Hyp)`` for every hypothesis not discharged inside ``d``."""
    out = []

    def go(node, p, bound):
        if isinstance(node, Hyp):
            if node.label not in bound:
                out.append((p, node))
            return
        rule = RULES.get(node.rule)
        extra = {}
        if rule is not None and len(node.discharged) == len(rule.discharges):
            for label, (idx, _) in zip(node.discharged, rule.discharges):
                extra.setdefault(idx, set()).add(label)
        for k, q in enumerate(node.premises):
            go(q, p + (k,), bound | extra[k] if k in extra else bound)

    go(d, path, frozenset())
    return out


def open_assumptions(d: Deduction) -> dict:
    """Map class label -> (formula, number of open occurrences)."""
    out = {}
    for _, h in open_hypotheses(d):
        formula, n = out.get(h.label, (h.formula, 0))
        out[h.label] = (formula, n + 1)
    return out


def hypothesis_positions(d: Deduction, label: int) -> list:
    return [p for p, h in open_hypotheses(d) if h.label == label]


def substitute_hypotheses(d: Deduction, label: int, replacement: Deduction,
                          supply: Optional[LabelSupply] = None) -> Deduction:
    """Put a copy of ``replacement`` on top of every open hypothesis of ``label``.

    Classes discharged inside each copy are renamed apart.  A class with no
    occurrences leaves ``d`` unchanged.
    """
    positions = hypothesis_positions(d, label)
    if not positions:
        if any(isinstance(n, Hyp) and n.label == label for _, n in walk(d)):
            raise KernelError(f"class {label} is not open in the deduction")
        return d
    target = subtree(d, positions[0]).formula
    if target != replacement.conclusion:
        raise KernelError(f"conclusion mismatch: class {label} holds {target}, "
                          f"replacement concludes {replacement.conclusion}")
    if supply is None:
        supply = LabelSupply.above(d, replacement)
    return plug(d, positions, lambda: refresh(replacement, supply))


def plug(d: Deduction, positions, make) -> Deduction:
    """Replace the nodes at ``positions`` by ``make()`` (called once per site)."""
    if not positions:
        return d
    tree = {}
    for p in positions:
        node = tree
        for k in p:
            node = node.setdefault(k, {})
        node[None] = True

    def go(node, t):
        if None in t:
            return make()
        premises = list(node.premises)
        for k, sub in t.items():
            premises[k] = go(premises[k], sub)
        return Inf(node.rule, node.conclusion, node.discharged, tuple(premises))

    return go(d, tree)

