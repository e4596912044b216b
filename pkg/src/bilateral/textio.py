"""Reading and writing ``.bnd`` proof files.

The format is an s-expression per deduction::

    node  := (hyp NAT sf) | (RULE concl (NAT*) node*)
    sf    := (+ f) | (- f)
    concl := sf | bot
    f     := IDENT | (and f f) | (or f f) | (imp f f) | (not f)
           | (tonk f f) | (conk f f) | (honk f f)

``;`` starts a comment that runs to the end of the line.  Parsing checks the
shape only; rule schemas are the checker's business.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .kernel import RULES, Hyp, Inf
from .syntax import BOT, CONNECTIVES, SIGNS, Atom, Compound, SignedFormula


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message, span: SourceSpan):
        super().__init__(f"{message} at {span.start}..{span.end}")
        self.message = message
        self.span = span


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_NAT = re.compile(r"[0-9]+\Z")


class _Atom:
    __slots__ = ("text", "span")

    def __init__(self, text, span):
        self.text, self.span = text, span


class _List:
    __slots__ = ("items", "span")

    def __init__(self, items, span):
        self.items, self.span = items, span


def _read(text: str):
    """Read exactly one s-expression from ``text``."""
    stack = []
    result = None
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok[0].isspace() or tok[0] == ";":
            continue
        start, end = m.span()
        if tok == ")" and not stack:
            raise ParseError("unbalanced ')'", SourceSpan(start, end))
        if result is not None and not stack:
            raise ParseError("trailing input after deduction", SourceSpan(start, end))
        if tok == "(":
            stack.append((start, []))
        elif tok == ")":
            open_at, items = stack.pop()
            lst = _List(items, SourceSpan(open_at, end))
            if stack:
                stack[-1][1].append(lst)
            else:
                result = lst
        else:
            atom = _Atom(tok, SourceSpan(start, end))
            if stack:
                stack[-1][1].append(atom)
            else:
                result = atom
    if stack:
        open_at = stack[-1][0]
        raise ParseError("unbalanced '(': missing ')'", SourceSpan(open_at, len(text)))
    if result is None:
        raise ParseError("empty input", SourceSpan(0, len(text)))
    return result


def _formula(x):
    if isinstance(x, _Atom):
        if not _IDENT.match(x.text) or x.text in CONNECTIVES:
            raise ParseError(f"bad atom {x.text!r}", x.span)
        return Atom(x.text)
    if not x.items or not isinstance(x.items[0], _Atom):
        raise ParseError("expected a connective", x.span)
    head = x.items[0].text
    arity = CONNECTIVES.get(head)
    if arity is None:
        raise ParseError(f"unknown connective {head!r}", x.items[0].span)
    if len(x.items) != arity + 1:
        raise ParseError(f"{head} takes {arity} operand(s), got {len(x.items) - 1}", x.span)
    return Compound(head, tuple(_formula(y) for y in x.items[1:]))


def _signed(x):
    if not isinstance(x, _List) or len(x.items) != 2 or not isinstance(x.items[0], _Atom) \
            or x.items[0].text not in SIGNS:
        raise ParseError("expected a signed formula (+ f) or (- f)", x.span)
    return SignedFormula(x.items[0].text, _formula(x.items[1]))


def _conclusion(x):
    if isinstance(x, _Atom) and x.text == "bot":
        return BOT
    return _signed(x)


def _nat(x):
    if not isinstance(x, _Atom) or not _NAT.match(x.text):
        raise ParseError("expected a class label (natural number)", x.span)
    return int(x.text)


def _node(x):
    if not isinstance(x, _List) or not x.items:
        raise ParseError("expected a deduction node", x.span)
    head = x.items[0]
    if not isinstance(head, _Atom):
        raise ParseError("expected a rule name", head.span)
    if head.text == "hyp":
        if len(x.items) != 3:
            raise ParseError("hyp takes a class label and a formula", x.span)
        return Hyp(_nat(x.items[1]), _conclusion(x.items[2]))
    if head.text not in RULES:
        raise ParseError(f"unknown rule name {head.text!r}", head.span)
    if len(x.items) < 3:
        raise ParseError(f"{head.text} needs a conclusion and a discharge list", x.span)
    discharged = x.items[2]
    if not isinstance(discharged, _List):
        raise ParseError("expected a discharge list (NAT*)", discharged.span)
    return Inf(head.text, _conclusion(x.items[1]),
               tuple(_nat(y) for y in discharged.items),
               tuple(_node(y) for y in x.items[3:]))


def parse(text: str):
    """Parse one deduction; raises :class:`ParseError` with a source span."""
    return _node(_read(text))


def parse_formula(text: str):
    return _formula(_read(text))


def parse_conclusion(text: str):
    return _conclusion(_read(text))


# ---------------------------------------------------------------------------
# printing

def format_formula(f) -> str:
    if isinstance(f, Atom):
        return f.name
    return "(" + " ".join([f.connective] + [format_formula(g) for g in f.operands]) + ")"


def format_conclusion(c) -> str:
    if c is BOT:
        return "bot"
    return f"({c.sign} {format_formula(c.body)})"


def _head(node) -> str:
    if isinstance(node, Hyp):
        return f"(hyp {node.label} {format_conclusion(node.formula)})"
    return f"({node.rule} {format_conclusion(node.conclusion)} ({' '.join(map(str, node.discharged))})"


def dumps(d) -> str:
    """Canonical single-line text of ``d``."""
    parts = []
    stack = [d]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        parts.append(_head(item))
        if isinstance(item, Inf):
            stack.append(")")
            for p in reversed(item.premises):
                stack.append(p)
                stack.append(" ")
    return "".join(parts)


def pretty(d, indent: int = 2) -> str:
    """Indented multi-line text; parses back to the same tree."""
    lines = []
    stack = [(d, 0)]
    while stack:
        node, depth = stack.pop()
        if node is None:
            lines[-1] += ")"
            continue
        lines.append(" " * (indent * depth) + _head(node))
        if isinstance(node, Inf):
            if not node.premises:
                lines[-1] += ")"
                continue
            stack.append((None, depth))
            for p in reversed(node.premises):
                stack.append((p, depth + 1))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# traces

def _rank(r):
    return 0 if r.zero else [r.degree, r.l]


def trace_to_dict(trace) -> dict:
    out = {"outcome": trace.outcome, "steps": [
        {"index": s.index, "kind": s.kind, "subcase": s.subcase, "position": list(s.position),
         "rankBefore": _rank(s.rank_before), "rankAfter": _rank(s.rank_after)}
        for s in trace.steps
    ]}
    if trace.outcome == "stuck":
        out["stuckRedexes"] = [
            {"kind": r.kind, "connective": r.connective, "position": list(r.position),
             "formula": str(r.formula)}
            for r in trace.stuck
        ]
    return out


def trace_to_json(trace) -> str:
    return json.dumps(trace_to_dict(trace), separators=(",", ":"), ensure_ascii=False)
