import json

import pytest
from hypothesis import given, settings, strategies as st

from bilateral import (
    B, SystemConfig, check, dumps, normalize, parse, pretty, trace_to_json,
)
from bilateral.generator import GeneratorParams, generate
from bilateral.kernel import Hyp, walk
from bilateral.normalizer import Trace
from bilateral.syntax import Atom, plus
from bilateral.textio import ParseError, parse_formula

from conftest import CORPUS, manifest, read

SYSTEMS = ["B", "B+tonk", "B+conk", "B+honk", "B-coord"]


def test_hypothesis_text():
    assert parse("(hyp 1 (+ A))") == Hyp(1, plus(Atom("A")))
    assert dumps(Hyp(1, plus(Atom("A")))) == "(hyp 1 (+ A))"


def test_whitespace_and_comments_are_ignored():
    text = "; a comment\n(hyp\n  1 ; label\n  (+\tA))\n"
    assert parse(text) == parse("(hyp 1 (+ A))")


def test_explosion_text_shape():
    d = read(CORPUS / "conk_explosion.bnd")
    rules = [getattr(n, "rule", "hyp") for _, n in walk(d)]
    assert rules == ["+conkE2", "red", "nc", "-conkE1", "hyp", "hyp"]


def test_bot_hypothesis_parses_but_fails_check():
    d = parse("(hyp 1 bot)")
    assert not check(d).ok


def test_formula_syntax():
    f = parse_formula("(imp (and A B) (not C))")
    assert str(f) == "(A∧B)⊃¬C"


@pytest.mark.parametrize("text,message", [
    ("", "empty input"),
    ("(hyp 1 (+ A)", "missing ')'"),
    ("(hyp 1 (+ A)))", "unbalanced ')'"),
    ("(hyp 1 (+ A)) (hyp 2 (+ B))", "trailing input"),
    ("(+frobI (+ A) ())", "unknown rule name"),
    ("(hyp x (+ A))", "class label"),
    ("(hyp 1 (* A))", "signed formula"),
    ("(hyp 1 (+ (xor A B)))", "unknown connective"),
    ("(hyp 1 (+ (and A)))", "takes 2 operand"),
    ("(+andI (+ (and A B)))", "discharge list"),
    ("(+andI (+ (and A B)) 1)", "discharge list"),
    ("(hyp 1 (+ 9A))", "bad atom"),
])
def test_parse_errors(text, message):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert message in str(info.value)
    span = info.value.span
    assert 0 <= span.start <= span.end <= len(text)


def test_unknown_rule_span_points_at_the_name():
    text = "(+andI (+ (and A B)) () (+frobI (+ A) ()) (hyp 2 (+ B)))"
    with pytest.raises(ParseError) as info:
        parse(text)
    span = info.value.span
    assert text[span.start:span.end] == "+frobI"


@pytest.mark.parametrize("row", manifest(), ids=lambda row: row["file"])
def test_corpus_round_trip(row):
    d = read(CORPUS / row["file"])
    assert parse(dumps(d)) == d
    assert parse(pretty(d)) == d


def test_printing_is_canonical():
    d = parse("(+andI   (+ (and A B)) ( )\n (hyp 1 (+ A))   (hyp 2 (+ B)))")
    assert dumps(d) == "(+andI (+ (and A B)) () (hyp 1 (+ A)) (hyp 2 (+ B)))"
    assert pretty(d) == "(+andI (+ (and A B)) ()\n  (hyp 1 (+ A))\n  (hyp 2 (+ B)))"


def test_printing_is_injective_on_generated_trees():
    seen = {}
    for seed in range(1000):
        d = generate(GeneratorParams(seed, 30, B, 0.5))
        text = dumps(d)
        assert seen.setdefault(text, d) == d


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(SYSTEMS), st.integers(1, 60))
def test_round_trip_on_generated_trees(seed, system, nodes):
    d = generate(GeneratorParams(seed, nodes, SystemConfig.named(system), 0.7))
    assert parse(dumps(d)) == d
    assert parse(pretty(d)) == d


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_damaged_text_fails_with_a_span_in_bounds(seed, data):
    text = dumps(generate(GeneratorParams(seed, 20, B, 0.5)))
    cut = data.draw(st.integers(0, len(text)))
    junk = data.draw(st.sampled_from(["", "(", ")", "x", "?", " (hyp", "bot", "1"]))
    damaged = text[:cut] + junk + text[cut + data.draw(st.integers(0, 3)):]
    try:
        parse(damaged)
    except ParseError as exc:
        assert 0 <= exc.span.start <= exc.span.end <= len(damaged)


@settings(max_examples=500, deadline=None)
@given(st.text(alphabet="()+- ;\nabAB01hypbotandI", max_size=60))
def test_arbitrary_text_parses_or_fails_cleanly(text):
    try:
        parse(text)
    except ParseError as exc:
        assert 0 <= exc.span.start <= exc.span.end <= len(text)


# ---------------------------------------------------------------------------
# traces

def test_empty_trace():
    assert trace_to_json(Trace()) == '{"outcome":"normal","steps":[]}'


def test_single_step_trace():
    _, trace = normalize(read(CORPUS / "ie_and.bnd"))
    out = json.loads(trace_to_json(trace))
    assert out == {"outcome": "normal", "steps": [{
        "index": 0, "kind": "ie", "subcase": "ie-and", "position": [0],
        "rankBefore": [1, 1], "rankAfter": 0,
    }]}
    assert list(out["steps"][0]) == ["index", "kind", "subcase", "position", "rankBefore", "rankAfter"]


def test_stuck_trace_lists_the_redexes():
    _, trace = normalize(read(CORPUS / "conk_explosion.bnd"), SystemConfig.named("B+conk"))
    out = json.loads(trace_to_json(trace))
    assert out["outcome"] == "stuck" and out["steps"] == []
    [r] = out["stuckRedexes"]
    assert r["kind"] == "re" and r["connective"] == "conk"
