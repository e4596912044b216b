import time

import pytest
from hypothesis import given, settings, strategies as st

from bilateral import B, SystemConfig, check, parse
from bilateral.generator import GeneratorParams, _Generator, generate
from bilateral.kernel import (
    BASE_RULES, EXTENSION_RULES, RULES, Hyp, Inf, KernelError, LabelSupply, alpha_equivalent,
    labels, open_assumptions, relabel, size, substitute_hypotheses, walk,
)
from bilateral.syntax import Atom, conj, plus

from instances import MUTANTS, RULE_INSTANCES

CONK = ("(+conkE2 (+ B) () (red (+ (conk A B)) (1) (nc bot () "
        "(-conkE1 (- A) () (hyp 1 (- (conk A B)))) (hyp 2 (+ A)))))")


def test_rule_table_sizes():
    assert len(BASE_RULES) == 23
    assert len(EXTENSION_RULES) == 14
    assert set(RULE_INSTANCES) == set(RULES)


@pytest.mark.parametrize("name", sorted(RULE_INSTANCES))
def test_rule_instance_checks(name):
    system, text = RULE_INSTANCES[name]
    d = parse(text)
    assert d.rule == name
    assert check(d, SystemConfig.named(system)).ok


@pytest.mark.parametrize("name,system,text,where", MUTANTS, ids=[m[0] for m in MUTANTS])
def test_mutant_fails_with_position(name, system, text, where):
    report = check(parse(text), SystemConfig.named(system))
    assert not report.ok
    assert where in [v.position for v in report.violations]


def test_extension_rules_need_their_system():
    for name in EXTENSION_RULES:
        system, text = RULE_INSTANCES[name]
        assert not check(parse(text), B).ok


def test_conk_explosion_checks():
    d = parse(CONK)
    assert check(d, SystemConfig.named("B+conk")).ok
    assert not check(d, B).ok
    assert open_assumptions(d) == {2: (plus(Atom("A")), 1)}


def test_bot_hypothesis():
    report = check(parse("(hyp 1 bot)"))
    assert [v.message for v in report.violations] == ["⊥ hypothesis"]


def test_mode_restrictions():
    nc = parse("(nc bot () (hyp 1 (+ (and A B))) (hyp 2 (- (and A B))))")
    assert check(nc).ok
    msgs = [v.message for v in check(nc, SystemConfig.named("B", nc="atomic")).violations]
    assert msgs == ["non-contradiction restricted to atomic premises"]
    red = parse("(red (+ (and A B)) (1) (nc bot () (hyp 1 (- (and A B))) (hyp 2 (+ (and A B)))))")
    msgs = [v.message for v in check(red, SystemConfig.named("B", reductio="atomic")).violations]
    assert msgs == ["reductio restricted to atomic conclusions"]
    assert len(check(red, SystemConfig.named("B-coord")).violations) == 2


def test_scope_violation():
    d = parse("(+andI (+ (and (imp A A) A)) () (+impI (+ (imp A A)) (1) (hyp 1 (+ A))) (hyp 1 (+ A)))")
    report = check(d)
    assert [v.position for v in report.violations] == [(1,)]
    assert "scope" in report.violations[0].message


def test_open_assumptions_examples():
    assert open_assumptions(parse("(hyp 1 (+ A))")) == {1: (plus(Atom("A")), 1)}
    assert open_assumptions(parse("(+impI (+ (imp A A)) (1) (hyp 1 (+ A)))")) == {}


def test_substitute_single():
    d = parse("(hyp 1 (+ A))")
    pi = parse("(+andE1 (+ A) () (hyp 7 (+ (and A B))))")
    assert substitute_hypotheses(d, 1, pi) == pi


def test_substitute_two_occurrences_get_disjoint_labels():
    d = parse("(+andI (+ (and (imp C C) (imp C C))) () (hyp 1 (+ (imp C C))) (hyp 1 (+ (imp C C))))")
    pi = parse("(+impI (+ (imp C C)) (5) (hyp 5 (+ C)))")
    out = substitute_hypotheses(d, 1, pi)
    assert check(out).ok
    left, right = out.premises
    assert alpha_equivalent(left, pi) and alpha_equivalent(right, pi)
    assert not labels(left) & labels(right)


def test_substitute_zero_occurrences_is_identity():
    d = parse("(hyp 2 (+ B))")
    assert substitute_hypotheses(d, 1, parse("(hyp 3 (+ A))")) is d


def test_substitute_errors():
    d = parse("(hyp 1 (+ A))")
    with pytest.raises(KernelError):
        substitute_hypotheses(d, 1, parse("(hyp 3 (+ B))"))
    closed = parse("(+impI (+ (imp A A)) (1) (hyp 1 (+ A)))")
    with pytest.raises(KernelError):
        substitute_hypotheses(closed, 1, parse("(hyp 3 (+ A))"))


def test_alpha_equivalence():
    a = parse("(+impI (+ (imp A A)) (1) (hyp 1 (+ A)))")
    b = parse("(+impI (+ (imp A A)) (9) (hyp 9 (+ A)))")
    c = parse("(+impI (+ (imp A A)) (9) (hyp 8 (+ A)))")
    assert alpha_equivalent(a, b)
    assert not alpha_equivalent(a, c)
    # the renaming must be one-to-one
    two = parse("(+andI (+ (and A A)) () (hyp 1 (+ A)) (hyp 2 (+ A)))")
    one = parse("(+andI (+ (and A A)) () (hyp 1 (+ A)) (hyp 1 (+ A)))")
    assert not alpha_equivalent(two, one) and not alpha_equivalent(one, two)


seeds = st.integers(0, 2**32)


@settings(max_examples=150, deadline=None)
@given(seeds, st.sampled_from(["B", "B+tonk", "B+conk", "B+honk", "B-coord"]))
def test_generated_deductions_check(seed, system):
    d = generate(GeneratorParams(seed, 30, SystemConfig.named(system), 0.8))
    assert check(d, SystemConfig.named(system)).ok


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_open_labels_are_never_discharged(seed):
    d = generate(GeneratorParams(seed, 30, B, 0.8))
    discharged = {x for _, n in walk(d) if isinstance(n, Inf) for x in n.discharged}
    assert not set(open_assumptions(d)) & discharged


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_substitution_preserves_validity_and_conclusion(seed):
    d = generate(GeneratorParams(seed, 20, B, 0.8))
    opened = open_assumptions(d)
    if not opened:
        return
    label = sorted(opened)[seed % len(opened)]
    goal = opened[label][0]
    gen = _Generator(GeneratorParams(seed + 1, 12, B, 0.8))
    pi = gen.build(goal, 12, [])
    # keep the replacement's labels apart from those of d
    shift = max(labels(d)) + 1
    pi = relabel(pi, {x: x + shift for x in labels(pi)})
    out = substitute_hypotheses(d, label, pi, LabelSupply.above(d, pi))
    assert check(out).ok
    assert out.conclusion == d.conclusion
    assert label not in open_assumptions(out)


def _chain(depth):
    """A valid deduction ``2 * depth + 1`` nodes deep: repeated +andI/+andE1 detours."""
    a, b = plus(Atom("A")), plus(Atom("B"))
    d = Hyp(1, a)
    for _ in range(depth):
        d = Inf("+andE1", a, (), (Inf("+andI", plus(conj(a.body, b.body)), (), (d, Hyp(2, b))),))
    return d


def _per_node(trees):
    best = float("inf")
    for _ in range(5):
        t = time.perf_counter()
        for d in trees:
            check(d)
        best = min(best, time.perf_counter() - t)
    return best / sum(size(d) for d in trees)


def test_check_runs_in_linear_time():
    per_node = {}
    for n in (10, 100, 1000):
        trees = [generate(GeneratorParams(seed, n, B, 0.5)) for seed in range(20)]
        assert all(check(d).ok for d in trees)
        per_node[n] = _per_node(trees)
    per_node["chain"] = _per_node([_chain(2000)])
    # a checker that is quadratic in size or depth would blow these ratios up
    assert per_node[1000] < 3 * per_node[100]
    assert per_node["chain"] < 3 * per_node[100]


def test_check_handles_deep_trees():
    d = _chain(5000)
    assert check(d).ok
