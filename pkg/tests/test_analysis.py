from hypothesis import given, settings, strategies as st

from bilateral import (
    SystemConfig, check, effective_degree, is_normal, maximal_occurrences, normalize, parse,
    rank, segments, subformula_report,
)
from bilateral.analysis import maximal_segments, redundant_eliminations, scan
from bilateral.generator import GeneratorParams, generate
from bilateral.kernel import SEGMENT_RULES, Inf, walk

from conftest import CORPUS, read
from oracles import brute_maximal, brute_rank, brute_segments, inject

SYSTEMS = ["B", "B+tonk", "B+conk", "B+honk", "B-coord"]

# +orE concluding + C from two + C hypotheses, optionally used as the major premise of +impE
OR_C = "(+orE (+ C) (1 2) (hyp 3 (+ (or A B))) (hyp 4 (+ C)) (hyp 5 (+ C)))"
OR_IMP = "(+orE (+ (imp C D)) (1 2) (hyp 3 (+ (or A B))) (hyp 4 (+ (imp C D))) (hyp 5 (+ (imp C D))))"


def as_rank(r):
    return None if r.zero else (r.degree, r.l)


def test_examples_without_segments():
    d = read(CORPUS / "ie_and.bnd")
    assert segments(d) == []
    [r] = maximal_occurrences(d)
    assert (r.kind, r.position, r.effective_degree) == ("ie", (0,), 1)
    assert as_rank(rank(d)) == (1, 1)
    assert rank(parse("(hyp 1 (+ A))")).zero and is_normal(parse("(hyp 1 (+ A))"))


def test_plain_and_maximal_segments():
    d = parse(OR_C)
    assert [(s.positions, s.length, s.maximal) for s in segments(d)] == \
        [(((1,), ()), 2, False), (((2,), ()), 2, False)]
    assert is_normal(d)
    d = parse(f"(+impE (+ D) () {OR_IMP} (hyp 6 (+ C)))")
    assert check(d).ok
    assert [(s.positions, s.maximal) for s in segments(d)] == \
        [(((0, 1), (0,)), True), (((0, 2), (0,)), True)]
    [perm] = scan(d).perms
    assert perm.position == (0,) and perm.weight == 4
    assert len(maximal_segments(d)) == 2 and maximal_occurrences(d) == []


def test_explosion_has_one_reductio_redex():
    d = read(CORPUS / "conk_explosion.bnd")
    [r] = maximal_occurrences(d)
    assert (r.kind, r.connective) == ("re", "conk")
    assert not is_normal(d)


def test_conjunction_clash_has_two_redexes():
    d = read(CORPUS / "inc_and.bnd")
    kinds = sorted((r.kind, r.position[-1]) for r in maximal_occurrences(d))
    assert kinds == [("inc", 0), ("inc", 1)]


def test_bump_on_right_premise():
    left = "(+andI (+ (and A (and B C))) () (hyp 1 (+ A)) (hyp 2 (+ (and B C))))"
    right = "(-andI1 (- (and A (and B C))) () (hyp 3 (- A)))"
    d = parse(f"(nc bot () {left} {right})")
    degrees = {r.position: effective_degree(r, d) for r in maximal_occurrences(d)}
    assert degrees == {(0,): 2, (1,): 3}
    # a lone maximal right premise keeps its degree
    d = parse("(nc bot () (hyp 1 (+ A)) (red (- A) (2) (nc bot () (hyp 2 (+ A)) (hyp 3 (- A)))))")
    [r] = maximal_occurrences(d)
    assert r.kind == "rnc" and effective_degree(r, d) == 0 and not r.bumped


def test_rank_counts_only_the_top_level():
    d = parse(f"(+andI (+ (and D (and A B))) () (+impE (+ D) () {OR_IMP} (hyp 6 (+ C))) "
              "(+andE1 (+ (and A B)) () (+andI (+ (and (and A B) C)) () (hyp 7 (+ (and A B))) (hyp 8 (+ C)))))")
    assert check(d).ok
    # one ie redex of degree 2, plus two length-2 chains of degree 1 through one +orE
    assert as_rank(rank(d)) == (2, 1) == brute_rank(d)
    assert as_rank(rank(d, literal=True)) == (2, 5) == brute_rank(d, literal=True)


def test_subformula_report_examples():
    assert subformula_report(parse("(hyp 1 (+ A))")) == []
    d = read(CORPUS / "ie_and.bnd")
    [v] = subformula_report(d)
    assert v.position == (0,) and str(v.formula) == "+ A∧B"
    out, _ = normalize(d)
    assert subformula_report(out) == []


def test_redundant_eliminations():
    assert [r.position for r in redundant_eliminations(parse(OR_C))] == [()]
    needed = parse("(+orE (+ (or A B)) (1 2) (hyp 3 (+ (or A B))) "
                   "(+orI1 (+ (or A B)) () (hyp 1 (+ A))) (+orI2 (+ (or A B)) () (hyp 2 (+ B))))")
    assert redundant_eliminations(needed) == []


# ---------------------------------------------------------------------------
# properties over generated deductions

seeds = st.integers(0, 2**32)


def sample(seed, system, nodes=30, times=0):
    cfg = SystemConfig.named(system)
    d = generate(GeneratorParams(seed, nodes, cfg, 1.0))
    return inject(d, seed, times) if times and system == "B" else d


@settings(max_examples=300, deadline=None)
@given(seeds, st.sampled_from(SYSTEMS), st.integers(0, 3))
def test_agrees_with_brute_force(seed, system, times):
    d = sample(seed, system, 16, times)
    a = scan(d)
    assert sorted((s.positions, s.maximal) for s in a.segments) == brute_segments(d)
    assert {(r.kind, r.position) for r in a.formulas} == brute_maximal(d)
    assert as_rank(a.rank()) == brute_rank(d)
    assert as_rank(a.rank(literal=True)) == brute_rank(d, literal=True)


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from(SYSTEMS))
def test_rank_zero_iff_normal(seed, system):
    d = sample(seed, system)
    assert rank(d).zero == is_normal(d) == (not maximal_occurrences(d) and not maximal_segments(d))


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 4))
def test_bump_is_zero_or_one(seed, times):
    d = sample(seed, "B", 30, times)
    for r in scan(d).items:
        assert r.effective_degree - r.degree in (0, 1)
        assert effective_degree(r, d) == r.effective_degree


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 4))
def test_segments_through_minor_premises(seed, times):
    d = sample(seed, "B", 30, times)
    found = segments(d)

    def starts(node):
        # chains entering an occurrence: one per chain start above it
        if isinstance(node, Inf) and node.rule in SEGMENT_RULES:
            return starts(node.premises[1]) + starts(node.premises[2])
        return 1

    for path, node in walk(d):
        if isinstance(node, Inf) and node.rule in SEGMENT_RULES:
            for k in (1, 2):
                through = [s for s in found if path + (k,) in s.positions]
                assert len(through) == starts(node.premises[k])
                # a minor premise not concluded by +orE/-andE starts exactly one segment
                if starts(node.premises[k]) == 1:
                    assert through[0].top == path + (k,)
    for s in found:
        assert s.length >= 2 and s.length == len(s.positions)
