"""Random well-formed deductions for property tests.

Trees are grown top-down from a goal: every node picks a rule whose
conclusion fits the goal, splits the remaining node budget among the
premises, and recurses.  Hypotheses either reuse a class discharged further
down or open a class shared by all open hypotheses of the same formula, so
the output passes ``check`` by construction.  ``redex_bias`` is the chance
that an elimination or non-contradiction is handed a detour: an
introduction, a reductio or a segment on its major premise.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .kernel import (
    B, RULES, Hyp, Inf, SystemConfig, discharge_formulas, match_rule, metavariables,
    premise_formulas,
)
from .syntax import BOT, CONNECTIVES, SIGNS, Atom, Compound, SignedFormula, is_atomic, star

ATOMS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class GeneratorParams:
    seed: int = 0
    max_nodes: int = 30
    cfg: SystemConfig = B
    redex_bias: float = 0.5
    max_degree: int = 2

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")
        if not 0.0 <= self.redex_bias <= 1.0:
            raise ValueError("redex_bias must lie in [0, 1]")


class _Generator:
    def __init__(self, p: GeneratorParams):
        self.rng = random.Random(p.seed)
        self.cfg = p.cfg
        self.bias = p.redex_bias
        self.max_degree = p.max_degree
        self.connectives = sorted(p.cfg.connectives)
        self.next_label = 1
        self.open = {}
        self.can_bot = p.cfg.nc != "off"
        rules = [r for r in RULES.values()
                 if r.connective is None or r.connective in p.cfg.connectives]
        self.intros = [r for r in rules if r.kind == "intro"]
        self.elims = [r for r in rules if r.kind == "elim"]

    # -- formulas ------------------------------------------------------------

    def fresh(self) -> int:
        n = self.next_label
        self.next_label += 1
        return n

    def formula(self, depth):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.45:
            return Atom(rng.choice(ATOMS))
        conn = rng.choice(self.connectives)
        return Compound(conn, tuple(self.formula(depth - 1) for _ in range(CONNECTIVES[conn])))

    def signed(self, depth):
        return SignedFormula(self.rng.choice(SIGNS), self.formula(depth))

    # -- feasibility ---------------------------------------------------------

    def cost(self, c) -> int:
        """Fewest nodes needed to derive ``c``."""
        return 3 if c is BOT else 1

    def red_ok(self, goal) -> bool:
        if goal is BOT or not self.can_bot or self.cfg.reductio == "off":
            return False
        return self.cfg.reductio == "general" or is_atomic(goal)

    def split(self, budget, premises):
        """Share ``budget`` among premises, or ``None`` when it is too small."""
        need = [self.cost(c) for c in premises]
        spare = budget - sum(need)
        if spare < 0:
            return None
        cuts = sorted(self.rng.randint(0, spare) for _ in range(len(premises) - 1))
        shares = [b - a for a, b in zip([0] + cuts, cuts + [spare])]
        return [n + s for n, s in zip(need, shares)]

    # -- deductions ----------------------------------------------------------

    def hyp(self, goal, scope):
        local = [label for label, f in scope if f == goal]
        if local and self.rng.random() < 0.85:
            return Hyp(self.rng.choice(local), goal)
        if goal not in self.open:
            self.open[goal] = self.fresh()
        return Hyp(self.open[goal], goal)

    def apply(self, rule, env, goal, budget, scope, forced=None):
        premises = premise_formulas(rule, env)
        shares = self.split(budget - 1, premises)
        if shares is None:
            return None
        discharges = discharge_formulas(rule, env)
        labels = [self.fresh() for _ in discharges]
        built = []
        for k, (c, share) in enumerate(zip(premises, shares)):
            inner = scope + [(label, f) for label, (idx, f) in zip(labels, discharges) if idx == k]
            built.append(self.build(c, share, inner, (forced or {}).get(k)))
        return Inf(rule.name, goal, tuple(labels), tuple(built))

    def bind(self, rule, goal):
        env = match_rule(rule, goal, [])
        if env is None:
            return None
        for v in sorted(metavariables(rule) - env.keys()):
            env[v] = self.formula(self.rng.randint(0, self.max_degree - 1))
        return env

    def detour(self, c, budget):
        """A shape that makes ``c`` a maximal formula or segment end."""
        rng = self.rng
        options = []
        if any(match_rule(r, c, []) is not None for r in self.intros) and budget >= 2:
            options.append("intro")
        if self.red_ok(c) and budget >= 4:
            options.append("red")
        if budget >= 4:
            options.append("segment")
        return rng.choice(options) if options else None

    def build(self, goal, budget, scope, forced=None):
        rng = self.rng
        if goal is BOT:
            return self.bot(budget, scope)
        if budget <= 1:
            return self.hyp(goal, scope)
        choice = self.detour(goal, budget) if forced == "detour" else forced
        if choice is None:
            weights = {"hyp": 1.0 if budget > 3 else 3.0, "elim": 2.5, "segment": 0.6}
            if any(match_rule(r, goal, []) is not None for r in self.intros):
                weights["intro"] = 3.0
            if self.red_ok(goal):
                weights["red"] = 1.0
            names = sorted(weights)
            choice = rng.choices(names, [weights[n] for n in names])[0]
        out = None
        if choice == "intro":
            rules = [r for r in self.intros if match_rule(r, goal, []) is not None]
            if rules:
                rule = rng.choice(rules)
                out = self.apply(rule, self.bind(rule, goal), goal, budget, scope)
        elif choice == "red" and self.red_ok(goal):
            out = self.apply(RULES["red"], {"alpha": goal}, goal, budget, scope)
        elif choice == "segment":
            rules = [r for r in self.elims if r.name in ("+orE", "-andE")]
            if rules:
                rule = rng.choice(rules)
                out = self.apply(rule, self.bind(rule, goal), goal, budget, scope,
                                 self.major_force(rule, budget))
        elif choice == "elim":
            rules = [r for r in self.elims if r.name not in ("+orE", "-andE")
                     and match_rule(r, goal, []) is not None]
            if rules:
                rule = rng.choice(rules)
                out = self.apply(rule, self.bind(rule, goal), goal, budget, scope,
                                 self.major_force(rule, budget))
        return out if out is not None else self.hyp(goal, scope)

    def major_force(self, rule, budget):
        if self.rng.random() >= self.bias:
            return None
        return {0: "detour"}

    def bot(self, budget, scope):
        """Non-contradiction, possibly sitting on detours; ⊥ needs three nodes."""
        rng = self.rng
        if budget >= 5 and rng.random() < 0.3:
            rule = RULES[rng.choice(["+orE", "-andE"])]
            env = self.bind(rule, BOT)
            out = self.apply(rule, env, BOT, budget, scope)
            if out is not None:
                return out
        alpha = None
        if scope and rng.random() < 0.5:
            alpha = rng.choice(scope)[1]
        if alpha is None or (self.cfg.nc == "atomic" and not is_atomic(alpha)):
            depth = 0 if self.cfg.nc == "atomic" else rng.randint(0, self.max_degree)
            alpha = self.signed(depth)
        left, right = (alpha, star(alpha)) if rng.random() < 0.5 else (star(alpha), alpha)
        forced = {}
        if rng.random() < self.bias:
            pick = rng.random()
            if pick < 0.4:
                forced = {0: "intro", 1: "intro"}
            elif pick < 0.7:
                forced = {rng.randint(0, 1): "red"}
            else:
                forced = {rng.randint(0, 1): "detour"}
        return self.apply(RULES["nc"], {"alpha": left}, BOT, budget, scope, forced)


def generate(p: GeneratorParams):
    """A deduction in ``p.cfg`` with at most ``p.max_nodes`` nodes."""
    gen = _Generator(p)
    goal = gen.signed(gen.rng.randint(0, p.max_degree))
    return gen.build(goal, p.max_nodes, [])
