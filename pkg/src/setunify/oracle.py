"""Brute-force ground semantics over bounded hereditarily finite universes.

Used to cross-check the solvers: ground solutions are found by backtracking
over variable assignments with partial evaluation pruning, and a unifier set
is complete when every ground solution is a ground instance of one of them.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import IllTypedUnion
from .ground import (CanonicalValue, EMPTY_VALUE, evaluate, is_subset, make_individual,
                     make_set, normal_form, value_to_term)
from .terms import Equation, Kind, Substitution, Term, Var, apply, consts, vars_of


@dataclass(frozen=True)
class UniverseSpec:
    """Individuals plus sets of brace depth at most ``depth``.

    Level 0 holds the individuals and the empty set; level ``d`` adds every
    set of at most ``max_card`` values from level ``d - 1``.
    """
    individuals: tuple[str, ...] = ()
    depth: int = 1
    max_card: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "individuals", tuple(self.individuals))
        if self.depth < 0:
            raise ValueError("depth must be non-negative")


def enumerate_universe(spec: UniverseSpec) -> list[CanonicalValue]:
    level = {make_individual(a) for a in spec.individuals} | {EMPTY_VALUE}
    for _ in range(spec.depth):
        base = sorted(level)
        top = len(base) if spec.max_card is None else min(spec.max_card, len(base))
        new = set(level)
        for k in range(top + 1):
            for combo in itertools.combinations(base, k):
                new.add(make_set(combo))
        level = new
    return sorted(level)


# -- positions -------------------------------------------------------------------

def set_position_vars(equations: Iterable[Equation]) -> set[Var]:
    """Variables all of whose occurrences are union arguments or insert tails."""
    in_set: set[Var] = set()
    elsewhere: set[Var] = set()

    def walk(t: Term, set_pos: bool):
        if isinstance(t, Var):
            (in_set if set_pos else elsewhere).add(t)
            return
        k = t.sym.kind
        if k is Kind.UNION:
            walk(t.args[0], True)
            walk(t.args[1], True)
        elif k is Kind.INSERT:
            walk(t.args[0], False)
            walk(t.args[1], True)
        else:
            for a in t.args:
                walk(a, False)

    for l, r in equations:
        walk(l, False)
        walk(r, False)
    return in_set - elsewhere


# -- partial evaluation --------------------------------------------------------------

class _IllTyped(Exception):
    pass


def _peval(t: Term, asg: Mapping[Var, CanonicalValue]) -> CanonicalValue | None:
    """Value of ``t`` or None when some variable is still unassigned."""
    if isinstance(t, Var):
        return asg.get(t)
    k = t.sym.kind
    if k is Kind.FREE:
        args = []
        for a in t.args:
            v = _peval(a, asg)
            if v is None:
                return None
            args.append(v)
        return make_individual(t.sym.name, args)
    elems, summands, complete = _set_parts(t, asg)
    if not complete:
        return None
    out = make_set(elems)
    for s in summands:
        out = make_set(out[2:] + s[2:])
    return out


def _set_parts(t: Term, asg) -> tuple[list, list, bool]:
    elems: list = []
    summands: list = []
    complete = True
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            v = asg.get(u)
            if v is None:
                complete = False
            elif v[0] != "s":
                raise _IllTyped
            else:
                summands.append(v)
            continue
        k = u.sym.kind
        if k is Kind.EMPTY:
            continue
        if k is Kind.FREE:
            raise _IllTyped
        if k is Kind.UNION:
            stack.extend(u.args)
            continue
        e = _peval(u.args[0], asg)
        if e is None:
            complete = False
        else:
            elems.append(e)
        if k is Kind.INSERT:
            stack.append(u.args[1])
    return elems, summands, complete


def _compatible(v: CanonicalValue, t: Term, asg) -> bool:
    """Can ``t`` still evaluate to ``v`` under an extension of ``asg``?"""
    if isinstance(t, Var):
        return True
    if t.sym.kind is Kind.FREE:
        if v[0] != "i" or v[1] != t.sym.name or len(v) - 2 != len(t.args):
            return False
        return all(_compatible(va, a, asg) for va, a in zip(v[2:], t.args))
    if v[0] != "s":
        return False
    elems, summands, _ = _set_parts(t, asg)
    have = set(v[2:])
    if any(e not in have for e in elems):
        return False
    return all(is_subset(s, v) for s in summands)


def _consistent(eq: Equation, asg) -> bool:
    try:
        vl = _peval(eq.lhs, asg)
        vr = _peval(eq.rhs, asg)
        if vl is not None and vr is not None:
            return vl == vr
        if vl is not None:
            return _compatible(vl, eq.rhs, asg)
        if vr is not None:
            return _compatible(vr, eq.lhs, asg)
        return True
    except _IllTyped:
        return False


def _order_vars(equations: Sequence[Equation]) -> list[Var]:
    """Fill the side with fewer variables first so pruning starts early."""
    order: dict[Var, None] = {}
    for l, r in equations:
        lv, rv = vars_of(l), vars_of(r)
        first, second = (lv, rv) if len(lv) <= len(rv) else (rv, lv)
        for x in first + second:
            order.setdefault(x)
    return list(order)


def iter_ground_solutions(equations: Sequence[Equation] | Equation, spec: UniverseSpec,
                          values: Sequence[CanonicalValue] | None = None
                          ) -> Iterator[dict[Var, CanonicalValue]]:
    """All assignments over the universe that make every equation hold."""
    if isinstance(equations, Equation):
        equations = [equations]
    equations = list(equations)
    universe = list(values) if values is not None else enumerate_universe(spec)
    sets_only = [v for v in universe if v[0] == "s"]
    set_vars = set_position_vars(equations)
    order = _order_vars(equations)
    # equations become checkable as soon as the variables they mention are in place
    watch: list[list[Equation]] = [[] for _ in order]
    index = {x: i for i, x in enumerate(order)}
    ground_eqs = []
    for e in equations:
        vs = vars_of(e.lhs, e.rhs)
        if not vs:
            ground_eqs.append(e)
        for x in vs:
            watch[index[x]].append(e)
    if not all(_consistent(e, {}) for e in ground_eqs):
        return
    asg: dict[Var, CanonicalValue] = {}

    def rec(i: int):
        if i == len(order):
            yield dict(asg)
            return
        x = order[i]
        for v in (sets_only if x in set_vars else universe):
            asg[x] = v
            if all(_consistent(e, asg) for e in watch[i]):
                yield from rec(i + 1)
            del asg[x]

    yield from rec(0)


def ground_solutions(equations, spec: UniverseSpec, values=None) -> list[dict[Var, CanonicalValue]]:
    return list(iter_ground_solutions(equations, spec, values))


def eval_term(t: Term, assignment: Mapping[Var, CanonicalValue]) -> CanonicalValue:
    return evaluate(t, assignment)


def holds(eq: Equation, assignment: Mapping[Var, CanonicalValue]) -> bool:
    try:
        return evaluate(eq.lhs, assignment) == evaluate(eq.rhs, assignment)
    except IllTypedUnion:
        return False


def universe_for(equations: Sequence[Equation], extra: int = 0, depth: int | None = None,
                 max_card: int | None = 2) -> UniverseSpec:
    """A small universe covering the constants of ``equations``."""
    names = [c.sym.name for c in consts(*[t for e in equations for t in e])]
    names += [f"x{i}" for i in range(extra)]
    if depth is None:
        depth = max([_depth(t) for e in equations for t in e] + [1])
    return UniverseSpec(tuple(names), depth, max_card)


def _depth(t: Term) -> int:
    """Brace depth of the value denoted by ``t`` (the empty set has depth 0)."""
    if isinstance(t, Var) or not t.args:
        return 0
    k = t.sym.kind
    if k is Kind.SINGLETON:
        return _depth(t.args[0]) + 1
    if k is Kind.INSERT:
        return max(_depth(t.args[0]) + 1, _depth(t.args[1]))
    return max(_depth(a) for a in t.args)


# -- soundness and completeness ---------------------------------------------------------

@dataclass
class Report:
    ok: bool = True
    checked: int = 0
    counterexamples: list = field(default_factory=list)

    def fail(self, item):
        self.ok = False
        self.counterexamples.append(item)


def check_soundness(unifiers: Iterable[Substitution], equations, spec: UniverseSpec,
                    limit: int = 200, seed: int = 0) -> Report:
    """Every unifier makes both sides equal modulo the set identities, and
    every grounding of it (exhaustive up to ``limit``, sampled beyond) solves
    the equations."""
    if isinstance(equations, Equation):
        equations = [equations]
    rng = random.Random(seed)
    universe = enumerate_universe(spec)
    sets_only = [v for v in universe if v[0] == "s"]
    report = Report()
    for sigma in unifiers:
        inst = [Equation(apply(sigma, l), apply(sigma, r)) for l, r in equations]
        if any(normal_form(e.lhs) != normal_form(e.rhs) for e in inst):
            report.fail((sigma, "not equal modulo the set identities"))
            continue
        rvars = list(vars_of(*[t for e in inst for t in e]))
        set_vars = set_position_vars(inst)
        doms = [sets_only if x in set_vars else universe for x in rvars]
        total = 1
        for d in doms:
            total *= len(d)
        if total <= limit:
            groundings = itertools.product(*doms)
        else:
            groundings = (tuple(rng.choice(d) for d in doms) for _ in range(limit))
        for vals in groundings:
            asg = dict(zip(rvars, vals))
            report.checked += 1
            try:
                bad = any(evaluate(e.lhs, asg) != evaluate(e.rhs, asg) for e in inst)
            except IllTypedUnion:
                continue
            if bad:
                report.fail((sigma, asg))
                break
    return report


def is_ground_instance(sigma: Substitution, target: Mapping[Var, CanonicalValue],
                       spec: UniverseSpec, universe: Sequence[CanonicalValue] | None = None) -> bool:
    """Is there a grounding of ``sigma``'s range giving ``target``?"""
    eqs = [Equation(sigma.get(x, x), value_to_term(v)) for x, v in target.items()]
    for _ in iter_ground_solutions(eqs, spec, universe):
        return True
    return False


def check_completeness(unifiers: Iterable[Substitution], equations, spec: UniverseSpec,
                       max_solutions: int | None = None) -> Report:
    """Every ground solution over the universe is an instance of a unifier."""
    if isinstance(equations, Equation):
        equations = [equations]
    unifiers = list(unifiers)
    universe = enumerate_universe(spec)
    report = Report()
    for n, g in enumerate(iter_ground_solutions(equations, spec, universe)):
        if max_solutions is not None and n >= max_solutions:
            break
        report.checked += 1
        for k, s in enumerate(unifiers):
            if is_ground_instance(s, g, spec, universe):
                # neighbouring ground solutions tend to share a unifier
                unifiers.insert(0, unifiers.pop(k))
                break
        else:
            report.fail(g)
    return report


def projected_solutions(equations, spec: UniverseSpec, variables: Sequence[Var],
                        values=None) -> set[tuple]:
    """Ground solutions projected onto ``variables`` (as value tuples)."""
    return {tuple(g[x] for x in variables)
            for g in iter_ground_solutions(equations, spec, values)}
