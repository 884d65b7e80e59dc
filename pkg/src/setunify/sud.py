"""Deciding solvability of set equations class by class.

Ground equations reduce to canonical-value equality.  For gflat and flat
equations solvability is a counting question on the partition of variables
and constants; a witness is built alongside the verdict.  Nested equations
and systems are decided by asking a solver for a first unifier.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import IllTypedUnion, WrongClass
from .ground import equivalent
from .terms import (EMPTY, App, Equation, Kind, Substitution, Term, TermClass, Var, apply,
                    classify_equation, consts, set_of, vars_of)


@dataclass(frozen=True)
class PartitionSummary:
    V1: tuple[Var, ...]
    V2: tuple[Var, ...]
    V3: tuple[Var, ...]
    C1: tuple[App, ...]
    C2: tuple[App, ...]
    C3: tuple[App, ...]


def _split(left: Sequence, right: Sequence) -> tuple[tuple, tuple, tuple]:
    ls, rs = set(left), set(right)
    return (tuple(x for x in left if x not in rs), tuple(x for x in right if x not in ls),
            tuple(x for x in left if x in rs))


def partition(s: Term, t: Term) -> PartitionSummary:
    v1, v2, v3 = _split(vars_of(s), vars_of(t))
    c1, c2, c3 = _split(consts(s), consts(t))
    return PartitionSummary(v1, v2, v3, c1, c2, c3)


def decide_ground(s: Term, t: Term) -> bool:
    return equivalent(s, t)


class _Side:
    """Element variables, constants and set variables of one side, in one pass."""

    __slots__ = ("ev", "cs", "sv", "nested", "general")

    def __init__(self, t: Term):
        ev: dict = {}
        cs: dict = {}
        sv: dict = {}
        self.nested = self.general = False
        if isinstance(t, App) and t.sym.kind is Kind.FREE:
            self.general = True
            stack = []
        else:
            stack = [t]
        empty, union, insert, single, free = (Kind.EMPTY, Kind.UNION, Kind.INSERT,
                                              Kind.SINGLETON, Kind.FREE)
        while stack:
            u = stack.pop()
            if u.__class__ is Var:
                sv[u.name] = u
                continue
            k = u.sym.kind
            if k is insert:
                stack.append(u.args[1])
            elif k is empty:
                continue
            elif k is union:
                stack.extend(reversed(u.args))
                continue
            elif k is not single:
                raise IllTypedUnion(f"{u!r} in a set position")
            e = u.args[0]
            if e.__class__ is Var:
                ev[e.name] = e
            elif e.sym.kind is not free:
                self.nested = True
            elif e.args:
                self.general = True
            else:
                cs[e.sym.name] = e
        # keyed by name: string hashing keeps the scan linear and cheap
        self.ev: dict[str, Var] = ev
        self.cs: dict[str, App] = cs
        self.sv: dict[str, Var] = sv

    @property
    def elem_vars(self) -> tuple[Var, ...]:
        return tuple(self.ev.values())

    @property
    def consts(self) -> tuple[App, ...]:
        return tuple(self.cs.values())

    @property
    def set_vars(self) -> tuple[Var, ...]:
        return tuple(self.sv.values())

    @property
    def has_elems(self) -> bool:
        return bool(self.ev or self.cs)


def _sides(s: Term, t: Term, allowed: tuple[str, ...]) -> tuple[_Side, _Side, str]:
    left, right = _Side(s), _Side(t)
    if not (s.fvars or t.fvars):
        kind = "ground"
    elif left.nested or right.nested or left.general or right.general:
        kind = "nested"
    elif left.ev or right.ev:
        kind = "flat"
    elif left.sv or right.sv:
        kind = "gflat"
    else:
        kind = "ground"
    if kind not in allowed:
        raise WrongClass(f"equation is {kind}, expected one of {', '.join(allowed)}")
    return left, right, kind


def _verified(s: Term, t: Term, w: Substitution) -> bool:
    return equivalent(apply(w, s), apply(w, t))


def decide_gflat(s: Term, t: Term, witness: bool = True) -> tuple[bool, Substitution | None]:
    """Verdict and witness for an equation between gflat terms.

    When solvable, sending every variable to the set of all constants is a
    solution.  ``witness=False`` skips building it.
    """
    left, right, kind = _sides(s, t, ("ground", "gflat"))
    if kind == "ground":
        return decide_ground(s, t), Substitution()
    has_s, has_t = bool(left.sv), bool(right.sv)
    if has_s and has_t:
        ok = True
    elif has_s:
        ok = left.cs.keys() <= right.cs.keys()
    else:
        ok = right.cs.keys() <= left.cs.keys()
    if not ok or not witness:
        return ok, None
    everything = set_of(dict.fromkeys(left.consts + right.consts))
    return True, Substitution({x: everything for x in dict.fromkeys(left.set_vars + right.set_vars)})


def decide_flat(s: Term, t: Term, witness: bool = True) -> tuple[bool, Substitution | None]:
    """Verdict and witness for an equation between flat terms."""
    left, right, kind = _sides(s, t, ("ground", "gflat", "flat"))
    if kind == "ground":
        return decide_ground(s, t), Substitution()
    if (left.ev.keys() | right.ev.keys()) & (left.sv.keys() | right.sv.keys()):
        # a variable used both as element and as set: leave it to the solver
        return _decide_by_solver([Equation(s, t)])
    if right.sv and not left.sv:
        left, right, s, t = right, left, t, s
    n3 = len(left.ev.keys() & right.ev.keys())
    n1, n2 = len(left.ev) - n3, len(right.ev) - n3
    m3 = len(left.cs.keys() & right.cs.keys())
    m1, m2 = len(left.cs) - m3, len(right.cs) - m3
    if not left.sv:
        if left.has_elems != right.has_elems:
            return False, None
        ok = n1 + n2 + n3 >= m1 + m2 and n1 + n3 >= m2 and n2 + n3 >= m1
    elif not right.sv:
        ok = n2 + n3 >= m1 and (right.has_elems or not left.has_elems)
    else:
        ok = True
    if not ok or not witness:
        return ok, None
    v1, v2, v3 = _split(left.elem_vars, right.elem_vars)
    c1, c2, c3 = _split(left.consts, right.consts)
    w = _flat_witness(left, right, v1, v2, v3, c1, c2, c3)
    if not _verified(s, t, w):
        return _decide_by_solver([Equation(s, t)])
    return True, w


def _flat_witness(left, right, v1, v2, v3, c1, c2, c3) -> Substitution:
    asg: dict[Var, Term] = {}
    spare3 = list(v3)
    for x, c in zip(v1, c2):
        asg[x] = c
    # constants missing from one side must come from shared variables,
    # unless a set variable on that side can absorb them
    if not left.set_vars:
        for c in c2[len(v1):]:
            if spare3:
                asg[spare3.pop(0)] = c
    for x, c in zip(v2, c1):
        asg[x] = c
    if not right.set_vars:
        for c in c1[len(v2):]:
            if spare3:
                asg[spare3.pop(0)] = c
    anything = (c3 + c1 + c2)[:1]
    for x in spare3:
        asg[x] = anything[0] if anything else EMPTY

    def lvals():
        return list(left.consts) + [asg[x] for x in left.elem_vars if x in asg]

    def rvals():
        return list(right.consts) + [asg[x] for x in right.elem_vars if x in asg]

    def fill(group, pool):
        for x in group:
            if x not in asg:
                got = pool()
                asg[x] = got[0] if got else EMPTY

    if rvals():
        fill(v1, rvals)
        fill(v2, lvals)
    else:
        fill(v2, lvals)
        fill(v1, rvals)
    if left.set_vars or right.set_vars:
        every = set_of(dict.fromkeys(lvals() + rvals()))
        for y in left.set_vars + right.set_vars:
            asg[y] = every
    return Substitution(asg)


def _decide_by_solver(system) -> tuple[bool, Substitution | None]:
    from .solve import solve
    first = solve(system).first()
    return (first is not None), first


def decide_nested(s: Term, t: Term) -> bool:
    return decide_system([Equation(s, t)])


def decide_system(system: Sequence[Equation]) -> bool:
    return _decide_by_solver(list(system))[0]


def decide(s: Term, t: Term) -> tuple[TermClass, bool, Substitution | None]:
    """Class of the equation, verdict and witness (when one is at hand)."""
    cls = classify_equation(s, t)
    if cls.kind == "ground":
        return cls, decide_ground(s, t), Substitution()
    if cls.kind == "gflat":
        return (cls, *decide_gflat(s, t))
    if cls.kind == "flat":
        return (cls, *decide_flat(s, t))
    ok, w = _decide_by_solver([Equation(s, t)])
    return cls, ok, w


# -- systems to one equation ------------------------------------------------------------

def numeral(k: int) -> Term:
    """``0 = {}`` and ``k + 1 = {k}``."""
    t: Term = EMPTY
    for _ in range(k):
        t = set_of([t])
    return t


def pair(x: Term, y: Term) -> Term:
    return set_of([set_of([x]), set_of([x, y])])


def system_to_equation(system: Sequence[Equation]) -> Equation:
    """One equation solvable iff the system is: ``{(i, s_i)} = {(i, t_i)}``."""
    ls = [pair(numeral(i), e.lhs) for i, e in enumerate(system, start=1)]
    rs = [pair(numeral(i), e.rhs) for i, e in enumerate(system, start=1)]
    return Equation(set_of(ls), set_of(rs))

