"""General (Ab)(Cl) unification over insertion terms.

The solver keeps three stores: solved bindings, a FIFO of pending equations
and a LIFO stack that is always drained first.  Equations between two
insertion terms branch four ways; branches are explored depth first from
immutable-by-convention state copies.  Membership equations ``X = {t..|X}``
are set aside and merged at the end into ``X = {all elements | N}``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import StepBudgetExceeded, WrongTheory
from .forms import uses_union
from .ground import canonicalize
from .terms import (App, Equation, FreshVars, Kind, Substitution, Term, Var, apply,
                    insert, insert_elements, occurs, set_of, tail, vars_of)
from .unifiers import SolutionStream


class AbclState:
    __slots__ = ("solved", "ns", "aux", "members", "counter")

    def __init__(self, ns: Sequence[Equation] = (), counter: int = 0):
        self.solved: dict[Var, Term] = {}
        self.ns: deque[Equation] = deque(ns)
        self.aux: list[Equation] = []
        self.members: dict[Var, list[Term]] = {}
        self.counter = counter

    def copy(self) -> "AbclState":
        c = AbclState.__new__(AbclState)
        c.solved = dict(self.solved)
        c.ns = deque(self.ns)
        c.aux = list(self.aux)
        c.members = {x: list(es) for x, es in self.members.items()}
        c.counter = self.counter
        return c

    def fresh(self) -> Var:
        v = Var(f"_N{self.counter}")
        self.counter += 1
        return v

    def substitution(self) -> Substitution:
        return Substitution(self.solved)


@dataclass
class Stats:
    steps: int = 0
    branches: int = 0
    failures: int = 0


def _is_ground(t: Term) -> bool:
    return not t.fvars


def clash(a: Term, b: Term) -> bool:
    """Sound test for certain non-unifiability (never True for unifiable terms)."""
    if isinstance(a, Var) or isinstance(b, Var):
        return False
    ka, kb = a.sym.kind, b.sym.kind
    if ka is Kind.FREE and kb is Kind.FREE:
        if a.sym != b.sym:
            return True
        return any(clash(x, y) for x, y in zip(a.args, b.args))
    if (ka is Kind.FREE) != (kb is Kind.FREE):
        return True
    if ka is Kind.EMPTY or kb is Kind.EMPTY:
        return ka is not kb
    if _is_ground(a) and _is_ground(b):
        return canonicalize(a) != canonicalize(b)
    return False


def _closed_mismatch(closed: list[Term], other: list[Term]) -> bool:
    """Can ``other``'s elements not all be among the ``closed`` ones?"""
    if any(all(clash(e, d) for d in closed) for e in other):
        return True
    ground = {canonicalize(e) for e in other if _is_ground(e)}
    return len(ground) > len(closed)


def hopeless(l: Term, r: Term) -> bool:
    """Sound test for two insertion terms that cannot be unified.

    When one side ends in the empty set, every element of the other side
    must match one of its elements, and it must have at least as many
    elements as the other side has distinct ground ones.
    """
    le, lt = insert_elements(l)
    re_, rt = insert_elements(r)
    le, re_ = list(dict.fromkeys(le)), list(dict.fromkeys(re_))
    if isinstance(lt, App) and lt.sym.kind is Kind.EMPTY and _closed_mismatch(le, re_):
        return True
    if isinstance(rt, App) and rt.sym.kind is Kind.EMPTY and _closed_mismatch(re_, le):
        return True
    return False


def _is_empty(t: Term) -> bool:
    return isinstance(t, App) and t.sym.kind is Kind.EMPTY


def closed_membership(st: AbclState, l: App, r: App) -> list[AbclState] | None:
    """Branches for ``{e1, .., ek, f1, .., fn} = {f1, .., fn}`` (either way round).

    The equation says that every ``ei`` is one of the ``fj``; the first
    ``ei`` is matched against each ``fj`` in turn.  Returns None when the
    equation does not have this shape.
    """
    le, lt = insert_elements(l)
    re_, rt = insert_elements(r)
    if not (_is_empty(lt) and _is_empty(rt)):
        return None
    ls, rs = set(le), set(re_)
    if rs <= ls:
        big, small = le, re_
    elif ls <= rs:
        big, small = re_, le
    else:
        return None
    extra = [e for e in dict.fromkeys(big) if e not in set(small)]
    if not extra:
        return [st]
    small = list(dict.fromkeys(small))
    rest = Equation(set_of(extra[1:] + small), set_of(small))
    out = []
    for f in small:
        if clash(extra[0], f):
            continue
        c = st.copy()
        c.aux.append(rest)
        c.aux.append(Equation(extra[0], f))
        out.append(c)
    return out


def _bind(st: AbclState, x: Var, t: Term) -> bool:
    """Rule (5): record ``x = t`` and substitute it everywhere."""
    sub = {x: t}
    st.solved = {y: apply(sub, v) for y, v in st.solved.items()}
    st.solved[x] = t
    st.ns = deque(Equation(apply(sub, l), apply(sub, r)) for l, r in st.ns)
    st.aux = [Equation(apply(sub, l), apply(sub, r)) for l, r in st.aux]
    members = {}
    for y, elems in st.members.items():
        if y == x:
            # the membership constraint becomes an ordinary equation again
            st.ns.append(Equation(t, set_of([apply(sub, e) for e in elems], t)))
            continue
        new = [apply(sub, e) for e in elems]
        if any(occurs(y, e) for e in new):
            return False
        members[y] = new
    st.members = members
    return True


def _actions(st: AbclState, eq: Equation, same_tail: str,
             element_first: bool = True) -> list[AbclState] | None:
    """Apply one rule.  None: ``st`` was updated in place; list: the branches."""
    l, r = eq.lhs, eq.rhs
    if l == r:
        return None
    if not isinstance(l, Var) and isinstance(r, Var):
        l, r = r, l
    if isinstance(l, Var):
        x = l
        if isinstance(r, App) and r.sym.kind is Kind.INSERT:
            elems, rest = insert_elements(r)
            if any(occurs(x, e) for e in elems):
                return []
            if rest == x:
                st.members.setdefault(x, []).extend(elems)
                return None
            if occurs(x, rest):
                return []
        elif occurs(x, r):
            return []
        return None if _bind(st, x, r) else []
    if l.sym != r.sym:
        return []
    if l.sym.kind is Kind.INSERT:
        if _is_ground(l) and _is_ground(r):
            return None if canonicalize(l) == canonicalize(r) else []
        if hopeless(l, r):
            return []
        if element_first:
            kids = closed_membership(st, l, r)
            if kids is not None:
                return kids
        return abcl_step(st, l, r, same_tail, element_first)
    for a, b in zip(l.args, r.args):
        if clash(a, b):
            return []
        st.ns.append(Equation(a, b))
    return None


def _element(st: AbclState, eq: Equation, element_first: bool):
    if element_first:
        st.aux.append(eq)
    else:
        st.ns.append(eq)


def abcl_step(st: AbclState, l: App, r: App, same_tail: str = "all",
              element_first: bool = True) -> list[AbclState]:
    """Branches for ``{t|s} = {t'|s'}``.

    Distinct tails: (i) t=t', s=s'; (ii) t=t', {t|s}=s'; (iii) t=t',
    s={t'|s'}; (iv) s={t'|N}, {t|N}=s' with N fresh.  A shared tail variable
    X: for each selected index i, (i)-(iii) equate t0 with t'_i, and (iv)
    records X={t0|X}.  ``same_tail`` is ``"all"`` (every index) or
    ``"first"`` (index 0 only).  With ``element_first`` the element
    equation is solved before the residual one; otherwise it waits in the
    pending queue.
    """
    t, s = l.args
    t2, s2 = r.args
    tl = tail(l)
    out: list[AbclState] = []
    if not (isinstance(tl, Var) and tl == tail(r)):
        if not clash(t, t2):
            for rest in (Equation(s, s2), Equation(l, s2), Equation(s, r)):
                c = st.copy()
                c.aux.append(rest)
                _element(c, Equation(t, t2), element_first)
                out.append(c)
        c = st.copy()
        n = c.fresh()
        c.aux.append(Equation(s, insert(t2, n)))
        c.aux.append(Equation(insert(t, n), s2))
        out.append(c)
        return out
    x = tl
    left, _ = insert_elements(l)
    right, _ = insert_elements(r)
    t0, rest_l = left[0], left[1:]
    indices = range(len(right)) if same_tail == "all" else range(min(1, len(right)))
    for i in indices:
        ti = right[i]
        if clash(t0, ti):
            continue
        minus_i = set_of(right[:i] + right[i + 1:], x)
        for eq in (Equation(set_of(rest_l, x), minus_i), Equation(l, minus_i),
                   Equation(set_of(rest_l, x), r)):
            c = st.copy()
            c.aux.append(eq)
            _element(c, Equation(t0, ti), element_first)
            out.append(c)
    c = st.copy()
    c.aux.append(Equation(x, insert(t0, x)))
    c.aux.append(Equation(set_of(rest_l, x), r))
    out.append(c)
    return out


def abcl_final(st: AbclState) -> AbclState | None:
    """Merge membership equations per variable, then reject cyclic bindings."""
    pending = list(st.members.items())
    st.members = {}
    for k, (x, elems) in enumerate(pending):
        if any(occurs(x, e) for e in elems):
            return None
        n = st.fresh()
        value = set_of(list(dict.fromkeys(elems)), n)
        sub = {x: value}
        st.solved = {y: apply(sub, v) for y, v in st.solved.items()}
        st.solved[x] = value
        pending[k + 1:] = [(y, [apply(sub, e) for e in es]) for y, es in pending[k + 1:]]
    for x, v in st.solved.items():
        if occurs(x, v):
            return None
    return st


def _check_input(system: Sequence[Equation]):
    for l, r in system:
        for side in (l, r):
            if uses_union(side):
                raise WrongTheory("union terms need the general ACI1 solver")


def _lower_singletons(t: Term) -> Term:
    if isinstance(t, Var) or not t.args:
        return t
    args = tuple(_lower_singletons(a) for a in t.args)
    if t.sym.kind is Kind.SINGLETON:
        return set_of([args[0]])
    return App(t.sym, args)


def iter_solutions(system: Sequence[Equation], max_steps: int | None = None,
                   same_tail: str = "all", stats: Stats | None = None,
                   element_first: bool = True) -> Iterator[AbclState]:
    """Final states of all successful branches, depth first."""
    system = [Equation(_lower_singletons(l), _lower_singletons(r)) for l, r in system]
    _check_input(system)
    stats = stats if stats is not None else Stats()
    start = FreshVars.avoiding(*[t for e in system for t in e]).counter
    stack = [AbclState(system, start)]
    while stack:
        st = stack.pop()
        while True:
            stats.steps += 1
            if max_steps is not None and stats.steps > max_steps:
                raise StepBudgetExceeded(f"more than {max_steps} steps")
            if st.aux:
                eq = st.aux.pop()
            elif st.ns:
                eq = st.ns.popleft()
            else:
                done = abcl_final(st)
                if done is not None:
                    yield done
                else:
                    stats.failures += 1
                break
            kids = _actions(st, eq, same_tail, element_first)
            if kids is None:
                continue
            if not kids:
                stats.failures += 1
                break
            stats.branches += len(kids) - 1
            stack.extend(reversed(kids[1:]))
            st = kids[0]


def abcl_unify(system: Sequence[Equation] | Equation, max_steps: int | None = None,
               same_tail: str = "all", restrict: bool = True,
               stats: Stats | None = None, element_first: bool = True) -> SolutionStream:
    """Complete set of (Ab)(Cl) unifiers, as a lazy stream of substitutions.

    With ``restrict`` the unifiers are cut down to the input variables.
    ``element_first=False`` follows the textbook search exactly; the default
    solves element equations as soon as they arise and reads
    ``{e1, .., ek, f1, .., fn} = {f1, .., fn}`` as "each ``ei`` is some ``fj``".
    """
    if isinstance(system, Equation):
        system = [system]
    system = [Equation(_lower_singletons(l), _lower_singletons(r)) for l, r in system]
    _check_input(system)
    inputs = vars_of(*[t for e in system for t in e])

    def gen():
        for st in iter_solutions(system, max_steps, same_tail, stats, element_first):
            sub = st.substitution()
            yield sub.restrict(inputs) if restrict else sub

    return SolutionStream(gen())
