"""Canonical values of ground terms in the hereditarily finite universe.

A canonical value is a nested tuple:

* ``("i", name, *args)`` for an individual ``name(args)``,
* ``("s", n, e1, ..., en)`` for a set with ``n`` distinct sorted elements.

Plain tuple comparison is then a total order: individuals before sets,
individuals by name and then arguments, sets by cardinality and then
elementwise.  Two ground terms denote the same value iff their canonical
values are equal, which on well-founded trees coincides with bisimilarity.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .errors import IllTypedUnion, NotGround
from .terms import App, Kind, Term, Var

CanonicalValue = tuple

EMPTY_VALUE: CanonicalValue = ("s", 0)


def make_set(elems: Iterable[CanonicalValue]) -> CanonicalValue:
    uniq = sorted(set(elems))
    return ("s", len(uniq), *uniq)


def make_individual(name: str, args: Iterable[CanonicalValue] = ()) -> CanonicalValue:
    return ("i", name, *args)


def is_set_value(v: CanonicalValue) -> bool:
    return v[0] == "s"


def set_elements(v: CanonicalValue) -> tuple:
    return v[2:]


def value_union(a: CanonicalValue, b: CanonicalValue) -> CanonicalValue:
    if a[1] == 0:
        return b
    if b[1] == 0:
        return a
    return make_set(a[2:] + b[2:])


def is_subset(a: CanonicalValue, b: CanonicalValue) -> bool:
    if a[1] > b[1]:
        return False
    return set(a[2:]) <= set(b[2:])


def format_value(v: CanonicalValue) -> str:
    if v[0] == "i":
        if len(v) == 2:
            return v[1]
        return f"{v[1]}({', '.join(format_value(a) for a in v[2:])})"
    return "{" + ", ".join(format_value(e) for e in v[2:]) + "}"


def evaluate(t: Term, assignment: Mapping[Var, CanonicalValue],
             memo: dict | None = None) -> CanonicalValue:
    """Value of ``t`` with variables read from ``assignment``.

    Raises NotGround for an unassigned variable and IllTypedUnion when a
    set position evaluates to an individual.
    """
    if memo is None:
        memo = {}

    def ev(u: Term) -> CanonicalValue:
        if isinstance(u, Var):
            try:
                return assignment[u]
            except KeyError:
                raise NotGround(f"variable {u.name} has no value") from None
        hit = memo.get(u)
        if hit is not None:
            return hit
        k = u.sym.kind
        if k is Kind.FREE:
            v = make_individual(u.sym.name, [ev(a) for a in u.args])
        elif k is Kind.EMPTY:
            v = EMPTY_VALUE
        elif k is Kind.SINGLETON:
            v = make_set([ev(u.args[0])])
        elif k is Kind.INSERT:
            elems = []
            r = u
            while isinstance(r, App) and r.sym.kind is Kind.INSERT:
                elems.append(ev(r.args[0]))
                r = r.args[1]
            rest = ev(r)
            if rest[0] != "s":
                raise IllTypedUnion("insertion into an individual")
            v = make_set(elems + list(rest[2:]))
        else:
            a, b = ev(u.args[0]), ev(u.args[1])
            if a[0] != "s" or b[0] != "s":
                raise IllTypedUnion("union of an individual")
            v = value_union(a, b)
        memo[u] = v
        return v

    return ev(t)


def canonicalize(t: Term) -> CanonicalValue:
    return evaluate(t, {})


def equivalent(s: Term, t: Term) -> bool:
    return canonicalize(s) == canonicalize(t)


def value_to_term(v: CanonicalValue) -> Term:
    """A ground term (insertion chains) denoting ``v``."""
    from .terms import EMPTY, Symbol, set_of
    if v[0] == "i":
        args = tuple(value_to_term(a) for a in v[2:])
        return App(Symbol(v[1], len(args)), args)
    return set_of([value_to_term(e) for e in v[2:]], EMPTY)


def normal_form(t: Term) -> tuple:
    """Normal form modulo (A)(C)(I)(1) and (Ab)(Cl) with variables as atoms.

    Ground terms get their canonical value.  A set term with variable (or
    ill-typed) summands becomes ``("u", elems, summands)``, and a variable in
    element position becomes ``("v", name)``.  Two terms are equal in the
    combined theory iff their normal forms are equal.
    """
    memo: dict = {}

    def nf(u: Term) -> tuple:
        if isinstance(u, Var):
            return ("v", u.name)
        hit = memo.get(u)
        if hit is not None:
            return hit
        if u.sym.kind is Kind.FREE:
            v = make_individual(u.sym.name, [nf(a) for a in u.args])
        else:
            elems: set = set()
            summands: set = set()
            stack = [u]
            while stack:
                w = stack.pop()
                if isinstance(w, Var):
                    summands.add(("v", w.name))
                    continue
                k = w.sym.kind
                if k is Kind.EMPTY:
                    continue
                if k is Kind.SINGLETON:
                    elems.add(nf(w.args[0]))
                elif k is Kind.INSERT:
                    elems.add(nf(w.args[0]))
                    stack.append(w.args[1])
                elif k is Kind.UNION:
                    stack.extend(w.args)
                else:
                    summands.add(nf(w))
            if summands:
                v = ("u", tuple(sorted(elems)), tuple(sorted(summands)))
            else:
                v = make_set(elems)
        memo[u] = v
        return v

    return nf(t)


def equal_modulo_theory(s: Term, t: Term) -> bool:
    return normal_form(s) == normal_form(t)
