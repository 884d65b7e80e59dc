"""Rewriting set terms between the insertion form and the union form."""
from __future__ import annotations

from .errors import IllTypedUnion, WrongTheory
from .syntax import _collect
from .terms import EMPTY, App, Equation, Kind, Term, Var, set_of, singleton, union_of


def _split(t: Term):
    elems: list = []
    tails: list = []
    raw: list = []
    _collect(t, elems, tails, raw)
    if raw:
        raise IllTypedUnion(f"{t!r} has an individual in a set position")
    return list(dict.fromkeys(elems)), list(dict.fromkeys(tails))


def to_insert_form(t: Term) -> Term:
    """Insertion chains only; fails when a set has two or more set variables."""
    if isinstance(t, Var):
        return t
    if t.sym.kind is Kind.FREE:
        return App(t.sym, tuple(to_insert_form(a) for a in t.args)) if t.args else t
    elems, tails = _split(t)
    if len(tails) > 1:
        raise WrongTheory(f"{t!r} needs the union constructor")
    return set_of([to_insert_form(e) for e in elems], tails[0] if tails else EMPTY)


def to_union_form(t: Term) -> Term:
    """Unions of singletons and variables; ``{a, b | X}`` becomes ``{a} + {b} + X``."""
    if isinstance(t, Var):
        return t
    if t.sym.kind is Kind.FREE:
        return App(t.sym, tuple(to_union_form(a) for a in t.args)) if t.args else t
    elems, tails = _split(t)
    return union_of([singleton(to_union_form(e)) for e in elems] + tails)


def system_to_insert_form(system) -> list[Equation]:
    return [Equation(to_insert_form(l), to_insert_form(r)) for l, r in system]


def system_to_union_form(system) -> list[Equation]:
    return [Equation(to_union_form(l), to_union_form(r)) for l, r in system]


def uses_union(t: Term) -> bool:
    from .terms import subterms
    return any(isinstance(u, App) and u.sym.kind is Kind.UNION for u in subterms(t))
