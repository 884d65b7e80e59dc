"""Lazy solution streams and comparison of unifiers modulo renaming."""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

from .ground import normal_form
from .terms import Substitution, Term, Var, apply, subterms, vars_of


class SolutionStream:
    """Lazily enumerated unifiers; ``complete`` becomes True once exhausted."""

    def __init__(self, source: Iterable[Substitution]):
        self._it = iter(source)
        self._seen: list[Substitution] = []
        self.complete = False

    def __iter__(self) -> Iterator[Substitution]:
        yield from self._seen
        for s in self._it:
            self._seen.append(s)
            yield s
        self.complete = True

    def take(self, n: int | None = None) -> list[Substitution]:
        """At most ``n`` unifiers (all when ``n`` is None)."""
        out: list[Substitution] = []
        if n is not None and n <= 0:
            return out
        for s in self:
            out.append(s)
            if n is not None and len(out) >= n:
                break
        return out

    def first(self) -> Substitution | None:
        for s in self:
            return s
        return None

    def is_empty(self) -> bool:
        return self.first() is None


def _rename(t: Term, mapping: dict[Var, Var]) -> Term:
    return apply(mapping, t)


def canonical_key(sub: Substitution, variables: Sequence[Var],
                  max_perms: int = 5040) -> tuple:
    """Key equal for two unifiers iff they agree on ``variables`` up to
    renaming of the remaining variables and the set identities.

    Range variables are numbered by an occurrence signature; ties are broken
    by trying every permutation inside each tie group (bounded by
    ``max_perms``) and keeping the least key.
    """
    variables = list(variables)
    images = [sub.get(x, x) for x in variables]
    inputs = set(variables)
    ranged = [v for v in vars_of(*images) if v not in inputs]
    if not ranged:
        return tuple(normal_form(t) for t in images)

    def sig(v: Var) -> tuple:
        return tuple(_count(v, t) for t in images)

    groups: dict[tuple, list[Var]] = {}
    for v in ranged:
        groups.setdefault(sig(v), []).append(v)
    ordered = sorted(groups.items())
    best = None
    choices = [itertools.permutations(g) for _, g in ordered]
    for n, combo in enumerate(itertools.product(*choices)):
        if n >= max_perms:
            break
        flat = [v for group in combo for v in group]
        mapping = {v: Var(f"_R{i}") for i, v in enumerate(flat)}
        key = tuple(normal_form(_rename(t, mapping)) for t in images)
        if best is None or key < best:
            best = key
    return best


def _count(v: Var, t: Term) -> int:
    return sum(1 for u in subterms(t) if u == v)


def dedup_modulo_renaming(subs: Iterable[Substitution], variables: Sequence[Var]) -> list[Substitution]:
    out = []
    seen = set()
    for s in subs:
        k = canonical_key(s, variables)
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out


def same_modulo_renaming(s1: Substitution, s2: Substitution, variables: Sequence[Var]) -> bool:
    return canonical_key(s1, variables) == canonical_key(s2, variables)


def restrict_all(subs: Iterable[Substitution], variables: Sequence[Var]) -> list[Substitution]:
    return [s.restrict(variables) for s in subs]

