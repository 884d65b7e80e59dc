"""Terms over a signature with reserved set constructors.

Four constructors are reserved: the empty set, binary union, element
insertion ``{t | s}`` and the singleton ``{t}``.  Every other function
symbol is free and builds individuals.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import IllTypedUnion, NotASetTerm


class Kind(enum.Enum):
    EMPTY = "empty"
    UNION = "union"
    INSERT = "insert"
    SINGLETON = "singleton"
    FREE = "free"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: Kind = Kind.FREE

    def __post_init__(self):
        expected = {Kind.EMPTY: 0, Kind.UNION: 2, Kind.INSERT: 2, Kind.SINGLETON: 1}
        if self.kind in expected and self.arity != expected[self.kind]:
            raise ValueError(f"{self.kind.value} constructor must have arity {expected[self.kind]}")
        if self.kind is Kind.FREE and self.name in RESERVED_NAMES:
            raise ValueError(f"free symbol {self.name!r} collides with a reserved constructor")


RESERVED_NAMES = frozenset({"{}", "+", "{|}", "{.}"})

EMPTY_SYM = Symbol("{}", 0, Kind.EMPTY)
UNION_SYM = Symbol("+", 2, Kind.UNION)
INSERT_SYM = Symbol("{|}", 2, Kind.INSERT)
SINGLETON_SYM = Symbol("{.}", 1, Kind.SINGLETON)

SET_KINDS = frozenset({Kind.EMPTY, Kind.UNION, Kind.INSERT, Kind.SINGLETON})


class Term:
    __slots__ = ()


class Var(Term):
    __slots__ = ("name", "_hash", "fvars")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))
        self.fvars = frozenset((self,))

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.name < other.name

    def __repr__(self):
        return self.name


_NO_VARS: frozenset = frozenset()


class App(Term):
    __slots__ = ("sym", "args", "_hash", "fvars")

    def __init__(self, sym: Symbol, args: tuple = ()):
        if len(args) != sym.arity:
            raise ValueError(f"{sym.name} expects {sym.arity} arguments, got {len(args)}")
        self.sym = sym
        self.args = tuple(args)
        self._hash = hash((sym, self.args))
        fv = _NO_VARS
        for a in self.args:
            av = a.fvars
            if av:
                fv = av if not fv else fv | av
        self.fvars = fv

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, App) and self._hash == other._hash
                and self.sym == other.sym and self.args == other.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .syntax import print_term
        return print_term(self, "union")


EMPTY = App(EMPTY_SYM)


def const(name: str) -> App:
    return App(Symbol(name, 0))


def app(name: str, *args: Term) -> App:
    return App(Symbol(name, len(args)), args)


def union(a: Term, b: Term) -> App:
    return App(UNION_SYM, (a, b))


def insert(elem: Term, rest: Term) -> App:
    return App(INSERT_SYM, (elem, rest))


def singleton(elem: Term) -> App:
    return App(SINGLETON_SYM, (elem,))


def set_of(elems: Iterable[Term], tail: Term = EMPTY) -> Term:
    """Insertion chain ``{e1, ..., en | tail}``."""
    out = tail
    for e in reversed(list(elems)):
        out = insert(e, out)
    return out


def union_of(parts: Iterable[Term]) -> Term:
    """Right-nested union of ``parts``; the empty union is the empty set."""
    parts = list(parts)
    if not parts:
        return EMPTY
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = union(p, out)
    return out


def kind(t: Term) -> Kind | None:
    return t.sym.kind if isinstance(t, App) else None


def is_var(t: Term) -> bool:
    return isinstance(t, Var)


def is_set_constructed(t: Term) -> bool:
    return isinstance(t, App) and t.sym.kind in SET_KINDS


def is_individual(t: Term) -> bool:
    return isinstance(t, App) and t.sym.kind is Kind.FREE


# -- traversal helpers -------------------------------------------------------

def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.extend(reversed(u.args))


def vars_of(*terms: Term) -> tuple[Var, ...]:
    """Variables of ``terms`` in order of first occurrence."""
    seen: dict[Var, None] = {}
    for t in terms:
        for u in subterms(t):
            if isinstance(u, Var):
                seen.setdefault(u)
    return tuple(seen)


def consts(*terms: Term) -> tuple[App, ...]:
    """Simple individual terms (free constants) in order of first occurrence."""
    seen: dict[App, None] = {}
    for t in terms:
        for u in subterms(t):
            if isinstance(u, App) and u.sym.kind is Kind.FREE and u.sym.arity == 0:
                seen.setdefault(u)
    return tuple(seen)


def occurs(x: Var, t: Term) -> bool:
    return x in t.fvars


def size(t: Term) -> int:
    """Occurrences of symbols and variables in the concrete term.

    Every constructor counts, so ``{a, b}`` written as ``{a | {b | {}}}``
    has size 5.
    """
    return sum(1 for _ in subterms(t))


def tail(t: Term) -> Term:
    while isinstance(t, App) and t.sym.kind is Kind.INSERT:
        t = t.args[1]
    return t


def insert_elements(t: Term) -> tuple[list[Term], Term]:
    """Split an insertion chain into its elements and its tail."""
    elems = []
    while isinstance(t, App) and t.sym.kind is Kind.INSERT:
        elems.append(t.args[0])
        t = t.args[1]
    return elems, t


def union_summands(t: Term) -> list[Term]:
    """Flatten nested unions; drops empty-set summands and syntactic duplicates."""
    out: dict[Term, None] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App) and u.sym.kind is Kind.UNION:
            stack.append(u.args[1])
            stack.append(u.args[0])
        elif isinstance(u, App) and u.sym.kind is Kind.EMPTY:
            continue
        else:
            out.setdefault(u)
    return list(out)


# -- substitutions -----------------------------------------------------------

class Substitution(Mapping[Var, Term]):
    """Finite map from variables to terms; identity bindings are dropped."""

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._map = {x: t for x, t in items if t != x}

    def __getitem__(self, x):
        return self._map[x]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{x}/{t!r}" for x, t in self._map.items())
        return f"[{inner}]"

    def __call__(self, t: Term) -> Term:
        return apply(self, t)

    def restrict(self, variables: Iterable[Var]) -> "Substitution":
        keep = set(variables)
        return Substitution({x: t for x, t in self._map.items() if x in keep})

    def is_idempotent(self) -> bool:
        return all(apply(self, t) == t for t in self._map.values())


IDENTITY = Substitution()


def apply(s: Mapping[Var, Term], t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t, t)
    if not t.fvars or t.fvars.isdisjoint(s.keys()):
        return t
    new_args = tuple(apply(s, a) for a in t.args)
    if all(a is b for a, b in zip(new_args, t.args)):
        return t
    return App(t.sym, new_args)


def compose(s1: Mapping[Var, Term], s2: Mapping[Var, Term]) -> Substitution:
    """Substitution equal to applying ``s1`` first and then ``s2``."""
    out = {x: apply(s2, t) for x, t in s1.items()}
    for x, t in s2.items():
        out.setdefault(x, t)
    return Substitution(out)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    def __repr__(self):
        return f"{self.lhs!r} = {self.rhs!r}"


System = tuple  # ordered tuple of Equation


def is_solved_form(equations: Iterable) -> bool:
    """Every equation is ``X = t`` with ``X`` occurring nowhere else."""
    eqs = [tuple(e) for e in equations]
    for i, (x, t) in enumerate(eqs):
        if not isinstance(x, Var) or occurs(x, t):
            return False
        for j, (l, r) in enumerate(eqs):
            if i != j and (occurs(x, l) or occurs(x, r)):
                return False
    return True


# -- fresh variables -------------------------------------------------------------

FRESH_PREFIX = "_N"
FRESH_RE = re.compile(r"_N(\d+)\Z")


class FreshVars:
    """Counter issuing ``_N<k>`` names; the parser never produces them."""

    def __init__(self, start: int = 0):
        self.counter = start

    @classmethod
    def avoiding(cls, *terms: Term) -> "FreshVars":
        top = 0
        for x in vars_of(*terms):
            m = FRESH_RE.match(x.name)
            if m:
                top = max(top, int(m.group(1)) + 1)
        return cls(top)

    def new(self) -> Var:
        v = Var(f"{FRESH_PREFIX}{self.counter}")
        self.counter += 1
        return v


def is_fresh(x: Var) -> bool:
    return FRESH_RE.match(x.name) is not None


# -- abstract set terms --------------------------------------------------------------

@dataclass(frozen=True)
class AbstractSetTerm:
    """``{X1..Xm, a1..an, s1..sp} + Y1 + ... + Yq`` with duplicates removed."""

    var_elems: tuple[Var, ...] = ()
    ind_elems: tuple[Term, ...] = ()
    set_elems: tuple["AbstractSetTerm", ...] = ()
    set_vars: tuple[Var, ...] = ()

    @property
    def m(self):
        return len(self.var_elems)

    @property
    def n(self):
        return len(self.ind_elems)

    @property
    def p(self):
        return len(self.set_elems)

    @property
    def q(self):
        return len(self.set_vars)

    def is_empty(self) -> bool:
        return not (self.var_elems or self.ind_elems or self.set_elems or self.set_vars)


def _is_set_position_ok(t: Term) -> bool:
    return isinstance(t, Var) or is_set_constructed(t)


def to_abstract(t: Term) -> AbstractSetTerm:
    if isinstance(t, App) and t.sym.kind is Kind.FREE:
        raise NotASetTerm(f"{t!r} is an individual, not a set term")
    var_elems: dict = {}
    ind_elems: dict = {}
    set_elems: dict = {}
    set_vars: dict = {}

    def add_elem(e: Term):
        if isinstance(e, Var):
            var_elems.setdefault(e)
        elif e.sym.kind is Kind.FREE:
            ind_elems.setdefault(e)
        else:
            set_elems.setdefault(to_abstract(e))

    def walk(u: Term):
        if isinstance(u, Var):
            set_vars.setdefault(u)
            return
        k = u.sym.kind
        if k is Kind.EMPTY:
            return
        if k is Kind.SINGLETON:
            add_elem(u.args[0])
        elif k is Kind.INSERT:
            add_elem(u.args[0])
            if not _is_set_position_ok(u.args[1]):
                raise IllTypedUnion(f"insertion tail {u.args[1]!r} is an individual")
            walk(u.args[1])
        elif k is Kind.UNION:
            for a in u.args:
                if not _is_set_position_ok(a):
                    raise IllTypedUnion(f"union argument {a!r} is an individual")
                walk(a)
        else:
            raise IllTypedUnion(f"{u!r} in a set position")

    walk(t)
    return AbstractSetTerm(tuple(var_elems), tuple(ind_elems), tuple(set_elems), tuple(set_vars))


def from_abstract(a: AbstractSetTerm, style: str | None = None) -> Term:
    """Concrete term for ``a``.

    ``style`` is ``"insert"`` (insertion chains), ``"union"`` (unions of
    singletons) or ``None`` to use insertion whenever ``q <= 1``.
    """
    if style is None:
        style = "insert" if a.q <= 1 else "union"
    elems = list(a.var_elems) + list(a.ind_elems) + [from_abstract(s, style) for s in a.set_elems]
    if style == "insert":
        return set_of(elems, union_of(a.set_vars))
    return union_of([singleton(e) for e in elems] + list(a.set_vars))


# -- classes ---------------------------------------------------------------------

_RANK = {"ground": 0, "gflat": 1, "flat": 2, "nested": 3}


@dataclass(frozen=True, order=True)
class TermClass:
    kind: str
    q: int = 0

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ValueError(self.kind)
        if self.kind == "ground" and self.q:
            raise ValueError("ground terms have no set variables")

    def __str__(self):
        return self.kind if self.kind == "ground" else f"{self.kind}({self.q})"

    def within(self, other: "TermClass") -> bool:
        """Inclusion: gflat(q) <= flat(q) <= nested(q), ground <= nested(0)."""
        if self.kind == "ground":
            return other.kind in ("ground", "nested")
        if other.kind == "ground":
            return False
        return _RANK[self.kind] <= _RANK[other.kind] and self.q <= other.q


@dataclass
class _Features:
    has_vars: bool = False
    elem_vars: bool = False
    nested: bool = False
    general_ind: bool = False
    q: int = 0

    def merge(self, other: "_Features") -> "_Features":
        return _Features(self.has_vars or other.has_vars, self.elem_vars or other.elem_vars,
                         self.nested or other.nested, self.general_ind or other.general_ind,
                         max(self.q, other.q))

    def to_class(self) -> TermClass:
        if not self.has_vars:
            return TermClass("ground")
        if self.nested or self.general_ind:
            return TermClass("nested", self.q)
        if self.elem_vars:
            return TermClass("flat", self.q)
        return TermClass("gflat", self.q)


def _set_features(a: AbstractSetTerm, f: _Features):
    f.q = max(f.q, a.q)
    if a.var_elems or a.set_vars:
        f.has_vars = True
    if a.var_elems:
        f.elem_vars = True
    if a.set_elems:
        f.nested = True
    for ind in a.ind_elems:
        _individual_features(ind, f)
    for s in a.set_elems:
        _set_features(s, f)


def _individual_features(t: App, f: _Features):
    if t.args:
        f.general_ind = True
    for arg in t.args:
        _any_features(arg, f)


def _any_features(t: Term, f: _Features):
    if isinstance(t, Var):
        f.has_vars = True
    elif t.sym.kind is Kind.FREE:
        _individual_features(t, f)
    else:
        _set_features(to_abstract(t), f)


def _features(t: Term) -> _Features:
    f = _Features()
    if isinstance(t, Var):
        f.has_vars = True
        f.q = 1
    elif isinstance(t, App) and t.sym.kind is Kind.FREE:
        # a bare individual is never flat
        f.general_ind = True
        _individual_features(t, f)
    else:
        _set_features(to_abstract(t), f)
    return f


def classify(t: Term) -> TermClass:
    if isinstance(t, App) and t.sym.kind is Kind.FREE:
        raise NotASetTerm(f"{t!r} is an individual, not a set term")
    return _features(t).to_class()


def classify_equation(lhs: Term, rhs: Term) -> TermClass:
    """Join class of both sides; bare individuals count as nested."""
    return _features(lhs).merge(_features(rhs)).to_class()


def classify_system(equations: Iterable) -> TermClass:
    f = _Features()
    for l, r in equations:
        f = f.merge(_features(l)).merge(_features(r))
    return f.to_class()
