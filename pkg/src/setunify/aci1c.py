"""ACI1 unification with constants through Boolean ACI-matrices.

Columns are the variables ``V1 + V2 + V3`` of ``s = t``.  Variable rows
are fixed: one fresh variable per pair in ``V1 x V2``, ``V1 x V3``,
``V2 x V3`` and one per element of ``V3``.  Constant rows vary: a constant
of ``C1`` covers a nonempty subset of ``V2`` or one ``V3`` column, ``C2``
is symmetric with ``V1``, and a ``C3`` constant covers a subset of ``V1``
or a subset of ``V2``.  Each choice of constant rows is one matrix and
one unifier ``X -> union of the rows covering X``.

Terms handled here are unions of variables, free constants and the empty
set (the starred form of gflat set terms).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import Unsat, WrongClass
from .sud import partition
from .terms import (App, Equation, FreshVars, Kind, Substitution, Term, Var,
                    consts, set_of, to_abstract, union_of, union_summands, vars_of)
from .unifiers import SolutionStream


# -- star translation --------------------------------------------------------------

def star(t: Term) -> Term:
    """``{a1, ..., an} + Y1 + ... + Yq`` becomes ``a1 + ... + an + Y1 + ... + Yq``."""
    if isinstance(t, Var):
        return t
    a = to_abstract(t)
    if a.var_elems or a.set_elems or any(e.args for e in a.ind_elems):
        raise WrongClass(f"{t!r} is not in gflat")
    return union_of(list(a.ind_elems) + list(a.set_vars))


def is_constants_term(t: Term) -> bool:
    return all(isinstance(u, Var) or (isinstance(u, App) and u.sym.kind is Kind.FREE and not u.args)
               for u in union_summands(t))


def unstar(t: Term) -> Term:
    """Inverse of ``star``: constant summands are collected into one set."""
    if not is_constants_term(t):
        raise WrongClass(f"{t!r} is not a union of constants and variables")
    parts = union_summands(t)
    elems = [u for u in parts if not isinstance(u, Var)]
    rest = [u for u in parts if isinstance(u, Var)]
    if elems:
        rest.insert(0, set_of(elems))
    return union_of(rest)


def lift_constants(eq: Equation) -> Equation:
    """Read an equation written with constant summands (``X + a = b``) as the
    gflat equation it stars from; other equations are returned unchanged."""
    bare = [u for side in eq if isinstance(side, App) and side.sym.kind is Kind.UNION
            for u in union_summands(side) if isinstance(u, App) and u.sym.kind is Kind.FREE]
    if bare and all(is_constants_term(side) for side in eq):
        return Equation(unstar(eq.lhs), unstar(eq.rhs))
    return eq


def unstar_substitution(sigma: Substitution) -> Substitution:
    return Substitution({x: unstar(t) for x, t in sigma.items()})


def star_substitution(sigma: Substitution) -> Substitution:
    return Substitution({x: star(t) for x, t in sigma.items()})


def _check(s: Term, t: Term):
    for side in (s, t):
        if not is_constants_term(side):
            raise WrongClass(f"{side!r} is not a union of constants and variables")


# -- elementary grid -------------------------------------------------------------------

@dataclass
class ElementaryGrid:
    """Fresh variables ``A[row][col]`` of the elementary ACI-matrix.

    Rows are the right-only variables followed by the shared ones, columns
    the left-only variables followed by the shared ones.  Shared-by-shared
    cells exist only on the diagonal.
    """
    left: tuple[Var, ...]
    right: tuple[Var, ...]
    common: tuple[Var, ...]
    cells: dict[tuple[int, int], Var] = field(default_factory=dict)

    @property
    def rows(self) -> tuple[Var, ...]:
        return self.right + self.common

    @property
    def columns(self) -> tuple[Var, ...]:
        return self.left + self.common

    def cell(self, i: int, j: int) -> Var | None:
        return self.cells.get((i, j))

    def row_vars(self, i: int) -> list[Var]:
        return [v for (r, _), v in self.cells.items() if r == i]

    def column_vars(self, j: int) -> list[Var]:
        return [v for (_, c), v in self.cells.items() if c == j]

    def parts_of(self, x: Var) -> list[Var]:
        """Fresh variables whose union is the value of ``x``, in allocation order."""
        rows, cols = self.rows, self.columns
        return [v for (i, j), v in self.cells.items() if rows[i] == x or cols[j] == x]

    def substitution(self) -> Substitution:
        return Substitution({x: union_of(self.parts_of(x))
                             for x in self.left + self.right + self.common})

    def fresh_count(self) -> int:
        return len(self.cells)


def elementary_grid(left: Sequence[Var], right: Sequence[Var], common: Sequence[Var],
                    fresh: FreshVars) -> ElementaryGrid:
    """Allocate grid cells in the order ``V1 x V2``, ``V1 x V3``, ``V2 x V3``, ``V3``."""
    g = ElementaryGrid(tuple(left), tuple(right), tuple(common))
    m, n = len(g.right), len(g.left)
    for j in range(n):
        for i in range(m):
            g.cells[(i, j)] = fresh.new()
    for j in range(n):
        for v in range(len(g.common)):
            g.cells[(m + v, j)] = fresh.new()
    for i in range(m):
        for v in range(len(g.common)):
            g.cells[(i, n + v)] = fresh.new()
    for v in range(len(g.common)):
        g.cells[(m + v, n + v)] = fresh.new()
    return g


def _split_vars(s: Term, t: Term):
    vs, vt = vars_of(s), vars_of(t)
    st = set(vt)
    ss = set(vs)
    return ([x for x in vs if x not in st], [x for x in vt if x not in ss],
            [x for x in vs if x in st])


def elementary_unify(s: Term, t: Term, fresh: FreshVars | None = None,
                     with_grid: bool = False):
    """The most general unifier of two unions of variables (and empty sets)."""
    for side in (s, t):
        if any(not isinstance(u, Var) for u in union_summands(side)):
            raise WrongClass(f"{side!r} is not a union of variables")
    if fresh is None:
        fresh = FreshVars.avoiding(s, t)
    v1, v2, v3 = _split_vars(s, t)
    grid = elementary_grid(v1, v2, v3, fresh)
    sub = grid.substitution()
    return (sub, grid) if with_grid else sub


# -- constants -----------------------------------------------------------------------------

def _subsets(items: Sequence, nonempty: bool) -> list[tuple]:
    """Subsets in binary-counter order (bit i selects ``items[i]``)."""
    out = []
    for mask in range(1 if nonempty else 0, 1 << len(items)):
        out.append(tuple(x for i, x in enumerate(items) if mask >> i & 1))
    return out


def constant_row_choices(p) -> list[tuple[Term, list[tuple[Var, ...]]]]:
    """For each constant, the column sets its row may cover."""
    rows = []
    for c in p.C1:
        rows.append((c, _subsets(p.V2, True) + [(x,) for x in p.V3]))
    for c in p.C2:
        rows.append((c, _subsets(p.V1, True) + [(x,) for x in p.V3]))
    for c in p.C3:
        rows.append((c, _subsets(p.V1, False) + _subsets(p.V2, True)))
    return rows


def count_matrices(s: Term, t: Term) -> int:
    p = partition(s, t)
    v1, v2, v3 = len(p.V1), len(p.V2), len(p.V3)
    return ((2 ** v2 - 1 + v3) ** len(p.C1) * (2 ** v1 - 1 + v3) ** len(p.C2)
            * (2 ** v1 + 2 ** v2 - 1) ** len(p.C3))


@dataclass
class AciMatrix:
    columns: tuple[Var, ...]
    var_rows: list[tuple[Var, tuple[Var, ...]]]
    const_rows: list[tuple[Term, tuple[Var, ...]]]

    def unifier(self) -> Substitution:
        parts: dict[Var, list[Term]] = {x: [] for x in self.columns}
        for r, cover in self.var_rows:
            for x in cover:
                parts[x].append(r)
        for c, cover in self.const_rows:
            for x in cover:
                parts[x].append(c)
        return Substitution({x: union_of(ps) for x, ps in parts.items()})

    def bits(self) -> list[list[int]]:
        rows = [cover for _, cover in self.var_rows] + [cover for _, cover in self.const_rows]
        return [[int(x in cover) for x in self.columns] for cover in rows]


def aci_matrices(s: Term, t: Term, fresh: FreshVars | None = None) -> Iterator[AciMatrix]:
    _check(s, t)
    p = partition(s, t)
    choices = constant_row_choices(p)
    for c, options in choices:
        if not options:
            raise Unsat(f"constant {c!r} can never be matched")
    if fresh is None:
        fresh = FreshVars.avoiding(s, t)
    grid = elementary_grid(p.V1, p.V2, p.V3, fresh)
    columns = tuple(p.V1) + tuple(p.V2) + tuple(p.V3)
    var_rows = [(r, tuple(dict.fromkeys((grid.columns[j], grid.rows[i]))))
                 for (i, j), r in grid.cells.items()]
    consts_ = [c for c, _ in choices]

    def gen():
        for combo in itertools.product(*[opts for _, opts in choices]):
            yield AciMatrix(columns, var_rows, list(zip(consts_, combo)))

    return gen()


def unify_with_constants(s: Term, t: Term, fresh: FreshVars | None = None) -> SolutionStream:
    """One unifier per ACI-matrix; raises Unsat when no matrix exists."""
    matrices = aci_matrices(s, t, fresh)
    return SolutionStream(mx.unifier() for mx in matrices)


def quick_solve(s: Term, t: Term) -> Substitution | None:
    """Some unifier, or None: every variable becomes the union of all constants."""
    from .sud import decide_gflat
    _check(s, t)
    ok, _ = decide_gflat(unstar(s), unstar(t))
    if not ok:
        return None
    everything = union_of(consts(s, t))
    return Substitution({x: everything for x in vars_of(s, t)})


def solve_gflat(eq: Equation, fresh: FreshVars | None = None) -> SolutionStream:
    """Unifiers of a gflat equation through the star translation."""
    s, t = star(eq.lhs), star(eq.rhs)
    try:
        stream = unify_with_constants(s, t, fresh)
    except Unsat:
        return SolutionStream(())
    return SolutionStream(unstar_substitution(u) for u in stream)

