"""General ACI1 unification with free function symbols.

The main loop is Herbrand unification extended with two rules for unions:
``X = t' + X`` is rewritten to ``X = t' + N`` and an equation between
unions goes through ``aci_step``.  That step names every non-variable
summand with a fresh variable, solves the resulting elementary problem on
a grid of fresh variables ``A[i][j]``, and then guesses a propagation
matrix B saying which grid cells are empty and which carry a summand.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .abcl import clash
from .aci1c import ElementaryGrid, elementary_grid
from .errors import StepBudgetExceeded
from .forms import to_union_form
from .terms import (EMPTY, App, Equation, FreshVars, Kind, Substitution, Term, Var, apply,
                    occurs, union_of, union_summands, vars_of)
from .unifiers import SolutionStream

BOT = None  # entry of B for cells whose grid variable stays free


def _is_union(t: Term) -> bool:
    return isinstance(t, App) and t.sym.kind is Kind.UNION


def occurs_union(x: Var, t: Term) -> str:
    """Where ``x`` occurs in ``t`` seen as a union of summands.

    ``"nested"`` when inside a non-variable summand (occur-check failure),
    ``"summand"`` when only as a top-level summand (absorbed through a
    fresh variable), ``"none"`` otherwise.
    """
    parts = union_summands(t)
    if any(not isinstance(p, Var) and occurs(x, p) for p in parts):
        return "nested"
    if x in parts:
        return "summand"
    return "none"


# -- propagation matrix ----------------------------------------------------------------------

@dataclass
class PropagationMatrix:
    """Entries of B over the grid; ``BOT`` marks cells left as variables."""
    h1: int
    h2: int
    k1: int
    k2: int
    c: int
    entries: dict[tuple[int, int], int | None] = field(default_factory=dict)

    def row_kind(self, i: int) -> str:
        return "NR" if i < self.h1 else "R" if i < self.h1 + self.h2 else "C"

    def col_kind(self, j: int) -> str:
        return "NL" if j < self.k1 else "L" if j < self.k1 + self.k2 else "C"

    def quadrant(self, i: int, j: int) -> int:
        r = {"NR": 0, "R": 1, "C": 2}[self.row_kind(i)]
        q = {"NL": 0, "L": 1, "C": 2}[self.col_kind(j)]
        return 3 * r + q + 1

    def satisfies_constraints(self) -> bool:
        for (i, j), v in self.entries.items():
            boolean = self.quadrant(i, j) in (1, 2, 3, 4, 7)
            if boolean != (v is not BOT):
                return False
        for j in range(self.k1):
            if not any(v == 1 for (_, jj), v in self.entries.items() if jj == j):
                return False
        for i in range(self.h1):
            if not any(v == 1 for (ii, _), v in self.entries.items() if ii == i):
                return False
        return True


def _boolean_cells(grid: ElementaryGrid, pm: PropagationMatrix) -> list[tuple[int, int]]:
    return [ij for ij in grid.cells if pm.quadrant(*ij) in (1, 2, 3, 4, 7)]


def propagation_matrices(grid: ElementaryGrid, pm_shape: PropagationMatrix,
                         left_terms: Sequence[Term], right_terms: Sequence[Term]
                         ) -> Iterator[PropagationMatrix]:
    """Every admissible B, by backtracking with coverage and clash pruning.

    A row ``N^R_i`` and a column ``N^L_j`` each need a 1 somewhere, and a 1
    at ``(N^R_i, N^L_j)`` requires the two summands to be unifiable as far
    as a cheap clash test can tell.
    """
    cells = sorted(_boolean_cells(grid, pm_shape))
    last_in_row: dict[int, int] = {}
    last_in_col: dict[int, int] = {}
    for n, (i, j) in enumerate(cells):
        if pm_shape.row_kind(i) == "NR":
            last_in_row[i] = n
        if pm_shape.col_kind(j) == "NL":
            last_in_col[j] = n
    if len(last_in_row) < pm_shape.h1 or len(last_in_col) < pm_shape.k1:
        return iter(())
    row_ones = [0] * pm_shape.h1
    col_ones = [0] * pm_shape.k1
    values: list[int] = []

    def rec(n: int):
        if n == len(cells):
            pm = PropagationMatrix(pm_shape.h1, pm_shape.h2, pm_shape.k1, pm_shape.k2, pm_shape.c)
            for ij in grid.cells:
                pm.entries[ij] = BOT
            pm.entries.update(zip(cells, values))
            yield pm
            return
        i, j = cells[n]
        is_nr = i < pm_shape.h1
        is_nl = j < pm_shape.k1
        must = ((is_nr and last_in_row.get(i) == n and row_ones[i] == 0)
                or (is_nl and last_in_col.get(j) == n and col_ones[j] == 0))
        if not must:
            values.append(0)
            yield from rec(n + 1)
            values.pop()
        if is_nr and is_nl and clash(left_terms[j], right_terms[i]):
            return
        values.append(1)
        if is_nr:
            row_ones[i] += 1
        if is_nl:
            col_ones[j] += 1
        yield from rec(n + 1)
        if is_nr:
            row_ones[i] -= 1
        if is_nl:
            col_ones[j] -= 1
        values.pop()

    return rec(0)


# -- aci_step --------------------------------------------------------------------------------

@dataclass
class StepResult:
    """One branch of ``aci_step``: ``E_1`` (solved, with rho applied),
    ``E_2`` (with rho applied), rho, and the grid data behind them."""
    e1: list[Equation]
    e2: list[Equation]
    rho: Substitution
    grid: ElementaryGrid
    matrix: PropagationMatrix
    lam: dict[Var, Term]
    names: dict[Var, Term]


def _normalize(t: Term):
    parts = [p for p in union_summands(t) if p != EMPTY]
    terms = [p for p in parts if not isinstance(p, Var)]
    variables = [p for p in parts if isinstance(p, Var)]
    return terms, variables


def aci_step(eq: Equation, fresh: FreshVars) -> list[StepResult]:
    """All branches for an equation between two unions (or a union and a set)."""
    lterms, lvars = _normalize(eq.lhs)
    rterms, rvars = _normalize(eq.rhs)
    rset = set(rvars)
    lset = set(lvars)
    com = [x for x in lvars if x in rset]
    lonly = [x for x in lvars if x not in rset]
    ronly = [x for x in rvars if x not in lset]
    nl = [fresh.new() for _ in lterms]
    nr = [fresh.new() for _ in rterms]
    names = dict(zip(nl, lterms)) | dict(zip(nr, rterms))
    grid = elementary_grid(nl + lonly, nr + ronly, com, fresh)
    shape = PropagationMatrix(len(nr), len(ronly), len(nl), len(lonly), len(com))
    out = []
    for pm in propagation_matrices(grid, shape, lterms, rterms):
        lam: dict[Var, Term] = {}
        conf: list[tuple[Term, Term]] = []
        for (i, j), a in grid.cells.items():
            b = pm.entries[(i, j)]
            if b is BOT:
                continue
            if b == 0:
                lam[a] = EMPTY
            elif j < shape.k1:
                lam[a] = lterms[j]
                if i < shape.h1:
                    conf.append((lterms[j], rterms[i]))
            else:
                lam[a] = rterms[i]
        e2: list[Equation] = []
        ok = True
        for l, r in conf:
            if l.sym != r.sym:
                ok = False
                break
            e2.extend(Equation(x, y) for x, y in zip(l.args, r.args) if x != y)
        if not ok:
            continue
        e1: dict[Var, Term] = {}
        for x in lonly + ronly + com:
            vals = [lam.get(a, a) for a in grid.parts_of(x)]
            e1[x] = union_of([v for v in dict.fromkeys(vals) if v != EMPTY])
        rho = variables_removal(e1)
        if rho is None:
            continue
        out.append(StepResult([Equation(x, rho[x]) if x in rho else Equation(x, x)
                               for x in e1],
                              [Equation(apply(rho, l), apply(rho, r)) for l, r in e2],
                              rho, grid, pm, lam, names))
    return out


def variables_removal(e1: dict[Var, Term]) -> Substitution | None:
    """Resolve the bindings of ``e1`` into each other; None on a cycle."""
    done: dict[Var, Term] = {}
    active: set[Var] = set()

    def resolve(x: Var) -> Term | None:
        if x in done:
            return done[x]
        if x in active:
            return None
        active.add(x)
        rhs = e1[x]
        sub = {}
        for y in vars_of(rhs):
            if y in e1:
                v = resolve(y)
                if v is None:
                    return None
                sub[y] = v
        active.discard(x)
        done[x] = apply(sub, rhs)
        return done[x]

    for x in e1:
        if resolve(x) is None:
            return None
    return Substitution(done)


# -- main loop -------------------------------------------------------------------------------

class GaciState:
    __slots__ = ("solved", "ns", "fresh")

    def __init__(self, ns: Sequence[Equation] = (), fresh: FreshVars | None = None):
        self.solved: dict[Var, Term] = {}
        self.ns: deque[Equation] = deque(ns)
        self.fresh = fresh or FreshVars()

    def copy(self) -> "GaciState":
        c = GaciState.__new__(GaciState)
        c.solved = dict(self.solved)
        c.ns = deque(self.ns)
        c.fresh = FreshVars(self.fresh.counter)
        return c


@dataclass
class Stats:
    steps: int = 0
    branches: int = 0
    failures: int = 0
    requeued: int = 0


def _bind(st: GaciState, x: Var, t: Term):
    sub = {x: t}
    st.solved = {y: apply(sub, v) for y, v in st.solved.items()}
    st.solved[x] = t
    st.ns = deque(Equation(apply(sub, l), apply(sub, r)) for l, r in st.ns)


def _apply_step(st: GaciState, res: StepResult, stats: Stats):
    rho = res.rho
    st.solved = {y: apply(rho, v) for y, v in st.solved.items()}
    st.ns = deque(Equation(apply(rho, l), apply(rho, r)) for l, r in st.ns)
    for e in res.e1:
        if e.lhs != e.rhs:
            st.solved[e.lhs] = e.rhs
    st.ns.extend(res.e2)
    # keep the solved store in solved form: re-queue any binding whose
    # variable shows up again elsewhere
    for x in list(st.solved):
        v = st.solved[x]
        elsewhere = any(occurs(x, w) for y, w in st.solved.items() if y != x) or \
            any(occurs(x, l) or occurs(x, r) for l, r in st.ns)
        if elsewhere or occurs(x, v):
            del st.solved[x]
            st.ns.append(Equation(x, v))
            stats.requeued += 1


def _actions(st: GaciState, eq: Equation, stats: Stats) -> list[GaciState] | None:
    l, r = eq.lhs, eq.rhs
    if l == r:
        return None
    if not isinstance(l, Var) and isinstance(r, Var):
        l, r = r, l
    if isinstance(l, Var):
        where = occurs_union(l, r)
        if where == "nested":
            return []
        if where == "summand":
            rest = [p for p in union_summands(r) if p != l]
            st.ns.append(Equation(l, union_of(rest + [st.fresh.new()])))
            return None
        _bind(st, l, r)
        return None
    if _is_union(l) or _is_union(r):
        kinds = {Kind.UNION, Kind.SINGLETON, Kind.EMPTY}
        if l.sym.kind not in kinds or r.sym.kind not in kinds:
            return []
        kids = []
        for res in aci_step(Equation(l, r), st.fresh):
            c = st.copy()
            _apply_step(c, res, stats)
            kids.append(c)
        return kids
    if l.sym != r.sym:
        return []
    for a, b in zip(l.args, r.args):
        if clash(a, b):
            return []
        st.ns.append(Equation(a, b))
    return None


def iter_solutions(system: Sequence[Equation], max_steps: int | None = None,
                   stats: Stats | None = None) -> Iterator[GaciState]:
    system = [Equation(to_union_form(l), to_union_form(r)) for l, r in system]
    stats = stats if stats is not None else Stats()
    fresh = FreshVars.avoiding(*[t for e in system for t in e])
    stack = [GaciState(system, fresh)]
    while stack:
        st = stack.pop()
        while True:
            stats.steps += 1
            if max_steps is not None and stats.steps > max_steps:
                raise StepBudgetExceeded(f"more than {max_steps} steps")
            if not st.ns:
                yield st
                break
            eq = st.ns.popleft()
            kids = _actions(st, eq, stats)
            if kids is None:
                continue
            if not kids:
                stats.failures += 1
                break
            stats.branches += len(kids) - 1
            stack.extend(reversed(kids[1:]))
            st = kids[0]


def general_aci(system: Sequence[Equation] | Equation, max_steps: int | None = None,
                restrict: bool = True, stats: Stats | None = None) -> SolutionStream:
    """Complete set of general ACI1 unifiers as a lazy stream."""
    if isinstance(system, Equation):
        system = [system]
    system = list(system)
    inputs = vars_of(*[t for e in system for t in e])

    def gen():
        for st in iter_solutions(system, max_steps, stats):
            sub = Substitution(st.solved)
            yield sub.restrict(inputs) if restrict else sub

    return SolutionStream(gen())
