import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from setunify.aci1c import elementary_grid
from setunify.errors import StepBudgetExceeded
from setunify.gaci import (BOT, PropagationMatrix, Stats, aci_step, general_aci, occurs_union,
                           propagation_matrices, variables_removal)
from setunify.ground import equal_modulo_theory
from setunify.oracle import check_completeness, check_soundness, ground_solutions, universe_for
from setunify.syntax import parse_equation, parse_system, parse_term
from setunify.terms import (EMPTY, FreshVars, Var, apply, const, set_of, singleton, union_of,
                            union_summands)

W, X, Y, Z = Var("W"), Var("X"), Var("Y"), Var("Z")


def step(text):
    eq = parse_equation(text)
    return aci_step(eq, FreshVars.avoiding(eq.lhs, eq.rhs))


@pytest.mark.parametrize("t,where", [
    ("{X} + Y", "nested"),
    ("{a} + X", "summand"),
    ("Y + Z", "none"),
    ("{f(X)} + X", "nested"),
])
def test_occurs_union(t, where):
    assert occurs_union(X, parse_term(t)) == where


def worked_branch(results):
    """The branch with W's singleton matched against {a} and X, Y, Z sharing
    two fresh remainders as in the printed table."""
    for res in results:
        e1 = {e.lhs: e.rhs for e in res.e1}
        ys = union_summands(e1[Y])
        xs = union_summands(e1[X])
        zs = union_summands(e1[Z])
        if len(res.e2) != 1 or len(xs) != 2 or len(zs) != 1:
            continue
        if {res.e2[0].lhs, res.e2[0].rhs} != {set_of([W]), set_of([const("a")])}:
            continue
        fresh_y = [p for p in ys if isinstance(p, Var)]
        if len(fresh_y) != 1 or set(xs) != {fresh_y[0], zs[0]}:
            continue
        if not equal_modulo_theory(union_of([p for p in ys if not isinstance(p, Var)]),
                                   parse_term("{{a}, b}")):
            continue
        return res
    return None


def test_worked_example_branch():
    res = worked_branch(step("{{a}} + {b} + X = {{W}} + Y + Z"))
    assert res is not None
    values = sorted(str(t) for t in res.lam.values())
    assert values == ["{b}", "{{a}}", "{{a}}", "{}", "{}", "{}", "{}"]
    assert all(res.rho[x] == e.rhs for e in res.e1 for x in [e.lhs] if x in res.rho)


def test_worked_example_final_solution_binds_w():
    sols = general_aci(parse_system("{{a}} + {b} + X = {{W}} + Y + Z")).take()
    assert any(s.get(W) == const("a") for s in sols)


def test_self_union_has_single_mgu():
    sols = general_aci(parse_system("{ {} } + Y = Y")).take()
    assert len(sols) == 1
    parts = union_summands(sols[0][Y])
    assert singleton(EMPTY) in parts or set_of([EMPTY]) in parts
    assert len([p for p in parts if isinstance(p, Var)]) == 1


def test_absorption():
    sols = general_aci(parse_system("X = {a} + X")).take()
    assert len(sols) == 1
    assert len(sols[0][X].fvars) == 1


@pytest.mark.parametrize("text,n", [
    ("X + Y = {a}", 3),
    ("{X} + {Y} = {a} + {b}", 2),
    ("X = {X}", 0),
    ("{X} + Y = X", 0),
    ("{a} = {b} + Y", 0),
    ("{} = {X} + Y", 0),
])
def test_solution_counts(text, n):
    system = parse_system(text)
    sols = general_aci(system).take()
    assert len(sols) == n
    for s in sols:
        for l, r in system:
            assert equal_modulo_theory(apply(s, l), apply(s, r))


def test_x_plus_y_covers_the_three_ground_solutions():
    system = parse_system("X + Y = {a}")
    spec = universe_for(system, depth=1)
    assert len(ground_solutions(system, spec)) == 3
    assert check_completeness(general_aci(system).take(), system, spec).ok


def test_shared_remainder_branch():
    results = step("{a} + X = {b} + Y")
    assert len(results) == 1
    e1 = {e.lhs: e.rhs for e in results[0].e1}
    rest = set(union_summands(e1[X])) & set(union_summands(e1[Y]))
    assert len(rest) == 1 and isinstance(next(iter(rest)), Var)


def test_pure_variables_give_the_elementary_mgu():
    results = step("X + Y = Z + Y")
    assert len(results) == 1
    assert results[0].e2 == []


def test_two_by_two_propagation_choices():
    # each N row and N column needs a one: 16 fillings minus 9 with an empty line
    assert len(step("{X} + {Y} = {a} + {b}")) == 7


def test_matrix_constraints_hold():
    eq = parse_equation("{{a}} + {b} + X = {{W}} + Y + X")
    for res in aci_step(eq, FreshVars.avoiding(eq.lhs, eq.rhs)):
        assert res.matrix.satisfies_constraints()


def test_rho_is_acyclic():
    for res in step("{{a}} + {b} + X = {{W}} + Y + Z"):
        for x, t in res.rho.items():
            assert not any(v in res.rho for v in t.fvars)


def test_variables_removal_detects_cycles():
    assert variables_removal({X: union_of([Y, const("a")]), Y: union_of([X])}) is None
    rho = variables_removal({X: Y, Y: set_of([Z])})
    assert rho[X] == set_of([Z])


def test_propagation_matrix_quadrants():
    pm = PropagationMatrix(1, 1, 1, 1, 0)
    assert [pm.quadrant(0, 0), pm.quadrant(0, 1), pm.quadrant(1, 0), pm.quadrant(1, 1)] == \
        [1, 2, 4, 5]


def test_propagation_matrices_cover_every_n_line():
    fresh = FreshVars()
    nl = [fresh.new(), fresh.new()]
    nr = [fresh.new(), fresh.new()]
    grid = elementary_grid(nl, nr, [], fresh)
    shape = PropagationMatrix(2, 0, 2, 0, 0)
    terms = [singleton(X), singleton(Y)]
    for pm in propagation_matrices(grid, shape, terms, terms):
        assert pm.satisfies_constraints()
        assert all(v is not BOT for v in pm.entries.values())


def test_step_budget():
    with pytest.raises(StepBudgetExceeded):
        general_aci(parse_system("{{a}} + {b} + X = {{W}} + Y + Z"), max_steps=2).take()


def test_stats():
    stats = Stats()
    general_aci(parse_system("{X} + {Y} = {a} + {b}"), stats=stats).take()
    assert stats.steps > 0 and stats.branches > 0


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_union_equations_against_oracle(rnd):
    eq = gen.union_equation(random.Random(rnd.random()), max_vars=3)
    sols = general_aci(eq).take()
    spec = universe_for([eq])
    assert check_soundness(sols, [eq], spec).ok
    assert check_completeness(sols, [eq], spec).ok
