"""Command-line front end: ``setunify classify|decide|solve|count-matrices|oracle``.

Exit codes: 0 for success (satisfiable, solutions found), 1 for a negative
answer (unsatisfiable, no solutions), 2 for errors in the input.
"""
from __future__ import annotations

import json
import sys

import click

from .aci1c import count_matrices, lift_constants, star
from .errors import SetUnifyError
from .ground import format_value
from .oracle import UniverseSpec, ground_solutions, universe_for
from .solve import THEORIES, route, solve
from .sud import decide, decide_system
from .syntax import check_well_typed, parse_source, print_best, print_equation
from .terms import Equation, Substitution, classify, classify_equation, classify_system, vars_of


class InputError(click.ClickException):
    exit_code = 2


def read_system(source: str, expr: str | None) -> list[Equation]:
    """Parse a file (``-`` for stdin) or inline text into a typed system.

    Equations written with constant summands, as in ``X + a = b``, are read
    as the gflat equations they stand for.
    """
    if expr is not None:
        text, origin = expr, "<expr>"
    elif source == "-":
        text, origin = sys.stdin.read(), "<stdin>"
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from exc
        origin = source
    try:
        eqs = [lift_constants(e) for e in parse_source(text, origin, typed=False).system]
        for e in eqs:
            check_well_typed(e.lhs)
            check_well_typed(e.rhs)
    except SetUnifyError as exc:
        raise InputError(f"{origin}: {exc}") from exc
    return eqs


def _bindings(sub: Substitution, variables) -> dict[str, str]:
    return {x.name: print_best(sub[x]) for x in variables if x in sub}


def _side_class(t) -> str:
    try:
        return str(classify(t))
    except SetUnifyError:
        return "individual"


source_arg = click.argument("source", required=False, default="-")
expr_opt = click.option("-e", "--expr", default=None, help="Inline equations instead of a file.")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Decide and solve set unification problems."""


@main.command("classify")
@source_arg
@expr_opt
def classify_cmd(source, expr):
    """Class of each side and of each equation."""
    for e in read_system(source, expr):
        click.echo(f"{print_equation(e, 'union')}\t{_side_class(e.lhs)}\t{_side_class(e.rhs)}"
                   f"\t{classify_equation(e.lhs, e.rhs)}")


@main.command("decide")
@source_arg
@expr_opt
def decide_cmd(source, expr):
    """Satisfiability of the system (exit 0 when satisfiable, 1 when not)."""
    eqs = read_system(source, expr)
    try:
        if len(eqs) == 1:
            cls, ok, witness = decide(eqs[0].lhs, eqs[0].rhs)
        else:
            cls, ok, witness = classify_system(eqs), decide_system(eqs), None
    except SetUnifyError as exc:
        raise InputError(str(exc)) from exc
    click.echo(f"class: {cls}")
    click.echo(f"satisfiable: {'yes' if ok else 'no'}")
    if ok and witness:
        for name, term in _bindings(witness, vars_of(*[t for e in eqs for t in e])).items():
            click.echo(f"{name} = {term}")
    sys.exit(0 if ok else 1)


@main.command("solve")
@source_arg
@expr_opt
@click.option("--theory", type=click.Choice(THEORIES), default="auto", show_default=True)
@click.option("--max", "max_solutions", type=int, default=None, help="Stop after N unifiers.")
@click.option("--all", "all_solutions", is_flag=True, help="Enumerate every unifier (default).")
@click.option("--fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--max-steps", type=int, default=None, help="Step budget for the solver.")
def solve_cmd(source, expr, theory, max_solutions, all_solutions, fmt, max_steps):
    """Stream a complete set of unifiers."""
    eqs = read_system(source, expr)
    if all_solutions:
        max_solutions = None
    variables = vars_of(*[t for e in eqs for t in e])
    try:
        stream = solve(eqs, theory, max_steps)
        found = []
        complete = True
        for sub in stream:
            if max_solutions is not None and len(found) >= max_solutions:
                complete = False
                break
            found.append(sub)
            if fmt == "text":
                if len(found) > 1:
                    click.echo("---")
                lines = _bindings(sub, variables)
                for name, term in lines.items():
                    click.echo(f"{name} = {term}")
                if not lines:
                    click.echo("(identity)")
    except SetUnifyError as exc:
        raise InputError(str(exc)) from exc
    if fmt == "json":
        click.echo(json.dumps({"solver": route(eqs) if theory == "auto" else theory,
                               "solutions": [_bindings(s, variables) for s in found],
                               "complete": complete}, indent=2))
    else:
        click.echo(f"complete: {'yes' if complete else 'no(limit)'}")
    sys.exit(0 if found else 1)


@main.command("count-matrices")
@source_arg
@expr_opt
def count_cmd(source, expr):
    """Number of ACI-matrices of each gflat equation."""
    for e in read_system(source, expr):
        try:
            n = count_matrices(star(e.lhs), star(e.rhs))
        except SetUnifyError as exc:
            raise InputError(str(exc)) from exc
        click.echo(n)


@main.command("oracle")
@source_arg
@expr_opt
@click.option("--individuals", default=None, help="Comma-separated individuals.")
@click.option("--depth", type=int, default=None, help="Brace depth of the universe.")
@click.option("--card", type=int, default=2, show_default=True, help="Largest set cardinality per level.")
@click.option("--list", "show", is_flag=True, help="Print every ground solution.")
def oracle_cmd(source, expr, individuals, depth, card, show):
    """Count ground solutions over a bounded hereditarily finite universe."""
    eqs = read_system(source, expr)
    spec = universe_for(eqs, depth=depth, max_card=card)
    if individuals is not None:
        names = tuple(n.strip() for n in individuals.split(",") if n.strip())
        spec = UniverseSpec(names, spec.depth, card)
    sols = ground_solutions(eqs, spec)
    if show:
        for g in sols:
            click.echo(", ".join(f"{x.name} = {format_value(v)}" for x, v in g.items()))
    click.echo(len(sols))
    sys.exit(0 if sols else 1)


if __name__ == "__main__":
    main()
