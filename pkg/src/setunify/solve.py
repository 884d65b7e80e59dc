"""Routing a system to the solver suited to its class."""
from __future__ import annotations

from typing import Sequence

from .abcl import abcl_unify
from .aci1c import solve_gflat
from .errors import SetUnifyError, WrongTheory
from .forms import system_to_insert_form
from .gaci import general_aci
from .ground import equivalent
from .terms import IDENTITY, Equation, classify_system
from .unifiers import SolutionStream

THEORIES = ("auto", "abcl", "aci1c", "gaci")


def route(system: Sequence[Equation]) -> str:
    """Solver picked by ``theory="auto"``: ground, aci1c, abcl or gaci."""
    try:
        cls = classify_system(system)
    except SetUnifyError:
        cls = None
    if cls is not None and cls.kind == "ground":
        return "ground"
    if cls is not None and cls.kind == "gflat" and len(system) == 1:
        return "aci1c"
    if cls is not None and cls.q >= 2:
        return "gaci"
    try:
        system_to_insert_form(system)
    except WrongTheory:
        return "gaci"
    return "abcl"


def _ground(system: Sequence[Equation]) -> SolutionStream:
    ok = all(equivalent(l, r) for l, r in system)
    return SolutionStream([IDENTITY] if ok else [])


def solve(system: Sequence[Equation] | Equation, theory: str = "auto",
          max_steps: int | None = None) -> SolutionStream:
    """Unifiers of ``system`` restricted to its variables, as a lazy stream.

    ``abcl`` reads every set through insertion (``{s} + t`` is ``{s|t}``)
    and fails with WrongTheory when a set has two set variables.
    """
    if isinstance(system, Equation):
        system = [system]
    system = list(system)
    if theory not in THEORIES:
        raise ValueError(f"unknown theory {theory!r}")
    if theory == "auto":
        theory = route(system)
        if theory == "ground":
            return _ground(system)
    if theory == "aci1c":
        if len(system) != 1:
            raise WrongTheory("aci1c solves a single equation")
        return solve_gflat(system[0])
    if theory == "abcl":
        return abcl_unify(system_to_insert_form(system), max_steps=max_steps)
    return general_aci(system, max_steps=max_steps)

