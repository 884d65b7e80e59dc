"""Set unification under the (Ab)(Cl) and ACI1 theories."""
from .terms import (EMPTY, AbstractSetTerm, App, Equation, FreshVars, Substitution, Symbol,
                    Term, TermClass, Var, apply, app, classify, classify_equation, compose,
                    const, from_abstract, insert, occurs, set_of, singleton, size, tail,
                    to_abstract, union, union_of, vars_of)
from .syntax import parse_equation, parse_system, parse_term, print_best, print_term
from .ground import canonicalize, equivalent
from .sud import decide, decide_flat, decide_gflat, decide_system, partition, system_to_equation
from .aci1c import count_matrices, elementary_unify, quick_solve, star, unify_with_constants, unstar
from .abcl import abcl_unify
from .gaci import aci_step, general_aci
from .oracle import UniverseSpec, check_completeness, check_soundness, enumerate_universe, ground_solutions
from .solve import solve
from .unifiers import SolutionStream

__version__ = "0.1.0"
