from pathlib import Path

import pytest

from setunify.aci1c import lift_constants
from setunify.ground import equal_modulo_theory
from setunify.solve import solve
from setunify.syntax import parse_system
from setunify.terms import apply

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
# coloring and the automaton are exercised by the acceptance suite
QUICK = sorted(p.name for p in CORPUS.glob("*.su") if p.stem not in ("coloring", "fsa"))


def load(name):
    return [lift_constants(e) for e in parse_system((CORPUS / name).read_text(), typed=False)]


@pytest.mark.parametrize("name", QUICK)
def test_first_solution_satisfies_the_file(name):
    system = load(name)
    first = solve(system, max_steps=200_000).first()
    assert first is not None
    for l, r in system:
        assert equal_modulo_theory(apply(first, l), apply(first, r))


def test_teachers_cover_the_courses():
    sols = solve(load("courses.su")).take()
    # each of the three courses goes to the first, the second or both teachers
    assert len(sols) == 27


def test_every_file_parses():
    for path in CORPUS.glob("*.su"):
        assert parse_system(path.read_text(), typed=False)
