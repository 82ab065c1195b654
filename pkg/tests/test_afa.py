"""
Tests for the flat system solver
"""

# Standard
import random

# Third Party
import pytest

# Local
from hydra.afa import (
    FlatSystem,
    check_colouring,
    evaluate_well_founded,
    permuted,
    solve,
    substitute,
)
from hydra.axioms import GenConfig, random_system
from hydra.config import Limits
from hydra.errors import ValidationError
from hydra.hset import Universe, elements, empty, numeral, omega, pair, singleton

## Happy Path ##################################################################


def test_solve_quine_equation(universe):
    """x = {x} is solved by a one-node canonical graph"""
    solution = solve(universe, FlatSystem.from_equations({"x": ["x"]}))
    assert solution["x"] == omega(universe)
    assert universe.canonical(solution["x"]).graph.node_count == 1


def test_solve_bisimilar_vars_share_a_value(universe):
    """x = {y}, y = {x} gives x = y = Ω"""
    solution = solve(universe, FlatSystem.from_equations({"x": ["y"], "y": ["x"]}))
    assert solution["x"] == solution["y"] == omega(universe)


def test_solve_with_constants(universe):
    """x = {y, ∅}, y = {x}"""
    nothing = empty(universe)
    system = FlatSystem.from_equations({"x": ["y", nothing], "y": ["x"]})
    solution = solve(universe, system)
    assert check_colouring(system, solution)
    assert set(elements(solution["x"])) == {solution["y"], nothing}
    assert elements(solution["y"]) == (solution["x"],)
    assert solution["x"] != solution["y"]


def test_solve_well_founded_system(universe):
    """An acyclic system yields numerals"""
    system = FlatSystem.from_equations({"two": ["one", "zero"], "one": ["zero"], "zero": []})
    solution = solve(universe, system)
    assert solution == {
        "two": numeral(universe, 2),
        "one": numeral(universe, 1),
        "zero": numeral(universe, 0),
    }
    assert evaluate_well_founded(universe, system) == solution


def test_solve_empty_system(universe):
    """No equations, no solution entries"""
    assert solve(universe, FlatSystem(vars=(), rhs={})) == {}


def test_check_colouring_detects_wrong_assignment(universe):
    """A perturbed value violates the equations"""
    system = FlatSystem.from_equations({"x": ["x"]})
    assert check_colouring(system, {"x": omega(universe)})
    assert not check_colouring(system, {"x": empty(universe)})


@pytest.mark.parametrize("seed", range(200))
def test_random_systems_solve_exactly(universe, seed):
    """Solutions satisfy their system, ignore the variable order and are unique"""
    cfg = GenConfig(seed=seed, max_nodes=30, max_cycle_prob=0.5)
    system = random_system(universe, cfg)
    solution = solve(universe, system)
    assert check_colouring(system, solution)
    rng = random.Random(seed)
    order = list(system.vars)
    rng.shuffle(order)
    assert solve(universe, permuted(system, order)) == solution

    var = rng.choice(system.vars)
    wrong = omega(universe) if solution[var] == empty(universe) else empty(universe)
    assert not check_colouring(system, {**solution, var: wrong})


def test_random_system_is_deterministic(universe):
    """The same seed gives the same system"""
    cfg = GenConfig(seed=11, max_nodes=8)
    assert random_system(universe, cfg) == random_system(universe, cfg)


def test_random_system_respects_size(universe):
    """Systems never exceed max_nodes vars"""
    for seed in range(50):
        system = random_system(universe, GenConfig(seed=seed, max_nodes=3))
        assert 1 <= len(system.vars) <= 3


def test_substitute_keeps_other_solutions(universe):
    """Replacing a var by its solution leaves the others unchanged"""
    system = FlatSystem.from_equations({"x": ["y", empty(universe)], "y": ["x"]})
    solution = solve(universe, system)
    reduced = substitute(system, "y", solution["y"])
    assert reduced.vars == ("x",)
    assert solve(universe, reduced)["x"] == solution["x"]


def test_constants_are_sorted(universe):
    """constants() is deterministic"""
    a, b = omega(universe), empty(universe)
    system = FlatSystem.from_equations({"x": [a, b]})
    assert system.constants() == tuple(sorted([a, b], key=lambda c: c.id))


def test_well_founded_oracle_on_constants(universe):
    """Constants join the members of the evaluated var"""
    one = singleton(empty(universe))
    system = FlatSystem.from_equations({"x": ["y", one], "y": []})
    assert evaluate_well_founded(universe, system)["x"] == pair(empty(universe), one)


## Error Cases #################################################################


def test_undeclared_reference():
    """References must name declared vars"""
    with pytest.raises(ValidationError, match="Undeclared var 'z'"):
        FlatSystem.from_equations({"x": ["z"]})


def test_missing_equation():
    """Every declared var needs an equation"""
    with pytest.raises(ValidationError):
        FlatSystem(vars=("x", "y"), rhs={"x": (frozenset(), frozenset())})


def test_duplicate_var():
    """Vars are declared once"""
    with pytest.raises(ValidationError):
        FlatSystem(vars=("x", "x"), rhs={"x": (frozenset(), frozenset())})


def test_constants_must_share_a_universe(universe):
    """Constants from two universes cannot be mixed"""
    other = Universe(limits=Limits())
    with pytest.raises(ValidationError):
        FlatSystem.from_equations({"x": [empty(universe)], "y": [empty(other)]})


def test_constant_must_be_a_set():
    """Non-set constants are rejected"""
    with pytest.raises(ValidationError):
        FlatSystem.from_equations({"x": [42]})


def test_check_colouring_needs_every_var(universe):
    """Partial assignments are rejected"""
    system = FlatSystem.from_equations({"x": ["x"], "y": []})
    with pytest.raises(ValidationError):
        check_colouring(system, {"x": omega(universe)})


def test_permuted_must_list_every_var():
    """A permutation cannot drop vars"""
    system = FlatSystem.from_equations({"x": [], "y": []})
    with pytest.raises(ValidationError):
        permuted(system, ["x"])


def test_well_founded_oracle_rejects_cycles(universe):
    """Plain recursion cannot evaluate x = {x}"""
    with pytest.raises(ValidationError):
        evaluate_well_founded(universe, FlatSystem.from_equations({"x": ["x"]}))
