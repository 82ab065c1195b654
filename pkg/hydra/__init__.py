"""
This library computes with hypersets: possibly non-well-founded sets presented
by finite graphs and identified up to bisimulation.

Example:

```
import hydra

universe = hydra.Universe()

# x = {x} has exactly one solution, the Quine atom
solution = hydra.solve(universe, hydra.FlatSystem.from_equations({"x": ["x"]}))
assert solution["x"] == hydra.omega(universe)
assert hydra.is_member(solution["x"], solution["x"])

# The same set written in the expression language
quine = hydra.eval_program(universe, hydra.parse("μy.{y, μz.{z}}"))
print(hydra.print_canonical(quine))  # μx0.{x0}
```
"""

# Local
from .afa import FlatSystem, check_colouring, evaluate_well_founded, solve
from .axioms import GenConfig, Report, run_all, run_axiom_check
from .bisimulation import (
    CanonicalApg,
    Partition,
    bisimilar,
    canonical_encoding,
    minimize,
    naive_largest_bisimulation,
    quotient,
    refine_partition,
)
from .config import Limits
from .errors import (
    EvaluationError,
    HydraError,
    HydraParseError,
    ResourceBoundError,
    UniverseMismatchError,
    ValidationError,
)
from .expr import Session, eval_program, parse, print_canonical
from .graph import Apg, build, disjoint_union, reachable_restriction, small_subcoalgebras
from .hset import (
    HSet,
    Universe,
    elements,
    empty,
    equals,
    exponential,
    from_elements,
    intern,
    intersect,
    is_member,
    kuratowski_pair,
    numeral,
    omega,
    pair,
    powerset,
    replacement,
    separation,
    singleton,
    succ,
    union_of,
)
from .mtype import (
    LabelledApg,
    MTree,
    MUniverse,
    Signature,
    canonical_labelled_encoding,
    mtree_equals,
    observe,
    truncate,
    unfold,
)
