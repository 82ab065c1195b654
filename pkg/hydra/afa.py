"""
Solver for flat systems of set equations.

A flat system assigns to each variable a finite set of variables and constant
sets, e.g. x = {y, ∅}, y = {x}. Read as a graph (an edge from each variable to
every variable and constant on its right-hand side) it has exactly one
decoration, and the solution of each variable is the set its node presents.
"""

# Standard
from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple, Union
import dataclasses

# First Party
import alog

# Local
from .bisimulation import Partition, quotient, refine_partition
from .errors import ValidationError
from .graph import from_successors, with_point
from .hset import HSet, Universe, elements, empty, from_elements, intern

log = alog.use_channel("AFA")

## Types #######################################################################

# Right-hand side of one equation: referenced variables and constant sets
Rhs = Tuple[FrozenSet[str], FrozenSet[HSet]]


@dataclasses.dataclass(frozen=True)
class FlatSystem:
    """A system of equations var = {vars..., constants...}"""

    vars: Tuple[str, ...]
    rhs: Mapping[str, Rhs]

    def __post_init__(self):
        declared = set(self.vars)
        if len(declared) != len(self.vars):
            raise ValidationError("Duplicate variable in flat system")
        for name in self.rhs:
            if name not in declared:
                raise ValidationError(f"Equation for undeclared var '{name}'")
        universes = set()
        for name in self.vars:
            if name not in self.rhs:
                raise ValidationError(f"No equation for var '{name}'")
            refs, constants = self.rhs[name]
            for ref in refs:
                if ref not in declared:
                    raise ValidationError(
                        f"Undeclared var '{ref}' in equation for '{name}'"
                    )
            for constant in constants:
                if not isinstance(constant, HSet):
                    raise ValidationError(
                        f"Constant {constant!r} in equation for '{name}' is not a set"
                    )
                universes.add(id(constant.universe))
        if len(universes) > 1:
            raise ValidationError("Constants of a flat system must share a universe")

    @classmethod
    def from_equations(
        cls,
        equations: Mapping[str, Iterable[Union[str, HSet]]],
    ) -> "FlatSystem":
        """Build a system from {var: [var name | constant, ...]}"""
        rhs = {}
        for name, terms in equations.items():
            terms = list(terms)
            rhs[name] = (
                frozenset(t for t in terms if isinstance(t, str)),
                frozenset(t for t in terms if not isinstance(t, str)),
            )
        return cls(vars=tuple(equations), rhs=rhs)

    def constants(self) -> Tuple[HSet, ...]:
        """Every constant used, in a deterministic order"""
        found = {c for _, constants in self.rhs.values() for c in constants}
        return tuple(sorted(found, key=lambda c: c.id))


## Interface ###################################################################


def solve(u: Universe, sys: FlatSystem) -> Dict[str, HSet]:
    """The unique solution of a flat system

    Args:
        u:  Universe
            Universe of the constants and the solution
        sys:  FlatSystem
            The equations

    Returns:
        solution:  Dict[str, HSet]
            var -> set, satisfying every equation exactly
    """
    if not sys.vars:
        return {}
    constants = sys.constants()
    u.check(*constants)

    index = {name: i for i, name in enumerate(sys.vars)}
    succ = [[] for _ in sys.vars]
    constant_node = {}
    for constant in constants:
        graph = u.canonical(constant).graph
        offset = len(succ)
        succ.extend([offset + t for t in targets] for targets in graph.succ)
        constant_node[constant] = offset + graph.point
    for name in sys.vars:
        refs, consts = sys.rhs[name]
        succ[index[name]] = [index[r] for r in refs] + [constant_node[c] for c in consts]
    graph = from_successors(succ, 0)
    log.debug2(
        "Solving %d vars with %d constants over %d nodes",
        len(sys.vars),
        len(constants),
        graph.node_count,
    )

    # Bisimilar variables share a block and therefore a solution
    partition = refine_partition(graph, Partition.trivial(graph.node_count))
    collapsed, projection = quotient(graph, partition)
    by_block: Dict[int, HSet] = {}
    solution = {}
    for name in sys.vars:
        block = projection[index[name]]
        if block not in by_block:
            by_block[block] = intern(u, with_point(collapsed, block))
        solution[name] = by_block[block]
    return solution


def check_colouring(sys: FlatSystem, assignment: Mapping[str, HSet]) -> bool:
    """True iff the assignment satisfies every equation of the system

    Args:
        sys:  FlatSystem
            The equations
        assignment:  Mapping[str, HSet]
            A value for every var

    Returns:
        holds:  bool
            Whether value(v) = {value(w) : w in rhs(v)} ∪ constants(v) for all v
    """
    for name in sys.vars:
        if name not in assignment:
            raise ValidationError(f"No value assigned to var '{name}'")
    for name in sys.vars:
        refs, constants = sys.rhs[name]
        expected = {assignment[r] for r in refs} | set(constants)
        if set(elements(assignment[name])) != expected:
            log.debug2("Colouring equation fails at '%s'", name)
            return False
    return True


def permuted(sys: FlatSystem, order: Sequence[str]) -> FlatSystem:
    """The same equations with the variables declared in a different order"""
    if sorted(order) != sorted(sys.vars):
        raise ValidationError("Permutation must list every var exactly once")
    return FlatSystem(vars=tuple(order), rhs=dict(sys.rhs))


def substitute(sys: FlatSystem, var: str, value: HSet) -> FlatSystem:
    """Replace a var by a constant everywhere and drop its equation"""
    if var not in sys.rhs:
        raise ValidationError(f"Undeclared var '{var}'")
    rhs = {}
    for name in sys.vars:
        if name == var:
            continue
        refs, constants = sys.rhs[name]
        if var in refs:
            refs = refs - {var}
            constants = constants | {value}
        rhs[name] = (refs, constants)
    return FlatSystem(vars=tuple(n for n in sys.vars if n != var), rhs=rhs)


def evaluate_well_founded(u: Universe, sys: FlatSystem) -> Dict[str, HSet]:
    """Evaluate an acyclic system bottom-up by plain recursion

    Args:
        u:  Universe
            Universe of the constants and the result
        sys:  FlatSystem
            A system whose var references contain no cycle

    Returns:
        values:  Dict[str, HSet]
            var -> set
    """
    values: Dict[str, HSet] = {}
    in_progress = set()

    def evaluate(name: str) -> HSet:
        if name in values:
            return values[name]
        if name in in_progress:
            raise ValidationError(f"System is cyclic through var '{name}'")
        in_progress.add(name)
        refs, constants = sys.rhs[name]
        members = [evaluate(ref) for ref in sorted(refs)] + sorted(
            constants, key=lambda c: c.id
        )
        values[name] = from_elements(u, members) if members else empty(u)
        in_progress.discard(name)
        return values[name]

    for name in sys.vars:
        evaluate(name)
    return values
