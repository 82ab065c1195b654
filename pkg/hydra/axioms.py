"""
Randomized verification that the hyperset universe satisfies the axioms of
constructive set theory with anti-foundation.

Each axiom is checked on generated instances with membership-bounded
quantifiers: "for all z" ranges over a pool of witnesses built from the sets
under test. A failing sample is reported with the seed that reproduces it.
"""

# Standard
from concurrent import futures
from typing import Callable, Dict, Iterable, List, Optional, Sequence
import dataclasses
import functools
import random
import time

# First Party
import alog

# Local
from .afa import FlatSystem, check_colouring, permuted, solve, substitute
from .bisimulation import bisimilar
from .errors import HydraError, ValidationError
from .graph import Apg, build, from_successors
from .hset import (
    HSet,
    Universe,
    cardinality,
    elements,
    empty,
    equals,
    exponential,
    from_elements,
    intern,
    intersect,
    is_function,
    is_member,
    is_subset,
    is_well_founded,
    numeral,
    omega,
    pair,
    powerset,
    rank,
    replacement,
    separation,
    singleton,
    succ,
    union_of,
)

log = alog.use_channel("AXIOM")

## Types #######################################################################

SEED_MASK = 2**64 - 1


@dataclasses.dataclass(frozen=True)
class GenConfig:
    """Parameters for random instance generation"""

    seed: int = 0
    max_nodes: int = 6
    # Probability scale for edges that close cycles (back edges and self-loops)
    max_cycle_prob: float = 0.25
    samples: int = 100

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError("samples must be at least 1")
        if self.max_nodes < 1:
            raise ValidationError("max_nodes must be at least 1")
        if not 0 <= self.max_cycle_prob <= 1:
            raise ValidationError("max_cycle_prob must lie in [0, 1]")
        if not 0 <= self.seed <= SEED_MASK:
            raise ValidationError("seed must be an unsigned 64-bit integer")

    def for_sample(self, index: int) -> "GenConfig":
        """Config for one sample; its seed reproduces the sample on its own"""
        return dataclasses.replace(self, seed=(self.seed + index) & SEED_MASK)


@dataclasses.dataclass(frozen=True)
class Failure:
    seed: int
    message: str


@dataclasses.dataclass(frozen=True)
class Report:
    """Outcome of checking one axiom"""

    axiom: str
    samples: int
    failures: Sequence[Failure]
    elapsed: float
    seed: int

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: "Report") -> "Report":
        """Combine reports for disjoint sample sets of the same axiom"""
        if other.axiom != self.axiom:
            raise ValidationError(
                f"Cannot merge reports for '{self.axiom}' and '{other.axiom}'"
            )
        return Report(
            axiom=self.axiom,
            samples=self.samples + other.samples,
            failures=tuple(
                sorted([*self.failures, *other.failures], key=lambda f: f.seed)
            ),
            elapsed=self.elapsed + other.elapsed,
            seed=min(self.seed, other.seed),
        )

    def to_line(self) -> str:
        """Machine-readable form: AXIOM<TAB>PASS|FAIL<TAB>samples<TAB>seed"""
        status = "PASS" if self.passed else "FAIL"
        return f"{self.axiom}\t{status}\t{self.samples}\t{self.seed}"

    def summary(self) -> str:
        lines = [
            f"{self.axiom}: {'pass' if self.passed else 'FAIL'} "
            f"({self.samples} samples, {self.elapsed:.3f}s)"
        ]
        for failure in self.failures:
            lines.append(f"  seed {failure.seed}: {failure.message}")
        return "\n".join(lines)


## Generators ##################################################################


def random_graph(rng: random.Random, cfg: GenConfig) -> Apg:
    """Random graph pointed at node 0.

    Edges to higher ids keep the graph well-founded; edges to the same or a
    lower id close cycles and are drawn with probability scaled by
    max_cycle_prob.
    """
    node_count = rng.randint(1, cfg.max_nodes)
    density = rng.uniform(0.2, 0.6)
    edges = []
    for source in range(node_count):
        for target in range(node_count):
            p = density if target > source else density * cfg.max_cycle_prob
            if rng.random() < p:
                edges.append((source, target))
    return build(node_count, edges, 0)


def random_acyclic_graph(rng: random.Random, cfg: GenConfig) -> Apg:
    return random_graph(rng, dataclasses.replace(cfg, max_cycle_prob=0.0))


def bisimilar_variant(rng: random.Random, g: Apg) -> Apg:
    """A different presentation of the same set

    Some nodes are cloned (same successors), some edges into them are
    redirected to the clone and finally all ids are shuffled.
    """
    succ = [list(targets) for targets in g.succ]
    for _ in range(rng.randint(1, 3)):
        original = rng.randrange(len(succ))
        clone = len(succ)
        succ.append(list(succ[original]))
        for targets in succ:
            for i, target in enumerate(targets):
                if target == original and rng.random() < 0.5:
                    targets[i] = clone
    order = list(range(len(succ)))
    rng.shuffle(order)
    shuffled: List[List[int]] = [[] for _ in succ]
    for old, targets in enumerate(succ):
        shuffled[order[old]] = [order[t] for t in targets]
    return from_successors(shuffled, order[g.point])


def random_hset(u: Universe, cfg: GenConfig) -> HSet:
    """Interned set from a random graph, deterministic per seed"""
    return intern(u, random_graph(random.Random(cfg.seed), cfg))


def random_system(u: Universe, cfg: GenConfig) -> FlatSystem:
    """Random flat system with at most max_nodes vars, deterministic per seed"""
    rng = random.Random(cfg.seed)
    names = [f"x{i}" for i in range(rng.randint(1, cfg.max_nodes))]
    density = rng.uniform(0.1, 0.5)
    pool = [empty(u)]
    for offset in range(rng.randint(0, 2)):
        sub_cfg = dataclasses.replace(
            cfg, seed=(cfg.seed * 31 + offset + 1) & SEED_MASK, max_nodes=3
        )
        pool.append(random_hset(u, sub_cfg))
    equations = {}
    for i, name in enumerate(names):
        terms = []
        for j, other in enumerate(names):
            p = density if j > i else density * cfg.max_cycle_prob * 2
            if rng.random() < p:
                terms.append(other)
        terms.extend(c for c in pool if rng.random() < 0.3)
        equations[name] = terms
    return FlatSystem.from_equations(equations)


## Interface ###################################################################


def supported_axioms() -> List[str]:
    return list(AXIOMS)


def run_axiom_check(
    axiom: str,
    u: Universe,
    cfg: GenConfig,
    *,
    workers: int = 1,
) -> Report:
    """Check one axiom on cfg.samples generated instances

    Args:
        axiom:  str
            One of supported_axioms()
        u:  Universe
            The universe under test
        cfg:  GenConfig
            Generation parameters; sample i uses seed cfg.seed + i

    Kwargs:
        workers:  int
            Number of threads to spread the samples over

    Returns:
        report:  Report
            Samples run and failures with their reproducer seeds
    """
    check = AXIOMS.get(axiom)
    if check is None:
        raise ValidationError(
            f"Unknown axiom '{axiom}'. Supported: {', '.join(supported_axioms())}"
        )
    start = time.perf_counter()
    chunks = [range(k, cfg.samples, max(workers, 1)) for k in range(max(workers, 1))]
    chunks = [chunk for chunk in chunks if len(chunk)]
    run_chunk = functools.partial(_run_chunk, axiom, check, u, cfg)
    if len(chunks) == 1:
        reports = [run_chunk(chunks[0])]
    else:
        with futures.ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            reports = list(pool.map(run_chunk, chunks))
    report = dataclasses.replace(
        functools.reduce(Report.merge, reports),
        elapsed=time.perf_counter() - start,
    )
    log.info(
        "Axiom %s: %s (%d samples, %d failures)",
        axiom,
        "pass" if report.passed else "FAIL",
        report.samples,
        len(report.failures),
    )
    return report


def run_all(
    u: Universe,
    cfg: GenConfig,
    axioms: Optional[Iterable[str]] = None,
    *,
    workers: int = 1,
) -> List[Report]:
    """Run run_axiom_check for each named axiom (all by default)"""
    return [
        run_axiom_check(axiom, u, cfg, workers=workers)
        for axiom in (axioms or supported_axioms())
    ]


## Impl ########################################################################


def _run_chunk(
    axiom: str,
    check: Callable[[Universe, GenConfig], Optional[str]],
    u: Universe,
    cfg: GenConfig,
    indices: range,
) -> Report:
    start = time.perf_counter()
    failures = []
    for index in indices:
        sample_cfg = cfg.for_sample(index)
        try:
            message = check(u, sample_cfg)
        except HydraError as err:
            message = f"raised {type(err).__name__}: {err}"
        if message:
            log.warning("Axiom %s failed for seed %d: %s", axiom, sample_cfg.seed, message)
            failures.append(Failure(seed=sample_cfg.seed, message=message))
    return Report(
        axiom=axiom,
        samples=len(indices),
        failures=tuple(failures),
        elapsed=time.perf_counter() - start,
        seed=cfg.seed,
    )


def _trimmed(u: Universe, x: HSet, limit: int) -> HSet:
    """x cut down to at most limit members"""
    return from_elements(u, elements(x)[:limit])


def _witnesses(u: Universe, rng: random.Random, cfg: GenConfig, *sets: HSet) -> List[HSet]:
    """Candidate sets for bounded quantifiers: the sets, their members and
    members of members, plus a few unrelated sets"""
    pool = {empty(u), omega(u)}
    for x in sets:
        pool.add(x)
        for member in elements(x):
            pool.add(member)
            pool.update(elements(member))
    for _ in range(2):
        pool.add(intern(u, random_graph(rng, cfg)))
    return sorted(pool, key=lambda x: x.id)


def _check_extensionality(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    g = random_graph(rng, cfg)
    h = random_graph(rng, cfg)
    a = intern(u, g)
    b = intern(u, bisimilar_variant(rng, g))
    c = intern(u, h)
    if not equals(a, b):
        return "bisimilar presentations interned to different sets"
    if bisimilar(g, h) != equals(a, c):
        return "handle equality disagrees with bisimilarity"
    for x, y in ((a, b), (a, c), (b, c)):
        if (set(elements(x)) == set(elements(y))) != equals(x, y):
            return f"{x!r} and {y!r} have equal members but differ (or vice versa)"
    return None


def _check_pairing(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = intern(u, random_graph(rng, cfg))
    y = intern(u, random_graph(rng, cfg))
    p = pair(x, y)
    for z in _witnesses(u, rng, cfg, x, y, p):
        if is_member(z, p) != (z == x or z == y):
            return f"membership of {z!r} in pair({x!r}, {y!r}) is wrong"
    return None


def _check_union(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = intern(u, random_graph(rng, cfg))
    joined = union_of(x)
    for z in _witnesses(u, rng, cfg, x, joined):
        expected = any(is_member(z, y) for y in elements(x))
        if is_member(z, joined) != expected:
            return f"membership of {z!r} in union_of({x!r}) is wrong"
    return None


def _check_emptyset(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    nothing = from_elements(u, [])
    if elements(nothing) or nothing != intern(u, build(1, [], 0)):
        return "the empty set is not the one-node graph without edges"
    x = intern(u, random_graph(rng, cfg))
    for z in _witnesses(u, rng, cfg, x):
        if is_member(z, nothing):
            return f"{z!r} is a member of the empty set"
    return None


def _check_intersection(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    a = intern(u, random_graph(rng, cfg))
    shared = list(elements(a))[: rng.randint(0, cardinality(a))]
    b = from_elements(u, shared + list(elements(intern(u, random_graph(rng, cfg)))))
    both = intersect(a, b)
    for z in _witnesses(u, rng, cfg, a, b):
        if is_member(z, both) != (is_member(z, a) and is_member(z, b)):
            return f"membership of {z!r} in the intersection is wrong"
    return None


def _replacement_menu(u: Universe) -> Dict[str, Callable[[HSet], HSet]]:
    return {
        "identity": lambda m: m,
        "singleton": singleton,
        "successor": succ,
        "pair-with-empty": lambda m: pair(m, empty(u)),
    }


def _separation_menu() -> Dict[str, Callable[[HSet], bool]]:
    return {
        "empty": lambda m: not elements(m),
        "even-rank": lambda m: is_well_founded(m) and rank(m) % 2 == 0,
        "singleton": lambda m: cardinality(m) == 1,
        "true": lambda m: True,
        "false": lambda m: False,
    }


def _check_replacement(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = intern(u, random_graph(rng, cfg))
    for name, f in _replacement_menu(u).items():
        image = replacement(x, f)
        if set(elements(image)) != {f(m) for m in elements(x)}:
            return f"replacement by {name} over {x!r} has the wrong image"
    return None


def _check_separation(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = intern(u, random_graph(rng, cfg))
    witnesses = _witnesses(u, rng, cfg, x)
    for name, pred in _separation_menu().items():
        part = separation(x, pred)
        for z in witnesses:
            if is_member(z, part) != (is_member(z, x) and pred(z)):
                return f"separation by {name} over {x!r} is wrong at {z!r}"
    return None


def _check_infinity(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    n = rng.randint(0, 12)
    current, following = numeral(u, n), numeral(u, n + 1)
    if numeral(u, 0) != empty(u):
        return "numeral 0 is not the empty set"
    if not is_member(current, following) or succ(current) != following:
        return f"numeral {n + 1} is not the successor of numeral {n}"
    if set(elements(current)) != {numeral(u, k) for k in range(n)}:
        return f"numeral {n} does not have members 0..{n - 1}"
    if rank(current) != n:
        return f"numeral {n} has rank {rank(current)}"
    return None


def _check_exponentiation(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = _trimmed(u, intern(u, random_graph(rng, cfg)), 3)
    y = _trimmed(u, intern(u, random_graph(rng, cfg)), 3)
    functions = exponential(x, y)
    expected = cardinality(y) ** cardinality(x)
    if cardinality(functions) != expected:
        return f"exponential has {cardinality(functions)} members, expected {expected}"
    for f in elements(functions):
        if not is_function(f, x, y):
            return f"{f!r} is not a function from {x!r} to {y!r}"
    return None


def _check_powerset(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    x = _trimmed(u, intern(u, random_graph(rng, cfg)), 6)
    subsets = powerset(x)
    if cardinality(subsets) != 2 ** cardinality(x):
        return f"powerset of a {cardinality(x)}-element set has {cardinality(subsets)}"
    if not all(is_subset(z, x) for z in elements(subsets)):
        return "powerset contains a non-subset"
    chosen = from_elements(u, [m for m in elements(x) if rng.random() < 0.5])
    if not is_member(chosen, subsets):
        return f"subset {chosen!r} missing from the powerset"
    return None


def _check_afa(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    sys = random_system(u, cfg)
    solution = solve(u, sys)
    if not check_colouring(sys, solution):
        return "solution does not satisfy its system"

    order = list(sys.vars)
    rng.shuffle(order)
    if solve(u, permuted(sys, order)) != solution:
        return "solution depends on the variable order"

    var = rng.choice(sys.vars)
    value = solution[var]
    for bad in (singleton(value), empty(u), omega(u), pair(value, empty(u))):
        if bad != value:
            break
    if check_colouring(sys, {**solution, var: bad}):
        return f"perturbed assignment at '{var}' was accepted"

    if len(sys.vars) > 1:
        reduced = substitute(sys, var, value)
        resolved = solve(u, reduced)
        if any(resolved[name] != solution[name] for name in reduced.vars):
            return f"substituting the solution of '{var}' changed the others"
    return None


def _check_foundation_fails(u: Universe, cfg: GenConfig) -> Optional[str]:
    rng = random.Random(cfg.seed)
    quine = omega(u)
    if not is_member(quine, quine) or is_well_founded(quine):
        return "the Quine atom is not a member of itself"
    x = intern(u, random_acyclic_graph(rng, cfg))
    if not is_well_founded(x):
        return f"{x!r} from an acyclic graph is not well-founded"
    if any(rank(m) >= rank(x) for m in elements(x)):
        return f"a member of {x!r} does not have smaller rank"
    return None


AXIOMS: Dict[str, Callable[[Universe, GenConfig], Optional[str]]] = {
    "extensionality": _check_extensionality,
    "pairing": _check_pairing,
    "union": _check_union,
    "emptyset": _check_emptyset,
    "intersection": _check_intersection,
    "replacement": _check_replacement,
    "separation": _check_separation,
    "infinity": _check_infinity,
    "exponentiation": _check_exponentiation,
    "powerset": _check_powerset,
    "afa": _check_afa,
    "foundation-fails": _check_foundation_fails,
}
