"""
Tests for the hyperset universe and its set operations
"""

# Standard
from concurrent import futures
import random

# Third Party
import pytest

# Local
from hydra.afa import FlatSystem, evaluate_well_founded
from hydra.axioms import GenConfig, random_acyclic_graph, random_graph
from hydra.bisimulation import bisimilar
from hydra.config import Limits
from hydra.errors import ResourceBoundError, UniverseMismatchError, ValidationError
from hydra.graph import build
from hydra.hset import (
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
    kuratowski_pair,
    kuratowski_unpair,
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

## Happy Path ##################################################################


def test_intern_bisimilar_graphs_share_a_handle(universe):
    """A 3-cycle and a self-loop are both Ω"""
    assert intern(universe, build(3, [(0, 1), (1, 2), (2, 0)], 0)) == omega(universe)
    assert len(universe) == 1


def test_empty_has_no_members(universe):
    """∅ is the one-node graph without edges"""
    assert elements(empty(universe)) == ()
    assert from_elements(universe, []) == empty(universe)


def test_quine_atom_identities(universe):
    """Closed-form identities of the Quine atom"""
    quine = omega(universe)
    assert is_member(quine, quine)
    assert singleton(quine) == quine
    assert succ(quine) == quine
    assert union_of(quine) == quine
    assert pair(quine, singleton(quine)) == quine
    assert not is_well_founded(quine)


def test_members_of_two(universe):
    """2 = {∅, {∅}}"""
    two = numeral(universe, 2)
    assert set(elements(two)) == {empty(universe), singleton(empty(universe))}
    assert two == intern(universe, build(3, [(0, 1), (0, 2), (2, 1)], 0))


def test_elements_are_distinct_and_sorted(universe):
    """Duplicate members collapse and the order is by canonical encoding"""
    zero, one = numeral(universe, 0), numeral(universe, 1)
    x = from_elements(universe, [one, zero, one])
    assert elements(x) == (zero, one)
    assert cardinality(x) == 2


def test_from_elements_round_trip(universe):
    """Folding the members back gives the same set"""
    rng = random.Random(3)
    for _ in range(50):
        x = intern(universe, random_graph(rng, GenConfig(max_nodes=6)))
        assert from_elements(universe, elements(x)) == x


def test_pair_membership(universe):
    """z ∈ {x, y} iff z = x or z = y"""
    x, y = numeral(universe, 1), omega(universe)
    p = pair(x, y)
    assert is_member(x, p)
    assert is_member(y, p)
    assert not is_member(numeral(universe, 2), p)
    assert pair(x, x) == singleton(x)


def test_union_intersection_subset(universe):
    """Union, intersection and inclusion on numerals"""
    three, two = numeral(universe, 3), numeral(universe, 2)
    assert union_of(pair(three, two)) == three
    assert intersect(three, two) == two
    assert is_subset(two, three)
    assert not is_subset(three, two)
    assert union_of(empty(universe)) == empty(universe)


def test_separation_and_replacement(universe):
    """Filtering and mapping over members"""
    four = numeral(universe, 4)
    evens = separation(four, lambda m: cardinality(m) % 2 == 0)
    assert set(elements(evens)) == {numeral(universe, 0), numeral(universe, 2)}
    assert replacement(numeral(universe, 3), succ) == from_elements(
        universe, [numeral(universe, k) for k in (1, 2, 3)]
    )


def test_numerals_are_well_founded_with_rank(universe):
    """n has n members, rank n and n ∈ n+1"""
    for n in range(10):
        x = numeral(universe, n)
        assert cardinality(x) == n
        assert rank(x) == n
        assert is_member(x, numeral(universe, n + 1))
        assert succ(x) == numeral(universe, n + 1)


def test_kuratowski_pair_round_trip(universe):
    """unpair inverts pair, including the diagonal"""
    a, b = numeral(universe, 1), omega(universe)
    assert kuratowski_unpair(kuratowski_pair(a, b)) == (a, b)
    assert kuratowski_unpair(kuratowski_pair(b, a)) == (b, a)
    assert kuratowski_unpair(kuratowski_pair(a, a)) == (a, a)


@pytest.mark.parametrize("domain,codomain", [(0, 0), (0, 3), (2, 0), (2, 3), (3, 2)])
def test_exponential_counts(universe, domain, codomain):
    """|y^x| = |y|^|x| and every member is a function"""
    x, y = numeral(universe, domain), numeral(universe, codomain)
    functions = exponential(x, y)
    assert cardinality(functions) == codomain**domain
    assert all(is_function(f, x, y) for f in elements(functions))


def test_is_function_rejects_relations(universe):
    """A relation with two images for one point is not a function"""
    zero, one = numeral(universe, 0), numeral(universe, 1)
    two = numeral(universe, 2)
    relation = pair(kuratowski_pair(zero, zero), kuratowski_pair(zero, one))
    assert not is_function(relation, one, two)
    assert not is_function(empty(universe), one, two)
    assert is_function(singleton(kuratowski_pair(zero, one)), one, two)


@pytest.mark.parametrize("size", range(11))
def test_powerset_counts(universe, size):
    """|P(x)| = 2^|x| and every member is a subset"""
    x = numeral(universe, size)
    subsets = powerset(x)
    assert cardinality(subsets) == 2**size
    assert all(is_subset(z, x) for z in elements(subsets))


def test_powerset_of_quine_atom(universe):
    """P(Ω) = {∅, Ω}"""
    assert powerset(omega(universe)) == pair(empty(universe), omega(universe))


@pytest.mark.parametrize("seed", range(500))
def test_extensionality_matches_bisimilarity(universe, seed):
    """Handle equality is bisimilarity of the presenting graphs"""
    rng = random.Random(seed)
    cfg = GenConfig(seed=seed, max_nodes=4, max_cycle_prob=0.5)
    g1, g2 = random_graph(rng, cfg), random_graph(rng, cfg)
    assert equals(intern(universe, g1), intern(universe, g2)) == bisimilar(g1, g2)


@pytest.mark.parametrize("seed", range(300))
def test_well_founded_sets_match_structural_recursion(universe, seed):
    """On acyclic graphs interning agrees with bottom-up evaluation"""
    rng = random.Random(seed)
    g = random_acyclic_graph(rng, GenConfig(seed=seed, max_nodes=7))
    system = FlatSystem.from_equations(
        {f"n{node}": [f"n{t}" for t in targets] for node, targets in enumerate(g.succ)}
    )
    values = evaluate_well_founded(universe, system)
    x = intern(universe, g)
    assert values[f"n{g.point}"] == x
    assert is_well_founded(x)


def test_concurrent_intern_agrees(universe):
    """Interning from many threads gives one handle per set"""
    graphs = [build(k + 1, [(i, (i + 1) % (k + 1)) for i in range(k + 1)], 0) for k in range(8)]
    with futures.ThreadPoolExecutor(max_workers=8) as pool:
        handles = list(pool.map(lambda g: intern(universe, g), graphs * 4))
    assert set(handles) == {omega(universe)}


def test_concurrent_numerals_agree():
    """Numerals requested from many threads are the von Neumann numerals"""
    universe = Universe(limits=Limits())
    requests = list(range(25)) * 8
    random.Random(3).shuffle(requests)
    with futures.ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda n: numeral(universe, n), requests))
    for n, x in zip(requests, results):
        assert rank(x) == n
        assert cardinality(x) == n
        assert numeral(universe, n) == x


## Error Cases #################################################################


def test_handles_from_other_universe(universe):
    """Mixing universes is rejected"""
    other = Universe(limits=Limits())
    with pytest.raises(UniverseMismatchError):
        pair(empty(universe), empty(other))
    with pytest.raises(UniverseMismatchError):
        is_member(empty(other), empty(universe))


def test_numeral_bounds(universe):
    """Negative numerals are invalid and large ones exceed the limit"""
    with pytest.raises(ValidationError):
        numeral(universe, -1)
    small = Universe(limits=Limits(max_numeral=3))
    with pytest.raises(ResourceBoundError):
        numeral(small, 4)


def test_powerset_bound():
    """Powersets of large sets are refused, not truncated"""
    u = Universe(limits=Limits(max_powerset_base=2))
    with pytest.raises(ResourceBoundError):
        powerset(numeral(u, 3))


def test_exponential_bound():
    """Exponentials with too many functions are refused"""
    u = Universe(limits=Limits(max_exponential=8))
    with pytest.raises(ResourceBoundError):
        exponential(numeral(u, 2), numeral(u, 3))


def test_intern_node_bound():
    """Graphs above max_nodes are refused"""
    u = Universe(limits=Limits(max_nodes=2))
    with pytest.raises(ResourceBoundError):
        intern(u, build(3, [], 0))


def test_rank_of_non_well_founded_set(universe):
    """Ω has no rank"""
    with pytest.raises(ValidationError):
        rank(omega(universe))


def test_unpair_rejects_non_pairs(universe):
    """Sets that are not Kuratowski pairs are rejected"""
    with pytest.raises(ValidationError):
        kuratowski_unpair(numeral(universe, 3))
    with pytest.raises(ValidationError):
        kuratowski_unpair(empty(universe))
