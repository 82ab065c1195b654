"""
The universe of hereditarily finite hypersets.

A Universe interns canonical minimal graphs: two graphs receive the same
handle iff they are bisimilar, so set equality is handle equality and every
operation here normalizes its result through intern. The universe realizes a
fixpoint of the finite powerset functor: elements() unfolds a set into its
members and from_elements() folds a finite collection back into a set.

Only finitely presentable sets live here. In particular the infinite ordinal
omega is not representable; numeral() provides its finite initial segments.
"""

# Standard
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import dataclasses
import itertools
import threading

# First Party
import alog

# Local
from .bisimulation import CanonicalApg, minimize
from .config import Limits
from .errors import ResourceBoundError, UniverseMismatchError, ValidationError
from .graph import Apg, build, from_successors, generated_subcoalgebra

log = alog.use_channel("HSET")

## Types #######################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class HSet:
    """Handle to an interned hyperset"""

    id: int
    universe: "Universe"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HSet)
            and self.universe is other.universe
            and self.id == other.id
        )

    def __hash__(self) -> int:
        return hash((id(self.universe), self.id))

    def __repr__(self) -> str:
        return f"HSet({self.id})"


class Universe:
    """Append-only store of canonical graphs keyed by their encodings"""

    def __init__(self, *, limits: Optional[Limits] = None):
        self.limits = limits or Limits.from_env()
        self._store: Dict[bytes, int] = {}
        self._decode: List[CanonicalApg] = []
        self._elements: Dict[int, Tuple[HSet, ...]] = {}
        self._numerals: List[HSet] = []
        self._lock = threading.Lock()
        # Guards the derived caches; never held while interning
        self._cache_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._decode)

    def canonical(self, x: HSet) -> CanonicalApg:
        """The canonical graph stored for a handle"""
        self.check(x)
        return self._decode[x.id]

    def insert(self, canonical: CanonicalApg) -> HSet:
        """Atomic check-or-insert of a canonical graph; first writer wins"""
        with self._lock:
            set_id = self._store.get(canonical.encoding)
            if set_id is None:
                set_id = len(self._decode)
                self._decode.append(canonical)
                self._store[canonical.encoding] = set_id
                log.debug4("Interned new set %d", set_id)
        return HSet(id=set_id, universe=self)

    def check(self, *xs: HSet):
        """Raise UniverseMismatchError unless every handle belongs here"""
        for x in xs:
            if not isinstance(x, HSet) or x.universe is not self:
                raise UniverseMismatchError(f"{x!r} does not belong to this universe")


## Interface ###################################################################


def intern(u: Universe, g: Apg) -> HSet:
    """The set presented by a graph; bisimilar graphs give the same handle

    Args:
        u:  Universe
            The universe to intern into
        g:  Apg
            Any valid graph

    Returns:
        x:  HSet
            Handle to the minimized graph
    """
    if g.node_count > u.limits.max_nodes:
        raise ResourceBoundError(
            f"Graph with {g.node_count} nodes exceeds max_nodes={u.limits.max_nodes}"
        )
    canonical, _ = minimize(g)
    return u.insert(canonical)


def empty(u: Universe) -> HSet:
    return intern(u, build(1, [], 0))


def omega(u: Universe) -> HSet:
    """The Quine atom, the unique set equal to its own singleton"""
    return intern(u, build(1, [(0, 0)], 0))


def elements(x: HSet) -> Tuple[HSet, ...]:
    """The distinct members of x, ordered by canonical encoding"""
    u = x.universe
    u.check(x)
    cached = u._elements.get(x.id)
    if cached is None:
        graph = u._decode[x.id].graph
        members = {}
        for target in graph.succ[graph.point]:
            member = intern(u, generated_subcoalgebra(graph, target)[0])
            members[member.id] = member
        cached = tuple(
            sorted(members.values(), key=lambda m: u._decode[m.id].encoding)
        )
        with u._cache_lock:
            cached = u._elements.setdefault(x.id, cached)
    return cached


def from_elements(u: Universe, xs: Iterable[HSet]) -> HSet:
    """The set whose members are exactly the given sets

    Args:
        u:  Universe
            The universe the members belong to
        xs:  Iterable[HSet]
            Members; duplicates collapse

    Returns:
        x:  HSet
            The interned set
    """
    members = list(dict.fromkeys(xs))
    u.check(*members)
    if not members:
        return empty(u)
    succ: List[Sequence[int]] = []
    root_succ = []
    for member in members:
        graph = u._decode[member.id].graph
        offset = len(succ)
        succ.extend([offset + t for t in targets] for targets in graph.succ)
        root_succ.append(offset + graph.point)
    succ.append(root_succ)
    return intern(u, from_successors(succ, len(succ) - 1))


def pair(x: HSet, y: HSet) -> HSet:
    """{x, y}"""
    _same_universe(x, y)
    return from_elements(x.universe, [x, y])


def singleton(x: HSet) -> HSet:
    """{x}"""
    return from_elements(x.universe, [x])


def union_of(x: HSet) -> HSet:
    """The union of the members of x"""
    return from_elements(
        x.universe, [member for inner in elements(x) for member in elements(inner)]
    )


def intersect(x: HSet, y: HSet) -> HSet:
    """The common members of x and y"""
    _same_universe(x, y)
    common = set(elements(y))
    return from_elements(x.universe, [m for m in elements(x) if m in common])


def separation(x: HSet, pred: Callable[[HSet], bool]) -> HSet:
    """The members of x satisfying pred"""
    return from_elements(x.universe, [m for m in elements(x) if pred(m)])


def replacement(x: HSet, f: Callable[[HSet], HSet]) -> HSet:
    """The image of the members of x under f"""
    return from_elements(x.universe, [f(m) for m in elements(x)])


def succ(x: HSet) -> HSet:
    """x ∪ {x}"""
    u = x.universe
    u.check(x)
    graph = u._decode[x.id].graph
    root_succ = graph.succ[graph.point] + (graph.point,)
    return intern(u, from_successors(list(graph.succ) + [root_succ], graph.node_count))


def numeral(u: Universe, n: int) -> HSet:
    """The von Neumann numeral n = {0, ..., n-1}

    Args:
        u:  Universe
            The universe to build in
        n:  int
            Non-negative integer, at most limits.max_numeral

    Returns:
        x:  HSet
            The numeral
    """
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"Numerals are non-negative integers, got {n!r}")
    if n > u.limits.max_numeral:
        raise ResourceBoundError(
            f"Numeral {n} exceeds max_numeral={u.limits.max_numeral}"
        )
    with u._cache_lock:
        known = list(u._numerals)
    if len(known) > n:
        return known[n]

    # Extend a private copy, then publish whatever is still missing
    if not known:
        known.append(empty(u))
    while len(known) <= n:
        known.append(succ(known[-1]))
    with u._cache_lock:
        u._numerals.extend(known[len(u._numerals) :])
    return known[n]


def is_member(x: HSet, y: HSet) -> bool:
    """x ∈ y"""
    _same_universe(x, y)
    return x in elements(y)


def equals(x: HSet, y: HSet) -> bool:
    """Extensional equality, which is handle equality after interning"""
    _same_universe(x, y)
    return x.id == y.id


def cardinality(x: HSet) -> int:
    return len(elements(x))


def is_subset(x: HSet, y: HSet) -> bool:
    _same_universe(x, y)
    members = set(elements(y))
    return all(m in members for m in elements(x))


def kuratowski_pair(x: HSet, y: HSet) -> HSet:
    """(x, y) = {{x}, {x, y}}"""
    _same_universe(x, y)
    return pair(singleton(x), pair(x, y))


def kuratowski_unpair(p: HSet) -> Tuple[HSet, HSet]:
    """Recover (x, y) from a Kuratowski pair

    Candidates are read off the singleton members of p and confirmed by
    rebuilding the pair.

    Args:
        p:  HSet
            A Kuratowski pair

    Returns:
        first, second:  Tuple[HSet, HSet]
            The components
    """
    members = elements(p)
    for candidate in members:
        inner = elements(candidate)
        if len(inner) != 1:
            continue
        first = inner[0]
        others = [m for m in members if m != candidate]
        if not others:
            second = first
        elif len(others) == 1 and len(elements(others[0])) == 2:
            rest = [m for m in elements(others[0]) if m != first]
            if len(rest) != 1:
                continue
            second = rest[0]
        else:
            continue
        if kuratowski_pair(first, second) == p:
            return first, second
    raise ValidationError(f"{p!r} is not a Kuratowski pair")


def is_function(f: HSet, x: HSet, y: HSet) -> bool:
    """Fun(f, x, y): f is the graph of a function from x to y"""
    _same_universe(f, x)
    _same_universe(f, y)
    domain = set(elements(x))
    codomain = set(elements(y))
    seen = {}
    for member in elements(f):
        try:
            first, second = kuratowski_unpair(member)
        except ValidationError:
            return False
        if first not in domain or second not in codomain or first in seen:
            return False
        seen[first] = second
    return set(seen) == domain


def exponential(x: HSet, y: HSet) -> HSet:
    """The set of all functions from x to y, as sets of Kuratowski pairs

    Args:
        x:  HSet
            Domain
        y:  HSet
            Codomain

    Returns:
        functions:  HSet
            A set with |y|^|x| members
    """
    _same_universe(x, y)
    u = x.universe
    domain = elements(x)
    codomain = elements(y)
    count = len(codomain) ** len(domain)
    if count > u.limits.max_exponential:
        raise ResourceBoundError(
            f"Exponential with {count} functions exceeds "
            f"max_exponential={u.limits.max_exponential}"
        )
    table = [[kuratowski_pair(a, b) for b in codomain] for a in domain]
    functions = [
        from_elements(u, [table[i][j] for i, j in enumerate(choice)])
        for choice in itertools.product(range(len(codomain)), repeat=len(domain))
    ]
    log.debug2("Enumerated %d functions", len(functions))
    return from_elements(u, functions)


def powerset(x: HSet) -> HSet:
    """The set of all subsets of x

    Args:
        x:  HSet
            A set with at most limits.max_powerset_base members

    Returns:
        subsets:  HSet
            A set with 2^|x| members
    """
    u = x.universe
    members = elements(x)
    if len(members) > u.limits.max_powerset_base:
        raise ResourceBoundError(
            f"Powerset of a {len(members)}-element set exceeds "
            f"max_powerset_base={u.limits.max_powerset_base}"
        )
    subsets = [
        from_elements(u, [m for i, m in enumerate(members) if mask >> i & 1])
        for mask in range(1 << len(members))
    ]
    return from_elements(u, subsets)


def is_well_founded(x: HSet) -> bool:
    """True iff x has no infinite descending membership chain"""
    return _heights(x.universe.canonical(x).graph) is not None


def rank(x: HSet) -> int:
    """The von Neumann rank of a well-founded set"""
    graph = x.universe.canonical(x).graph
    heights = _heights(graph)
    if heights is None:
        raise ValidationError(f"{x!r} is not well-founded and has no rank")
    return heights[graph.point]


## Impl ########################################################################


def _same_universe(x: HSet, y: HSet):
    if not isinstance(x, HSet):
        raise UniverseMismatchError(f"{x!r} is not a hyperset handle")
    x.universe.check(y)


def _heights(graph: Apg) -> Optional[List[int]]:
    """Height of every node if the graph is acyclic, else None"""
    pred = [[] for _ in range(graph.node_count)]
    remaining = [len(targets) for targets in graph.succ]
    for source, targets in enumerate(graph.succ):
        for target in targets:
            pred[target].append(source)
    heights = [0] * graph.node_count
    ready = [node for node, count in enumerate(remaining) if count == 0]
    settled = 0
    while ready:
        node = ready.pop()
        settled += 1
        for source in pred[node]:
            heights[source] = max(heights[source], heights[node] + 1)
            remaining[source] -= 1
            if remaining[source] == 0:
                ready.append(source)
    return heights if settled == graph.node_count else None
