"""
Finite pointed graphs viewed as coalgebras of the finite powerset functor.

A node's successor set plays the role of its set of members, so a pointed graph
is the raw presentation of a (possibly non-well-founded) set. Graphs built here
are not required to be accessible; reachable_restriction establishes that.
"""

# Standard
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple
import dataclasses

# First Party
import alog

# Local
from .errors import ValidationError

log = alog.use_channel("GRAPH")

## Types #######################################################################

# Dense 0-based node index
NodeId = int

# Explicit renumbering of nodes from one graph into another (possibly partial)
NodeMap = Dict[NodeId, NodeId]


@dataclasses.dataclass(frozen=True)
class Apg:
    """A finite pointed graph with sorted, duplicate-free successor tuples"""

    node_count: int
    succ: Tuple[Tuple[NodeId, ...], ...]
    point: NodeId

    @property
    def edge_count(self) -> int:
        return sum(len(targets) for targets in self.succ)


## Interface ###################################################################


def build(
    node_count: int,
    edges: Iterable[Tuple[NodeId, NodeId]],
    point: NodeId,
) -> Apg:
    """Build a graph from an edge list

    Args:
        node_count:  int
            Number of nodes; ids are 0..node_count-1
        edges:  Iterable[Tuple[NodeId, NodeId]]
            (source, target) pairs; duplicates are collapsed
        point:  NodeId
            The distinguished node

    Returns:
        graph:  Apg
            The validated graph
    """
    _check_count(node_count)
    succ_sets = [set() for _ in range(node_count)]
    for source, target in edges:
        _check_node(source, node_count)
        _check_node(target, node_count)
        succ_sets[source].add(target)
    _check_node(point, node_count)
    return Apg(
        node_count=node_count,
        succ=tuple(tuple(sorted(targets)) for targets in succ_sets),
        point=point,
    )


def from_successors(
    succ_lists: Sequence[Iterable[NodeId]],
    point: NodeId,
) -> Apg:
    """Build a graph from per-node successor collections

    Args:
        succ_lists:  Sequence[Iterable[NodeId]]
            Entry i holds the successors of node i
        point:  NodeId
            The distinguished node

    Returns:
        graph:  Apg
            The validated graph
    """
    node_count = len(succ_lists)
    _check_count(node_count)
    succ = []
    for targets in succ_lists:
        targets = tuple(sorted(set(targets)))
        for target in targets:
            _check_node(target, node_count)
        succ.append(targets)
    _check_node(point, node_count)
    return Apg(node_count=node_count, succ=tuple(succ), point=point)


def with_point(g: Apg, point: NodeId) -> Apg:
    """Return the same graph pointed at a different node"""
    _check_node(point, g.node_count)
    return dataclasses.replace(g, point=point)


def edges(g: Apg) -> Iterator[Tuple[NodeId, NodeId]]:
    """Iterate the (source, target) pairs in ascending order"""
    for source, targets in enumerate(g.succ):
        for target in targets:
            yield source, target


def reachable_restriction(g: Apg) -> Tuple[Apg, NodeMap]:
    """Restrict a graph to the nodes reachable from its point.

    This is the subcoalgebra generated by the point: start from {point} and
    add successors round by round until nothing new appears. Surviving nodes
    keep their relative order, so an already accessible graph comes back
    unchanged with the identity map.

    Args:
        g:  Apg
            The graph to restrict

    Returns:
        restricted:  Apg
            The accessible part of g
        node_map:  NodeMap
            Old id -> new id for every reachable node
    """
    seen = [False] * g.node_count
    seen[g.point] = True
    frontier = [g.point]
    rounds = 0
    while frontier:
        rounds += 1
        next_frontier = []
        for node in frontier:
            for target in g.succ[node]:
                if not seen[target]:
                    seen[target] = True
                    next_frontier.append(target)
        frontier = next_frontier
    assert rounds <= g.node_count, "PROGRAMMING ERROR: reachability did not settle"

    kept = [node for node in range(g.node_count) if seen[node]]
    node_map = {old: new for new, old in enumerate(kept)}
    log.debug3(
        "Reachable restriction kept %d/%d nodes in %d rounds",
        len(kept),
        g.node_count,
        rounds,
    )
    if len(kept) == g.node_count:
        return g, node_map
    restricted = Apg(
        node_count=len(kept),
        succ=tuple(
            tuple(node_map[target] for target in g.succ[old]) for old in kept
        ),
        point=node_map[g.point],
    )
    return restricted, node_map


def generated_subcoalgebra(g: Apg, node: NodeId) -> Tuple[Apg, NodeMap]:
    """The part of g reachable from the given node, pointed at it"""
    return reachable_restriction(with_point(g, node))


def small_subcoalgebras(g: Apg) -> List[Tuple[NodeId, Apg]]:
    """The generated subcoalgebra of every node of g

    Args:
        g:  Apg
            The graph to decompose

    Returns:
        entries:  List[Tuple[NodeId, Apg]]
            One (node, subgraph) entry per node, in node order
    """
    return [
        (node, generated_subcoalgebra(g, node)[0]) for node in range(g.node_count)
    ]


def disjoint_union(gs: Sequence[Apg]) -> Tuple[Apg, List[NodeMap]]:
    """Coproduct of graphs with consecutive renumbering

    The result is pointed at the first summand's point.

    Args:
        gs:  Sequence[Apg]
            The summands (at least one)

    Returns:
        union:  Apg
            The combined graph
        injections:  List[NodeMap]
            One map per summand from its ids into the union
    """
    if not gs:
        raise ValidationError("disjoint_union needs at least one graph")
    succ: List[Tuple[NodeId, ...]] = []
    injections = []
    offset = 0
    for summand in gs:
        injections.append({node: node + offset for node in range(summand.node_count)})
        succ.extend(
            tuple(target + offset for target in targets) for targets in summand.succ
        )
        offset += summand.node_count
    log.debug3("Disjoint union of %d graphs with %d nodes", len(gs), offset)
    return Apg(node_count=offset, succ=tuple(succ), point=gs[0].point), injections


def is_coalgebra_morphism(src: Apg, dst: Apg, node_map: Mapping[NodeId, NodeId]) -> bool:
    """Check that node_map is total on src and commutes with the successors

    Args:
        src:  Apg
            Domain graph
        dst:  Apg
            Codomain graph
        node_map:  Mapping[NodeId, NodeId]
            Candidate morphism

    Returns:
        is_morphism:  bool
            True iff succ_dst(h(x)) == h[succ_src(x)] for every node x
    """
    for node in range(src.node_count):
        image = node_map.get(node)
        if image is None or not 0 <= image < dst.node_count:
            return False
        if set(dst.succ[image]) != {node_map.get(t) for t in src.succ[node]}:
            return False
    return True


## Impl ########################################################################


def _check_count(node_count: int):
    if not isinstance(node_count, int) or node_count < 1:
        raise ValidationError(f"node_count must be a positive integer, got {node_count!r}")


def _check_node(node: NodeId, node_count: int):
    if not isinstance(node, int) or not 0 <= node < node_count:
        raise ValidationError(f"node {node} out of range [0, {node_count})")
