"""
Maximal bisimulation on finite graphs, quotients by it and canonical minimal
representatives.

Two nodes are bisimilar when their successor sets match up to bisimilarity.
Quotienting an accessible graph by the largest bisimulation gives the unique
minimal graph for the set it presents, and a canonical renumbering of that
graph gives a byte key that is equal exactly for equal sets.

Canonical byte format (stable, used as the interning key):

    varint(node_count) varint(point)
    for each node in canonical order:
        [varint(symbol index)]      -- labelled graphs only
        varint(len(successors)) varint(successor)...

Varints are unsigned little-endian base-128 (the protobuf varint encoding).
"""

# Standard
from collections import deque
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple
import dataclasses

# First Party
import alog

# Local
from .errors import ValidationError
from .graph import (
    Apg,
    NodeId,
    NodeMap,
    disjoint_union,
    from_successors,
    reachable_restriction,
)
from .wire import decode_varint, encode_varints

log = alog.use_channel("BISIM")

## Types #######################################################################


@dataclasses.dataclass(frozen=True)
class Partition:
    """Block assignment on the nodes of a graph.

    Block ids are numbered by first occurrence in node order, so two
    partitions describe the same equivalence iff they compare equal.
    """

    block_of: Tuple[int, ...]
    block_count: int

    def __post_init__(self):
        if set(self.block_of) != set(range(self.block_count)):
            raise ValidationError(
                f"Partition blocks must cover exactly [0, {self.block_count})"
            )

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "Partition":
        """Partition nodes by equal label"""
        numbering: Dict[Hashable, int] = {}
        block_of = tuple(numbering.setdefault(label, len(numbering)) for label in labels)
        return cls(block_of=block_of, block_count=len(numbering))

    @classmethod
    def trivial(cls, node_count: int) -> "Partition":
        """All nodes in one block"""
        return cls(block_of=(0,) * node_count, block_count=1 if node_count else 0)

    @classmethod
    def discrete(cls, node_count: int) -> "Partition":
        """Every node in its own block"""
        return cls(block_of=tuple(range(node_count)), block_count=node_count)

    def blocks(self) -> List[List[NodeId]]:
        """Members of each block, in block order"""
        members = [[] for _ in range(self.block_count)]
        for node, block in enumerate(self.block_of):
            members[block].append(node)
        return members


@dataclasses.dataclass(frozen=True)
class CanonicalApg:
    """An accessible, bisimulation-minimal graph in canonical node order"""

    graph: Apg
    encoding: bytes

    @classmethod
    def from_graph(cls, graph: Apg) -> "CanonicalApg":
        return cls(
            graph=graph,
            encoding=encode_adjacency(graph.node_count, graph.point, graph.succ),
        )


## Interface ###################################################################


def naive_largest_bisimulation(g: Apg, init: Partition) -> Partition:
    """Largest bisimulation inside init, by pairwise elimination.

    Starts from the relation "same block of init" and removes every pair
    whose successor sets cannot be matched inside the relation, until
    nothing changes. Quadratic in the node count; used as an oracle.

    Args:
        g:  Apg
            The graph
        init:  Partition
            The partition to refine

    Returns:
        partition:  Partition
            The coarsest stable refinement of init
    """
    _check_partition(g, init)
    n = g.node_count
    related = [
        bytearray(
            1 if init.block_of[x] == init.block_of[y] else 0 for y in range(n)
        )
        for x in range(n)
    ]

    def matched(x: NodeId, y: NodeId) -> bool:
        rows = related
        return all(
            any(rows[a][b] for b in g.succ[y]) for a in g.succ[x]
        ) and all(any(rows[b][a] for a in g.succ[x]) for b in g.succ[y])

    changed = True
    sweeps = 0
    while changed:
        changed = False
        sweeps += 1
        for x in range(n):
            for y in range(x + 1, n):
                if related[x][y] and not matched(x, y):
                    related[x][y] = related[y][x] = 0
                    changed = True
    log.debug3("Naive bisimulation settled after %d sweeps", sweeps)
    return Partition.from_labels([related[x].index(1) for x in range(n)])


def refine_partition(g: Apg, init: Partition) -> Partition:
    """Largest bisimulation inside init, by splitter-based refinement.

    Every block is eventually used as a splitter S: each block B is split into
    the nodes with a successor in S and those without. Whenever a block
    splits, both halves are queued (smaller first) unless the block is still
    waiting in the queue, in which case only the new half is added.

    Args:
        g:  Apg
            The graph
        init:  Partition
            The partition to refine

    Returns:
        partition:  Partition
            The coarsest stable refinement of init
    """
    _check_partition(g, init)
    pred: List[List[NodeId]] = [[] for _ in range(g.node_count)]
    for source, targets in enumerate(g.succ):
        for target in targets:
            pred[target].append(source)

    block_of = list(init.block_of)
    members = [set(block) for block in init.blocks()]
    queued = [True] * len(members)
    pending = deque(sorted(range(len(members)), key=lambda b: len(members[b])))

    splitters = 0
    while pending:
        splitter = pending.popleft()
        queued[splitter] = False
        splitters += 1

        sources = {source for target in members[splitter] for source in pred[target]}
        touched: Dict[int, List[NodeId]] = {}
        for source in sources:
            touched.setdefault(block_of[source], []).append(source)

        for block, hit in touched.items():
            if len(hit) == len(members[block]):
                continue
            new_block = len(members)
            members.append(set(hit))
            members[block].difference_update(hit)
            for node in hit:
                block_of[node] = new_block
            queued.append(True)
            if queued[block]:
                pending.append(new_block)
            else:
                queued[block] = True
                smaller, larger = sorted(
                    (block, new_block), key=lambda b: len(members[b])
                )
                pending.append(smaller)
                pending.append(larger)

    log.debug2(
        "Refined %d nodes into %d blocks using %d splitters",
        g.node_count,
        len(members),
        splitters,
    )
    return Partition.from_labels(block_of)


def is_stable(g: Apg, p: Partition) -> bool:
    """True iff members of each block have equal successor block-sets"""
    _check_partition(g, p)
    return _block_successors(g, p) is not None


def quotient(g: Apg, p: Partition) -> Tuple[Apg, NodeMap]:
    """Collapse each block of a stable partition into one node

    Args:
        g:  Apg
            The graph
        p:  Partition
            A stable partition of g's nodes

    Returns:
        quotient:  Apg
            Graph on the blocks
        projection:  NodeMap
            Node -> block; a coalgebra morphism onto the quotient
    """
    _check_partition(g, p)
    block_succ = _block_successors(g, p)
    if block_succ is None:
        raise ValidationError("Cannot quotient by a partition that is not stable")
    quotient_graph = Apg(
        node_count=p.block_count,
        succ=tuple(tuple(sorted(targets)) for targets in block_succ),
        point=p.block_of[g.point],
    )
    return quotient_graph, dict(enumerate(p.block_of))


def canonical_order(g: Apg) -> NodeMap:
    """Isomorphism-invariant numbering of a bisimulation-minimal graph

    Colours start equal and are refined by the sorted multiset of successor
    colours; signatures are ranked lexicographically each round. On a minimal
    graph the colours end up pairwise distinct and become the new ids.

    Args:
        g:  Apg
            A bisimulation-minimal graph

    Returns:
        order:  NodeMap
            Node -> canonical position
    """
    colours = colour_refine([0] * g.node_count, g.succ, positional=False)
    if len(set(colours)) != g.node_count:
        raise ValidationError("Canonical order requires a bisimulation-minimal graph")
    return dict(enumerate(colours))


def minimize(g: Apg) -> Tuple[CanonicalApg, NodeMap]:
    """Canonical minimal representative of the set presented by g

    Args:
        g:  Apg
            Any valid graph

    Returns:
        canonical:  CanonicalApg
            Reachable part of g, quotiented by the largest bisimulation and
            renumbered canonically
        node_map:  NodeMap
            Reachable node of g -> canonical node
    """
    accessible, reach_map = reachable_restriction(g)
    partition = refine_partition(accessible, Partition.trivial(accessible.node_count))
    quotient_graph, projection = quotient(accessible, partition)
    order = canonical_order(quotient_graph)
    canonical_graph = _renumber(quotient_graph, order)
    log.debug3(
        "Minimized %d nodes to %d canonical nodes",
        g.node_count,
        canonical_graph.node_count,
    )
    node_map = {old: order[projection[mid]] for old, mid in reach_map.items()}
    return CanonicalApg.from_graph(canonical_graph), node_map


def canonical_encoding(c: CanonicalApg) -> bytes:
    """The interning key of a canonical graph"""
    return encode_adjacency(c.graph.node_count, c.graph.point, c.graph.succ)


def decode_canonical(data: bytes) -> Apg:
    """Parse the unlabelled canonical byte format back into a graph

    Args:
        data:  bytes
            Output of canonical_encoding

    Returns:
        graph:  Apg
            The encoded graph
    """
    try:
        node_count, pos = decode_varint(data, 0)
        point, pos = decode_varint(data, pos)
        succ = []
        for _ in range(node_count):
            length, pos = decode_varint(data, pos)
            targets = []
            for _ in range(length):
                target, pos = decode_varint(data, pos)
                targets.append(target)
            succ.append(targets)
    except Exception as err:
        raise ValidationError(f"Malformed canonical encoding: {err}") from err
    if pos != len(data):
        raise ValidationError(
            f"Malformed canonical encoding: {len(data) - pos} trailing bytes"
        )
    return from_successors(succ, point)


def bisimilar(g1: Apg, g2: Apg) -> bool:
    """True iff the two pointed graphs present the same set"""
    union, injections = disjoint_union([g1, g2])
    partition = refine_partition(union, Partition.trivial(union.node_count))
    return (
        partition.block_of[injections[0][g1.point]]
        == partition.block_of[injections[1][g2.point]]
    )


def coalgebra_pullback(
    a: Apg,
    b: Apg,
    phi: Mapping[NodeId, NodeId],
    psi: Mapping[NodeId, NodeId],
) -> Tuple[Apg, List[Tuple[NodeId, NodeId]]]:
    """Pullback of two coalgebra morphisms into a common graph.

    The carrier is {(x, y) : phi(x) = psi(y)} and (x, y) points at every pair
    (x', y') of the carrier with x' a successor of x and y' a successor of y.
    When phi and psi are coalgebra morphisms both projections are too.

    Args:
        a:  Apg
            Domain of phi
        b:  Apg
            Domain of psi
        phi:  Mapping[NodeId, NodeId]
            Morphism a -> c
        psi:  Mapping[NodeId, NodeId]
            Morphism b -> c

    Returns:
        pullback:  Apg
            Graph on the carrier, pointed at (a.point, b.point) when that pair
            is in the carrier and at the first pair otherwise
        pairs:  List[Tuple[NodeId, NodeId]]
            The carrier pair of each pullback node
    """
    by_image: Dict[NodeId, List[NodeId]] = {}
    for y in range(b.node_count):
        by_image.setdefault(psi[y], []).append(y)
    pairs = [
        (x, y) for x in range(a.node_count) for y in by_image.get(phi[x], [])
    ]
    if not pairs:
        raise ValidationError("The pullback of these morphisms is empty")
    index = {pair: i for i, pair in enumerate(pairs)}
    succ = [
        [
            index[(x2, y2)]
            for x2 in a.succ[x]
            for y2 in b.succ[y]
            if (x2, y2) in index
        ]
        for x, y in pairs
    ]
    return from_successors(succ, index.get((a.point, b.point), 0)), pairs


## Shared helpers ##############################################################


def colour_refine(
    initial: Sequence[int],
    children: Sequence[Sequence[NodeId]],
    *,
    positional: bool,
) -> List[int]:
    """Iterated colour refinement with lexicographically ranked signatures

    Args:
        initial:  Sequence[int]
            Starting colour per node
        children:  Sequence[Sequence[NodeId]]
            Neighbours per node
        positional:  bool
            If True, neighbour colours are compared in order; otherwise as a
            sorted multiset

    Returns:
        colours:  List[int]
            Stable colours, ranked from 0
    """
    n = len(children)
    pred: List[List[NodeId]] = [[] for _ in range(n)]
    for node, kids in enumerate(children):
        for kid in kids:
            pred[kid].append(node)

    # A node's colour is the first slot of its cell in the sorted node order,
    # so splitting one cell leaves every other colour unchanged
    colours = [0] * n
    cells: Dict[int, List[NodeId]] = {}
    start = 0
    ordered = sorted(range(n), key=lambda node: initial[node])
    for i, node in enumerate(ordered):
        if i and initial[node] != initial[ordered[i - 1]]:
            start = i
        colours[node] = start
        cells.setdefault(start, []).append(node)

    def signature(node: NodeId) -> Tuple[int, ...]:
        kid_colours = (colours[kid] for kid in children[node])
        return tuple(kid_colours) if positional else tuple(sorted(kid_colours))

    dirty = {start for start, members in cells.items() if len(members) > 1}
    rounds = 0
    while dirty:
        rounds += 1
        # Signatures of a round all read the colours of the previous round
        splits = []
        for start in dirty:
            members = cells[start]
            if len(members) == 1:
                continue
            keyed = sorted(
                ((signature(node), node) for node in members), key=lambda item: item[0]
            )
            if keyed[0][0] != keyed[-1][0]:
                splits.append((start, keyed))

        changed: List[NodeId] = []
        for start, keyed in splits:
            offset = start
            group: List[NodeId] = []
            for i, (key, node) in enumerate(keyed):
                if i and key != keyed[i - 1][0]:
                    cells[offset] = group
                    offset, group = start + i, []
                group.append(node)
                if colours[node] != offset:
                    colours[node] = offset
                    changed.append(node)
            cells[offset] = group
        dirty = {colours[parent] for node in changed for parent in pred[node]}

    log.debug3("Colour refinement stable after %d rounds", rounds)
    return _rank(colours)


def encode_adjacency(
    node_count: int,
    point: NodeId,
    succ: Sequence[Sequence[NodeId]],
    labels: Optional[Sequence[int]] = None,
) -> bytes:
    """Serialize a graph in the canonical byte format"""
    values = [node_count, point]
    for node, targets in enumerate(succ):
        if labels is not None:
            values.append(labels[node])
        values.append(len(targets))
        values.extend(targets)
    return encode_varints(values)


## Impl ########################################################################


def _check_partition(g: Apg, p: Partition):
    if len(p.block_of) != g.node_count:
        raise ValidationError(
            f"Partition covers {len(p.block_of)} nodes but the graph has {g.node_count}"
        )


def _block_successors(g: Apg, p: Partition) -> Optional[List[frozenset]]:
    """Successor block-set per block, or None if some block disagrees"""
    block_succ: List[Optional[frozenset]] = [None] * p.block_count
    for node, targets in enumerate(g.succ):
        block = p.block_of[node]
        signature = frozenset(p.block_of[t] for t in targets)
        if block_succ[block] is None:
            block_succ[block] = signature
        elif block_succ[block] != signature:
            log.debug2("Node %d disagrees with block %d", node, block)
            return None
    return block_succ


def _rank(values: Sequence) -> List[int]:
    ranking = {value: i for i, value in enumerate(sorted(set(values)))}
    return [ranking[value] for value in values]


def _renumber(g: Apg, order: NodeMap) -> Apg:
    succ: List[Tuple[NodeId, ...]] = [()] * g.node_count
    for node, targets in enumerate(g.succ):
        succ[order[node]] = tuple(sorted(order[t] for t in targets))
    return Apg(node_count=g.node_count, succ=tuple(succ), point=order[g.point])
